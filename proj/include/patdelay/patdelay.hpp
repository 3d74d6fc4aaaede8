#pragma once

#include "patdelay/error.hpp"
#include "patdelay/geometry.hpp"
#include "patdelay/terminal.hpp"
#include "patdelay/pointing.hpp"
#include "patdelay/acquisition.hpp"
#include "patdelay/tracking.hpp"
#include "patdelay/scenario.hpp"
#include "patdelay/stats.hpp"
#include "patdelay/sweep.hpp"
#include "patdelay/config.hpp"
#include "patdelay/cli_io.hpp"
