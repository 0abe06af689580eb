#pragma once

#include "uspt/io.hpp"
#include "uspt/lstree.hpp"
#include "uspt/miner.hpp"
#include "uspt/model.hpp"
#include "uspt/oracle.hpp"
#include "uspt/sysinfo.hpp"
#include "uspt/utility_array.hpp"
