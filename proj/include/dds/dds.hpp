#pragma once

// Umbrella header.

#include "dds/cat.hpp"
#include "dds/codegen.hpp"
#include "dds/commands.hpp"
#include "dds/config.hpp"
#include "dds/csv.hpp"
#include "dds/forest.hpp"
#include "dds/gpr.hpp"
#include "dds/metrics.hpp"
#include "dds/model.hpp"
#include "dds/random.hpp"
#include "dds/synthetic.hpp"
#include "dds/trace.hpp"
