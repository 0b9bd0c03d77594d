#pragma once

#include "tropf/netmodel.hpp"
#include "tropf/lp/solver.hpp"
#include "tropf/lp/lp_dump.hpp"
#include "tropf/stage1.hpp"
#include "tropf/stage2.hpp"
#include "tropf/stage3.hpp"
#include "tropf/orchestrator.hpp"
#include "tropf/io/case_file.hpp"
#include "tropf/io/results.hpp"
#include "tropf/io/plots.hpp"
