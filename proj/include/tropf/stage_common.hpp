#pragma once

#include <stdexcept>
#include <string>

#include "tropf/lp/linear_program.hpp"

namespace tropf {

/// A stage model had no optimal solution. `stage` is 1, 2 or 3.
class StageInfeasible : public std::runtime_error {
public:
    StageInfeasible(int stage, lp::Status status, const std::string& detail = {})
        : std::runtime_error("stage" + std::to_string(stage) + " " + lp::to_string(status) +
                             (detail.empty() ? "" : ": " + detail)),
          stage_(stage),
          status_(status) {}

    int stage() const { return stage_; }
    lp::Status status() const { return status_; }

private:
    int stage_;
    lp::Status status_;
};

/// Multipliers on the cost term and the two margin terms of the Stage 2 and
/// Stage 3 objectives. All ones reproduces the unweighted sum.
struct TermWeights {
    double cost = 1.0;
    double line = 1.0;
    double node = 1.0;
};

}  // namespace tropf
