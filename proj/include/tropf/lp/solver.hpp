#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tropf/lp/linear_program.hpp"
#include "tropf/lp/presolve.hpp"
#include "tropf/lp/simplex.hpp"

namespace tropf::lp {

struct MilpOptions {
    long node_limit = 200000;
    /// Optional rounding heuristic, called once with the root relaxation (in
    /// original variable order). It returns a vector of the same length whose
    /// binary entries are a proposed 0/1 assignment; the solver pins those
    /// binaries, re-solves, and keeps the result as a starting incumbent if it
    /// is feasible. Other entries are ignored.
    std::function<std::vector<double>(const std::vector<double>&)> rounding;
};

/// Thrown when branch-and-bound exhausts its node budget. Carries the best
/// integral solution found so far, if any.
class NodeLimitError : public std::runtime_error {
public:
    NodeLimitError(std::string what, std::optional<LpSolution> incumbent)
        : std::runtime_error(std::move(what)), incumbent_(std::move(incumbent)) {}
    const std::optional<LpSolution>& incumbent() const { return incumbent_; }

private:
    std::optional<LpSolution> incumbent_;
};

namespace detail {

inline LpSolution finish(const LinearProgram& lp, const Presolver& pre, const TableauSimplex& s, long nodes) {
    LpSolution sol;
    sol.status = Status::optimal;
    sol.values = pre.postsolve(s.column_values());
    // Recovered values carry rounding noise; values a hair from a bound are
    // put on it so that, e.g., an untouched variable reads exactly zero.
    for (int j = 0; j < lp.num_variables(); ++j) {
        const auto& v = lp.variable(j);
        double& x = sol.values[static_cast<std::size_t>(j)];
        if (std::abs(x - v.lower) <= 1e-11) x = v.lower;
        if (std::abs(x - v.upper) <= 1e-11) x = v.upper;
    }
    sol.objective_value = lp.evaluate_objective(sol.values);
    sol.iterations = s.iterations();
    sol.nodes = nodes;
    return sol;
}

}  // namespace detail

/// Solves a continuous LP. Infeasible and unbounded outcomes are statuses,
/// not exceptions; NumericalError signals a breakdown.
inline LpSolution solve_lp(const LinearProgram& lp) {
    lp.validate();
    if (lp.has_binaries())
        throw std::invalid_argument("solve_lp: program has binary variables; use solve_milp or relax()");
    detail::Presolver pre(lp);
    if (pre.reduced().infeasible) return {Status::infeasible, {}, 0.0, 0, 0};
    detail::TableauSimplex simplex(pre.reduced());
    Status st = simplex.solve();
    if (st != Status::optimal) return {st, {}, 0.0, simplex.iterations(), 0};
    return detail::finish(lp, pre, simplex, 0);
}

/// Depth-first branch-and-bound over the binary variables, branching on the
/// most fractional binary. Each node re-solves from the basis left by the
/// previous node.
inline LpSolution solve_milp(const LinearProgram& lp, const MilpOptions& options = {}) {
    lp.validate();
    if (!lp.has_binaries()) return solve_lp(lp);

    detail::Presolver pre(lp);
    const auto& red = pre.reduced();
    if (red.infeasible) return {Status::infeasible, {}, 0.0, 0, 0};
    detail::TableauSimplex simplex(red);

    std::vector<int> binaries;
    std::vector<std::pair<double, double>> root_box;
    for (int c = 0; c < red.num_cols(); ++c) {
        if (!red.col_binary[c]) continue;
        binaries.push_back(c);
        // Presolve may have tightened a binary's box; keep it integral.
        root_box.emplace_back(std::ceil(red.col_lower[c] - Tolerances::integrality),
                              std::floor(red.col_upper[c] + Tolerances::integrality));
    }
    const std::size_t nb = binaries.size();

    struct Node {
        std::vector<signed char> fix;  // -1 free, 0 or 1 fixed
        double parent_bound = -kInf;
    };
    // Open nodes. The search dives through the up child of each branched node
    // and, when a dive ends, resumes from the open node with the best bound.
    std::vector<Node> open;
    std::optional<Node> dive = Node{std::vector<signed char>(nb, -1), -kInf};
    auto next_node = [&]() -> std::optional<Node> {
        if (dive) {
            std::optional<Node> n = std::move(dive);
            dive.reset();
            return n;
        }
        if (open.empty()) return std::nullopt;
        std::size_t best = open.size() - 1;
        for (std::size_t i = open.size(); i-- > 0;)
            if (open[i].parent_bound < open[best].parent_bound) best = i;
        Node n = std::move(open[best]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));
        return n;
    };

    std::optional<LpSolution> incumbent;
    double incumbent_obj = kInf;  // in reduced minimization form
    long nodes = 0;
    bool unbounded_root = false;

    auto apply = [&](const Node& node) -> bool {
        for (std::size_t b = 0; b < nb; ++b) {
            double lo = root_box[b].first, hi = root_box[b].second;
            if (node.fix[b] >= 0) {
                const double v = node.fix[b];
                if (v < lo || v > hi) return false;
                lo = hi = v;
            }
            if (lo > hi) return false;
            simplex.set_column_bounds(binaries[b], lo, hi);
        }
        return true;
    };

    while (auto picked = next_node()) {
        Node node = std::move(*picked);
        if (node.parent_bound >= incumbent_obj - Tolerances::gap) continue;
        if (++nodes > options.node_limit) {
            throw NodeLimitError("branch-and-bound node limit exceeded", incumbent);
        }
        if (!apply(node)) continue;
        const Status st = simplex.solve();
        if (st == Status::infeasible) continue;
        if (st == Status::unbounded) {
            if (nodes == 1) {
                unbounded_root = true;
                break;
            }
            continue;
        }
        const double bound = simplex.objective();
        if (bound >= incumbent_obj - Tolerances::gap) continue;

        int branch = -1;
        double best_frac = Tolerances::integrality;
        for (std::size_t b = 0; b < nb; ++b) {
            const double v = simplex.value(binaries[b]);
            const double frac = std::abs(v - std::round(v));
            if (frac > best_frac) {
                best_frac = frac;
                branch = static_cast<int>(b);
            }
        }
        if (branch < 0) {
            // Integral: pin binaries exactly and polish before accepting.
            Node exact = node;
            for (std::size_t b = 0; b < nb; ++b)
                exact.fix[b] = static_cast<signed char>(std::lround(simplex.value(binaries[b])));
            if (!apply(exact) || simplex.solve() != Status::optimal) continue;
            const double z = simplex.objective();
            if (z < incumbent_obj) {
                incumbent_obj = z;
                incumbent = detail::finish(lp, pre, simplex, nodes);
            }
            continue;
        }
        if (nodes == 1 && options.rounding) {
            const auto relaxed = pre.postsolve(simplex.column_values());
            const auto proposal = options.rounding(relaxed);
            if (proposal.size() != relaxed.size())
                throw std::invalid_argument("rounding heuristic returned a vector of the wrong length");
            Node guess = node;
            for (std::size_t b = 0; b < nb; ++b)
                guess.fix[b] = proposal[static_cast<std::size_t>(red.col_origin[binaries[b]])] > 0.5 ? 1 : 0;
            if (apply(guess) && simplex.solve() == Status::optimal && simplex.objective() < incumbent_obj) {
                incumbent_obj = simplex.objective();
                incumbent = detail::finish(lp, pre, simplex, nodes);
                if (bound >= incumbent_obj - Tolerances::gap) continue;
            }
        }
        Node down = node, up = node;
        down.fix[static_cast<std::size_t>(branch)] = 0;
        up.fix[static_cast<std::size_t>(branch)] = 1;
        down.parent_bound = up.parent_bound = bound;
        // The up child continues the dive: for on/off indicator binaries it
        // usually keeps the relaxed optimum feasible.
        open.push_back(std::move(down));
        dive = std::move(up);
    }

    if (unbounded_root) return {Status::unbounded, {}, 0.0, simplex.iterations(), nodes};
    if (!incumbent) return {Status::infeasible, {}, 0.0, simplex.iterations(), nodes};
    long iterations = simplex.iterations();

    // Re-solve once from scratch with the binaries fixed. Presolve then folds
    // rows gated by a zero indicator into column bounds, so gated variables
    // come out exactly at their bound instead of carrying tableau noise.
    LinearProgram fixed = relax(lp);
    for (int j = 0; j < lp.num_variables(); ++j)
        if (lp.variable(j).is_binary) {
            const double v = std::round(incumbent->values[static_cast<std::size_t>(j)]);
            fixed.set_bounds(j, v, v);
        }
    LpSolution clean = solve_lp(fixed);
    const double sign = lp.sense() == Sense::maximize ? -1.0 : 1.0;
    if (clean.optimal() && sign * clean.objective_value <= sign * incumbent->objective_value + Tolerances::gap) {
        iterations += clean.iterations;
        incumbent = std::move(clean);
    }
    incumbent->nodes = nodes;
    incumbent->iterations = iterations;
    return *incumbent;
}

}  // namespace tropf::lp
