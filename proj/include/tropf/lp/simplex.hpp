#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tropf/lp/linear_program.hpp"
#include "tropf/lp/presolve.hpp"

namespace tropf::lp::detail {

/// Bounded-variable primal simplex on a dense condensed tableau.
///
/// Every row i carries a logical variable r_i = a_i . x whose bounds are the
/// row bounds, so the system is homogeneous: x_B = T x_N. Phase 1 minimizes
/// the sum of bound infeasibilities of the basic variables; phase 2 the cost.
/// Pricing is Dantzig's rule, switching to Bland's rule after
/// 3 * (rows + cols) consecutive degenerate pivots.
class TableauSimplex {
public:
    explicit TableauSimplex(const ReducedProblem& p)
        : m_(p.num_rows()), n_(p.num_cols()), tableau_(static_cast<std::size_t>(m_) * n_, 0.0) {
        const int total = m_ + n_;
        lower_.resize(total);
        upper_.resize(total);
        cost_.assign(total, 0.0);
        x_.assign(total, 0.0);
        names_.resize(total);
        for (int j = 0; j < n_; ++j) {
            lower_[j] = p.col_lower[j];
            upper_[j] = p.col_upper[j];
            cost_[j] = p.col_cost[j];
            names_[j] = "column " + std::to_string(p.col_origin[j]);
        }
        for (int i = 0; i < m_; ++i) {
            lower_[n_ + i] = p.row_lower[i];
            upper_[n_ + i] = p.row_upper[i];
            names_[n_ + i] = p.row_name[i];
            for (const auto& [k, a] : p.rows[i]) at(i, k) = a;
        }
        basic_.resize(m_);
        nonbasic_.resize(n_);
        column_.resize(m_);
        for (int i = 0; i < m_; ++i) basic_[i] = n_ + i;
        for (int j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            x_[j] = initial_value(j);
        }
        refresh_basics();
    }

    int num_cols() const { return n_; }
    long iterations() const { return iterations_; }
    double value(int col) const { return x_[col]; }
    double lower(int col) const { return lower_[col]; }
    double upper(int col) const { return upper_[col]; }

    std::vector<double> column_values() const { return {x_.begin(), x_.begin() + n_}; }

    double objective() const {
        double z = 0.0;
        for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
        return z;
    }

    /// Changes a structural column's box; the next solve() restarts from the current basis.
    void set_column_bounds(int col, double lo, double hi) {
        lower_[col] = lo;
        upper_[col] = hi;
        if (is_nonbasic(col)) {
            x_[col] = std::clamp(x_[col], lo, hi);
            dirty_ = true;
        }
    }

    Status solve() {
        if (dirty_) refresh_basics();
        const long degenerate_limit = 3L * (m_ + n_);
        const long max_iterations = 200L * (m_ + n_) + 10000;
        long degenerate_run = 0;
        std::vector<double> basic_cost(m_), reduced(n_);
        for (long iter = 0;; ++iter) {
            if (iter > max_iterations)
                throw NumericalError("simplex iteration limit exceeded");
            if (iter % 64 == 63) refresh_basics();

            bool phase1 = false;
            for (int i = 0; i < m_; ++i) {
                const int v = basic_[i];
                if (x_[v] < lower_[v] - kPrimalTol) {
                    basic_cost[i] = -1.0;
                    phase1 = true;
                } else if (x_[v] > upper_[v] + kPrimalTol) {
                    basic_cost[i] = 1.0;
                    phase1 = true;
                } else {
                    basic_cost[i] = 0.0;
                }
            }
            if (!phase1)
                for (int i = 0; i < m_; ++i) basic_cost[i] = cost_[basic_[i]];

            for (int j = 0; j < n_; ++j) reduced[j] = phase1 ? 0.0 : cost_[nonbasic_[j]];
            for (int i = 0; i < m_; ++i) {
                const double g = basic_cost[i];
                if (g == 0.0) continue;
                const double* row = &tableau_[static_cast<std::size_t>(i) * n_];
                for (int j = 0; j < n_; ++j) reduced[j] += g * row[j];
            }

            const bool bland = degenerate_run > degenerate_limit;
            int enter = -1, dir = 0;
            double best = 0.0;
            for (int j = 0; j < n_; ++j) {
                const int v = nonbasic_[j];
                if (lower_[v] == upper_[v]) continue;
                int d = 0;
                if (reduced[j] < -kDualTol && x_[v] < upper_[v]) d = 1;
                else if (reduced[j] > kDualTol && x_[v] > lower_[v]) d = -1;
                if (d == 0) continue;
                if (bland) {
                    if (enter < 0 || v < nonbasic_[enter]) { enter = j; dir = d; }
                } else if (std::abs(reduced[j]) > best) {
                    best = std::abs(reduced[j]);
                    enter = j;
                    dir = d;
                }
            }
            if (enter < 0) {
                refresh_basics();
                const bool infeasible = max_infeasibility() > kPrimalTol;
                if (phase1 && infeasible) return Status::infeasible;
                if (!infeasible) {
                    if (!phase1) return Status::optimal;
                    continue;
                }
                if (++drift_restarts_ > 100) throw NumericalError("simplex lost primal feasibility repeatedly");
                continue;
            }

            // Ratio test (two-pass, bounds relaxed by the primal tolerance in pass one).
            const int ev = nonbasic_[enter];
            for (int i = 0; i < m_; ++i) column_[i] = at(i, enter);
            double theta_max = dir > 0 ? upper_[ev] - x_[ev] : x_[ev] - lower_[ev];
            double relaxed_max = theta_max;
            for (int i = 0; i < m_; ++i) {
                const double alpha = dir * column_[i];
                if (std::abs(alpha) < kZero) continue;
                const double limit = step_limit(i, alpha, kPrimalTol);
                relaxed_max = std::min(relaxed_max, limit);
            }
            int leave = -1;
            double theta = theta_max;
            if (relaxed_max < theta_max) {
                double best_alpha = 0.0;
                for (int i = 0; i < m_; ++i) {
                    const double alpha = dir * column_[i];
                    if (std::abs(alpha) < kZero) continue;
                    const double exact = step_limit(i, alpha, 0.0);
                    if (exact > relaxed_max) continue;
                    const bool better = bland ? (leave < 0 || exact < theta ||
                                                 (exact == theta && basic_[i] < basic_[leave]))
                                              : std::abs(alpha) > best_alpha;
                    if (better) {
                        leave = i;
                        best_alpha = std::abs(alpha);
                        theta = exact;
                    }
                }
                theta = std::max(theta, 0.0);
            }
            if (leave < 0 && !std::isfinite(theta)) {
                if (phase1) throw NumericalError("phase-1 ray without blocking row");
                return Status::unbounded;
            }

            degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
            ++iterations_;
            // Bound the leaving variable lands on, decided before the step.
            const double target = leave < 0 ? 0.0 : leaving_bound(basic_[leave], dir * column_[leave]);
            x_[ev] += dir * theta;
            for (int i = 0; i < m_; ++i) {
                const double t = column_[i];
                if (t != 0.0) x_[basic_[i]] += t * dir * theta;
            }
            if (leave < 0) {
                x_[ev] = dir > 0 ? upper_[ev] : lower_[ev];
                continue;
            }
            const int lv = basic_[leave];
            if (std::abs(column_[leave]) < Tolerances::pivot)
                throw NumericalError("pivot below 1e-10 on '" + names_[lv] + "'");
            x_[lv] = target;
            pivot(leave, enter);
        }
    }

private:
    static constexpr double kPrimalTol = 1e-9;
    static constexpr double kDualTol = 1e-9;
    static constexpr double kZero = 1e-9;  // tableau entries below this never block

    double& at(int i, int j) { return tableau_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return tableau_[static_cast<std::size_t>(i) * n_ + j]; }

    // Nonbasic columns start at zero when their box allows it, otherwise at
    // the nearer bound. A column resting strictly inside its box may move
    // either way when priced.
    double initial_value(int v) const { return std::clamp(0.0, lower_[v], upper_[v]); }

    bool is_nonbasic(int v) const {
        return std::find(nonbasic_.begin(), nonbasic_.end(), v) != nonbasic_.end();
    }

    void refresh_basics() {
        for (int i = 0; i < m_; ++i) {
            const double* row = &tableau_[static_cast<std::size_t>(i) * n_];
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += row[j] * x_[nonbasic_[j]];
            x_[basic_[i]] = s;
        }
        dirty_ = false;
    }

    double max_infeasibility() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int v = basic_[i];
            worst = std::max({worst, lower_[v] - x_[v], x_[v] - upper_[v]});
        }
        return worst;
    }

    // Step after which basic row i blocks, given its rate of change alpha.
    double step_limit(int i, double alpha, double tol) const {
        const int v = basic_[i];
        const double x = x_[v];
        if (x < lower_[v] - kPrimalTol) {  // infeasible below: blocks on reaching lower
            return alpha > 0 ? (lower_[v] - x) / alpha : kInf;
        }
        if (x > upper_[v] + kPrimalTol) {
            return alpha < 0 ? (upper_[v] - x) / alpha : kInf;
        }
        if (alpha > 0) return std::isfinite(upper_[v]) ? std::max(0.0, upper_[v] + tol - x) / alpha : kInf;
        return std::isfinite(lower_[v]) ? std::max(0.0, x - lower_[v] + tol) / -alpha : kInf;
    }

    double leaving_bound(int v, double alpha) const {
        const double x = x_[v];
        if (x < lower_[v] - kPrimalTol && alpha > 0) return lower_[v];
        if (x > upper_[v] + kPrimalTol && alpha < 0) return upper_[v];
        if (alpha > 0) return std::isfinite(upper_[v]) ? upper_[v] : x;
        return std::isfinite(lower_[v]) ? lower_[v] : x;
    }

    void pivot(int r, int c) {
        double* prow = &tableau_[static_cast<std::size_t>(r) * n_];
        const double p = prow[c];
        std::vector<int> nz;
        nz.reserve(n_);
        for (int j = 0; j < n_; ++j) {
            if (j == c) continue;
            if (prow[j] != 0.0) {
                prow[j] = -prow[j] / p;
                nz.push_back(j);
            }
        }
        prow[c] = 1.0 / p;
        // column_ holds the entering column as it was before this pivot.
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = column_[i];
            if (f == 0.0) continue;
            double* row = &tableau_[static_cast<std::size_t>(i) * n_];
            for (int j : nz) row[j] += f * prow[j];
            row[c] = f * prow[c];
        }
        std::swap(basic_[r], nonbasic_[c]);
    }

    int m_, n_;
    std::vector<double> tableau_;
    std::vector<double> lower_, upper_, cost_, x_;
    std::vector<double> column_;  // entering column, refreshed every iteration
    std::vector<std::string> names_;
    std::vector<int> basic_, nonbasic_;
    long iterations_ = 0;
    bool dirty_ = false;
    int drift_restarts_ = 0;
};

}  // namespace tropf::lp::detail
