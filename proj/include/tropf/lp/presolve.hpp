#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tropf/lp/linear_program.hpp"

namespace tropf::lp::detail {

using SparseRow = std::vector<std::pair<int, double>>;  // sorted by column

/// Problem left after presolve, always in minimization form.
struct ReducedProblem {
    std::vector<double> col_lower, col_upper, col_cost;
    std::vector<char> col_binary;
    std::vector<int> col_origin;  // index into the original LinearProgram
    std::vector<SparseRow> rows;
    std::vector<double> row_lower, row_upper;
    std::vector<std::string> row_name;
    double cost_offset = 0.0;
    bool infeasible = false;
    std::string infeasible_reason;

    int num_cols() const { return static_cast<int>(col_cost.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

/// Removes fixed columns and eliminates equality rows by sparse substitution
/// (Markowitz pivot order), keeping the bounds of every eliminated column as a
/// new inequality row. Binary columns are never eliminated.
class Presolver {
public:
    explicit Presolver(const LinearProgram& lp) : num_orig_(lp.num_variables()) {
        const double sign = lp.sense() == Sense::maximize ? -1.0 : 1.0;
        lower_.resize(num_orig_);
        upper_.resize(num_orig_);
        cost_.resize(num_orig_);
        binary_.resize(num_orig_);
        state_.assign(num_orig_, ColState::active);
        fixed_value_.assign(num_orig_, 0.0);
        col_rows_.resize(num_orig_);
        for (int j = 0; j < num_orig_; ++j) {
            const auto& v = lp.variable(j);
            lower_[j] = v.lower;
            upper_[j] = v.upper;
            binary_[j] = v.is_binary;
            cost_[j] = sign * lp.objective()[static_cast<std::size_t>(j)];
        }
        offset_ = sign * lp.objective_offset();
        for (const auto& c : lp.constraints()) {
            Row r;
            r.name = c.name;
            for (const Term& t : c.terms) r.entries.emplace_back(t.var, t.coef);
            r.lower = c.relation == Relation::less_equal ? -kInf : c.rhs;
            r.upper = c.relation == Relation::greater_equal ? kInf : c.rhs;
            add_row(std::move(r));
        }
        run();
    }

    const ReducedProblem& reduced() const { return reduced_; }

    /// Maps reduced column values back onto every original variable.
    std::vector<double> postsolve(std::span<const double> reduced_values) const {
        std::vector<double> x(static_cast<std::size_t>(num_orig_), 0.0);
        for (int c = 0; c < reduced_.num_cols(); ++c) x[reduced_.col_origin[c]] = reduced_values[c];
        for (int j = 0; j < num_orig_; ++j)
            if (state_[j] == ColState::fixed) x[j] = fixed_value_[j];
        for (auto it = eliminated_.rbegin(); it != eliminated_.rend(); ++it) {
            double v = it->constant;
            for (const auto& [k, a] : it->terms) v += a * x[k];
            x[it->col] = v;
        }
        return x;
    }

private:
    enum class ColState { active, fixed, eliminated };

    struct Row {
        std::string name;
        SparseRow entries;
        double lower = -kInf, upper = kInf;
        bool alive = true;
    };

    struct Substitution {
        int col;
        double constant;
        SparseRow terms;
    };

    static constexpr double kDropTol = 1e-13;
    static constexpr double kFeasTol = 1e-9;
    static constexpr double kPivotRatio = 0.01;

    int add_row(Row r) {
        int id = static_cast<int>(rows_.size());
        for (const auto& [k, a] : r.entries) col_rows_[k].insert(id);
        rows_.push_back(std::move(r));
        return id;
    }

    void kill_row(int id) {
        auto& r = rows_[id];
        for (const auto& [k, a] : r.entries) col_rows_[k].erase(id);
        r.entries.clear();
        r.alive = false;
    }

    void mark_infeasible(const std::string& why) {
        if (!reduced_.infeasible) {
            reduced_.infeasible = true;
            reduced_.infeasible_reason = why;
        }
    }

    static double coef_of(const SparseRow& row, int col) {
        auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const auto& e, int c) { return e.first < c; });
        return (it != row.end() && it->first == col) ? it->second : 0.0;
    }

    // target += factor * source, with `skip` forced out of the result.
    void axpy_row(int target, const SparseRow& source, double factor, int skip) {
        auto& t = rows_[target].entries;
        SparseRow out;
        out.reserve(t.size() + source.size());
        std::size_t a = 0, b = 0;
        while (a < t.size() || b < source.size()) {
            int ca = a < t.size() ? t[a].first : std::numeric_limits<int>::max();
            int cb = b < source.size() ? source[b].first : std::numeric_limits<int>::max();
            int col;
            double v;
            if (ca == cb) {
                col = ca;
                v = t[a++].second + factor * source[b++].second;
            } else if (ca < cb) {
                col = ca;
                v = t[a++].second;
            } else {
                col = cb;
                v = factor * source[b++].second;
                col_rows_[col].insert(target);
            }
            if (col == skip || std::abs(v) < kDropTol) {
                col_rows_[col].erase(target);
                continue;
            }
            out.emplace_back(col, v);
        }
        t = std::move(out);
    }

    void fix_column(int j, double value) {
        std::vector<int> touched(col_rows_[j].begin(), col_rows_[j].end());
        for (int r : touched) {
            auto& row = rows_[r];
            double a = coef_of(row.entries, j);
            row.lower -= a * value;
            row.upper -= a * value;
            std::erase_if(row.entries, [j](const auto& e) { return e.first == j; });
        }
        col_rows_[j].clear();
        offset_ += cost_[j] * value;
        cost_[j] = 0.0;
        state_[j] = ColState::fixed;
        fixed_value_[j] = value;
    }

    bool bounded(int j) const { return std::isfinite(lower_[j]) || std::isfinite(upper_[j]); }

    bool check_empty_row(const Row& r) {
        if (r.lower > kFeasTol || r.upper < -kFeasTol) {
            mark_infeasible("constraint '" + r.name + "' cannot be satisfied");
            return false;
        }
        return true;
    }

    void eliminate(int row_id, int col) {
        SparseRow pivot_row = rows_[row_id].entries;
        const double b = rows_[row_id].lower;
        const double a = coef_of(pivot_row, col);
        const std::string row_name = rows_[row_id].name;
        kill_row(row_id);

        Substitution sub{col, b / a, {}};
        for (const auto& [k, v] : pivot_row)
            if (k != col) sub.terms.emplace_back(k, -v / a);

        std::vector<int> touched(col_rows_[col].begin(), col_rows_[col].end());
        for (int r : touched) {
            double c = coef_of(rows_[r].entries, col);
            double f = -c / a;
            axpy_row(r, pivot_row, f, col);
            rows_[r].lower += f * b;
            rows_[r].upper += f * b;
        }
        col_rows_[col].clear();

        if (cost_[col] != 0.0) {
            double f = -cost_[col] / a;
            for (const auto& [k, v] : pivot_row)
                if (k != col) cost_[k] += f * v;
            offset_ += cost_[col] * b / a;
            cost_[col] = 0.0;
        }

        if (bounded(col)) {
            Row br;
            br.name = "bound(" + row_name + ")";
            br.entries = sub.terms;
            br.lower = lower_[col] - sub.constant;
            br.upper = upper_[col] - sub.constant;
            if (br.entries.empty())
                check_empty_row(br);
            else
                add_row(std::move(br));
        }
        state_[col] = ColState::eliminated;
        eliminated_.push_back(std::move(sub));
    }

    // Cheapest (row, col) equality pivot, or {-1,-1}.
    std::pair<int, int> choose_pivot() {
        long best_cost = std::numeric_limits<long>::max();
        std::pair<int, int> best{-1, -1};
        for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
            auto& row = rows_[r];
            if (!row.alive || row.lower != row.upper) continue;
            if (row.entries.empty()) {
                check_empty_row(row);
                kill_row(r);
                continue;
            }
            double maxabs = 0.0;
            for (const auto& e : row.entries) maxabs = std::max(maxabs, std::abs(e.second));
            const long rn = static_cast<long>(row.entries.size()) - 1;
            for (const auto& [k, v] : row.entries) {
                if (binary_[k] || std::abs(v) < kPivotRatio * maxabs) continue;
                long cn = static_cast<long>(col_rows_[k].size()) - 1;
                long cost = rn * cn + (bounded(k) ? rn : 0);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = {r, k};
                }
            }
            if (best_cost == 0) break;
        }
        return best;
    }

    // Singleton rows on continuous columns become bounds; a column whose box
    // closes is fixed, which can expose further singletons.
    void fold_singletons() {
        for (bool changed = true; changed && !reduced_.infeasible;) {
            changed = false;
            for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
                auto& row = rows_[r];
                if (!row.alive || row.entries.size() != 1 || binary_[row.entries[0].first]) continue;
                auto [k, a] = row.entries[0];
                double lo = row.lower / a, hi = row.upper / a;
                if (a < 0) std::swap(lo, hi);
                lower_[k] = std::max(lower_[k], lo);
                upper_[k] = std::min(upper_[k], hi);
                kill_row(r);
                if (lower_[k] > upper_[k] + kFeasTol) {
                    mark_infeasible("bounds of column in '" + row.name + "' conflict");
                    return;
                }
                if (upper_[k] - lower_[k] <= kDropTol) fix_column(k, lower_[k]);
                changed = true;
            }
        }
    }

    void run() {
        for (int j = 0; j < num_orig_; ++j)
            if (lower_[j] == upper_[j]) fix_column(j, lower_[j]);
        fold_singletons();

        while (!reduced_.infeasible) {
            auto [r, c] = choose_pivot();
            if (r < 0) break;
            eliminate(r, c);
        }

        // Singleton rows on continuous columns become column bounds.
        for (auto& row : rows_) {
            if (!row.alive) continue;
            if (row.entries.empty()) {
                check_empty_row(row);
                row.alive = false;
                continue;
            }
            if (!std::isfinite(row.lower) && !std::isfinite(row.upper)) {
                row.alive = false;
                continue;
            }
            if (row.entries.size() == 1 && !binary_[row.entries[0].first]) {
                auto [k, a] = row.entries[0];
                double lo = row.lower / a, hi = row.upper / a;
                if (a < 0) std::swap(lo, hi);
                lower_[k] = std::max(lower_[k], lo);
                upper_[k] = std::min(upper_[k], hi);
                if (lower_[k] > upper_[k]) {
                    if (lower_[k] - upper_[k] > kFeasTol)
                        mark_infeasible("bounds of column in '" + row.name + "' conflict");
                    upper_[k] = lower_[k];
                }
                col_rows_[k].erase(static_cast<int>(&row - rows_.data()));
                row.alive = false;
            }
        }
        for (int j = 0; j < num_orig_; ++j)
            if (state_[j] == ColState::active && lower_[j] > upper_[j] + kFeasTol)
                mark_infeasible("column bounds conflict");

        std::vector<int> map(static_cast<std::size_t>(num_orig_), -1);
        for (int j = 0; j < num_orig_; ++j) {
            if (state_[j] != ColState::active) continue;
            map[j] = reduced_.num_cols();
            reduced_.col_origin.push_back(j);
            reduced_.col_lower.push_back(lower_[j]);
            reduced_.col_upper.push_back(std::max(lower_[j], upper_[j]));
            reduced_.col_cost.push_back(cost_[j]);
            reduced_.col_binary.push_back(binary_[j]);
        }
        for (const auto& row : rows_) {
            if (!row.alive) continue;
            SparseRow mapped;
            for (const auto& [k, a] : row.entries) mapped.emplace_back(map[k], a);
            reduced_.rows.push_back(std::move(mapped));
            reduced_.row_lower.push_back(row.lower);
            reduced_.row_upper.push_back(row.upper);
            reduced_.row_name.push_back(row.name);
        }
        reduced_.cost_offset = offset_;
    }

    int num_orig_;
    std::vector<double> lower_, upper_, cost_, fixed_value_;
    std::vector<char> binary_;
    std::vector<ColState> state_;
    std::vector<Row> rows_;
    std::vector<std::set<int>> col_rows_;
    std::vector<Substitution> eliminated_;
    double offset_ = 0.0;
    ReducedProblem reduced_;
};

}  // namespace tropf::lp::detail
