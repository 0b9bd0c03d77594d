#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tropf::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Solver tolerances shared by every model built on top of lpcore.
struct Tolerances {
    static constexpr double feasibility = 1e-7;
    static constexpr double integrality = 1e-6;
    static constexpr double gap = 1e-6;
    static constexpr double pivot = 1e-10;
};

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
    }
    return "?";
}

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool is_binary = false;
};

struct Term {
    int var;
    double coef;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;  // sorted by var, no duplicates
    Relation relation;
    double rhs;
};

/// Raised when the simplex meets a pivot too small to trust.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sparse linear (or mixed-binary) program. Immutable once handed to a solver.
class LinearProgram {
public:
    int add_variable(std::string name, double lower, double upper, double objective = 0.0) {
        if (std::isnan(lower) || std::isnan(upper) || lower > upper)
            throw std::invalid_argument("variable '" + name + "': lower bound exceeds upper bound");
        vars_.push_back({std::move(name), lower, upper, false});
        objective_.push_back(objective);
        return static_cast<int>(vars_.size()) - 1;
    }

    int add_binary(std::string name, double objective = 0.0) {
        int id = add_variable(std::move(name), 0.0, 1.0, objective);
        vars_.back().is_binary = true;
        return id;
    }

    void set_objective(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }
    void add_objective(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) += coef; }
    void set_objective_offset(double c) { offset_ = c; }
    void set_sense(Sense s) { sense_ = s; }

    /// Duplicate variable references are merged by summing coefficients.
    int add_constraint(std::string name, std::vector<Term> terms, Relation rel, double rhs) {
        for (const Term& t : terms) {
            if (t.var < 0 || t.var >= num_variables())
                throw std::invalid_argument("constraint '" + name + "' references an undeclared variable");
            if (!std::isfinite(t.coef))
                throw std::invalid_argument("constraint '" + name + "' has a non-finite coefficient");
        }
        if (!std::isfinite(rhs)) throw std::invalid_argument("constraint '" + name + "' has a non-finite rhs");
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
        std::vector<Term> merged;
        for (const Term& t : terms) {
            if (!merged.empty() && merged.back().var == t.var)
                merged.back().coef += t.coef;
            else
                merged.push_back(t);
        }
        std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
        cons_.push_back({std::move(name), std::move(merged), rel, rhs});
        return static_cast<int>(cons_.size()) - 1;
    }

    void set_bounds(int var, double lower, double upper) {
        auto& v = vars_.at(static_cast<std::size_t>(var));
        if (lower > upper) throw std::invalid_argument("variable '" + v.name + "': lower bound exceeds upper bound");
        v.lower = lower;
        v.upper = upper;
    }

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(cons_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
    const std::vector<Constraint>& constraints() const { return cons_; }
    const std::vector<double>& objective() const { return objective_; }
    double objective_offset() const { return offset_; }
    Sense sense() const { return sense_; }

    bool has_binaries() const {
        return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.is_binary; });
    }

    /// Throws std::invalid_argument on the first violated structural invariant.
    void validate() const {
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            const auto& v = vars_[j];
            if (v.lower > v.upper) throw std::invalid_argument("variable '" + v.name + "' has lower > upper");
            if (v.is_binary && (v.lower < 0.0 || v.upper > 1.0))
                throw std::invalid_argument("binary variable '" + v.name + "' has bounds outside [0,1]");
            if (!std::isfinite(objective_[j]))
                throw std::invalid_argument("variable '" + v.name + "' has a non-finite objective coefficient");
        }
    }

    double evaluate_objective(std::span<const double> x) const {
        double z = offset_;
        for (std::size_t j = 0; j < objective_.size(); ++j) z += objective_[j] * x[j];
        return z;
    }

    double activity(const Constraint& c, std::span<const double> x) const {
        double a = 0.0;
        for (const Term& t : c.terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
        return a;
    }

    /// Largest bound or constraint violation of `x` (0 when feasible).
    double max_violation(std::span<const double> x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            worst = std::max(worst, vars_[j].lower - x[j]);
            worst = std::max(worst, x[j] - vars_[j].upper);
        }
        for (const auto& c : cons_) {
            double a = activity(c, x);
            switch (c.relation) {
                case Relation::less_equal: worst = std::max(worst, a - c.rhs); break;
                case Relation::greater_equal: worst = std::max(worst, c.rhs - a); break;
                case Relation::equal: worst = std::max(worst, std::abs(a - c.rhs)); break;
            }
        }
        return worst;
    }

private:
    std::vector<Variable> vars_;
    std::vector<double> objective_;
    std::vector<Constraint> cons_;
    double offset_ = 0.0;
    Sense sense_ = Sense::minimize;
};

struct LpSolution {
    Status status = Status::infeasible;
    std::vector<double> values;
    double objective_value = 0.0;
    long iterations = 0;
    long nodes = 0;

    bool optimal() const { return status == Status::optimal; }
};

/// Copy of `lp` with every binary flag dropped (its [0,1] box kept).
inline LinearProgram relax(const LinearProgram& lp) {
    LinearProgram r;
    r.set_sense(lp.sense());
    r.set_objective_offset(lp.objective_offset());
    for (int j = 0; j < lp.num_variables(); ++j) {
        const auto& v = lp.variable(j);
        r.add_variable(v.name, v.lower, v.upper, lp.objective()[static_cast<std::size_t>(j)]);
    }
    for (const auto& c : lp.constraints()) r.add_constraint(c.name, c.terms, c.relation, c.rhs);
    return r;
}

}  // namespace tropf::lp
