#pragma once

#include <vector>

#include "tropf/detail/distflow.hpp"
#include "tropf/lp/solver.hpp"
#include "tropf/netmodel.hpp"
#include "tropf/stage1.hpp"
#include "tropf/stage_common.hpp"

namespace tropf {

struct AttackOptions {
    bool binary_attack = false;
    TermWeights weights;
};

/// y(a, h) is the attack fraction of generators[generators[a]] in hour h.
struct AttackVector {
    std::vector<int> generators;
    Grid y;
    double budget_k = 0.0;
};

struct AttackAssessment {
    AttackVector attack;
    std::vector<double> p_sub;
    std::vector<double> q_sub;
    SystemState state;
    ViolationReport violations;
    double objective_value = 0.0;
    double inf_line_term = 0.0;
    double inf_node_term = 0.0;
};

struct AttackModel {
    lp::LinearProgram lp;
    detail::FlowVars flow;
    std::vector<int> attackable;
    std::vector<int> y_var;  // [a * T + h]
    std::vector<int> p_sub, q_sub;
    int t_line = -1, t_node = -1;
};

inline AttackModel build_attack_model(const NetworkCase& c, const DispatchSolution& x, double k,
                                      const AttackOptions& opt = {}) {
    if (!(k >= 0.0)) throw std::invalid_argument("attack budget k must be non-negative");
    AttackModel m;
    const int T = c.horizon_hours;
    const int sub = c.substation();
    const auto& sg = c.generators[static_cast<std::size_t>(sub)];
    m.lp.set_sense(lp::Sense::maximize);
    m.attackable = c.attackable_generators();
    m.flow = detail::add_flow_variables(m.lp, c, /*boxed=*/false);

    double offset = 0.0;
    for (std::size_t a = 0; a < m.attackable.size(); ++a) {
        const int g = m.attackable[a];
        const double cost = c.generators[static_cast<std::size_t>(g)].cost;
        for (int h = 0; h < T; ++h) {
            const double dispatched = x.p_g(g, h);
            const std::string name = detail::tag("y", c.generators[static_cast<std::size_t>(g)].node, h);
            const int y = opt.binary_attack ? m.lp.add_binary(name) : m.lp.add_variable(name, 0.0, 1.0);
            m.lp.set_objective(y, -opt.weights.cost * cost * dispatched);
            offset += opt.weights.cost * cost * dispatched;
            m.y_var.push_back(y);
        }
    }
    m.lp.set_objective_offset(offset);
    for (int h = 0; h < T; ++h) {
        m.p_sub.push_back(m.lp.add_variable(detail::tag("psub", sg.node, h), sg.p_min, sg.p_max_at(h),
                                            opt.weights.cost * sg.cost));
        m.q_sub.push_back(m.lp.add_variable(detail::tag("qsub", sg.node, h), sg.q_min, sg.q_max));
    }
    if (c.num_lines() > 0) m.t_line = m.lp.add_variable("t_line", -lp::kInf, lp::kInf, opt.weights.line);
    m.t_node = m.lp.add_variable("t_node", -lp::kInf, lp::kInf, opt.weights.node);

    auto attack_index = [&](int g) {
        for (std::size_t a = 0; a < m.attackable.size(); ++a)
            if (m.attackable[a] == g) return static_cast<int>(a);
        return -1;
    };
    detail::add_balance_rows(m.lp, c, m.flow, [&](int i, int h, bool reactive) {
        detail::Injection inj;
        const NodeId id = c.nodes[static_cast<std::size_t>(i)].id;
        for (std::size_t g = 0; g < c.generators.size(); ++g) {
            const auto& gen = c.generators[g];
            if (gen.node != id || !gen.in_service) continue;
            if (static_cast<int>(g) == sub) {
                inj.terms.push_back({(reactive ? m.q_sub : m.p_sub)[static_cast<std::size_t>(h)], 1.0});
                continue;
            }
            const double fixed = reactive ? x.q_g(static_cast<int>(g), h) : x.p_g(static_cast<int>(g), h);
            inj.constant += fixed;
            const int a = attack_index(static_cast<int>(g));
            if (a >= 0 && fixed != 0.0)
                inj.terms.push_back({m.y_var[static_cast<std::size_t>(a * T + h)], -fixed});
        }
        return inj;
    });
    detail::add_voltage_drop_rows(m.lp, c, m.flow);
    detail::add_epigraph_rows(m.lp, c, m.flow, m.t_line, m.t_node, lp::Relation::less_equal);

    if (!m.attackable.empty())
        for (int h = 0; h < T; ++h) {
            std::vector<lp::Term> budget;
            for (std::size_t a = 0; a < m.attackable.size(); ++a)
                budget.push_back({m.y_var[a * static_cast<std::size_t>(T) + static_cast<std::size_t>(h)], 1.0});
            m.lp.add_constraint(detail::tag("budget", 0, h), std::move(budget), lp::Relation::less_equal, k);
        }
    return m;
}

/// Worst-case attack against the fixed dispatch `x`. Throws StageInfeasible(2, ...)
/// when the model has no optimum (an unbounded model points at a malformed case).
inline AttackAssessment assess_worst_attack(const NetworkCase& c, const DispatchSolution& x, double k,
                                            const AttackOptions& opt = {}, const lp::MilpOptions& milp = {}) {
    auto m = build_attack_model(c, x, k, opt);
    auto sol = lp::solve_milp(m.lp, milp);
    if (!sol.optimal()) throw StageInfeasible(2, sol.status, "attack model has no optimum");

    const int T = c.horizon_hours;
    const auto& v = sol.values;
    AttackAssessment r;
    r.attack.generators = m.attackable;
    r.attack.budget_k = k;
    r.attack.y = Grid(static_cast<int>(m.attackable.size()), T);
    for (int a = 0; a < r.attack.y.rows(); ++a)
        for (int h = 0; h < T; ++h) {
            double y = v[static_cast<std::size_t>(m.y_var[static_cast<std::size_t>(a * T + h)])];
            if (opt.binary_attack) y = std::round(y);
            r.attack.y(a, h) = y;
        }
    for (int h = 0; h < T; ++h) {
        r.p_sub.push_back(v[static_cast<std::size_t>(m.p_sub[static_cast<std::size_t>(h)])]);
        r.q_sub.push_back(v[static_cast<std::size_t>(m.q_sub[static_cast<std::size_t>(h)])]);
    }
    r.state = detail::extract_state(c, m.flow, v);
    r.violations = constraint_margins(c, r.state);
    r.objective_value = sol.objective_value;
    r.inf_line_term = m.t_line >= 0 ? v[static_cast<std::size_t>(m.t_line)] : 0.0;
    r.inf_node_term = v[static_cast<std::size_t>(m.t_node)];
    return r;
}

}  // namespace tropf
