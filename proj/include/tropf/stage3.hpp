#pragma once

#include <vector>

#include "tropf/detail/distflow.hpp"
#include "tropf/lp/solver.hpp"
#include "tropf/netmodel.hpp"
#include "tropf/stage1.hpp"
#include "tropf/stage2.hpp"
#include "tropf/stage_common.hpp"

namespace tropf {

struct MitigationOptions {
    /// Impose every flow and voltage limit as a hard bound on top of the soft terms.
    bool hard_limits = false;
    TermWeights weights;
};

/// Storage grids are unit x hour, in the order of NetworkCase::storage.
/// soc(u, h) is the state of charge at the end of hour h.
struct MitigationPlan {
    Grid p_ch, p_dis, p_ess;
    Grid beta_ch, beta_dis;
    Grid soc;
    std::vector<double> p_sub;
    std::vector<double> q_sub;
    SystemState state;
    ViolationReport violations;
    double objective_value = 0.0;
    double sup_line_term = 0.0;
    double sup_node_term = 0.0;
};

struct MitigationModel {
    lp::LinearProgram lp;
    detail::FlowVars flow;
    // [u * T + h]
    std::vector<int> p_ch, p_dis, beta_ch, beta_dis, soc;
    std::vector<int> p_sub, q_sub;
    int s_line = -1, s_node = -1;
};

inline MitigationModel build_mitigation_model(const NetworkCase& c, const DispatchSolution& x,
                                              const AttackAssessment& attack, const MitigationOptions& opt = {}) {
    MitigationModel m;
    const int T = c.horizon_hours;
    const int sub = c.substation();
    const auto& sg = c.generators[static_cast<std::size_t>(sub)];
    const double wc = opt.weights.cost;
    m.flow = detail::add_flow_variables(m.lp, c, opt.hard_limits);

    for (std::size_t u = 0; u < c.storage.size(); ++u) {
        const auto& s = c.storage[u];
        for (int h = 0; h < T; ++h) {
            // The cost applies to the net injection p_dis - p_ch.
            m.p_ch.push_back(m.lp.add_variable(detail::tag("pch", s.node, h), 0.0, s.p_ch_max, -wc * s.cost));
            m.p_dis.push_back(m.lp.add_variable(detail::tag("pdis", s.node, h), 0.0, s.p_dis_max, wc * s.cost));
            m.beta_ch.push_back(m.lp.add_binary(detail::tag("bch", s.node, h)));
            m.beta_dis.push_back(m.lp.add_binary(detail::tag("bdis", s.node, h)));
            m.soc.push_back(m.lp.add_variable(detail::tag("soc", s.node, h), s.soc_min, s.soc_max));
        }
    }
    for (int h = 0; h < T; ++h) {
        m.p_sub.push_back(m.lp.add_variable(detail::tag("psub", sg.node, h), sg.p_min, sg.p_max_at(h), wc * sg.cost));
        m.q_sub.push_back(m.lp.add_variable(detail::tag("qsub", sg.node, h), sg.q_min, sg.q_max));
    }
    if (c.num_lines() > 0) m.s_line = m.lp.add_variable("s_line", -lp::kInf, lp::kInf, opt.weights.line);
    m.s_node = m.lp.add_variable("s_node", -lp::kInf, lp::kInf, opt.weights.node);

    const auto& ag = attack.attack.generators;
    auto attacked = [&](int g, int h) {
        for (std::size_t a = 0; a < ag.size(); ++a)
            if (ag[a] == g) return attack.attack.y(static_cast<int>(a), h);
        return 0.0;
    };
    detail::add_balance_rows(m.lp, c, m.flow, [&](int i, int h, bool reactive) {
        detail::Injection inj;
        const NodeId id = c.nodes[static_cast<std::size_t>(i)].id;
        for (std::size_t g = 0; g < c.generators.size(); ++g) {
            const auto& gen = c.generators[g];
            if (gen.node != id || !gen.in_service) continue;
            const int gi = static_cast<int>(g);
            if (gi == sub) {
                inj.terms.push_back({(reactive ? m.q_sub : m.p_sub)[static_cast<std::size_t>(h)], 1.0});
                continue;
            }
            inj.constant += (reactive ? x.q_g(gi, h) : x.p_g(gi, h)) * (1.0 - attacked(gi, h));
        }
        // Storage net output enters both balances through the same variable.
        for (std::size_t u = 0; u < c.storage.size(); ++u) {
            if (c.storage[u].node != id) continue;
            const auto k = u * static_cast<std::size_t>(T) + static_cast<std::size_t>(h);
            inj.terms.push_back({m.p_dis[k], 1.0});
            inj.terms.push_back({m.p_ch[k], -1.0});
        }
        return inj;
    });
    detail::add_voltage_drop_rows(m.lp, c, m.flow);

    for (std::size_t u = 0; u < c.storage.size(); ++u) {
        const auto& s = c.storage[u];
        for (int h = 0; h < T; ++h) {
            const auto k = u * static_cast<std::size_t>(T) + static_cast<std::size_t>(h);
            std::vector<lp::Term> soc_row{{m.soc[k], 1.0},
                                          {m.p_ch[k], -s.eta_ch / s.e_max},
                                          {m.p_dis[k], 1.0 / (s.eta_dis * s.e_max)}};
            if (h > 0) soc_row.push_back({m.soc[k - 1], -1.0});
            m.lp.add_constraint(detail::tag("soc", s.node, h), std::move(soc_row), lp::Relation::equal,
                                h == 0 ? s.soc_init : 0.0);
            m.lp.add_constraint(detail::tag("chmax", s.node, h), {{m.p_ch[k], 1.0}, {m.beta_ch[k], -s.p_ch_max}},
                                lp::Relation::less_equal, 0.0);
            if (s.p_ch_min > 0.0)
                m.lp.add_constraint(detail::tag("chmin", s.node, h), {{m.p_ch[k], 1.0}, {m.beta_ch[k], -s.p_ch_min}},
                                    lp::Relation::greater_equal, 0.0);
            m.lp.add_constraint(detail::tag("dismax", s.node, h), {{m.p_dis[k], 1.0}, {m.beta_dis[k], -s.p_dis_max}},
                                lp::Relation::less_equal, 0.0);
            if (s.p_dis_min > 0.0)
                m.lp.add_constraint(detail::tag("dismin", s.node, h),
                                    {{m.p_dis[k], 1.0}, {m.beta_dis[k], -s.p_dis_min}}, lp::Relation::greater_equal,
                                    0.0);
            m.lp.add_constraint(detail::tag("excl", s.node, h), {{m.beta_ch[k], 1.0}, {m.beta_dis[k], 1.0}},
                                lp::Relation::less_equal, 1.0);
        }
    }
    detail::add_epigraph_rows(m.lp, c, m.flow, m.s_line, m.s_node, lp::Relation::greater_equal);
    return m;
}

/// Indicator guess from a relaxed plan: a unit is charging (discharging) in an
/// hour when its relaxed charge (discharge) power is positive; if both are,
/// the larger one wins.
inline std::function<std::vector<double>(const std::vector<double>&)> indicator_rounding(const MitigationModel& m) {
    return [ch = m.p_ch, dis = m.p_dis, bch = m.beta_ch, bdis = m.beta_dis](const std::vector<double>& x) {
        std::vector<double> guess = x;
        for (std::size_t k = 0; k < ch.size(); ++k) {
            const double pc = x[static_cast<std::size_t>(ch[k])], pd = x[static_cast<std::size_t>(dis[k])];
            const bool charge = pc > 1e-9 && pc >= pd;
            const bool discharge = pd > 1e-9 && !charge;
            guess[static_cast<std::size_t>(bch[k])] = charge ? 1.0 : 0.0;
            guess[static_cast<std::size_t>(bdis[k])] = discharge ? 1.0 : 0.0;
        }
        return guess;
    };
}

/// Storage response to the fixed attack. Throws StageInfeasible(3, ...) when
/// no plan exists, which only happens with hard limits.
inline MitigationPlan mitigate_attack(const NetworkCase& c, const DispatchSolution& x, const AttackAssessment& attack,
                                      const MitigationOptions& opt = {}, const lp::MilpOptions& milp = {}) {
    auto m = build_mitigation_model(c, x, attack, opt);
    lp::MilpOptions options = milp;
    if (!options.rounding) options.rounding = indicator_rounding(m);
    auto sol = lp::solve_milp(m.lp, options);
    if (!sol.optimal())
        throw StageInfeasible(3, sol.status,
                              opt.hard_limits ? "storage cannot restore every limit; rerun without hard limits"
                                              : "mitigation model has no optimum");

    const int T = c.horizon_hours, U = static_cast<int>(c.storage.size());
    const auto& v = sol.values;
    auto at = [&](int var) { return v[static_cast<std::size_t>(var)]; };
    MitigationPlan p;
    for (Grid* g : {&p.p_ch, &p.p_dis, &p.p_ess, &p.beta_ch, &p.beta_dis, &p.soc}) *g = Grid(U, T);
    for (int u = 0; u < U; ++u)
        for (int h = 0; h < T; ++h) {
            const auto k = static_cast<std::size_t>(u * T + h);
            p.p_ch(u, h) = at(m.p_ch[k]);
            p.p_dis(u, h) = at(m.p_dis[k]);
            p.p_ess(u, h) = p.p_dis(u, h) - p.p_ch(u, h);
            p.beta_ch(u, h) = std::round(at(m.beta_ch[k]));
            p.beta_dis(u, h) = std::round(at(m.beta_dis[k]));
            p.soc(u, h) = at(m.soc[k]);
        }
    for (int h = 0; h < T; ++h) {
        p.p_sub.push_back(at(m.p_sub[static_cast<std::size_t>(h)]));
        p.q_sub.push_back(at(m.q_sub[static_cast<std::size_t>(h)]));
    }
    p.state = detail::extract_state(c, m.flow, v);
    p.violations = constraint_margins(c, p.state);
    p.objective_value = sol.objective_value;
    p.sup_line_term = m.s_line >= 0 ? at(m.s_line) : 0.0;
    p.sup_node_term = at(m.s_node);
    return p;
}

}  // namespace tropf
