#pragma once

#include <vector>

#include "tropf/detail/distflow.hpp"
#include "tropf/lp/solver.hpp"
#include "tropf/netmodel.hpp"
#include "tropf/stage_common.hpp"

namespace tropf {

/// Base-case economic dispatch. Grids are generator x hour and cover every
/// generator in the case; out-of-service units stay at zero.
struct DispatchSolution {
    Grid p_g;
    Grid q_g;
    SystemState state;
    double total_cost = 0.0;
    Grid hourly_cost;  // generator x hour, cost * p
};

struct BaseOpfModel {
    lp::LinearProgram lp;
    detail::FlowVars flow;
    std::vector<int> p_var;  // [g * T + h], -1 for out-of-service units
    std::vector<int> q_var;
};

inline BaseOpfModel build_base_opf(const NetworkCase& c) {
    BaseOpfModel m;
    const int T = c.horizon_hours;
    m.flow = detail::add_flow_variables(m.lp, c, /*boxed=*/true);
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
        const auto& gen = c.generators[g];
        for (int h = 0; h < T; ++h) {
            if (!gen.in_service) {
                m.p_var.push_back(-1);
                m.q_var.push_back(-1);
                continue;
            }
            m.p_var.push_back(m.lp.add_variable(detail::tag("pg", gen.node, h), gen.p_min, gen.p_max_at(h), gen.cost));
            m.q_var.push_back(m.lp.add_variable(detail::tag("qg", gen.node, h), gen.q_min, gen.q_max));
        }
    }
    detail::add_balance_rows(m.lp, c, m.flow, [&](int i, int h, bool reactive) {
        detail::Injection inj;
        const NodeId id = c.nodes[static_cast<std::size_t>(i)].id;
        for (std::size_t g = 0; g < c.generators.size(); ++g) {
            if (c.generators[g].node != id || !c.generators[g].in_service) continue;
            const auto& vars = reactive ? m.q_var : m.p_var;
            inj.terms.push_back({vars[g * static_cast<std::size_t>(T) + static_cast<std::size_t>(h)], 1.0});
        }
        return inj;
    });
    detail::add_voltage_drop_rows(m.lp, c, m.flow);
    return m;
}

/// Throws StageInfeasible(1, ...) when no dispatch meets demand within limits.
inline DispatchSolution solve_base_opf(const NetworkCase& c) {
    auto m = build_base_opf(c);
    auto sol = lp::solve_lp(m.lp);
    if (!sol.optimal()) throw StageInfeasible(1, sol.status, "no dispatch satisfies the network limits");

    const int T = c.horizon_hours, G = static_cast<int>(c.generators.size());
    DispatchSolution d{Grid(G, T), Grid(G, T), detail::extract_state(c, m.flow, sol.values), 0.0, Grid(G, T)};
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < T; ++h) {
            const auto k = static_cast<std::size_t>(g * T + h);
            if (m.p_var[k] < 0) continue;
            d.p_g(g, h) = sol.values[static_cast<std::size_t>(m.p_var[k])];
            d.q_g(g, h) = sol.values[static_cast<std::size_t>(m.q_var[k])];
            d.hourly_cost(g, h) = c.generators[static_cast<std::size_t>(g)].cost * d.p_g(g, h);
            d.total_cost += d.hourly_cost(g, h);
        }
    return d;
}

}  // namespace tropf
