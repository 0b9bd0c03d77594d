#include <gtest/gtest.h>

#include <algorithm>

#include "oracles/tree_flow.hpp"
#include "support/cases.hpp"
#include "support/injections.hpp"
#include "tropf/stage1.hpp"

using namespace tropf;

namespace {

// Cheapest-first fill of total demand, ignoring the network entirely.
double merit_order_cost(const NetworkCase& c) {
    double cost = 0.0;
    std::vector<int> order;
    for (int g = 0; g < static_cast<int>(c.generators.size()); ++g)
        if (c.generators[static_cast<std::size_t>(g)].in_service) order.push_back(g);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return c.generators[static_cast<std::size_t>(a)].cost < c.generators[static_cast<std::size_t>(b)].cost;
    });
    for (int h = 0; h < c.horizon_hours; ++h) {
        double need = 0.0;
        for (int i = 0; i < c.num_nodes(); ++i) need += c.demand.p(i, h);
        for (int g : order) {
            const auto& gen = c.generators[static_cast<std::size_t>(g)];
            const double take = std::clamp(need, gen.p_min, gen.p_max_at(h));
            cost += gen.cost * take;
            need -= take;
        }
    }
    return cost;
}

void relax_network(NetworkCase& c) {
    for (auto& l : c.lines) l = {l.id, l.from_node, l.to_node, l.r, l.x, -1e3, 1e3, -1e3, 1e3};
    for (auto& n : c.nodes) n = {n.id, 0.01, 1e3};
    for (auto& n : c.nodes) n.v_max = 30.0;
}

}  // namespace

TEST(BaseOpf, ZeroDemandIsIdle) {
    auto c = fixture::five_node(3);
    c.demand = {Grid(5, 3), Grid(5, 3)};
    auto d = solve_base_opf(c);
    EXPECT_EQ(d.total_cost, 0.0);
    for (double x : d.p_g.data()) EXPECT_NEAR(x, 0.0, 1e-12);
    for (double x : d.q_g.data()) EXPECT_NEAR(x, 0.0, 1e-12);
    for (double x : d.state.pf.data()) EXPECT_NEAR(x, 0.0, 1e-12);
    for (double x : d.state.qf.data()) EXPECT_NEAR(x, 0.0, 1e-12);
    for (double x : d.state.v.data()) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(BaseOpf, SingleLineClosedForm) {
    auto c = fixture::two_node(0.1, 0.05);
    auto d = solve_base_opf(c);
    EXPECT_NEAR(d.state.pf(0, 0), 0.1, 1e-12);
    EXPECT_NEAR(d.state.qf(0, 0), 0.05, 1e-12);
    EXPECT_NEAR(d.state.v(1, 0), 0.997, 1e-12);
    EXPECT_NEAR(d.hourly_cost(0, 0), 2.5, 1e-12);
    EXPECT_NEAR(d.total_cost, 2.5, 1e-12);
}

TEST(BaseOpf, ResidualsAndLimitsOnFiveNodeFeeder) {
    auto c = fixture::five_node(2);
    auto d = solve_base_opf(c);
    auto inj = fixture::dispatch_injections(c, d);
    EXPECT_LE(oracle::balance_residual(c, d.state, inj.first, inj.second), 1e-7);
    EXPECT_LE(oracle::voltage_drop_residual(c, d.state), 1e-7);
    EXPECT_LE(constraint_margins(c, d.state).worst_line_margin, 1e-7);
    EXPECT_LE(constraint_margins(c, d.state).worst_node_margin, 1e-7);
    for (int g = 0; g < static_cast<int>(c.generators.size()); ++g)
        for (int h = 0; h < 2; ++h) {
            const auto& gen = c.generators[static_cast<std::size_t>(g)];
            EXPECT_GE(d.p_g(g, h), gen.p_min - 1e-7);
            EXPECT_LE(d.p_g(g, h), gen.p_max_at(h) + 1e-7);
            EXPECT_GE(d.q_g(g, h), gen.q_min - 1e-7);
            EXPECT_LE(d.q_g(g, h), gen.q_max + 1e-7);
        }
}

TEST(BaseOpf, StateMatchesTreeEvaluation) {
    auto c = fixture::five_node(2);
    auto d = solve_base_opf(c);
    auto inj = fixture::dg_injections(c, d, nullptr);
    auto tree = oracle::tree_state(c, inj.first, inj.second);
    for (std::size_t k = 0; k < tree.state.pf.data().size(); ++k) {
        EXPECT_NEAR(d.state.pf.data()[k], tree.state.pf.data()[k], 1e-9);
        EXPECT_NEAR(d.state.qf.data()[k], tree.state.qf.data()[k], 1e-9);
    }
    for (std::size_t k = 0; k < tree.state.v.data().size(); ++k)
        EXPECT_NEAR(d.state.v.data()[k], tree.state.v.data()[k], 1e-9);
}

TEST(BaseOpf, UnconstrainedNetworkDispatchesInMeritOrder) {
    auto c = fixture::five_node(2);
    relax_network(c);
    auto d = solve_base_opf(c);
    EXPECT_NEAR(d.total_cost, merit_order_cost(c), 1e-7);
}

TEST(BaseOpf, RaisingACostNeverLowersTheOptimum) {
    auto c = fixture::five_node(2);
    const double base = solve_base_opf(c).total_cost;
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
        auto more = c;
        more.generators[g].cost += 7.0;
        EXPECT_GE(solve_base_opf(more).total_cost, base - 1e-9) << "generator " << g;
    }
}

TEST(BaseOpf, OutOfServiceUnitsProduceNothing) {
    auto c = fixture::five_node(1);
    c.generators[3].in_service = false;
    auto d = solve_base_opf(c);
    EXPECT_EQ(d.p_g(3, 0), 0.0);
    EXPECT_EQ(d.q_g(3, 0), 0.0);
}

TEST(BaseOpf, UndeliverableDemandIsReportedInfeasible) {
    auto c = fixture::two_node(3.0, 0.0);  // line capped at 1.5
    try {
        solve_base_opf(c);
        FAIL() << "expected StageInfeasible";
    } catch (const StageInfeasible& e) {
        EXPECT_EQ(e.stage(), 1);
        EXPECT_EQ(e.status(), lp::Status::infeasible);
    }
}
