#include <gtest/gtest.h>

#include "oracles/tree_flow.hpp"
#include "support/cases.hpp"
#include "support/injections.hpp"
#include "tropf/orchestrator.hpp"

using namespace tropf;

namespace {

NetworkCase day_with_storage() {
    auto c = fixture::five_node_day();
    c.storage = {fixture::storage(3, 0.3, 1.5, 0.5), fixture::storage(5, 0.4, 2.0, 0.7)};
    return c;
}

}  // namespace

TEST(RunScenario, ZeroBudgetKeepsTheBaseState) {
    auto c = day_with_storage();
    ScenarioConfig cfg;
    cfg.k = 0;
    auto r = run_scenario(c, cfg);
    ASSERT_TRUE(r.complete()) << r.failure;
    for (double y : r.attack->attack.y.data()) EXPECT_EQ(y, 0.0);
    for (std::size_t k = 0; k < r.dispatch->state.v.data().size(); ++k)
        EXPECT_NEAR(r.attack->state.v.data()[k], r.dispatch->state.v.data()[k], 1e-9);
    for (std::size_t k = 0; k < r.dispatch->state.pf.data().size(); ++k)
        EXPECT_NEAR(r.attack->state.pf.data()[k], r.dispatch->state.pf.data()[k], 1e-9);
    EXPECT_LE(r.mitigation->violations.worst_line_margin, 1e-7);
    EXPECT_LE(r.mitigation->violations.worst_node_margin, 1e-7);
}

TEST(RunScenario, RollingCarriesStateOfCharge) {
    auto c = day_with_storage();
    ScenarioConfig cfg;
    cfg.k = 2;
    cfg.mode = HorizonMode::rolling;
    auto r = run_scenario(c, cfg);
    ASSERT_TRUE(r.complete()) << r.failure;
    const auto& z = *r.mitigation;
    for (int u = 0; u < 2; ++u) {
        const auto& s = c.storage[static_cast<std::size_t>(u)];
        double start = s.soc_init;
        for (int h = 0; h < 24; ++h) {
            // The hour's opening SOC is the previous hour's closing SOC.
            const double expected = start + s.eta_ch * z.p_ch(u, h) / s.e_max - z.p_dis(u, h) / (s.eta_dis * s.e_max);
            EXPECT_NEAR(z.soc(u, h), expected, 1e-7) << "unit " << u << " hour " << h;
            start = z.soc(u, h);
        }
    }
    auto inj = fixture::mitigation_injections(c, *r.dispatch, *r.attack, z);
    EXPECT_LE(oracle::balance_residual(c, z.state, inj.first, inj.second), 1e-7);
}

TEST(RunScenario, ModesCoincideForOneHour) {
    auto c = fixture::five_node(1);
    c.storage = {fixture::storage(3, 0.3, 1.5, 0.5)};
    ScenarioConfig full, rolling;
    full.k = rolling.k = 2;
    rolling.mode = HorizonMode::rolling;
    auto a = run_scenario(c, full), b = run_scenario(c, rolling);
    ASSERT_TRUE(a.complete() && b.complete());
    EXPECT_EQ(a.dispatch->p_g, b.dispatch->p_g);
    EXPECT_EQ(a.dispatch->q_g, b.dispatch->q_g);
    EXPECT_EQ(a.dispatch->state, b.dispatch->state);
    EXPECT_EQ(a.dispatch->total_cost, b.dispatch->total_cost);
    EXPECT_EQ(a.attack->attack.y, b.attack->attack.y);
    EXPECT_EQ(a.attack->state, b.attack->state);
    EXPECT_EQ(a.attack->objective_value, b.attack->objective_value);
    EXPECT_EQ(a.attack->inf_line_term, b.attack->inf_line_term);
    EXPECT_EQ(a.mitigation->p_ch, b.mitigation->p_ch);
    EXPECT_EQ(a.mitigation->p_dis, b.mitigation->p_dis);
    EXPECT_EQ(a.mitigation->soc, b.mitigation->soc);
    EXPECT_EQ(a.mitigation->state, b.mitigation->state);
    EXPECT_EQ(a.mitigation->objective_value, b.mitigation->objective_value);
    EXPECT_EQ(a.mitigation->sup_node_term, b.mitigation->sup_node_term);
}

TEST(RunScenario, StageThreeUsesTheStageTwoAttack) {
    auto c = day_with_storage();
    ScenarioConfig cfg;
    cfg.k = 2;
    auto r = run_scenario(c, cfg);
    ASSERT_TRUE(r.complete()) << r.failure;
    // The residual is computed with Stage 2's y and Stage 1's setpoints.
    auto inj = fixture::mitigation_injections(c, *r.dispatch, *r.attack, *r.mitigation);
    EXPECT_LE(oracle::balance_residual(c, r.mitigation->state, inj.first, inj.second), 1e-7);
    EXPECT_EQ(r.hourly_line_margin[2].size(), 24u);
}

TEST(RunScenario, AttackDamageGrowsWithBudget) {
    auto c = day_with_storage();
    double previous = -INFINITY;
    for (int k = 0; k <= 3; ++k) {
        ScenarioConfig cfg;
        cfg.k = k;
        auto r = run_scenario(c, cfg);
        ASSERT_TRUE(r.attack.has_value());
        EXPECT_GE(r.attack->objective_value, previous - 1e-7) << "k = " << k;
        previous = r.attack->objective_value;
    }
}

TEST(RunScenario, FailingStageKeepsEarlierResults) {
    auto c = fixture::deficit_feeder();
    c.storage = {fixture::storage(2, 0.0, 1.0)};
    ScenarioConfig cfg;
    cfg.k = 1;
    cfg.hard_limits = true;
    auto r = run_scenario(c, cfg);
    EXPECT_FALSE(r.complete());
    EXPECT_EQ(r.failed_stage, 3);
    EXPECT_NE(r.failure.find("stage3 infeasible"), std::string::npos);
    EXPECT_TRUE(r.dispatch.has_value());
    EXPECT_TRUE(r.attack.has_value());
    EXPECT_FALSE(r.mitigation.has_value());
}

TEST(RunScenario, InvalidCaseThrows) {
    auto c = fixture::two_node();
    c.generators.clear();
    EXPECT_THROW(run_scenario(c, {}), ValidationError);
}

TEST(Sweep, OneResultPerBudget) {
    auto c = day_with_storage();
    auto all = sweep(c, {}, 3);
    ASSERT_EQ(all.size(), 4u);
    for (int k = 0; k <= 3; ++k) {
        EXPECT_EQ(all[static_cast<std::size_t>(k)].config.k, k);
        ScenarioConfig cfg;
        cfg.k = k;
        auto alone = run_scenario(c, cfg);
        EXPECT_EQ(all[static_cast<std::size_t>(k)].mitigation->state, alone.mitigation->state);
    }
}
