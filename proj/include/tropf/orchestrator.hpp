#pragma once

#include <array>
#include <chrono>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "tropf/stage1.hpp"
#include "tropf/stage2.hpp"
#include "tropf/stage3.hpp"

namespace tropf {

enum class HorizonMode { full_horizon, rolling };

inline const char* to_string(HorizonMode m) { return m == HorizonMode::rolling ? "rolling" : "full_horizon"; }

struct ScenarioConfig {
    double k = 3.0;
    HorizonMode mode = HorizonMode::full_horizon;
    bool binary_attack = false;
    bool hard_limits = false;
    TermWeights weights;
    lp::MilpOptions milp;
};

struct StageTimings {
    std::array<double, 3> seconds{};
};

struct ScenarioResult {
    ScenarioConfig config;
    std::optional<DispatchSolution> dispatch;
    std::optional<AttackAssessment> attack;
    std::optional<MitigationPlan> mitigation;
    /// [stage - 1][hour]: largest line-family and node-family margin in that hour.
    std::array<std::vector<double>, 3> hourly_line_margin;
    std::array<std::vector<double>, 3> hourly_node_margin;
    StageTimings timings;
    int failed_stage = 0;  // 0 when every stage finished
    std::string failure;

    bool complete() const { return failed_stage == 0; }
};

/// One hour of `c` as a single-hour case, with storage starting from `soc`.
inline NetworkCase hour_slice(const NetworkCase& c, int hour, const std::vector<double>& soc) {
    NetworkCase s = c;
    s.horizon_hours = 1;
    s.demand = {c.demand.p.column(hour), c.demand.q.column(hour)};
    for (auto& g : s.generators)
        if (!g.p_max_profile.empty()) g.p_max_profile = {g.p_max_profile[static_cast<std::size_t>(hour)]};
    for (std::size_t u = 0; u < s.storage.size(); ++u) s.storage[u].soc_init = soc[u];
    return s;
}

namespace detail {

class StageClock {
public:
    explicit StageClock(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
    ~StageClock() { sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
    StageClock(const StageClock&) = delete;
    StageClock& operator=(const StageClock&) = delete;

private:
    double& sink_;
    std::chrono::steady_clock::time_point start_;
};

inline void copy_hour(SystemState& dst, const SystemState& src, int h) {
    dst.pf.set_column(h, src.pf);
    dst.qf.set_column(h, src.qf);
    dst.v.set_column(h, src.v);
}

inline SystemState empty_state(const NetworkCase& c) {
    const int T = c.horizon_hours;
    return {Grid(c.num_lines(), T), Grid(c.num_lines(), T), Grid(c.num_nodes(), T)};
}

inline DispatchSolution rolling_stage1(const NetworkCase& c, const std::vector<NetworkCase>& hours) {
    const int T = c.horizon_hours, G = static_cast<int>(c.generators.size());
    DispatchSolution d{Grid(G, T), Grid(G, T), empty_state(c), 0.0, Grid(G, T)};
    for (int h = 0; h < T; ++h) {
        auto one = solve_base_opf(hours[static_cast<std::size_t>(h)]);
        d.p_g.set_column(h, one.p_g);
        d.q_g.set_column(h, one.q_g);
        d.hourly_cost.set_column(h, one.hourly_cost);
        copy_hour(d.state, one.state, h);
        d.total_cost += one.total_cost;
    }
    return d;
}

inline DispatchSolution hour_of(const DispatchSolution& d, int h) {
    return {d.p_g.column(h), d.q_g.column(h),
            {d.state.pf.column(h), d.state.qf.column(h), d.state.v.column(h)},
            0.0,
            d.hourly_cost.column(h)};
}

inline AttackAssessment rolling_stage2(const NetworkCase& c, const std::vector<NetworkCase>& hours,
                                       const DispatchSolution& x, double k, const AttackOptions& opt,
                                       const lp::MilpOptions& milp) {
    const int T = c.horizon_hours;
    AttackAssessment r;
    r.attack.generators = c.attackable_generators();
    r.attack.budget_k = k;
    r.attack.y = Grid(static_cast<int>(r.attack.generators.size()), T);
    r.state = empty_state(c);
    r.inf_line_term = r.inf_node_term = lp::kInf;
    for (int h = 0; h < T; ++h) {
        auto one = assess_worst_attack(hours[static_cast<std::size_t>(h)], hour_of(x, h), k, opt, milp);
        r.attack.y.set_column(h, one.attack.y);
        r.p_sub.push_back(one.p_sub[0]);
        r.q_sub.push_back(one.q_sub[0]);
        copy_hour(r.state, one.state, h);
        r.objective_value += one.objective_value;
        r.inf_line_term = std::min(r.inf_line_term, one.inf_line_term);
        r.inf_node_term = std::min(r.inf_node_term, one.inf_node_term);
    }
    r.violations = constraint_margins(c, r.state);
    return r;
}

inline AttackAssessment hour_of(const AttackAssessment& a, int h) {
    AttackAssessment one;
    one.attack = {a.attack.generators, a.attack.y.column(h), a.attack.budget_k};
    one.p_sub = {a.p_sub[static_cast<std::size_t>(h)]};
    one.q_sub = {a.q_sub[static_cast<std::size_t>(h)]};
    return one;
}

inline MitigationPlan rolling_stage3(const NetworkCase& c, std::vector<NetworkCase>& hours, const DispatchSolution& x,
                                     const AttackAssessment& a, const MitigationOptions& opt,
                                     const lp::MilpOptions& milp) {
    const int T = c.horizon_hours, U = static_cast<int>(c.storage.size());
    MitigationPlan p;
    for (Grid* g : {&p.p_ch, &p.p_dis, &p.p_ess, &p.beta_ch, &p.beta_dis, &p.soc}) *g = Grid(U, T);
    p.state = empty_state(c);
    p.sup_line_term = p.sup_node_term = -lp::kInf;
    std::vector<double> soc;
    for (const auto& s : c.storage) soc.push_back(s.soc_init);
    for (int h = 0; h < T; ++h) {
        auto& slice = hours[static_cast<std::size_t>(h)];
        for (int u = 0; u < U; ++u) slice.storage[static_cast<std::size_t>(u)].soc_init = soc[static_cast<std::size_t>(u)];
        auto one = mitigate_attack(slice, hour_of(x, h), hour_of(a, h), opt, milp);
        for (auto [dst, src] : {std::pair{&p.p_ch, &one.p_ch}, std::pair{&p.p_dis, &one.p_dis},
                                std::pair{&p.p_ess, &one.p_ess}, std::pair{&p.beta_ch, &one.beta_ch},
                                std::pair{&p.beta_dis, &one.beta_dis}, std::pair{&p.soc, &one.soc}})
            dst->set_column(h, *src);
        for (int u = 0; u < U; ++u) soc[static_cast<std::size_t>(u)] = one.soc(u, 0);
        p.p_sub.push_back(one.p_sub[0]);
        p.q_sub.push_back(one.q_sub[0]);
        copy_hour(p.state, one.state, h);
        p.objective_value += one.objective_value;
        p.sup_line_term = std::max(p.sup_line_term, one.sup_line_term);
        p.sup_node_term = std::max(p.sup_node_term, one.sup_node_term);
    }
    p.violations = constraint_margins(c, p.state);
    return p;
}

}  // namespace detail

/// Stage 1, then the worst attack on that dispatch, then the storage response.
/// A failing stage ends the run; earlier stage results stay in the returned value.
/// Throws ValidationError for an invalid case.
inline ScenarioResult run_scenario(const NetworkCase& c, const ScenarioConfig& cfg) {
    validate_case(c);
    if (!(cfg.k >= 0.0)) throw std::invalid_argument("attack budget k must be non-negative");
    if (cfg.weights.cost < 0.0 || cfg.weights.line < 0.0 || cfg.weights.node < 0.0)
        throw std::invalid_argument("term weights must be non-negative");

    ScenarioResult r;
    r.config = cfg;
    const AttackOptions attack_opt{cfg.binary_attack, cfg.weights};
    const MitigationOptions mitigation_opt{cfg.hard_limits, cfg.weights};
    const bool rolling = cfg.mode == HorizonMode::rolling;
    std::vector<NetworkCase> hours;
    if (rolling) {
        std::vector<double> soc;
        for (const auto& s : c.storage) soc.push_back(s.soc_init);
        for (int h = 0; h < c.horizon_hours; ++h) hours.push_back(hour_slice(c, h, soc));
    }

    auto summarize = [&](int stage, const ViolationReport& v) {
        auto& line = r.hourly_line_margin[static_cast<std::size_t>(stage - 1)];
        auto& node = r.hourly_node_margin[static_cast<std::size_t>(stage - 1)];
        for (int h = 0; h < c.horizon_hours; ++h) {
            line.push_back(c.num_lines() > 0 ? v.hour_max(h, true) : 0.0);
            node.push_back(v.hour_max(h, false));
        }
    };

    int stage = 1;
    try {
        {
            detail::StageClock clock(r.timings.seconds[0]);
            r.dispatch = rolling ? detail::rolling_stage1(c, hours) : solve_base_opf(c);
        }
        summarize(1, constraint_margins(c, r.dispatch->state));
        stage = 2;
        {
            detail::StageClock clock(r.timings.seconds[1]);
            r.attack = rolling ? detail::rolling_stage2(c, hours, *r.dispatch, cfg.k, attack_opt, cfg.milp)
                               : assess_worst_attack(c, *r.dispatch, cfg.k, attack_opt, cfg.milp);
        }
        summarize(2, r.attack->violations);
        stage = 3;
        {
            detail::StageClock clock(r.timings.seconds[2]);
            r.mitigation = rolling ? detail::rolling_stage3(c, hours, *r.dispatch, *r.attack, mitigation_opt, cfg.milp)
                                   : mitigate_attack(c, *r.dispatch, *r.attack, mitigation_opt, cfg.milp);
        }
        summarize(3, r.mitigation->violations);
    } catch (const StageInfeasible& e) {
        r.failed_stage = e.stage();
        r.failure = e.what();
    } catch (const lp::NodeLimitError& e) {
        r.failed_stage = stage;
        r.failure = "stage" + std::to_string(stage) + " " + e.what();
    } catch (const lp::NumericalError& e) {
        r.failed_stage = stage;
        r.failure = "stage" + std::to_string(stage) + " numerical failure: " + e.what();
    }
    return r;
}

/// One scenario per budget k = 0, 1, ..., k_max, solved concurrently.
inline std::vector<ScenarioResult> sweep(const NetworkCase& c, ScenarioConfig base, int k_max) {
    validate_case(c);
    std::vector<std::future<ScenarioResult>> jobs;
    for (int k = 0; k <= k_max; ++k) {
        ScenarioConfig cfg = base;
        cfg.k = k;
        jobs.push_back(std::async(std::launch::async, [&c, cfg] { return run_scenario(c, cfg); }));
    }
    std::vector<ScenarioResult> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace tropf
