// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/attack_enumeration.hpp"
#include "oracles/audits.hpp"
#include "oracles/random_programs.hpp"
#include "oracles/tree_flow.hpp"
#include "oracles/vertex_enumeration.hpp"
#include "support/cases.hpp"
#include "support/injections.hpp"
#include "tropf/io/case_file.hpp"
#include "tropf/orchestrator.hpp"

using namespace tropf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class Verdict {
public:
    void require(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) failures_.push_back(what);
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : ", ") + text; }
    bool passed() const { return failures_.empty() && checks_ > 0; }

    std::string line(int id) const {
        std::ostringstream s;
        s << "criterion " << id << ": " << (passed() ? "PASS" : "FAIL") << " (" << checks_ << " checks";
        if (!notes_.empty()) s << ", " << notes_;
        s << ")";
        if (!failures_.empty()) s << " first failure: " << failures_.front() << " [" << failures_.size() << " total]";
        return s.str();
    }

private:
    int checks_ = 0;
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string str(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct AttackRun {
    std::string name;
    NetworkCase c;
    DispatchSolution x;
    AttackAssessment a;
};

struct PlanRun {
    std::string name;
    NetworkCase c;
    DispatchSolution x;
    AttackAssessment a;
    MitigationPlan z;
};

// Solutions gathered while the criteria run; 6 and 7 audit all of them.
std::vector<AttackRun> attack_runs;
std::vector<PlanRun> plan_runs;

const NetworkCase& feeder33() {
    static const NetworkCase c = io::load_case(std::string(TROPF_DATA_DIR) + "/case33.json");
    return c;
}

void keep(const std::string& name, const NetworkCase& c, const ScenarioResult& r) {
    if (r.attack) attack_runs.push_back({name, c, *r.dispatch, *r.attack});
    if (r.mitigation) plan_runs.push_back({name, c, *r.dispatch, *r.attack, *r.mitigation});
}

Verdict solver_oracles() {
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937 rng(31337);
    int feasible = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto lp = oracle::random_lp(rng, 1 + trial % 4, 2 + trial % 5);
        const auto want = oracle::enumerate_vertices(lp);
        const auto got = lp::solve_lp(lp);
        const std::string tag = "LP " + std::to_string(trial);
        if (!want.feasible) {
            v.require(got.status == lp::Status::infeasible, tag + " should be infeasible");
            continue;
        }
        ++feasible;
        v.require(got.optimal(), tag + " not solved");
        if (!got.optimal()) continue;
        v.require(std::abs(got.objective_value - want.objective) <= 1e-6,
                  tag + " objective " + str(got.objective_value) + " vs " + str(want.objective));
        v.require(lp.max_violation(got.values) <= 1e-7, tag + " violates its constraints");
    }
    int milp_feasible = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto lp = oracle::random_milp(rng, 1 + trial % 8);
        const auto want = oracle::enumerate_binaries(lp);
        const auto got = lp::solve_milp(lp);
        const std::string tag = "MILP " + std::to_string(trial);
        if (!want.feasible) {
            v.require(got.status == lp::Status::infeasible, tag + " should be infeasible");
            continue;
        }
        ++milp_feasible;
        v.require(got.optimal(), tag + " not solved");
        if (!got.optimal()) continue;
        v.require(std::abs(got.objective_value - want.objective) <= 1e-6,
                  tag + " objective " + str(got.objective_value) + " vs " + str(want.objective));
        v.require(lp.max_violation(got.values) <= 1e-7, tag + " violates its constraints");
    }
    const double secs = seconds_since(t0);
    v.require(secs < 10.0, "took " + str(secs) + " s");
    v.note(std::to_string(feasible) + "/100 LPs and " + std::to_string(milp_feasible) + "/50 MILPs feasible");
    v.note(str(secs) + " s");
    return v;
}

Verdict base_dispatch_33() {
    Verdict v;
    const auto& c = feeder33();
    const auto t0 = Clock::now();
    const auto x = solve_base_opf(c);
    const double secs = seconds_since(t0);
    const auto inj = fixture::dispatch_injections(c, x);
    const double bal = oracle::balance_residual(c, x.state, inj.first, inj.second);
    const double drop = oracle::voltage_drop_residual(c, x.state);
    const auto m = constraint_margins(c, x.state);
    v.require(c.horizon_hours == 24, "horizon is " + std::to_string(c.horizon_hours) + " hours");
    v.require(bal <= 1e-7, "balance residual " + str(bal));
    v.require(drop <= 1e-7, "voltage-drop residual " + str(drop));
    v.require(m.worst_line_margin <= 0.0, "line margin " + str(m.worst_line_margin));
    v.require(m.worst_node_margin <= 0.0, "node margin " + str(m.worst_node_margin));
    v.require(secs < 30.0, "took " + str(secs) + " s");
    v.note("residuals " + str(std::max(bal, drop)) + ", margins " + str(m.worst_line_margin) + " / " +
           str(m.worst_node_margin) + ", " + str(secs) + " s");
    return v;
}

Verdict attack_brute_force() {
    Verdict v;
    for (int hours = 1; hours <= 2; ++hours) {
        const auto c = fixture::five_node(hours);
        v.require(c.attackable_generators().size() == 3, "five-node feeder should have 3 attackable DGs");
        const auto x = solve_base_opf(c);
        for (int k = 0; k <= 3; ++k) {
            const auto a = assess_worst_attack(c, x, k, {true, {}});
            const double want = oracle::enumerate_attacks(c, x, k);
            v.require(std::abs(a.objective_value - want) <= 1e-6, "T = " + std::to_string(hours) + ", K = " +
                                                                       std::to_string(k) + ": " +
                                                                       str(a.objective_value) + " vs " + str(want));
            attack_runs.push_back({"five-node T" + std::to_string(hours) + " K" + std::to_string(k), c, x, a});
        }
    }
    return v;
}

Verdict budget_monotonicity_33() {
    Verdict v;
    const auto& c = feeder33();
    const auto x = solve_base_opf(c);
    for (bool binary : {false, true}) {
        double previous = -INFINITY;
        std::string values;
        for (int k = 0; k <= 3; ++k) {
            const auto a = assess_worst_attack(c, x, k, {binary, {}});
            v.require(a.objective_value >= previous - 1e-6,
                      std::string(binary ? "binary" : "continuous") + " k = " + std::to_string(k) + " drops to " +
                          str(a.objective_value));
            previous = a.objective_value;
            values += (k ? " " : "") + str(a.objective_value);
            attack_runs.push_back({std::string("case33 ") + (binary ? "binary" : "continuous") + " k" +
                                       std::to_string(k),
                                   c, x, a});
        }
        v.note(std::string(binary ? "binary" : "continuous") + " [" + values + "]");
    }
    return v;
}

Verdict violation_and_recovery_33() {
    Verdict v;
    for (int k = 2; k <= 3; ++k) {
        const auto t0 = Clock::now();
        const NetworkCase c = io::load_case(std::string(TROPF_DATA_DIR) + "/case33.json");
        ScenarioConfig cfg;
        cfg.k = k;
        const auto r = run_scenario(c, cfg);
        const double secs = seconds_since(t0);
        const std::string tag = "k = " + std::to_string(k);
        v.require(secs < 120.0, tag + " took " + str(secs) + " s");
        v.require(r.complete(), tag + ": " + r.failure);
        if (!r.complete()) continue;
        keep("case33 k" + std::to_string(k), c, r);

        double v_min = INFINITY, flow_max = 0.0;
        for (double sq : r.attack->state.v.data()) v_min = std::min(v_min, std::sqrt(std::max(sq, 0.0)));
        for (double f : r.attack->state.pf.data()) flow_max = std::max(flow_max, std::abs(f));
        const auto after = r.mitigation->violations;
        v.require(after.worst_line_margin <= 1e-6, tag + " stage 3 line margin " + str(after.worst_line_margin));
        v.require(after.worst_node_margin <= 1e-6, tag + " stage 3 node margin " + str(after.worst_node_margin));
        v.note(tag + ": stage 2 min |V| " + str(v_min) + " pu, max |pf| " + str(flow_max) + " pu; stage 3 margins " +
               str(after.worst_line_margin) + " / " + str(after.worst_node_margin) + "; " + str(secs) + " s");
        if (k == 3)
            v.require(v_min < 0.9 || flow_max > 1.5,
                      "no stage 2 voltage below 0.9 pu or flow above 1.5 pu (min |V| " + str(v_min) + ", max |pf| " +
                          str(flow_max) + ")");
    }
    return v;
}

NetworkCase five_with_storage(int hours) {
    auto c = fixture::five_node(hours);
    c.storage = {fixture::storage(3, 0.4, 2.0), fixture::storage(5, 0.5, 2.5, 0.6)};
    return c;
}

// Extra Stage 3 solutions on small feeders, so the audits see more than one case.
void gather_small_plans() {
    for (int k = 0; k <= 3; ++k) {
        ScenarioConfig cfg;
        cfg.k = k;
        const auto c = five_with_storage(3);
        keep("five-node storage k" + std::to_string(k), c, run_scenario(c, cfg));
    }
    auto day = fixture::five_node_day();
    day.storage = {fixture::storage(3, 0.3, 1.5, 0.5), fixture::storage(5, 0.4, 2.0, 0.7)};
    for (auto mode : {HorizonMode::full_horizon, HorizonMode::rolling}) {
        ScenarioConfig cfg;
        cfg.k = 2;
        cfg.mode = mode;
        keep(std::string("five-node day ") + to_string(mode), day, run_scenario(day, cfg));
    }
    auto deficit = fixture::deficit_feeder();
    deficit.storage = {fixture::storage(2, 0.6, 10.0)};
    ScenarioConfig cfg;
    cfg.k = 1;
    keep("deficit feeder", deficit, run_scenario(deficit, cfg));
}

// Charge e in hour 1, discharge in hour 2 until the SOC is back at its start;
// the energy returned over the energy stored is the round-trip factor.
double round_trip_factor(double eta_ch, double eta_dis) {
    auto c = fixture::deficit_feeder();
    c.horizon_hours = 2;
    c.demand = {Grid(2, 2), Grid(2, 2)};
    c.demand.p(1, 1) = 1.0;
    c.generators[1].p_max = 0.0;
    c.storage = {fixture::storage(2, 1.0, 4.0, 0.5)};
    c.storage[0].eta_ch = eta_ch;
    c.storage[0].eta_dis = eta_dis;
    const auto x = solve_base_opf(c);
    const auto a = assess_worst_attack(c, x, 0.0);
    auto m = build_mitigation_model(c, x, a);
    const double e = 0.8;
    m.lp.set_bounds(m.p_ch[0], e, e);
    m.lp.set_bounds(m.p_dis[0], 0.0, 0.0);
    m.lp.set_bounds(m.p_ch[1], 0.0, 0.0);
    m.lp.set_bounds(m.soc[1], 0.5, 0.5);
    const auto sol = lp::solve_milp(m.lp);
    if (!sol.optimal()) return NAN;
    return sol.values[static_cast<std::size_t>(m.p_dis[1])] / e;
}

Verdict soc_invariants() {
    Verdict v;
    double recursion = 0.0, bounds = 0.0;
    int simultaneous = 0;
    for (const auto& p : plan_runs) {
        const auto audit = oracle::audit_plan(p.c, p.x, p.a, p.z);
        v.require(audit.soc_recursion <= 1e-7, p.name + ": SOC recursion residual " + str(audit.soc_recursion));
        v.require(audit.soc_bounds <= 1e-7, p.name + ": SOC outside bounds by " + str(audit.soc_bounds));
        v.require(audit.simultaneous == 0,
                  p.name + ": " + std::to_string(audit.simultaneous) + " hours charging and discharging");
        recursion = std::max(recursion, audit.soc_recursion);
        bounds = std::max(bounds, audit.soc_bounds);
        simultaneous += audit.simultaneous;
    }
    for (auto [ec, ed] : {std::pair{0.93, 0.88}, std::pair{0.95, 0.95}, std::pair{1.0, 0.9}}) {
        const double f = round_trip_factor(ec, ed);
        v.require(std::abs(f - ec * ed) <= 1e-7, "round trip " + str(f) + " vs " + str(ec * ed));
    }
    v.note(std::to_string(plan_runs.size()) + " plans, worst recursion " + str(recursion) + ", bound excess " +
           str(std::max(bounds, 0.0)) + ", simultaneous hours " + std::to_string(simultaneous));
    return v;
}

Verdict epigraph_exactness() {
    Verdict v;
    double worst2 = 0.0, worst3 = 0.0;
    for (const auto& r : attack_runs) {
        const auto audit = oracle::audit_attack(r.c, r.x, r.a);
        const double gap = std::max(audit.inf_line_gap, audit.inf_node_gap);
        v.require(gap <= 1e-6, r.name + ": stage 2 epigraph gap " + str(gap));
        worst2 = std::max(worst2, gap);
    }
    for (const auto& p : plan_runs) {
        const auto audit = oracle::audit_plan(p.c, p.x, p.a, p.z);
        const double gap = std::max(audit.sup_line_gap, audit.sup_node_gap);
        v.require(gap <= 1e-6, p.name + ": stage 3 epigraph gap " + str(gap));
        worst3 = std::max(worst3, gap);
    }
    v.note(std::to_string(attack_runs.size()) + " attacks, worst gap " + str(worst2) + "; " +
           std::to_string(plan_runs.size()) + " plans, worst gap " + str(worst3));
    return v;
}

double largest_difference(const Grid& a, const Grid& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

Verdict trivial_identities() {
    Verdict v;
    auto unchanged = [&](const std::string& name, const NetworkCase& c) {
        ScenarioConfig cfg;
        cfg.k = 0;
        const auto r = run_scenario(c, cfg);
        v.require(r.complete(), name + ": " + r.failure);
        if (!r.complete()) return;
        keep(name + " k0", c, r);
        bool idle = true;
        for (double y : r.attack->attack.y.data()) idle = idle && y == 0.0;
        v.require(idle, name + ": attack is nonzero at k = 0");
        const auto& s1 = r.dispatch->state;
        const auto& s2 = r.attack->state;
        const double d = std::max(
            {largest_difference(s1.pf, s2.pf), largest_difference(s1.qf, s2.qf), largest_difference(s1.v, s2.v)});
        v.require(d <= 1e-9, name + ": stage 2 state moved by " + str(d));
    };
    unchanged("case33", feeder33());
    unchanged("five-node", fixture::five_node(2));

    auto idle_case = [&](const std::string& name, NetworkCase c) {
        c.demand = {Grid(c.num_nodes(), c.horizon_hours), Grid(c.num_nodes(), c.horizon_hours)};
        const auto x = solve_base_opf(c);
        v.require(std::abs(x.total_cost) <= 1e-9, name + ": zero-demand cost " + str(x.total_cost));
        double dv = 0.0;
        for (double sq : x.state.v.data()) dv = std::max(dv, std::abs(sq - 1.0));
        v.require(dv <= 1e-9, name + ": zero-demand voltage off by " + str(dv));
    };
    idle_case("case33", feeder33());
    idle_case("five-node", fixture::five_node(3));
    return v;
}

}  // namespace

int main() {
    // Identities run before the audits so that their plans are audited too;
    // lines are printed in criterion order.
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
        {1, solver_oracles},
        {2, base_dispatch_33},
        {3, attack_brute_force},
        {4, budget_monotonicity_33},
        {5, violation_and_recovery_33},
        {8, trivial_identities},
        {6, [] {
             gather_small_plans();
             return soc_invariants();
         }},
        {7, epigraph_exactness},
    };
    std::vector<std::string> lines(9);
    bool all = true;
    for (const auto& [id, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        all = all && v.passed();
        lines[static_cast<std::size_t>(id)] = v.line(id);
    }
    for (int id = 1; id <= 8; ++id) std::cout << lines[static_cast<std::size_t>(id)] << '\n';
    return all ? 0 : 1;
}
