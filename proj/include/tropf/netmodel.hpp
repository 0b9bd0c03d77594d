#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tropf/grid.hpp"

namespace tropf {

using NodeId = int;

struct Node {
    NodeId id = 0;
    double v_min = 0.9;  // pu
    double v_max = 1.1;  // pu

    friend bool operator==(const Node&, const Node&) = default;
};

struct Line {
    int id = 0;
    NodeId from_node = 0;
    NodeId to_node = 0;
    double r = 0.0;  // pu
    double x = 0.0;  // pu
    double pf_min = 0.0, pf_max = 0.0;
    double qf_min = 0.0, qf_max = 0.0;

    friend bool operator==(const Line&, const Line&) = default;
};

enum class GeneratorKind { substation, dispatchable, pv };

inline const char* to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::substation: return "substation";
        case GeneratorKind::dispatchable: return "dispatchable";
        case GeneratorKind::pv: return "pv";
    }
    return "?";
}

struct Generator {
    NodeId node = 0;
    GeneratorKind kind = GeneratorKind::dispatchable;
    double cost = 0.0;  // $/pu
    double p_min = 0.0, p_max = 0.0;
    double q_min = 0.0, q_max = 0.0;
    bool attackable = false;
    /// Optional hourly active-power cap (pu), e.g. a PV availability trace.
    std::vector<double> p_max_profile;
    /// Out-of-service units are kept in the case but ignored by every stage.
    bool in_service = true;

    double p_max_at(int hour) const {
        if (p_max_profile.empty()) return p_max;
        return std::min(p_max, p_max_profile[static_cast<std::size_t>(hour)]);
    }

    friend bool operator==(const Generator&, const Generator&) = default;
};

struct StorageUnit {
    NodeId node = 0;
    double e_max = 1.0;  // pu*h
    double eta_ch = 1.0, eta_dis = 1.0;
    double p_ch_min = 0.0, p_ch_max = 0.0;
    double p_dis_min = 0.0, p_dis_max = 0.0;
    double soc_min = 0.0, soc_max = 1.0, soc_init = 0.5;  // fractions of e_max
    double cost = 0.0;                                  // $/pu

    friend bool operator==(const StorageUnit&, const StorageUnit&) = default;
};

/// Active and reactive demand, node index x hour (pu).
struct DemandProfile {
    Grid p;
    Grid q;

    friend bool operator==(const DemandProfile&, const DemandProfile&) = default;
};

struct NetworkCase {
    std::string name;
    double base_mva = 1.0;
    double base_kv = 1.0;
    std::vector<Node> nodes;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<StorageUnit> storage;
    int horizon_hours = 1;
    DemandProfile demand;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }

    /// Position of node `id` in `nodes`, or -1.
    int node_index(NodeId id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }

    /// Index into `generators` of the in-service substation, or -1.
    int substation() const {
        for (std::size_t g = 0; g < generators.size(); ++g)
            if (generators[g].in_service && generators[g].kind == GeneratorKind::substation) return static_cast<int>(g);
        return -1;
    }

    /// In-service non-substation generators.
    std::vector<int> distributed_generators() const {
        std::vector<int> out;
        for (std::size_t g = 0; g < generators.size(); ++g)
            if (generators[g].in_service && generators[g].kind != GeneratorKind::substation)
                out.push_back(static_cast<int>(g));
        return out;
    }

    std::vector<int> attackable_generators() const {
        std::vector<int> out;
        for (int g : distributed_generators())
            if (generators[static_cast<std::size_t>(g)].attackable) out.push_back(g);
        return out;
    }

    friend bool operator==(const NetworkCase&, const NetworkCase&) = default;
};

/// Per-hour network state. v is the squared voltage magnitude (pu^2).
struct SystemState {
    Grid pf;  // line x hour
    Grid qf;  // line x hour
    Grid v;   // node x hour

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Constraint margins; positive entries are violations.
///   phi[0] = pf - pf_max     phi[1] = pf_min - pf     (line x hour)
///   phi[2] = qf - qf_max     phi[3] = qf_min - qf     (line x hour)
///   phi[4] = v - v_max^2     phi[5] = v_min^2 - v     (node x hour)
struct ViolationReport {
    std::array<Grid, 6> phi;
    double worst_line_margin = 0.0;
    double worst_node_margin = 0.0;

    bool safe(double tol = 0.0) const { return worst_line_margin <= tol && worst_node_margin <= tol; }

    double min_line_margin() const {
        return std::min({phi[0].min(), phi[1].min(), phi[2].min(), phi[3].min()});
    }
    double min_node_margin() const { return std::min(phi[4].min(), phi[5].min()); }

    /// Largest margin over one hour for the line families (k < 4) or node families.
    double hour_max(int hour, bool lines) const {
        double worst = -std::numeric_limits<double>::infinity();
        const int lo = lines ? 0 : 4, hi = lines ? 4 : 6;
        for (int k = lo; k < hi; ++k)
            for (int e = 0; e < phi[k].rows(); ++e) worst = std::max(worst, phi[k](e, hour));
        return worst;
    }
};

struct CaseViolation {
    std::string location;
    std::string message;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<CaseViolation> v)
        : std::runtime_error(summarize(v)), violations_(std::move(v)) {}
    const std::vector<CaseViolation>& violations() const { return violations_; }

private:
    static std::string summarize(const std::vector<CaseViolation>& v) {
        std::string s = "case validation failed:";
        for (const auto& e : v) s += "\n  " + e.location + ": " + e.message;
        return s;
    }
    std::vector<CaseViolation> violations_;
};

/// Every failed case invariant, in a deterministic order. Empty means valid.
inline std::vector<CaseViolation> check_case(const NetworkCase& c) {
    std::vector<CaseViolation> out;
    auto fail = [&](std::string where, std::string what) { out.push_back({std::move(where), std::move(what)}); };
    auto finite = [](double v) { return std::isfinite(v); };

    if (c.horizon_hours < 1) fail("horizon_hours", "must be a positive integer");
    if (c.nodes.empty()) fail("nodes", "case has no nodes");

    std::set<NodeId> ids;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& n = c.nodes[i];
        const std::string where = "node " + std::to_string(n.id);
        if (!ids.insert(n.id).second) fail(where, "duplicate node id");
        if (!(finite(n.v_min) && finite(n.v_max) && 0.0 < n.v_min && n.v_min < n.v_max))
            fail(where, "voltage bounds must satisfy 0 < v_min < v_max");
    }
    auto known = [&](NodeId id) { return ids.count(id) > 0; };

    std::set<int> line_ids;
    for (const auto& l : c.lines) {
        const std::string where = "line " + std::to_string(l.id);
        if (!line_ids.insert(l.id).second) fail(where, "duplicate line id");
        if (!known(l.from_node)) fail(where, "from_node " + std::to_string(l.from_node) + " does not exist");
        if (!known(l.to_node)) fail(where, "to_node " + std::to_string(l.to_node) + " does not exist");
        if (l.from_node == l.to_node) fail(where, "from_node equals to_node");
        if (!(finite(l.r) && finite(l.x) && l.r >= 0.0 && l.x >= 0.0)) fail(where, "impedance must be finite and non-negative");
        if (!(finite(l.pf_min) && finite(l.pf_max) && l.pf_min <= l.pf_max)) fail(where, "pf_min exceeds pf_max");
        if (!(finite(l.qf_min) && finite(l.qf_max) && l.qf_min <= l.qf_max)) fail(where, "qf_min exceeds qf_max");
    }

    int substations = 0;
    std::set<NodeId> dg_nodes;
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
        const auto& gen = c.generators[g];
        const std::string where = "generator " + std::to_string(g) + " (node " + std::to_string(gen.node) + ")";
        if (!known(gen.node)) fail(where, "node does not exist");
        if (!(finite(gen.cost))) fail(where, "cost must be finite");
        if (!(finite(gen.p_min) && finite(gen.p_max) && gen.p_min <= gen.p_max)) fail(where, "p_min exceeds p_max");
        if (!(finite(gen.q_min) && finite(gen.q_max) && gen.q_min <= gen.q_max)) fail(where, "q_min exceeds q_max");
        if (!gen.p_max_profile.empty()) {
            if (static_cast<int>(gen.p_max_profile.size()) != c.horizon_hours)
                fail(where, "p_max_profile length differs from horizon_hours");
            for (double v : gen.p_max_profile)
                if (!finite(v) || v < gen.p_min) {
                    fail(where, "p_max_profile entries must be finite and at least p_min");
                    break;
                }
        }
        if (!gen.in_service) continue;
        if (gen.kind == GeneratorKind::substation) {
            ++substations;
            if (gen.attackable) fail(where, "substation cannot be attackable");
        } else {
            dg_nodes.insert(gen.node);
        }
    }
    if (substations == 0) fail("generators", "no substation");
    if (substations > 1) fail("generators", "multiple substations");

    for (std::size_t s = 0; s < c.storage.size(); ++s) {
        const auto& u = c.storage[s];
        const std::string where = "storage " + std::to_string(s) + " (node " + std::to_string(u.node) + ")";
        if (!known(u.node)) fail(where, "node does not exist");
        else if (!dg_nodes.count(u.node)) fail(where, "storage must sit at a distributed-generator node");
        if (!(finite(u.e_max) && u.e_max > 0.0)) fail(where, "e_max must be positive");
        if (!(u.eta_ch > 0.0 && u.eta_ch <= 1.0 && u.eta_dis > 0.0 && u.eta_dis <= 1.0))
            fail(where, "efficiencies must lie in (0, 1]");
        if (!(finite(u.p_ch_max) && 0.0 <= u.p_ch_min && u.p_ch_min <= u.p_ch_max))
            fail(where, "charge bounds must satisfy 0 <= p_ch_min <= p_ch_max");
        if (!(finite(u.p_dis_max) && 0.0 <= u.p_dis_min && u.p_dis_min <= u.p_dis_max))
            fail(where, "discharge bounds must satisfy 0 <= p_dis_min <= p_dis_max");
        if (!(0.0 <= u.soc_min && u.soc_min <= u.soc_init && u.soc_init <= u.soc_max && u.soc_max <= 1.0))
            fail(where, "soc bounds must satisfy 0 <= soc_min <= soc_init <= soc_max <= 1");
        if (!finite(u.cost)) fail(where, "cost must be finite");
    }

    const int n = c.num_nodes(), t = c.horizon_hours;
    for (const auto* g : {&c.demand.p, &c.demand.q}) {
        const char* which = g == &c.demand.p ? "demand.p" : "demand.q";
        if (g->rows() != n || g->cols() != t) {
            fail(which, "dimension mismatch: expected " + std::to_string(n) + " nodes x " + std::to_string(t) + " hours");
            continue;
        }
        if (!std::all_of(g->data().begin(), g->data().end(), finite)) fail(which, "non-finite demand value");
    }

    // Radial: |L| = |N| - 1 and every node reachable from the substation.
    bool radial = c.num_lines() == n - 1;
    if (radial && n > 0) {
        std::map<NodeId, std::vector<NodeId>> adj;
        for (const auto& l : c.lines) {
            adj[l.from_node].push_back(l.to_node);
            adj[l.to_node].push_back(l.from_node);
        }
        int sub = c.substation();
        NodeId root = sub >= 0 ? c.generators[static_cast<std::size_t>(sub)].node : c.nodes.front().id;
        std::set<NodeId> seen{root};
        std::queue<NodeId> frontier;
        frontier.push(root);
        while (!frontier.empty()) {
            NodeId u = frontier.front();
            frontier.pop();
            for (NodeId w : adj[u])
                if (known(w) && seen.insert(w).second) frontier.push(w);
        }
        radial = static_cast<int>(seen.size()) == n;
    }
    if (!radial) fail("lines", "disconnected/non-radial topology");

    int sub = c.substation();
    if (sub >= 0) {
        int si = c.node_index(c.generators[static_cast<std::size_t>(sub)].node);
        if (si >= 0) {
            const auto& sn = c.nodes[static_cast<std::size_t>(si)];
            if (!(sn.v_min <= 1.0 && 1.0 <= sn.v_max))
                fail("node " + std::to_string(sn.id), "substation node bounds must contain the 1.0 pu reference");
        }
    }
    return out;
}

/// Returns the case unchanged when valid; throws ValidationError listing every failure.
inline const NetworkCase& validate_case(const NetworkCase& c) {
    auto v = check_case(c);
    if (!v.empty()) throw ValidationError(std::move(v));
    return c;
}

/// Line-by-node incidence: from[l][i] = 1 iff line l starts at node i,
/// to[l][i] = 1 iff it ends there.
struct Incidence {
    Grid from;
    Grid to;
};

inline Incidence incidence(const NetworkCase& c) {
    Incidence inc{Grid(c.num_lines(), c.num_nodes()), Grid(c.num_lines(), c.num_nodes())};
    for (int l = 0; l < c.num_lines(); ++l) {
        inc.from(l, c.node_index(c.lines[static_cast<std::size_t>(l)].from_node)) = 1.0;
        inc.to(l, c.node_index(c.lines[static_cast<std::size_t>(l)].to_node)) = 1.0;
    }
    return inc;
}

inline ViolationReport constraint_margins(const NetworkCase& c, const SystemState& s) {
    const int t = c.horizon_hours;
    ViolationReport r;
    for (int k = 0; k < 4; ++k) r.phi[k] = Grid(c.num_lines(), t);
    for (int k = 4; k < 6; ++k) r.phi[k] = Grid(c.num_nodes(), t);
    for (int l = 0; l < c.num_lines(); ++l) {
        const auto& line = c.lines[static_cast<std::size_t>(l)];
        for (int h = 0; h < t; ++h) {
            r.phi[0](l, h) = s.pf(l, h) - line.pf_max;
            r.phi[1](l, h) = line.pf_min - s.pf(l, h);
            r.phi[2](l, h) = s.qf(l, h) - line.qf_max;
            r.phi[3](l, h) = line.qf_min - s.qf(l, h);
        }
    }
    for (int i = 0; i < c.num_nodes(); ++i) {
        const auto& node = c.nodes[static_cast<std::size_t>(i)];
        for (int h = 0; h < t; ++h) {
            r.phi[4](i, h) = s.v(i, h) - node.v_max * node.v_max;
            r.phi[5](i, h) = node.v_min * node.v_min - s.v(i, h);
        }
    }
    r.worst_line_margin = std::max({r.phi[0].max(), r.phi[1].max(), r.phi[2].max(), r.phi[3].max()});
    r.worst_node_margin = std::max(r.phi[4].max(), r.phi[5].max());
    return r;
}

}  // namespace tropf
