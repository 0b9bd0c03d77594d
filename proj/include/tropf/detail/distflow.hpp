#pragma once

#include <string>
#include <vector>

#include "tropf/lp/linear_program.hpp"
#include "tropf/netmodel.hpp"

// Pieces shared by the three stage models: flow/voltage variables,
// voltage-drop rows, nodal balance rows and the margin epigraph rows.
namespace tropf::detail {

inline std::string tag(const char* what, int element, int hour) {
    return std::string(what) + "[" + std::to_string(element) + ",t" + std::to_string(hour + 1) + "]";
}

struct FlowVars {
    int hours = 0;
    std::vector<int> pf, qf, v;  // element-major: [e * hours + h]

    int pf_at(int l, int h) const { return pf[static_cast<std::size_t>(l * hours + h)]; }
    int qf_at(int l, int h) const { return qf[static_cast<std::size_t>(l * hours + h)]; }
    int v_at(int i, int h) const { return v[static_cast<std::size_t>(i * hours + h)]; }
};

/// Adds pf, qf, v for every line/node and hour. With `boxed`, the flow and
/// squared-voltage limits become variable bounds; otherwise they are free.
/// The substation voltage is pinned to 1 pu^2 either way.
inline FlowVars add_flow_variables(lp::LinearProgram& lp, const NetworkCase& c, bool boxed) {
    FlowVars f;
    f.hours = c.horizon_hours;
    const int T = c.horizon_hours;
    for (int l = 0; l < c.num_lines(); ++l) {
        const auto& line = c.lines[static_cast<std::size_t>(l)];
        for (int h = 0; h < T; ++h)
            f.pf.push_back(lp.add_variable(tag("pf", line.id, h), boxed ? line.pf_min : -lp::kInf,
                                           boxed ? line.pf_max : lp::kInf));
        for (int h = 0; h < T; ++h)
            f.qf.push_back(lp.add_variable(tag("qf", line.id, h), boxed ? line.qf_min : -lp::kInf,
                                           boxed ? line.qf_max : lp::kInf));
    }
    // pf and qf were pushed line by line, hour-contiguous, as pf_at expects.
    const int sub = c.substation();
    const int sub_index = sub >= 0 ? c.node_index(c.generators[static_cast<std::size_t>(sub)].node) : -1;
    for (int i = 0; i < c.num_nodes(); ++i) {
        const auto& node = c.nodes[static_cast<std::size_t>(i)];
        for (int h = 0; h < T; ++h) {
            double lo = boxed ? node.v_min * node.v_min : -lp::kInf;
            double hi = boxed ? node.v_max * node.v_max : lp::kInf;
            if (i == sub_index) lo = hi = 1.0;
            f.v.push_back(lp.add_variable(tag("v", node.id, h), lo, hi));
        }
    }
    return f;
}

/// v_FN - v_TN - 2 r pf - 2 x qf = 0 for every line and hour.
inline void add_voltage_drop_rows(lp::LinearProgram& lp, const NetworkCase& c, const FlowVars& f) {
    for (int l = 0; l < c.num_lines(); ++l) {
        const auto& line = c.lines[static_cast<std::size_t>(l)];
        const int fn = c.node_index(line.from_node), tn = c.node_index(line.to_node);
        for (int h = 0; h < f.hours; ++h)
            lp.add_constraint(tag("vdrop", line.id, h),
                              {{f.v_at(fn, h), 1.0},
                               {f.v_at(tn, h), -1.0},
                               {f.pf_at(l, h), -2.0 * line.r},
                               {f.qf_at(l, h), -2.0 * line.x}},
                              lp::Relation::equal, 0.0);
    }
}

/// What a node injects in one hour: a constant plus a linear expression.
struct Injection {
    double constant = 0.0;
    std::vector<lp::Term> terms;
};

/// Adds one balance row per node and hour:
///   sum(in flows) - sum(out flows) + injection terms = demand - injection constant.
/// `inject(i, h, reactive)` supplies the injection at node index i.
template <class InjectFn>
void add_balance_rows(lp::LinearProgram& lp, const NetworkCase& c, const FlowVars& f, InjectFn&& inject) {
    for (int reactive = 0; reactive < 2; ++reactive) {
        for (int i = 0; i < c.num_nodes(); ++i) {
            const NodeId id = c.nodes[static_cast<std::size_t>(i)].id;
            for (int h = 0; h < f.hours; ++h) {
                Injection inj = inject(i, h, reactive != 0);
                std::vector<lp::Term> terms = std::move(inj.terms);
                for (int l = 0; l < c.num_lines(); ++l) {
                    const auto& line = c.lines[static_cast<std::size_t>(l)];
                    const int var = reactive ? f.qf_at(l, h) : f.pf_at(l, h);
                    if (line.to_node == id) terms.push_back({var, 1.0});
                    if (line.from_node == id) terms.push_back({var, -1.0});
                }
                const double demand = reactive ? c.demand.q(i, h) : c.demand.p(i, h);
                lp.add_constraint(tag(reactive ? "qbal" : "pbal", id, h), std::move(terms), lp::Relation::equal,
                                  demand - inj.constant);
            }
        }
    }
}

/// Bounds an auxiliary variable by every margin of one group. Each margin is
/// affine in a single state variable, phi = a * x + b, so the row reads
/// aux - a * x  (<= or >=)  b.
inline void add_epigraph_rows(lp::LinearProgram& lp, const NetworkCase& c, const FlowVars& f, int line_aux,
                              int node_aux, lp::Relation rel) {
    const char* label = rel == lp::Relation::less_equal ? "inf" : "sup";
    const std::string prefix = std::string(label) + "_phi";
    auto row = [&](int family, int element, int h, int aux, int var, double a, double b) {
        lp.add_constraint(tag((prefix + std::to_string(family)).c_str(), element, h), {{aux, 1.0}, {var, -a}}, rel, b);
    };
    if (line_aux >= 0)
        for (int l = 0; l < c.num_lines(); ++l) {
            const auto& line = c.lines[static_cast<std::size_t>(l)];
            for (int h = 0; h < f.hours; ++h) {
                row(1, line.id, h, line_aux, f.pf_at(l, h), 1.0, -line.pf_max);
                row(2, line.id, h, line_aux, f.pf_at(l, h), -1.0, line.pf_min);
                row(3, line.id, h, line_aux, f.qf_at(l, h), 1.0, -line.qf_max);
                row(4, line.id, h, line_aux, f.qf_at(l, h), -1.0, line.qf_min);
            }
        }
    if (node_aux >= 0)
        for (int i = 0; i < c.num_nodes(); ++i) {
            const auto& node = c.nodes[static_cast<std::size_t>(i)];
            for (int h = 0; h < f.hours; ++h) {
                row(5, node.id, h, node_aux, f.v_at(i, h), 1.0, -node.v_max * node.v_max);
                row(6, node.id, h, node_aux, f.v_at(i, h), -1.0, node.v_min * node.v_min);
            }
        }
}

inline SystemState extract_state(const NetworkCase& c, const FlowVars& f, const std::vector<double>& x) {
    const int T = c.horizon_hours;
    SystemState s{Grid(c.num_lines(), T), Grid(c.num_lines(), T), Grid(c.num_nodes(), T)};
    for (int l = 0; l < c.num_lines(); ++l)
        for (int h = 0; h < T; ++h) {
            s.pf(l, h) = x[static_cast<std::size_t>(f.pf_at(l, h))];
            s.qf(l, h) = x[static_cast<std::size_t>(f.qf_at(l, h))];
        }
    for (int i = 0; i < c.num_nodes(); ++i)
        for (int h = 0; h < T; ++h) s.v(i, h) = x[static_cast<std::size_t>(f.v_at(i, h))];
    return s;
}

}  // namespace tropf::detail
