#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tropf/orchestrator.hpp"

namespace tropf::io {

class ResultsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double. Negative zero prints as 0.
inline std::string format_value(double v) {
    if (v == 0.0) v = 0.0;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

/// Voltage magnitude from the squared-voltage state variable.
inline double voltage_magnitude(double v_squared) { return std::sqrt(std::max(v_squared, 0.0)); }

namespace detail {

class Table {
public:
    explicit Table(const char* header) { out_ << header << '\n'; }

    template <class... Fields>
    void row(const Fields&... f) {
        bool first = true;
        ((out_ << (first ? "" : ",") << text(f), first = false), ...);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    static std::string text(double v) { return format_value(v); }
    static std::string text(int v) { return std::to_string(v); }
    static std::string text(const char* s) { return s; }
    static std::string text(const std::string& s) { return s; }

    std::ostringstream out_;
};

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResultsError("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw ResultsError("write failed for '" + path.string() + "'");
}

inline const SystemState* stage_state(const ScenarioResult& r, int stage) {
    if (stage == 1 && r.dispatch) return &r.dispatch->state;
    if (stage == 2 && r.attack) return &r.attack->state;
    if (stage == 3 && r.mitigation) return &r.mitigation->state;
    return nullptr;
}

}  // namespace detail

inline std::string dispatch_table(const NetworkCase& c, const ScenarioResult& r) {
    detail::Table t("gen_node,hour,p_pu,q_pu");
    if (!r.dispatch) return t.str();
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
        if (!c.generators[g].in_service) continue;
        for (int h = 0; h < c.horizon_hours; ++h)
            t.row(c.generators[g].node, h + 1, r.dispatch->p_g(static_cast<int>(g), h),
                  r.dispatch->q_g(static_cast<int>(g), h));
    }
    return t.str();
}

inline std::string attack_table(const NetworkCase& c, const ScenarioResult& r) {
    detail::Table t("gen_node,hour,y");
    if (!r.attack) return t.str();
    const auto& a = r.attack->attack;
    for (std::size_t i = 0; i < a.generators.size(); ++i)
        for (int h = 0; h < c.horizon_hours; ++h)
            t.row(c.generators[static_cast<std::size_t>(a.generators[i])].node, h + 1, a.y(static_cast<int>(i), h));
    return t.str();
}

inline std::string storage_table(const NetworkCase& c, const ScenarioResult& r) {
    detail::Table t("ess_node,hour,p_ch_pu,p_dis_pu,soc");
    if (!r.mitigation) return t.str();
    const auto& m = *r.mitigation;
    for (std::size_t u = 0; u < c.storage.size(); ++u) {
        const int i = static_cast<int>(u);
        for (int h = 0; h < c.horizon_hours; ++h)
            t.row(c.storage[u].node, h + 1, m.p_ch(i, h), m.p_dis(i, h), m.soc(i, h));
    }
    return t.str();
}

inline std::string state_table(const NetworkCase& c, const ScenarioResult& r) {
    detail::Table t("stage,element_kind,element_id,hour,value_kind,value");
    for (int stage = 1; stage <= 3; ++stage) {
        const SystemState* s = detail::stage_state(r, stage);
        if (!s) continue;
        for (int l = 0; l < c.num_lines(); ++l) {
            const int id = c.lines[static_cast<std::size_t>(l)].id;
            for (int h = 0; h < c.horizon_hours; ++h) {
                t.row(stage, "line", id, h + 1, "pf", s->pf(l, h));
                t.row(stage, "line", id, h + 1, "qf", s->qf(l, h));
            }
        }
        for (int i = 0; i < c.num_nodes(); ++i) {
            const int id = c.nodes[static_cast<std::size_t>(i)].id;
            for (int h = 0; h < c.horizon_hours; ++h) {
                t.row(stage, "node", id, h + 1, "v", s->v(i, h));
                t.row(stage, "node", id, h + 1, "v_mag", voltage_magnitude(s->v(i, h)));
            }
        }
    }
    return t.str();
}

inline std::string violations_table(const NetworkCase& c, const ScenarioResult& r) {
    detail::Table t("stage,phi_family,element_id,hour,phi_pu");
    for (int stage = 1; stage <= 3; ++stage) {
        const SystemState* s = detail::stage_state(r, stage);
        if (!s) continue;
        const ViolationReport v = constraint_margins(c, *s);
        for (int k = 0; k < 6; ++k) {
            const std::string family = "phi" + std::to_string(k + 1);
            const bool line = k < 4;
            for (int e = 0; e < v.phi[static_cast<std::size_t>(k)].rows(); ++e) {
                const int id = line ? c.lines[static_cast<std::size_t>(e)].id : c.nodes[static_cast<std::size_t>(e)].id;
                for (int h = 0; h < c.horizon_hours; ++h)
                    t.row(stage, family, id, h + 1, v.phi[static_cast<std::size_t>(k)](e, h));
            }
        }
    }
    return t.str();
}

/// Run summary without wall-clock data, so repeated runs produce identical text.
inline nlohmann::ordered_json summary_json(const NetworkCase& c, const ScenarioResult& r) {
    using J = nlohmann::ordered_json;
    J doc;
    doc["case"] = c.name;
    doc["config"] = {{"k", r.config.k},
                     {"mode", to_string(r.config.mode)},
                     {"binary_attack", r.config.binary_attack},
                     {"hard_limits", r.config.hard_limits},
                     {"weights", {{"cost", r.config.weights.cost},
                                  {"line", r.config.weights.line},
                                  {"node", r.config.weights.node}}}};
    doc["complete"] = r.complete();
    doc["failed_stage"] = r.failed_stage;
    doc["failure"] = r.failure;

    auto stage_block = [&](int stage, const SystemState& s, J extra) {
        const ViolationReport v = constraint_margins(c, s);
        double lo = lp::kInf, hi = -lp::kInf;
        for (double x : s.v.data()) {
            lo = std::min(lo, voltage_magnitude(x));
            hi = std::max(hi, voltage_magnitude(x));
        }
        extra["worst_line_margin"] = c.num_lines() > 0 ? v.worst_line_margin : 0.0;
        extra["worst_node_margin"] = v.worst_node_margin;
        extra["min_voltage_magnitude"] = lo;
        extra["max_voltage_magnitude"] = hi;
        extra["hourly_line_margin"] = r.hourly_line_margin[static_cast<std::size_t>(stage - 1)];
        extra["hourly_node_margin"] = r.hourly_node_margin[static_cast<std::size_t>(stage - 1)];
        return extra;
    };
    J stages = J::object();
    if (r.dispatch) stages["stage1"] = stage_block(1, r.dispatch->state, {{"total_cost", r.dispatch->total_cost}});
    if (r.attack)
        stages["stage2"] = stage_block(2, r.attack->state,
                                       {{"objective", r.attack->objective_value},
                                        {"inf_line_term", r.attack->inf_line_term},
                                        {"inf_node_term", r.attack->inf_node_term}});
    if (r.mitigation)
        stages["stage3"] = stage_block(3, r.mitigation->state,
                                       {{"objective", r.mitigation->objective_value},
                                        {"sup_line_term", r.mitigation->sup_line_term},
                                        {"sup_node_term", r.mitigation->sup_node_term}});
    doc["stages"] = std::move(stages);
    return doc;
}

inline nlohmann::ordered_json timings_json(const ScenarioResult& r) {
    return {{"stage1_seconds", r.timings.seconds[0]},
            {"stage2_seconds", r.timings.seconds[1]},
            {"stage3_seconds", r.timings.seconds[2]}};
}

/// Writes the five tables, summary.json and timings.json into `dir`, creating it if needed.
inline void write_results(const NetworkCase& c, const ScenarioResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResultsError("cannot create '" + dir.string() + "': " + ec.message());
    detail::write_file(dir / "dispatch.csv", dispatch_table(c, r));
    detail::write_file(dir / "attack.csv", attack_table(c, r));
    detail::write_file(dir / "storage.csv", storage_table(c, r));
    detail::write_file(dir / "state.csv", state_table(c, r));
    detail::write_file(dir / "violations.csv", violations_table(c, r));
    detail::write_file(dir / "summary.json", summary_json(c, r).dump(2) + "\n");
    detail::write_file(dir / "timings.json", timings_json(r).dump(2) + "\n");
}

}  // namespace tropf::io
