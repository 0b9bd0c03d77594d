#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tropf/netmodel.hpp"

namespace tropf::io {

/// A case document that is not well-formed JSON (kind == parse) or does not
/// follow the case schema (kind == schema). Validation failures of a
/// well-formed case are reported separately as ValidationError.
class CaseFileError : public std::runtime_error {
public:
    enum class Kind { parse, schema, io };

    CaseFileError(Kind kind, std::string message, int line = 0, int column = 0, std::string path = {})
        : std::runtime_error(std::move(message)), kind_(kind), line_(line), column_(column), path_(std::move(path)) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& path() const { return path_; }

private:
    Kind kind_;
    int line_, column_;
    std::string path_;
};

namespace detail {

using Json = nlohmann::json;

class Reader {
public:
    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw CaseFileError(CaseFileError::Kind::schema, (path.empty() ? "/" : path) + ": " + what, 0, 0,
                            path.empty() ? "/" : path);
    }

    static const Json& object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                              std::initializer_list<const char*> optional = {}) {
        if (!j.is_object()) fail(path, "expected an object");
        std::set<std::string> allowed;
        for (const char* k : required) {
            allowed.insert(k);
            if (!j.contains(k)) fail(path, std::string("missing field '") + k + "'");
        }
        for (const char* k : optional) allowed.insert(k);
        for (const auto& item : j.items())
            if (!allowed.count(item.key())) fail(path + "/" + item.key(), "unknown field");
        return j;
    }

    static double number(const Json& j, const std::string& path) {
        if (!j.is_number()) fail(path, "expected a number");
        return j.get<double>();
    }

    static int integer(const Json& j, const std::string& path) {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        return j.get<int>();
    }

    static bool boolean(const Json& j, const std::string& path) {
        if (!j.is_boolean()) fail(path, "expected true or false");
        return j.get<bool>();
    }

    static const Json& array(const Json& j, const std::string& path) {
        if (!j.is_array()) fail(path, "expected an array");
        return j;
    }

    static std::vector<double> numbers(const Json& j, const std::string& path, int expected_size) {
        array(j, path);
        if (static_cast<int>(j.size()) != expected_size)
            fail(path, "expected " + std::to_string(expected_size) + " hourly values, found " + std::to_string(j.size()));
        std::vector<double> out;
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "/" + std::to_string(k)));
        return out;
    }
};

inline GeneratorKind parse_kind(const Json& j, const std::string& path) {
    if (j == "substation") return GeneratorKind::substation;
    if (j == "dispatchable") return GeneratorKind::dispatchable;
    if (j == "pv") return GeneratorKind::pv;
    Reader::fail(path, "kind must be one of substation, dispatchable, pv");
}

inline std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

/// Parses a case document without running validate_case.
inline NetworkCase parse_case(std::string_view text) {
    using detail::Reader;
    detail::Json doc;
    try {
        doc = detail::Json::parse(text.begin(), text.end());
    } catch (const detail::Json::parse_error& e) {
        // nlohmann reports the 1-based byte offset of the offending character.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        auto [line, col] = detail::line_and_column(text, at);
        std::string what = e.what();
        if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
        throw CaseFileError(CaseFileError::Kind::parse,
                            "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                what,
                            line, col);
    }

    Reader::object(doc, "", {"base_mva", "base_kv", "horizon_hours", "nodes", "lines", "generators", "demand"},
                   {"name", "storage"});
    NetworkCase c;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) Reader::fail("/name", "expected a string");
        c.name = doc["name"].get<std::string>();
    }
    c.base_mva = Reader::number(doc["base_mva"], "/base_mva");
    c.base_kv = Reader::number(doc["base_kv"], "/base_kv");
    c.horizon_hours = Reader::integer(doc["horizon_hours"], "/horizon_hours");
    if (c.horizon_hours < 1) Reader::fail("/horizon_hours", "must be at least 1");
    const int T = c.horizon_hours;

    const auto& nodes = Reader::array(doc["nodes"], "/nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::string p = "/nodes/" + std::to_string(k);
        const auto& j = Reader::object(nodes[k], p, {"id", "v_min", "v_max"});
        c.nodes.push_back({Reader::integer(j["id"], p + "/id"), Reader::number(j["v_min"], p + "/v_min"),
                           Reader::number(j["v_max"], p + "/v_max")});
    }

    const auto& lines = Reader::array(doc["lines"], "/lines");
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string p = "/lines/" + std::to_string(k);
        const auto& j =
            Reader::object(lines[k], p, {"id", "from", "to", "r", "x", "pf_min", "pf_max", "qf_min", "qf_max"});
        Line l;
        l.id = Reader::integer(j["id"], p + "/id");
        l.from_node = Reader::integer(j["from"], p + "/from");
        l.to_node = Reader::integer(j["to"], p + "/to");
        l.r = Reader::number(j["r"], p + "/r");
        l.x = Reader::number(j["x"], p + "/x");
        l.pf_min = Reader::number(j["pf_min"], p + "/pf_min");
        l.pf_max = Reader::number(j["pf_max"], p + "/pf_max");
        l.qf_min = Reader::number(j["qf_min"], p + "/qf_min");
        l.qf_max = Reader::number(j["qf_max"], p + "/qf_max");
        c.lines.push_back(l);
    }

    const auto& gens = Reader::array(doc["generators"], "/generators");
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const std::string p = "/generators/" + std::to_string(k);
        const auto& j = Reader::object(gens[k], p, {"node", "kind", "cost", "p_min", "p_max", "q_min", "q_max"},
                                       {"attackable", "in_service", "p_max_profile"});
        Generator g;
        g.node = Reader::integer(j["node"], p + "/node");
        g.kind = detail::parse_kind(j["kind"], p + "/kind");
        g.cost = Reader::number(j["cost"], p + "/cost");
        g.p_min = Reader::number(j["p_min"], p + "/p_min");
        g.p_max = Reader::number(j["p_max"], p + "/p_max");
        g.q_min = Reader::number(j["q_min"], p + "/q_min");
        g.q_max = Reader::number(j["q_max"], p + "/q_max");
        if (j.contains("attackable")) g.attackable = Reader::boolean(j["attackable"], p + "/attackable");
        if (j.contains("in_service")) g.in_service = Reader::boolean(j["in_service"], p + "/in_service");
        if (j.contains("p_max_profile")) g.p_max_profile = Reader::numbers(j["p_max_profile"], p + "/p_max_profile", T);
        c.generators.push_back(std::move(g));
    }

    if (doc.contains("storage")) {
        const auto& units = Reader::array(doc["storage"], "/storage");
        for (std::size_t k = 0; k < units.size(); ++k) {
            const std::string p = "/storage/" + std::to_string(k);
            const auto& j = Reader::object(units[k], p,
                                           {"node", "e_max", "eta_ch", "eta_dis", "p_ch_min", "p_ch_max", "p_dis_min",
                                            "p_dis_max", "soc_min", "soc_max", "soc_init", "cost"});
            StorageUnit u;
            u.node = Reader::integer(j["node"], p + "/node");
            u.e_max = Reader::number(j["e_max"], p + "/e_max");
            u.eta_ch = Reader::number(j["eta_ch"], p + "/eta_ch");
            u.eta_dis = Reader::number(j["eta_dis"], p + "/eta_dis");
            u.p_ch_min = Reader::number(j["p_ch_min"], p + "/p_ch_min");
            u.p_ch_max = Reader::number(j["p_ch_max"], p + "/p_ch_max");
            u.p_dis_min = Reader::number(j["p_dis_min"], p + "/p_dis_min");
            u.p_dis_max = Reader::number(j["p_dis_max"], p + "/p_dis_max");
            u.soc_min = Reader::number(j["soc_min"], p + "/soc_min");
            u.soc_max = Reader::number(j["soc_max"], p + "/soc_max");
            u.soc_init = Reader::number(j["soc_init"], p + "/soc_init");
            u.cost = Reader::number(j["cost"], p + "/cost");
            c.storage.push_back(u);
        }
    }

    // One demand entry per node, in any order.
    const auto& demand = Reader::array(doc["demand"], "/demand");
    c.demand = {Grid(c.num_nodes(), T), Grid(c.num_nodes(), T)};
    std::vector<bool> seen(c.nodes.size(), false);
    for (std::size_t k = 0; k < demand.size(); ++k) {
        const std::string p = "/demand/" + std::to_string(k);
        const auto& j = Reader::object(demand[k], p, {"node", "p", "q"});
        const int id = Reader::integer(j["node"], p + "/node");
        const int i = c.node_index(id);
        if (i < 0) Reader::fail(p + "/node", "node " + std::to_string(id) + " does not exist");
        if (seen[static_cast<std::size_t>(i)]) Reader::fail(p + "/node", "second demand entry for node " + std::to_string(id));
        seen[static_cast<std::size_t>(i)] = true;
        auto pd = Reader::numbers(j["p"], p + "/p", T);
        auto qd = Reader::numbers(j["q"], p + "/q", T);
        for (int h = 0; h < T; ++h) {
            c.demand.p(i, h) = pd[static_cast<std::size_t>(h)];
            c.demand.q(i, h) = qd[static_cast<std::size_t>(h)];
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) Reader::fail("/demand", "no entry for node " + std::to_string(c.nodes[i].id));
    return c;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CaseFileError(CaseFileError::Kind::io, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Reads, parses and validates a case file. Throws CaseFileError for IO,
/// syntax and schema problems and ValidationError for invalid content.
inline NetworkCase load_case(const std::string& path) {
    NetworkCase c = parse_case(read_text(path));
    validate_case(c);
    return c;
}

inline nlohmann::ordered_json case_to_json(const NetworkCase& c) {
    using J = nlohmann::ordered_json;
    J doc;
    doc["name"] = c.name;
    doc["base_mva"] = c.base_mva;
    doc["base_kv"] = c.base_kv;
    doc["horizon_hours"] = c.horizon_hours;
    doc["nodes"] = J::array();
    for (const auto& n : c.nodes) doc["nodes"].push_back({{"id", n.id}, {"v_min", n.v_min}, {"v_max", n.v_max}});
    doc["lines"] = J::array();
    for (const auto& l : c.lines)
        doc["lines"].push_back({{"id", l.id},
                                {"from", l.from_node},
                                {"to", l.to_node},
                                {"r", l.r},
                                {"x", l.x},
                                {"pf_min", l.pf_min},
                                {"pf_max", l.pf_max},
                                {"qf_min", l.qf_min},
                                {"qf_max", l.qf_max}});
    doc["generators"] = J::array();
    for (const auto& g : c.generators) {
        J j = {{"node", g.node}, {"kind", to_string(g.kind)}, {"cost", g.cost}, {"p_min", g.p_min},
               {"p_max", g.p_max}, {"q_min", g.q_min}, {"q_max", g.q_max}, {"attackable", g.attackable}};
        if (!g.in_service) j["in_service"] = false;
        if (!g.p_max_profile.empty()) j["p_max_profile"] = g.p_max_profile;
        doc["generators"].push_back(std::move(j));
    }
    doc["storage"] = J::array();
    for (const auto& u : c.storage)
        doc["storage"].push_back({{"node", u.node},
                                  {"e_max", u.e_max},
                                  {"eta_ch", u.eta_ch},
                                  {"eta_dis", u.eta_dis},
                                  {"p_ch_min", u.p_ch_min},
                                  {"p_ch_max", u.p_ch_max},
                                  {"p_dis_min", u.p_dis_min},
                                  {"p_dis_max", u.p_dis_max},
                                  {"soc_min", u.soc_min},
                                  {"soc_max", u.soc_max},
                                  {"soc_init", u.soc_init},
                                  {"cost", u.cost}});
    doc["demand"] = J::array();
    for (int i = 0; i < c.num_nodes(); ++i) {
        auto p = c.demand.p.row(i), q = c.demand.q.row(i);
        doc["demand"].push_back({{"node", c.nodes[static_cast<std::size_t>(i)].id},
                                 {"p", std::vector<double>(p.begin(), p.end())},
                                 {"q", std::vector<double>(q.begin(), q.end())}});
    }
    return doc;
}

inline void write_case(const NetworkCase& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CaseFileError(CaseFileError::Kind::io, "cannot write '" + path + "'");
    out << case_to_json(c).dump(1) << '\n';
}

}  // namespace tropf::io
