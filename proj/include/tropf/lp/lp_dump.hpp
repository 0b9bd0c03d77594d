#pragma once

#include <charconv>
#include <ostream>
#include <string>

#include "tropf/lp/linear_program.hpp"

namespace tropf::lp {

inline std::string format_number(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

/// Human-readable listing: objective, one constraint per line, then bounds.
///
///   maximize: 2 x + 3 y + 0.5
///   c1: 1 x + 1 y <= 4
///   bounds: 0 <= x <= inf
///   binary: z
inline void dump_lp(const LinearProgram& lp, std::ostream& out) {
    auto term = [&](double coef, int var, bool first) {
        std::string s;
        if (!first) s += coef < 0 ? " - " : " + ";
        else if (coef < 0) s += "-";
        s += format_number(std::abs(coef)) + " " + lp.variable(var).name;
        return s;
    };
    out << (lp.sense() == Sense::minimize ? "minimize:" : "maximize:");
    bool first = true;
    for (int j = 0; j < lp.num_variables(); ++j) {
        double c = lp.objective()[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        out << (first ? " " : "") << term(c, j, first);
        first = false;
    }
    if (lp.objective_offset() != 0.0 || first)
        out << (first ? " " : " + ") << format_number(lp.objective_offset());
    out << '\n';
    for (const auto& c : lp.constraints()) {
        out << c.name << ":";
        bool f = true;
        for (const auto& t : c.terms) {
            out << (f ? " " : "") << term(t.coef, t.var, f);
            f = false;
        }
        if (f) out << " 0";
        switch (c.relation) {
            case Relation::less_equal: out << " <= "; break;
            case Relation::equal: out << " = "; break;
            case Relation::greater_equal: out << " >= "; break;
        }
        out << format_number(c.rhs) << '\n';
    }
    for (const auto& v : lp.variables()) {
        if (v.is_binary)
            out << "binary: " << v.name << '\n';
        else
            out << "bounds: " << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper)
                << '\n';
    }
}

}  // namespace tropf::lp
