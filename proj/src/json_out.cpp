#include "bdk/json_out.hpp"

#include <cmath>
#include <cstdio>

namespace bdk {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write(const ojson& v, int indent, int depth, std::string& out) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
    case ojson::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += ojson(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write(it.value(), indent, depth + 1, out);
        }
        newline(depth);
        out += '}';
        return;
    }
    case ojson::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            write(e, indent, depth + 1, out);
        }
        newline(depth);
        out += ']';
        return;
    }
    case ojson::value_t::number_float: {
        const double x = v.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    default:
        out += v.dump();
    }
}

} // namespace

std::string dump_json(const ojson& doc, int indent) {
    std::string out;
    write(doc, indent, 0, out);
    out += '\n';
    return out;
}

std::string csv_header(const std::string& table) { return "# bdk-csv v1 " + table + "\n"; }

} // namespace bdk
