#include "bdk/solution.hpp"

#include <cmath>
#include <sstream>

#include "bdk/errors.hpp"

namespace bdk {

double SolutionVector::at(State i) const {
    if (!contains(i))
        throw RangeError("index " + std::to_string(i) + " outside [" + std::to_string(lo) + ":" +
                         std::to_string(hi()) + "]");
    return values[static_cast<std::size_t>(i - lo)];
}

std::string to_csv(const SolutionVector& v) {
    std::string out = csv_header(v.meta.label.empty() ? "solution" : v.meta.label);
    out += "index,value\n";
    for (std::size_t k = 0; k < v.values.size(); ++k)
        out += std::to_string(v.lo + static_cast<State>(k)) + "," + format_double(v.values[k]) +
               "\n";
    return out;
}

SolutionVector solution_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    SolutionVector v;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line == "index,value") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(lineno, 1, "expected index,value");
        State idx;
        double val;
        try {
            idx = std::stoll(line.substr(0, comma));
            val = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError(lineno, 1, "malformed row");
        }
        if (first) {
            v.lo = idx;
            first = false;
        } else if (idx != v.hi() + 1) {
            throw ParseError(lineno, 1, "indices must be contiguous");
        }
        v.values.push_back(val);
    }
    return v;
}

ojson to_json(const SolutionVector& v) {
    ojson j;
    j["label"] = v.meta.label;
    j["lo"] = v.lo;
    j["hi"] = v.hi();
    j["values"] = v.values;
    if (!v.point_masses.empty()) j["point_masses"] = v.point_masses;
    ojson meta;
    meta["truncation"] = v.meta.truncation;
    meta["residual"] = v.meta.residual;
    ojson hist = ojson::array();
    for (const auto& h : v.meta.history)
        hist.push_back({{"truncation", h.truncation}, {"sup_change", h.sup_change}});
    meta["history"] = hist;
    if (!v.meta.warnings.empty()) meta["warnings"] = v.meta.warnings;
    j["meta"] = meta;
    return j;
}

} // namespace bdk
