#pragma once

#include <string>
#include <vector>

#include "bdk/json_out.hpp"
#include "bdk/schedule.hpp"

namespace bdk {

struct RefinementStep {
    State truncation;
    double sup_change; // vs the previous level; +inf for the first
};

struct SolutionMeta {
    State truncation = 0; // M for truncated solves, N otherwise
    double residual = 0.0; // sup-norm of the defining system
    std::vector<RefinementStep> history;
    std::string label;
    std::vector<std::string> warnings;
};

/// Values indexed by [lo : lo + size - 1]. Solvers that work through a
/// stationary law also fill `point_masses` (aligned with `values`).
struct SolutionVector {
    State lo = 0;
    std::vector<double> values;
    std::vector<double> point_masses;
    SolutionMeta meta;

    State hi() const { return lo + static_cast<State>(values.size()) - 1; }
    bool contains(State i) const { return i >= lo && i <= hi(); }
    /// Throws RangeError outside the index range.
    double at(State i) const;
    double operator()(State i) const { return at(i); }
    /// 0 beyond hi: the truncation boundary value.
    double at_or_zero(State i) const { return contains(i) ? values[static_cast<std::size_t>(i - lo)] : 0.0; }
};

/// "index,value" rows under a versioned header.
std::string to_csv(const SolutionVector& v);
SolutionVector solution_from_csv(const std::string& text);
ojson to_json(const SolutionVector& v);

} // namespace bdk
