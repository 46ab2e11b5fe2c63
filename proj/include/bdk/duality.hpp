#pragma once

#include <optional>
#include <vector>

#include "bdk/generator.hpp"
#include "bdk/json_out.hpp"
#include "bdk/solution.hpp"
#include "bdk/solvers.hpp"

namespace bdk {

/// Siegmund dual with the cemetery read as +infinity.
///
/// `full` lives on [lo : hi+1] plus a cemetery. When the primal has a
/// cemetery, dual state hi+1 stands for "above every integer state" and the
/// dual cemetery for "above the cemetery"; without one, the top dual state is
/// the cemetery itself. States with no rate in or out are listed in
/// `isolated`, and `dual` is `full` with the isolated states at either end of
/// the range (and an isolated cemetery) dropped.
struct DualResult {
    Generator dual;
    Generator full;
    std::vector<State> isolated;
};

/// NotMonotone if a dual rate is negative beyond clamp_tol times the largest
/// primal out-rate.
DualResult siegmund_dual(const Generator& gen, double clamp_tol = 1e-12);

struct DualityPair {
    State x;
    State xstar;
    double t;
    double discrepancy;
};

struct DualityReport {
    std::vector<double> times;
    std::vector<double> max_by_time;
    double max_discrepancy = 0.0;
    double tol = 0.0;
    bool pass = true;
    std::size_t pairs = 0;
    std::vector<DualityPair> detail; // only with verbose
};

/// max |P(X_t >= x* | x) - P(x >= X*_t | x*)| over the (x, x*) grid; the
/// full grid up to 64 primal states, 256 sampled pairs beyond. `dual` may be
/// the full or the restricted dual of `gen`.
DualityReport verify_duality(const Generator& gen, const Generator& dual,
                             const std::vector<double>& times, double tol,
                             bool verbose = false);

ojson to_json(const DualityReport& r, bool verbose = false);

/// b_i / b_1 over [1:N] from the stationary tails of Z. Uses a.point_masses
/// when present, differences of a otherwise.
SolutionVector relate_b_from_a(const SolutionVector& a, const RateSchedule& sched);

/// b_i / b_k over [k:N] (the product may start at any k).
SolutionVector relative_b_ratios(const SolutionVector& a, const RateSchedule& sched, State k);

/// a_i / a_1 over [1:N-1] from the absorption probabilities of X.
/// HypothesisViolated if some mu_i = 0.
SolutionVector relate_a_from_b(const SolutionVector& b, const RateSchedule& sched);

/// prod_{j=1}^{i-1} mu_{j+1} / lambda_j over [1:N]: the inverse stationary
/// weight, relative to state 1, of the same chain with kappa = 0.
SolutionVector detailed_balance_product(const RateSchedule& sched);

/// rho_i = b_{i-1} - b_i over [1:N], rho_{N+1} = b_N.
SolutionVector rho_from_b(const SolutionVector& b);

/// P(Z* absorbs in 1 | Z*_0 = i) over [1:N].
SolutionVector zstar_absorption(const RateSchedule& sched);

/// Symmetric relative error; 0 when both are equal (including both zero).
double rel_err(double x, double y);

struct TheoremReport {
    double b_from_a_max_rel = 0.0;
    std::optional<double> a_from_b_max_rel; // empty when some mu_i = 0
    std::string a_from_b_note;
    State n = 0;
};

/// Both directions of the b/a exchange against independent solves.
TheoremReport check_theorem(const RateSchedule& sched, const SolverOptions& opts = {});
ojson to_json(const TheoremReport& r);

/// max rel error of bbar_{i+1}/bbar_2 against a_i/a_1 over i in [2:N], with
/// bbar from the bar schedule. The undefined lambda_0 only moves state 1 of
/// the bar chain, so any positive stand-in leaves these ratios unchanged.
double bar_absorption_check(const RateSchedule& sched, const SolverOptions& opts = {});

} // namespace bdk
