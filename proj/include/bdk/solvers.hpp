#pragma once

#include <set>
#include <vector>

#include "bdk/generator.hpp"
#include "bdk/schedule.hpp"
#include "bdk/solution.hpp"

namespace bdk {

struct SolverOptions {
    double tol = 1e-10;
    State max_states = State{1} << 20;
    State initial_truncation = 64;
};

/// Absorption probabilities b_i = P(X hits 0 before the cemetery | X_0 = i)
/// over [0:N]. Infinite schedules are solved with b_M = 0 and M doubled
/// until the sup-change drops below tol.
SolutionVector solve_absorption_b(const RateSchedule& sched, const SolverOptions& opts = {});

/// Stationary tails a_i = P(Z_inf > i) over [0:N], with the stationary law
/// w_i of Z in `point_masses` (index 0 carries 0). Same truncation policy.
SolutionVector solve_tail_a(const RateSchedule& sched, const SolverOptions& opts = {});

/// w with w^T Q = 0, sum w = 1, indexed like the generator's interior range.
/// NotIrreducible if the chain is not strongly connected.
SolutionVector stationary_distribution(const Generator& gen, const SolverOptions& opts = {});

/// h(x) = P(hit target before taboo | start x) for every state, in
/// gen.index() order. With `cemetery_taboo` the cemetery joins the taboo set.
std::vector<double> first_passage_vector(const Generator& gen, const std::set<State>& target,
                                         const std::set<State>& taboo,
                                         bool cemetery_taboo = true);

/// SingularSystem when neither set is reachable from start.
double first_passage_prob(const Generator& gen, State start, const std::set<State>& target,
                          const std::set<State>& taboo, bool cemetery_taboo = true);

/// init * exp(Q t) by uniformization, Poisson tail below 1e-12 per step.
std::vector<double> transient_distribution(const Generator& gen, double t,
                                           const std::vector<double>& init);

/// exp(Q t) by uniformization on t / 2^k followed by k squarings.
Eigen::MatrixXd transition_matrix(const Generator& gen, double t);

/// Row-scaled sup residual of the b recursion on [1:hi-1] (and row hi when finite).
double b_residual(const RateSchedule& sched, const SolutionVector& b);
/// Row-scaled sup residual of the a recursion on [1:hi-1].
double a_residual(const RateSchedule& sched, const SolutionVector& a);

} // namespace bdk
