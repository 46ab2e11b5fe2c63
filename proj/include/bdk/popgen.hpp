#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bdk/generator.hpp"
#include "bdk/json_out.hpp"
#include "bdk/schedule.hpp"
#include "bdk/solution.hpp"
#include "bdk/solvers.hpp"

namespace bdk {

struct MoranParams {
    State n = 2;
    double s = 0.0;
    double u = 1.0;
    double nu0 = 0.5;
    double nu1() const { return 1.0 - nu0; }
};

struct DiffusionParams {
    double sigma = 0.0;
    double theta = 1.0;
    double nu0 = 0.5;
    double nu1() const { return 1.0 - nu0; }
};

void validate(const MoranParams& p);
void validate(const DiffusionParams& p);

struct MoranForward {
    Generator generator;
    SolutionVector pi; // over [0:N]
    /// sup |pi - stationary_distribution(generator)|.
    double crosscheck = 0.0;
};

/// Unfit-type count of the two-type Moran model and its stationary law by
/// the detailed-balance product.
MoranForward moran_forward(const MoranParams& p);

RateSchedule kasg_schedule(const MoranParams& p);
RateSchedule pldasg_schedule(const MoranParams& p);

/// sum_k pi_k k^(i falling) / N^(i falling).
double sampling_moments(const SolutionVector& pi, State i);

/// Probability that the eventual common ancestor is unfit given i unfit
/// individuals now. `strict_paper` evaluates the printed indexing
/// (a_j with i^(j)/N^(j-1)), which misses the boundary values.
double ancestral_type_prob_finite(const SolutionVector& a, State i, bool strict_paper = false);

/// E[f(Y)] under Wright's distribution, node count doubled from 32 until the
/// relative change is below tol. QuadratureNoConvergence past 2048 nodes.
double wright_expectation(const DiffusionParams& p, const std::function<double(double)>& f,
                          double tol = 1e-12);

/// beta_i = E[Y^i] over [0:imax].
SolutionVector wright_moments(const DiffusionParams& p, State imax, double tol = 1e-12);

/// Tails alpha of the diffusion pLD-ASG by the tail solver (initial
/// truncation 64 + ceil(10 sigma)); alpha = (1, 0, ...) when sigma = 0.
SolutionVector fearnhead_tails(const DiffusionParams& p, const SolverOptions& opts = {});

/// 1 - (1-y) sum_{i>=0} alpha_i y^i, or the printed sum from i = 1.
double ancestral_type_prob_diffusion(const SolutionVector& alpha, double y,
                                     bool strict_paper = false);

struct DiffusionReport {
    DiffusionParams params;
    State imax = 0;
    SolutionVector beta, alpha;
    // Max relative error per check; empty when not applicable (sigma = 0).
    std::optional<double> beta_from_alpha;  // beta_i / beta_2 from alpha differences
    std::optional<double> alpha_from_beta;  // alpha_i from beta differences
    std::optional<double> beta_ratio_12;    // beta_1 / beta_2 closed form
    std::optional<double> alpha_integral;   // alpha_i from direct integrals
    double recursion_residual = 0.0;        // beta in the diffusion b-recursion
    double max_error() const;
};

DiffusionReport diffusion_relations(const DiffusionParams& p, State imax, double tol = 1e-12);

struct FiniteReport {
    MoranParams params;
    double u_left = 0.0, u_right = 0.0;
    double sampling_vs_absorption = 0.0; // sampling moments vs k-ASG b
    double b_from_smaller = 0.0;         // b^N from a^{N-1} (mutation u_L)
    double a_from_larger = 0.0;          // a^N from b^{N+1} (mutation u_R)
    std::optional<double> b12_ratio;     // b_1/b_2 combination, N > 2
    double lemma_w = 0.0;                // L-hat stationary ratios
    double lemma_a = 0.0;                // L-hat tail ratios
    double a_integral = 0.0;             // integral representation of a^N
    double max_error() const;
};

FiniteReport finite_relations(const MoranParams& p);

ojson to_json(const DiffusionReport& r);
ojson to_json(const FiniteReport& r);

} // namespace bdk
