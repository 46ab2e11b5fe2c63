#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdk/generator.hpp"
#include "bdk/json_out.hpp"
#include "bdk/rng.hpp"
#include "bdk/schedule.hpp"

namespace bdk {

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t replicates = 1000;
    std::int64_t max_events = 10'000'000;
    double burn_in = 0.1;   // fraction of the horizon discarded by occupation estimates
    double horizon = 0.0;   // 0 = run to absorption
    unsigned threads = 0;   // 0 = hardware concurrency
};

void validate(const SimConfig& cfg);

enum class PathStatus { Absorbed, Horizon, EventCap };
std::string to_string(PathStatus s);

struct PathRecord {
    std::vector<double> times;  // jump times, times[0] = 0
    std::vector<State> states;  // state entered at times[k]
    PathStatus status = PathStatus::Horizon;
    double end_time = 0.0;      // absorption, horizon or time of the capped event
};

/// Exact jump-chain / holding-time simulation.
PathRecord simulate_path(const Generator& gen, State init, const SimConfig& cfg,
                         RandomStream& rng);

/// A marked Z^(n) path on (state, flag). Catastrophes are logged every time
/// they fire; `first_catastrophe` is the one that flips the flag.
struct MarkedPathRecord {
    PathRecord path;              // states encoded as in MarkedGenerator
    std::vector<double> catastrophe_times;
    std::optional<double> first_catastrophe;
};

MarkedPathRecord simulate_marked_path(const RateSchedule& sched, State n, State init,
                                      const SimConfig& cfg, RandomStream& rng);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

struct AbsorptionEstimate {
    Estimate b;
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    std::int64_t absorbed_zero = 0;
    std::int64_t absorbed_cemetery = 0;
    std::int64_t unfinished = 0;
};

/// Fraction of X paths from `init` absorbed at 0.
AbsorptionEstimate estimate_absorption(const RateSchedule& sched, State init,
                                       const SimConfig& cfg);

struct DistributionEstimate {
    State lo = 0;
    std::vector<double> values;
    std::vector<double> stderr_;
    std::int64_t replicates = 0;
    std::int64_t batches = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> batch_means; // [batch][state - lo]
};

/// Covariance of the estimates at states i and j, from the batch means.
double batch_covariance(const DistributionEstimate& e, State i, State j);

/// Time-weighted occupation after burn-in, averaged over replicates started
/// at `init` (default: the lowest state). Batch means over at least 16
/// batches: groups of replicates, or windows of one path when replicates < 16.
DistributionEstimate estimate_stationary(const Generator& gen, const SimConfig& cfg,
                                         std::optional<State> init = std::nullopt);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool applicable = false;
};

struct ExcursionStats {
    State n = 0;
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    std::int64_t cycles = 0;

    Estimate c_direct;           // P(T_n < T_circ)
    Estimate c_ratio;            // p_down / (1 - p_loop)
    Estimate p_down;             // per cycle
    Estimate p_loop;
    Estimate p_cat;

    Estimate excursion_duration; // mean over complete right excursions
    Estimate total_excursion_time;
    double wald_difference = 0.0; // mean T_tot - first-cycle Wald prediction
    double wald_stderr = 0.0;

    Estimate return_n;           // E[R_{n,n}] in Z^(n)
    Estimate return_n1;          // E[R_{n+1,n+1}]
    double return_difference = 0.0; // E[R_{n+1,n+1}] - (1 - p_loop) E[R_{n,n}]
    double return_stderr = 0.0;

    Estimate w_n, w_n1;          // occupation estimates of Z^(n)
    double balance_difference = 0.0; // lambda_n w_n c_n - mu_{n+1} w_{n+1}
    double balance_stderr = 0.0;

    std::vector<std::int64_t> excursion_counts; // histogram of M^(n)
    ChiSquare geometric_fit;     // M^(n) + 1 against geometric(1 - p_loop)
    std::int64_t catastrophes_logged = 0;
};

/// Simulates the marked Z^(n) from (n+1, star) and classifies every cycle
/// at n+1. Return times use Z^(n) on independent streams; the occupation
/// estimates use max(16, replicates / 100) paths of length cfg.horizon
/// (1000 when unset).
ExcursionStats excursion_statistics(const RateSchedule& sched, State n, const SimConfig& cfg);

/// Goodness of fit of k = M + 1 >= 1 against geometric(q) with q estimated;
/// bins with expected count below 5 are merged into the tail.
ChiSquare geometric_chi_square(const std::vector<std::int64_t>& counts_of_m, double q);

ojson to_json(const Estimate& e);
ojson to_json(const AbsorptionEstimate& e);
ojson to_json(const DistributionEstimate& e);
ojson to_json(const ExcursionStats& s);
ojson to_json(const PathRecord& p);

} // namespace bdk
