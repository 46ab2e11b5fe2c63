#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace bdk {

/// Integer state label. The cemetery state is the largest representable
/// value so that it sorts above every integer state.
using State = std::int64_t;
inline constexpr State kCemetery = INT64_MAX;

/// Finite(N), or infinite with a truncation hint (0 means "no hint").
struct Extent {
    bool finite = true;
    State n = 1;

    static Extent make_finite(State n) { return {true, n}; }
    static Extent make_infinite(State hint = 0) { return {false, hint}; }
};

/// Per-capita birth rates lambda_i, death rates mu_i and killing/catastrophe
/// intensity kappa, indexed from 1.
///
/// Finite schedules honour lambda_N = 0 and mu_{N+1} = 0: both accessors
/// return 0 outside the defined range. Values are immutable after
/// construction and cheap to copy.
class RateSchedule {
  public:
    using RateFn = std::function<double(State)>;

    /// Explicit arrays. `mu` has length N; `lambda` has length N-1, or N with
    /// a trailing zero.
    static RateSchedule finite(std::vector<double> lambda, std::vector<double> mu,
                               double kappa, std::string family = "arrays");

    /// Closed-form rates. Finite extents are materialised on [1:N].
    static RateSchedule from_rates(Extent extent, RateFn lambda, RateFn mu, double kappa,
                                   std::string family);

    double lambda(State i) const;
    double mu(State i) const;
    double kappa() const noexcept { return kappa_; }

    const Extent& extent() const noexcept { return extent_; }
    bool is_finite() const noexcept { return extent_.finite; }
    /// N for finite schedules; throws RangeError for infinite ones.
    State size() const;
    /// N, or the truncation hint. Throws TruncationError when infinite with no hint.
    State working_extent() const;
    RateSchedule with_truncation(State hint) const;

    const std::string& family() const noexcept { return family_; }

  private:
    RateSchedule() = default;
    void validate(State upto) const;

    Extent extent_;
    double kappa_ = 0.0;
    std::string family_;
    // 1-based, sized N+2 so that lambda_N and mu_{N+1} read as stored zeros.
    std::vector<double> lambda_;
    std::vector<double> mu_;
    std::shared_ptr<const RateFn> lambda_fn_;
    std::shared_ptr<const RateFn> mu_fn_;
};

// Closed-form families.
RateSchedule constant_schedule(Extent extent, double lambda, double mu, double kappa);
RateSchedule affine_schedule(Extent extent, double lambda0, double lambda1, double mu0,
                             double mu1, double kappa);
/// Killed ASG line-counting process of a size-N Moran population.
RateSchedule moran_kasg_schedule(State n, double s, double u, double nu0);
/// Pruned lookdown ASG line-counting process of a size-N Moran population.
RateSchedule moran_pldasg_schedule(State n, double s, double u, double nu0);
/// Diffusion-limit k-ASG: lambda_i = sigma, mu_i = i-1+theta*nu1, kappa = theta*nu0.
RateSchedule diffusion_kasg_schedule(double sigma, double theta, double nu0, State hint = 0);
/// Diffusion-limit pLD-ASG: lambda_i = sigma, mu_i = i+theta*nu1, kappa = theta*nu0.
RateSchedule diffusion_pldasg_schedule(double sigma, double theta, double nu0, State hint = 0);

/// Build a schedule from a v1 schedule description. SpecError on missing
/// fields, ValidationError on invariant violations.
RateSchedule make_schedule(const nlohmann::json& description);

/// Like make_schedule, but the "moran" family expands to the pair
/// {k-ASG, pLD-ASG}; every other description yields one schedule.
std::vector<RateSchedule> make_schedules(const nlohmann::json& description);

/// lambdā_i = mu_i, mū_i = lambda_{i-1}, extent N+1. `lambda0` stands in for
/// the undefined lambda_0 (so mū_1 = lambda0).
RateSchedule bar_transform(const RateSchedule& sched, double lambda0 = 0.0);

struct PartialSum {
    double value = 0.0;
    /// Increment over the last decade divided by the largest term; a
    /// scale-free growth indicator.
    double decade_growth = 0.0;
    std::vector<State> skipped; // indices with a zero rate
    std::string verdict;
};

struct TailConditionReport {
    State upto = 0;
    PartialSum lambda;
    PartialSum mu;
};

/// Partial sums of 1/lambda_i and 1/mu_i up to M with a heuristic verdict on
/// divergence. Never a proof.
TailConditionReport tail_condition_diagnostic(const RateSchedule& sched, State m);

} // namespace bdk
