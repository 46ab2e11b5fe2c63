#include <doctest.h>

#include <cmath>

#include "bdk/errors.hpp"
#include "bdk/montecarlo.hpp"
#include "bdk/solvers.hpp"

using namespace bdk;

namespace {

RateSchedule hand() { return RateSchedule::finite({1.0}, {1.0, 1.0}, 1.0); }

} // namespace

TEST_CASE("paths are well formed") {
    const Generator x = build_generator(ProcessKind::X, hand());
    SimConfig cfg;
    RandomStream rng(9, 0);
    for (int k = 0; k < 50; ++k) {
        const auto p = simulate_path(x, 2, cfg, rng);
        CHECK(p.status == PathStatus::Absorbed);
        CHECK(p.times.front() == 0.0);
        CHECK(p.states.front() == 2);
        CHECK((p.states.back() == 0 || p.states.back() == kCemetery));
        for (std::size_t j = 1; j < p.times.size(); ++j) {
            CHECK(p.times[j] > p.times[j - 1]);
            CHECK(x.rate(p.states[j - 1], p.states[j]) > 0.0);
        }
    }
    SimConfig capped;
    capped.max_events = 1;
    const Generator z = build_generator(ProcessKind::Z, hand());
    CHECK(simulate_path(z, 1, capped, rng).status == PathStatus::EventCap);
    SimConfig horizon;
    horizon.horizon = 3.0;
    const auto h = simulate_path(z, 1, horizon, rng);
    CHECK(h.status == PathStatus::Horizon);
    CHECK(h.end_time == 3.0);
}

TEST_CASE("absorption estimate matches b") {
    SimConfig cfg;
    cfg.seed = 2024;
    cfg.replicates = 40000;
    const auto e = estimate_absorption(hand(), 1, cfg);
    CHECK(e.absorbed_zero + e.absorbed_cemetery + e.unfinished == cfg.replicates);
    CHECK(std::abs(e.b.value - 0.4) <= 4 * e.b.stderr_);
}

TEST_CASE("estimates do not depend on the thread count") {
    SimConfig one;
    one.seed = 77;
    one.replicates = 3000;
    one.threads = 1;
    SimConfig many = one;
    many.threads = 7;
    const auto a = estimate_absorption(hand(), 2, one);
    const auto b = estimate_absorption(hand(), 2, many);
    CHECK(a.absorbed_zero == b.absorbed_zero);
    CHECK(dump_json(to_json(a)) == dump_json(to_json(b)));

    const Generator z = build_generator(ProcessKind::Z, RateSchedule::finite({1.0, 2.0}, {0.5, 1.0, 1.5}, 0.4));
    one.horizon = many.horizon = 50.0;
    one.replicates = many.replicates = 64;
    CHECK(dump_json(to_json(estimate_stationary(z, one))) ==
          dump_json(to_json(estimate_stationary(z, many))));
}

TEST_CASE("occupation estimate matches the stationary law") {
    const auto s = RateSchedule::finite({1.0, 2.0}, {0.5, 1.0, 1.5}, 0.4);
    const Generator z = build_generator(ProcessKind::Z, s);
    const auto w = stationary_distribution(z);
    SimConfig cfg;
    cfg.seed = 5;
    cfg.replicates = 400;
    cfg.horizon = 200.0;
    const auto e = estimate_stationary(z, cfg);
    CHECK(e.batches >= 16);
    double total = 0.0;
    for (std::size_t k = 0; k < e.values.size(); ++k) {
        total += e.values[k];
        CHECK(std::abs(e.values[k] - w.values[k]) <= 4 * e.stderr_[k] + 1e-12);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(batch_covariance(e, 1, 1) >= 0.0);

    // a single replicate falls back to time windows
    cfg.replicates = 1;
    cfg.horizon = 20000.0;
    CHECK(estimate_stationary(z, cfg).batches == 16);

    SimConfig none;
    CHECK_THROWS_AS(estimate_stationary(z, none), ValidationError);
}

TEST_CASE("marked paths log every catastrophe") {
    const auto s = RateSchedule::finite({1.0, 1.0, 1.0, 1.0}, {0.5, 0.5, 0.5, 0.5, 0.5}, 0.8);
    SimConfig cfg;
    cfg.horizon = 50.0;
    RandomStream rng(3, 0);
    const auto m = simulate_marked_path(s, 2, 3, cfg, rng);
    REQUIRE_FALSE(m.catastrophe_times.empty());
    REQUIRE(m.first_catastrophe.has_value());
    CHECK(*m.first_catastrophe == m.catastrophe_times.front());
    for (std::size_t k = 1; k < m.catastrophe_times.size(); ++k)
        CHECK(m.catastrophe_times[k] > m.catastrophe_times[k - 1]);
}

TEST_CASE("geometric chi-square") {
    // exact geometric expectations give a statistic near zero
    const double q = 0.6;
    std::vector<std::int64_t> counts;
    double p = q;
    for (int m = 0; m < 12; ++m) {
        counts.push_back(static_cast<std::int64_t>(std::llround(100000 * p)));
        p *= 1.0 - q;
    }
    const auto fit = geometric_chi_square(counts, q);
    CHECK(fit.applicable);
    CHECK(fit.p_value > 0.99);
    std::vector<std::int64_t> skew{100000, 0, 0, 50000};
    CHECK(geometric_chi_square(skew, 0.6).p_value < 1e-6);
}

TEST_CASE("excursion statistics agree with the exact identities") {
    const auto s = constant_schedule(Extent::make_finite(6), 1.0, 1.0, 0.5);
    const auto b = solve_absorption_b(s);
    SimConfig cfg;
    cfg.seed = 20261016;
    cfg.replicates = 20000;
    const auto st = excursion_statistics(s, 2, cfg);
    const double c = b(3) / b(2);
    CHECK(std::abs(st.c_direct.value - c) <= 4 * st.c_direct.stderr_);
    CHECK(st.p_loop.value > 0.0);
    CHECK(std::abs(st.p_down.value + st.p_loop.value + st.p_cat.value - 1.0) <= 1e-12);
    CHECK(std::abs(st.wald_difference) <= 4 * st.wald_stderr);
    CHECK(std::abs(st.return_difference) <= 4 * st.return_stderr);
    CHECK(std::abs(st.balance_difference) <= 4 * st.balance_stderr);
    CHECK(st.catastrophes_logged > 0);
    CHECK_THROWS_AS(excursion_statistics(s, 6, cfg), RangeError);
}
