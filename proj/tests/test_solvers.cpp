#include <doctest.h>

#include <cmath>
#include <random>

#include "bdk/errors.hpp"
#include "bdk/generator.hpp"
#include "bdk/solution.hpp"
#include "bdk/solvers.hpp"

using namespace bdk;

namespace {

RateSchedule hand() { return RateSchedule::finite({1.0}, {1.0, 1.0}, 1.0); }

RateSchedule random_schedule(std::mt19937_64& g, State n) {
    std::uniform_real_distribution<double> rate(0.1, 10.0), kap(0.1, 5.0);
    std::vector<double> l(n - 1), m(n);
    for (auto& x : l) x = rate(g);
    for (auto& x : m) x = rate(g);
    return RateSchedule::finite(l, m, kap(g));
}

} // namespace

TEST_CASE("hand instance: b, a and w") {
    const auto b = solve_absorption_b(hand());
    REQUIRE(b.values.size() == 3);
    CHECK(std::abs(b(0) - 1.0) <= 1e-12);
    CHECK(std::abs(b(1) - 2.0 / 5.0) <= 1e-12);
    CHECK(std::abs(b(2) - 1.0 / 5.0) <= 1e-12);
    CHECK(b.meta.residual <= 1e-14);

    const auto a = solve_tail_a(hand());
    CHECK(std::abs(a(0) - 1.0) <= 1e-12);
    CHECK(std::abs(a(1) - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(a(2) - 0.0) <= 1e-12);
    CHECK(std::abs(a.point_masses[1] - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(a.point_masses[2] - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("b agrees with first passage and a with the stationary law of Z") {
    std::mt19937_64 g(7);
    for (int rep = 0; rep < 25; ++rep) {
        const State n = 2 + rep % 12;
        const auto s = random_schedule(g, n);
        const auto b = solve_absorption_b(s);
        const Generator x = build_generator(ProcessKind::X, s);
        const auto h = first_passage_vector(x, {0}, {});
        for (State i = 0; i <= n; ++i) CHECK(std::abs(h[x.index(i)] - b(i)) <= 1e-12);

        const auto a = solve_tail_a(s);
        const auto w = stationary_distribution(build_generator(ProcessKind::Z, s));
        double tail = 0.0;
        for (State i = n; i >= 1; --i) {
            CHECK(std::abs(w(i) - a.point_masses[static_cast<std::size_t>(i)]) <= 1e-12);
            CHECK(std::abs(tail - a(i)) <= 1e-12);
            tail += w(i);
        }
        CHECK(a_residual(s, a) <= 1e-12);
        CHECK(b_residual(s, b) <= 1e-12);
    }
}

TEST_CASE("conditioning on the next level down") {
    // P(reach n before the cemetery | start n+1) = b_{n+1} / b_n, read
    // from X^(n) and the cut Z^(n).
    std::mt19937_64 g(3);
    for (int rep = 0; rep < 10; ++rep) {
        const State n = 4 + rep % 5;
        const auto s = random_schedule(g, n);
        const auto b = solve_absorption_b(s);
        for (State lvl = 1; lvl < n; ++lvl) {
            const Generator cut = build_generator(ProcessKind::Zn_cut, s, lvl);
            const double c = first_passage_prob(cut, lvl + 1, {lvl}, {});
            CHECK(std::abs(c - b(lvl + 1) / b(lvl)) <= 1e-12);
            const Generator xn = build_generator(ProcessKind::Xn, s, lvl);
            const double d = first_passage_prob(xn, lvl, {lvl - 1}, {});
            CHECK(std::abs(d - b(lvl) / b(lvl - 1)) <= 1e-12);
        }
    }
}

TEST_CASE("infinite schedules refine until stable") {
    const auto s = constant_schedule(Extent::make_infinite(), 1.0, 2.0, 0.5);
    const auto b = solve_absorption_b(s);
    CHECK(b.meta.truncation >= 64);
    CHECK(b.meta.history.size() >= 2);
    CHECK(b.meta.history.back().sup_change < 1e-10);
    // X with constant per-capita rates: b_1 solves the quadratic
    // lambda x^2 - (lambda + mu + kappa) x + mu = 0 (smaller root), b_i = x^i.
    const double l = 1.0, m = 2.0, k = 0.5;
    const double x = ((l + m + k) - std::sqrt((l + m + k) * (l + m + k) - 4 * l * m)) / (2 * l);
    CHECK(std::abs(b(1) - x) <= 1e-9);
    CHECK(std::abs(b(3) - x * x * x) <= 1e-9);

    const auto a = solve_tail_a(s);
    CHECK(a(0) == 1.0);
    CHECK(a(1) < 1.0);
    CHECK(a.meta.residual <= 1e-10);
}

TEST_CASE("truncations bracket b monotonically") {
    // Killing at M (Dirichlet) can only lower b, reflecting at M (lambda_M = 0)
    // can only raise it; both move toward b as M grows.
    const auto s = affine_schedule(Extent::make_infinite(), 1.0, 1.0, 0.2, 0.8, 0.3);
    const auto exact = solve_absorption_b(s);
    std::vector<double> lower, upper;
    for (State m : {8, 16, 32, 64}) {
        const auto cut = RateSchedule::from_rates(
            Extent::make_finite(m), [&](State i) { return s.lambda(i); },
            [&](State i) { return s.mu(i); }, s.kappa(), "cut");
        const auto reflect = solve_absorption_b(cut);
        const Generator x = build_generator(ProcessKind::X, cut);
        const auto kill = first_passage_vector(x, {0}, {m});
        for (State i = 1; i < 8; ++i) {
            const double lo = kill[x.index(i)], hi = reflect(i);
            CHECK(lo <= exact(i) + 1e-12);
            CHECK(hi >= exact(i) - 1e-12);
            if (!lower.empty()) {
                CHECK(lo >= lower[static_cast<std::size_t>(i)] - 1e-15);
                CHECK(hi <= upper[static_cast<std::size_t>(i)] + 1e-15);
            }
        }
        lower.assign(8, 0.0);
        upper.assign(8, 0.0);
        for (State i = 1; i < 8; ++i) {
            lower[static_cast<std::size_t>(i)] = kill[x.index(i)];
            upper[static_cast<std::size_t>(i)] = reflect(i);
        }
    }
}

TEST_CASE("refinement cap raises NoConvergence") {
    const auto s = constant_schedule(Extent::make_infinite(), 1.0, 1.0, 1e-9);
    SolverOptions o;
    o.tol = 1e-15;
    o.max_states = 300;
    CHECK_THROWS_AS(solve_absorption_b(s, o), NoConvergence);
}

TEST_CASE("stationary distribution guards") {
    CHECK_THROWS_AS(stationary_distribution(build_generator(ProcessKind::X, hand())),
                    NotIrreducible);
    const Generator x = build_generator(ProcessKind::X, hand());
    CHECK_THROWS_AS(first_passage_prob(x, kCemetery, {0}, {}, false), SingularSystem);
    CHECK_THROWS_AS(first_passage_prob(x, 0, {0}, {}), ValidationError);
}

TEST_CASE("transient law and transition matrix agree") {
    std::mt19937_64 g(5);
    const auto s = random_schedule(g, 6);
    const Generator z = build_generator(ProcessKind::Z, s);
    for (double t : {0.0, 0.3, 4.0}) {
        const Eigen::MatrixXd p = transition_matrix(z, t);
        for (Eigen::Index r = 0; r < p.rows(); ++r) CHECK(std::abs(p.row(r).sum() - 1.0) <= 1e-12);
        std::vector<double> init(z.size(), 0.0);
        init[2] = 1.0;
        const auto d = transient_distribution(z, t, init);
        for (std::size_t c = 0; c < d.size(); ++c)
            CHECK(std::abs(d[c] - p(2, static_cast<Eigen::Index>(c))) <= 1e-11);
    }
    // long horizon approaches the stationary law
    const auto w = stationary_distribution(z);
    const Eigen::MatrixXd p = transition_matrix(z, 200.0);
    for (State i = 1; i <= 6; ++i) CHECK(std::abs(p(0, z.index(i)) - w(i)) <= 1e-9);
}

TEST_CASE("solution csv round trip") {
    const auto b = solve_absorption_b(hand());
    const auto back = solution_from_csv(to_csv(b));
    CHECK(back.lo == b.lo);
    CHECK(back.values == b.values);
    CHECK_THROWS_AS(solution_from_csv("# bdk-csv v1 b\n0;1\n"), ParseError);
}
