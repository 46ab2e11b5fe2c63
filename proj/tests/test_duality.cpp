#include <doctest.h>

#include <cmath>
#include <random>

#include "bdk/duality.hpp"
#include "bdk/errors.hpp"

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

void same_rates(const Generator& a, const Generator& b, State shift = 0) {
    REQUIRE(a.lo() + shift == b.lo());
    REQUIRE(a.hi() + shift == b.hi());
    REQUIRE(a.has_cemetery() == b.has_cemetery());
    auto mv = [&](State s) { return s == kCemetery ? s : s + shift; };
    for (State s : a.states())
        for (State t : a.states())
            if (s != t) CHECK(std::abs(a.rate(s, t) - b.rate(mv(s), mv(t))) <= 1e-12);
}

} // namespace

TEST_CASE("dual of X is X*, dual of Z is Z*") {
    std::mt19937_64 g(17);
    for (int rep = 0; rep < 15; ++rep) {
        const auto s = random_schedule(g, 2 + rep % 7);
        const auto dx = siegmund_dual(build_generator(ProcessKind::X, s));
        same_rates(dx.dual, build_generator(ProcessKind::Xstar, s));
        CHECK(dx.isolated == std::vector<State>{0, kCemetery});
        const auto dz = siegmund_dual(build_generator(ProcessKind::Z, s));
        same_rates(dz.dual, build_generator(ProcessKind::Zstar, s));
    }
}

TEST_CASE("dual of the dual is the primal relabelled by one") {
    std::mt19937_64 g(19);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = random_schedule(g, 2 + rep % 6);
        const Generator z = build_generator(ProcessKind::Z, s);
        const auto dd = siegmund_dual(siegmund_dual(z).dual);
        same_rates(z, dd.dual, 1);
    }
}

TEST_CASE("a non-monotone chain has no Siegmund dual") {
    Generator::Builder b(0, 2, false);
    b.add(0, 2, 1.0).add(1, 0, 1.0).add(2, 1, 1.0);
    const Generator g = b.label("toy").build();
    CHECK_THROWS_AS(siegmund_dual(g), NotMonotone);
}

TEST_CASE("duality function holds on the grid") {
    std::mt19937_64 g(23);
    const auto s = random_schedule(g, 6);
    for (auto kind : {ProcessKind::X, ProcessKind::Z}) {
        const Generator gen = build_generator(kind, s);
        const auto d = siegmund_dual(gen);
        const auto full = verify_duality(gen, d.full, {0.1, 1.0, 10.0}, 1e-8);
        CHECK(full.pass);
        CHECK(full.max_discrepancy <= 1e-8);
        const auto restricted = verify_duality(gen, d.dual, {0.5}, 1e-8);
        CHECK(restricted.pass);
    }
}

TEST_CASE("hand instance relations") {
    const auto s = hand();
    const auto b = solve_absorption_b(s);
    const auto a = solve_tail_a(s);

    const auto rho = rho_from_b(b);
    CHECK(std::abs(rho(1) - 3.0 / 5.0) <= 1e-12);
    CHECK(std::abs(rho(2) - 1.0 / 5.0) <= 1e-12);
    CHECK(std::abs(rho(3) - 1.0 / 5.0) <= 1e-12);

    // c_1 = b_2 / b_1
    CHECK(std::abs(b(2) / b(1) - 0.5) <= 1e-12);

    const auto ratios = relate_b_from_a(a, s);
    CHECK(std::abs(ratios(2) - b(2) / b(1)) <= 1e-12);
    const auto back = relate_a_from_b(b, s);
    CHECK(back.values.size() == 1);
    CHECK(std::abs(back(1) - 1.0) <= 1e-12);

    const auto za = zstar_absorption(s);
    CHECK(std::abs(za(1) - 1.0) <= 1e-12);
    CHECK(std::abs(za(2) - a(1)) <= 1e-12);
}

TEST_CASE("b from a and a from b against independent solves") {
    std::mt19937_64 g(29);
    for (int rep = 0; rep < 30; ++rep) {
        const auto s = random_schedule(g, 2 + rep % 15);
        const auto r = check_theorem(s);
        CHECK(r.b_from_a_max_rel <= 1e-10);
        REQUIRE(r.a_from_b_max_rel.has_value());
        CHECK(*r.a_from_b_max_rel <= 1e-10);
    }
}

TEST_CASE("a from b refuses a zero death rate") {
    const auto s = RateSchedule::finite({1.0, 1.0}, {1.0, 0.0, 1.0}, 1.0);
    const auto r = check_theorem(s);
    CHECK_FALSE(r.a_from_b_max_rel.has_value());
    CHECK_FALSE(r.a_from_b_note.empty());
    CHECK(r.b_from_a_max_rel <= 1e-10);
}

TEST_CASE("ratios may start at any reference index") {
    std::mt19937_64 g(31);
    const auto s = random_schedule(g, 9);
    const auto a = solve_tail_a(s);
    const auto b = solve_absorption_b(s);
    const auto r = relative_b_ratios(a, s, 4);
    CHECK(r.lo == 4);
    for (State i = 4; i <= 9; ++i) CHECK(rel_err(r(i), b(i) / b(4)) <= 1e-11);
}

TEST_CASE("superposition of the stationary tail of X* and b") {
    std::mt19937_64 g(37);
    for (int rep = 0; rep < 10; ++rep) {
        const State n = 2 + rep;
        const auto s = random_schedule(g, n);
        const auto b = solve_absorption_b(s);
        const auto pi = stationary_distribution(build_generator(ProcessKind::Xstar, s));
        // P(X* > i) = b_i
        double tail = 0.0;
        for (State i = n; i >= 0; --i) {
            tail += pi(i + 1);
            CHECK(std::abs(tail - b(i)) <= 1e-10);
        }
    }
}

TEST_CASE("bar chain ratios") {
    std::mt19937_64 g(41);
    for (int rep = 0; rep < 10; ++rep) CHECK(bar_absorption_check(random_schedule(g, 3 + rep)) <= 1e-9);
}

TEST_CASE("relative error") {
    CHECK(rel_err(0.0, 0.0) == 0.0);
    CHECK(rel_err(1.0, 2.0) == doctest::Approx(0.5));
    CHECK(rel_err(-1.0, 1.0) == doctest::Approx(2.0));
}
