#include <doctest.h>

#include <cmath>
#include <random>

#include "bdk/errors.hpp"
#include "bdk/generator.hpp"

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

TEST_CASE("X on the hand instance") {
    const Generator x = build_generator(ProcessKind::X, hand());
    CHECK(x.lo() == 0);
    CHECK(x.hi() == 2);
    CHECK(x.has_cemetery());
    CHECK(x.size() == 4);
    CHECK(x.rate(1, 2) == 1.0);
    CHECK(x.rate(1, 0) == 1.0);
    CHECK(x.rate(1, kCemetery) == 1.0);
    CHECK(x.rate(2, 1) == 2.0);
    CHECK(x.rate(2, kCemetery) == 2.0);
    CHECK(x.rate(2, 3) == 0.0);
    CHECK(x.out_rate(0) == 0.0);
    CHECK(x.is_absorbing(kCemetery));
    CHECK(x.absorbing_states() == std::vector<State>{0, kCemetery});
    CHECK(x.index(kCemetery) == 3);
}

TEST_CASE("Z on the hand instance") {
    const Generator z = build_generator(ProcessKind::Z, hand());
    CHECK(z.lo() == 1);
    CHECK_FALSE(z.has_cemetery());
    CHECK(z.rate(1, 2) == 1.0);
    // (i-1) mu_i + kappa
    CHECK(z.rate(2, 1) == 2.0);
}

TEST_CASE("catastrophe runs are expanded in order") {
    const auto s = RateSchedule::finite({1.0, 2.0, 3.0, 4.0}, {0.5, 0.5, 0.5, 0.5, 0.5}, 0.25);
    const Generator z = build_generator(ProcessKind::Z, s);
    REQUIRE(z.run(5).has_value());
    std::vector<State> seen;
    z.for_each(5, [&](State j, double) { seen.push_back(j); });
    CHECK(seen == std::vector<State>{1, 2, 3, 4});
    CHECK(z.rate(5, 1) == 0.25);
    CHECK(z.rate(5, 4) == doctest::Approx(4 * 0.5 + 0.25));
    CHECK(z.out_rate(5) == doctest::Approx(3 * 0.25 + 2.25));
}

TEST_CASE("generator rows sum to zero") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = random_schedule(g, 2 + rep % 9);
        for (auto kind : {ProcessKind::X, ProcessKind::Z, ProcessKind::Xstar, ProcessKind::Zstar}) {
            const Generator gen = build_generator(kind, s);
            const Eigen::MatrixXd q = gen.dense();
            for (Eigen::Index r = 0; r < q.rows(); ++r) {
                CHECK(std::abs(q.row(r).sum()) <= 1e-12 * (1.0 + std::abs(q(r, r))));
                for (Eigen::Index c = 0; c < q.cols(); ++c)
                    if (c != r) CHECK(q(r, c) >= 0.0);
            }
            double total = 0.0;
            gen.for_each(gen.hi(), [&](State, double r) { total += r; });
            CHECK(total == doctest::Approx(gen.out_rate(gen.hi())));
        }
    }
}

TEST_CASE("level processes") {
    const auto s = RateSchedule::finite({1.0, 2.0, 3.0}, {0.5, 0.7, 0.9, 1.1}, 0.3);
    const Generator xn = build_generator(ProcessKind::Xn, s, 2);
    CHECK(xn.lo() == 1);
    CHECK(xn.rate(2, 3) == 2.0);
    CHECK(xn.rate(2, 1) == 0.7);
    CHECK(xn.rate(2, kCemetery) == 0.3);
    CHECK(xn.is_absorbing(1));

    const Generator zn = build_generator(ProcessKind::Zn, s, 2);
    CHECK(zn.lo() == 2);
    CHECK(zn.rate(3, 2) == doctest::Approx(0.9 + 0.3));
    CHECK(zn.rate(4, 3) == doctest::Approx(1.1));
    CHECK(zn.rate(4, 2) == doctest::Approx(0.3));

    const Generator cut = build_generator(ProcessKind::Zn_cut, s, 2);
    CHECK(cut.rate(3, 2) == doctest::Approx(0.9));
    CHECK(cut.rate(3, kCemetery) == doctest::Approx(0.3));

    CHECK_THROWS_AS(build_generator(ProcessKind::Zn, s), RangeError);
    CHECK_THROWS_AS(build_generator(ProcessKind::Zn, s, 5), RangeError);
}

TEST_CASE("marked process flips on the first catastrophe") {
    const auto s = RateSchedule::finite({1.0, 2.0, 3.0}, {0.5, 0.7, 0.9, 1.1}, 0.3);
    const MarkedGenerator m = build_marked_generator(s, 2);
    const Generator& g = m.generator();
    CHECK(m.width() == 3);
    CHECK(g.rate(m.star(3), m.star(2)) == doctest::Approx(0.9));
    CHECK(g.rate(m.star(3), m.circ(2)) == doctest::Approx(0.3));
    CHECK(g.rate(m.star(4), m.circ(2)) == doctest::Approx(0.3));
    CHECK(g.rate(m.circ(3), m.circ(2)) == doctest::Approx(1.2));
    CHECK(g.rate(m.circ(2), m.star(3)) == 0.0);
    CHECK(m.is_circ(m.circ(2)));
    CHECK(m.base(m.circ(4)) == 4);
}

TEST_CASE("process kind names round-trip") {
    for (auto k : {ProcessKind::X, ProcessKind::Z, ProcessKind::Xstar, ProcessKind::Zstar,
                   ProcessKind::Xn, ProcessKind::Zn, ProcessKind::ZnMarked, ProcessKind::Zn_cut})
        CHECK(parse_process_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_process_kind("Y"), ValidationError);
}
