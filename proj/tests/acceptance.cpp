// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "bdk/cli/config.hpp"
#include "bdk/cli/runner.hpp"
#include "bdk/duality.hpp"
#include "bdk/montecarlo.hpp"
#include "bdk/popgen.hpp"
#include "bdk/solvers.hpp"

using namespace bdk;

namespace {

constexpr double kTheoremTol = 1e-9;
constexpr double kHandTol = 1e-12;
constexpr double kDualityTol = 1e-8;
constexpr double kCorrespondenceTol = 1e-10;
constexpr double kBarTol = 1e-9;
constexpr double kSigmas = 3.0;
constexpr double kChiSquareLevel = 0.01;
constexpr double kSamplingTol = 1e-10;
constexpr double kFiniteTol = 1e-9;
constexpr double kNeutralTol = 1e-10;
constexpr double kDiffusionTol = 1e-8;
constexpr double kLimitTol = 0.02;
constexpr double kTheoremSeconds = 30.0;
constexpr double kMonteCarloSeconds = 120.0;

struct Outcome {
    bool pass;
    std::string detail;
};

RateSchedule random_schedule(std::mt19937_64& g, State n) {
    std::uniform_real_distribution<double> rate(0.1, 10.0), kap(0.1, 5.0);
    std::vector<double> l(static_cast<std::size_t>(n - 1)), m(static_cast<std::size_t>(n));
    for (auto& x : l) x = rate(g);
    for (auto& x : m) x = rate(g);
    return RateSchedule::finite(l, m, kap(g));
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Both directions of the b/a exchange on 200 random schedules.
Outcome theorem_closure() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(1001);
    std::uniform_int_distribution<State> size(2, 50);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const TheoremReport r = check_theorem(random_schedule(g, size(g)));
        worst = std::max({worst, r.b_from_a_max_rel, r.a_from_b_max_rel.value_or(INFINITY)});
    }
    const double secs = seconds_since(t0);
    return {worst <= kTheoremTol && secs < kTheoremSeconds,
            fmt("max rel err %.3g (tol %.0e), 200 schedules in %.2f s", worst, kTheoremTol, secs)};
}

// 2. N = 2, all rates 1.
Outcome hand_instance() {
    const auto s = RateSchedule::finite({1.0}, {1.0, 1.0}, 1.0);
    const auto b = solve_absorption_b(s);
    const auto a = solve_tail_a(s);
    const auto rho = rho_from_b(b);
    double e = 0.0;
    auto cmp = [&](double x, double y) { e = std::max(e, std::abs(x - y)); };
    cmp(b(0), 1.0);
    cmp(b(1), 2.0 / 5.0);
    cmp(b(2), 1.0 / 5.0);
    cmp(a.point_masses[1], 2.0 / 3.0);
    cmp(a.point_masses[2], 1.0 / 3.0);
    cmp(a(0), 1.0);
    cmp(a(1), 1.0 / 3.0);
    cmp(a(2), 0.0);
    cmp(b(2) / b(1), 0.5);
    cmp(rho(1), 3.0 / 5.0);
    cmp(rho(2), 1.0 / 5.0);
    cmp(rho(3), 1.0 / 5.0);
    return {e <= kHandTol, fmt("max abs err %.3g (tol %.0e) over b, w, a, c1, rho", e, kHandTol)};
}

// 3. Duality function on the full grid for (X, X*) and (Z, Z*).
Outcome siegmund() {
    std::mt19937_64 g(1003);
    std::uniform_int_distribution<State> size(2, 20);
    const std::vector<double> times{0.1, 1.0, 10.0};
    double worst = 0.0;
    std::size_t pairs = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto s = random_schedule(g, size(g));
        for (auto kind : {ProcessKind::X, ProcessKind::Z}) {
            const Generator gen = build_generator(kind, s);
            const auto d = siegmund_dual(gen);
            const auto r = verify_duality(gen, d.full, times, kDualityTol);
            worst = std::max(worst, r.max_discrepancy);
            pairs += r.pairs;
        }
    }
    return {worst <= kDualityTol,
            fmt("max discrepancy %.3g (tol %.0e), %.0f (x, x*, t) triples", worst, kDualityTol,
                static_cast<double>(pairs))};
}

// 4. X* tail = b, Z* absorption in 1 = a_{i-1}, bar ratios = a ratios.
Outcome correspondences() {
    std::mt19937_64 g(1004);
    std::uniform_int_distribution<State> size(2, 30);
    double e_tail = 0.0, e_zstar = 0.0, e_bar = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const State n = size(g);
        const auto s = random_schedule(g, n);
        const auto b = solve_absorption_b(s);
        const auto a = solve_tail_a(s);
        const auto pi = stationary_distribution(build_generator(ProcessKind::Xstar, s));
        double tail = 0.0;
        for (State i = n; i >= 0; --i) {
            tail += pi(i + 1);
            e_tail = std::max(e_tail, std::abs(tail - b(i)));
        }
        const auto z = zstar_absorption(s);
        for (State i = 1; i <= n; ++i) e_zstar = std::max(e_zstar, std::abs(z(i) - a(i - 1)));
        e_bar = std::max(e_bar, bar_absorption_check(s));
    }
    const bool ok = e_tail <= kCorrespondenceTol && e_zstar <= kCorrespondenceTol && e_bar <= kBarTol;
    return {ok, fmt("X* tail vs b %.3g, Z* absorption vs a %.3g (tol 1e-10); bar ratios %.3g (tol 1e-9)",
                    e_tail, e_zstar, e_bar)};
}

// 5. Excursion lemmas by simulation.
Outcome excursion_lemmas() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = constant_schedule(Extent::make_finite(6), 1.0, 1.0, 0.5);
    const State n = 2;
    const auto b = solve_absorption_b(s);
    SimConfig cfg;
    cfg.seed = 20261016;
    cfg.replicates = 100000;
    const ExcursionStats st = excursion_statistics(s, n, cfg);
    const double c = b(n + 1) / b(n);
    const double zc = std::abs(st.c_direct.value - c) / st.c_direct.stderr_;
    const double zb = std::abs(st.balance_difference) / st.balance_stderr;
    const double zr = std::abs(st.return_difference) / st.return_stderr;
    const double p = st.geometric_fit.p_value;
    const double secs = seconds_since(t0);
    const bool ok = zc <= kSigmas && zb <= kSigmas && zr <= kSigmas && st.geometric_fit.applicable &&
                    p > kChiSquareLevel && secs < kMonteCarloSeconds;
    return {ok, fmt("|z| c_n %.2f, balance %.2f, ", zc, zb) +
                    fmt("return time %.2f (limit 3); geometric chi-square p = %.3g (> 0.01); %.1f s",
                        zr, p, secs)};
}

// 6. Moran model: sampling moments and the finite identities.
Outcome moran() {
    const MoranParams hand{2, 1.0, 1.0, 0.5};
    const auto f = moran_forward(hand);
    const auto bh = solve_absorption_b(kasg_schedule(hand));
    double e_hand = std::max({std::abs(f.pi(0) - 3.0 / 7.0), std::abs(f.pi(1) - 2.0 / 7.0),
                              std::abs(f.pi(2) - 2.0 / 7.0), std::abs(bh(0) - 1.0),
                              std::abs(bh(1) - 3.0 / 7.0), std::abs(bh(2) - 2.0 / 7.0)});
    for (State i = 0; i <= 2; ++i) e_hand = std::max(e_hand, std::abs(sampling_moments(f.pi, i) - bh(i)));

    std::mt19937_64 g(1006);
    std::uniform_int_distribution<State> size(2, 40);
    std::uniform_real_distribution<double> su(0.1, 5.0), nu(0.05, 0.95);
    double e_sampling = 0.0, e_identity = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const MoranParams p{size(g), su(g), su(g), nu(g)};
        const auto fw = moran_forward(p);
        const auto b = solve_absorption_b(kasg_schedule(p));
        for (State i = 0; i <= p.n; ++i)
            e_sampling = std::max(e_sampling, rel_err(sampling_moments(fw.pi, i), b(i)));
        e_identity = std::max(e_identity, finite_relations(p).max_error());
    }
    const bool ok = e_hand <= kHandTol && e_sampling <= kSamplingTol && e_identity <= kFiniteTol;
    return {ok, fmt("hand N=2 %.3g (tol 1e-12); sampling vs k-ASG %.3g (tol 1e-10); "
                    "shifted-mutation identities %.3g (tol 1e-9), 100 sets",
                    e_hand, e_sampling, e_identity)};
}

// 7. Diffusion limit.
Outcome diffusion() {
    double e_neutral = 0.0;
    for (const DiffusionParams d : {DiffusionParams{0.0, 0.5, 0.3}, DiffusionParams{0.0, 4.0, 0.6}}) {
        const auto beta = wright_moments(d, 12);
        double prod = 1.0;
        for (int i = 1; i <= 12; ++i) {
            prod *= (d.theta * d.nu1() + i - 1) / (d.theta + i - 1);
            e_neutral = std::max(e_neutral, rel_err(beta(i), prod));
        }
        const auto alpha = fearnhead_tails(d);
        for (State i = 1; i <= alpha.hi(); ++i) e_neutral = std::max(e_neutral, std::abs(alpha(i)));
        for (int k = 0; k <= 20; ++k)
            e_neutral = std::max(e_neutral,
                                 std::abs(ancestral_type_prob_diffusion(alpha, k / 20.0) - k / 20.0));
    }

    std::mt19937_64 g(1007);
    std::uniform_real_distribution<double> st(0.1, 10.0), nu(0.1, 0.9);
    double e_routes = 0.0;
    for (int rep = 0; rep < 30; ++rep) {
        const DiffusionParams p{st(g), st(g), nu(g)};
        const auto r = diffusion_relations(p, 15);
        e_routes = std::max(e_routes, r.max_error());
        // moments by quadrature against Kummer's function
        const double a = p.theta * p.nu1(), b = p.theta * p.nu0;
        double ratio = 1.0;
        for (int i = 1; i <= 15; ++i) {
            ratio *= (a + i - 1) / (a + b + i - 1);
            const double kummer = ratio * boost::math::hypergeometric_1F1(b, a + b + i, p.sigma) /
                                  boost::math::hypergeometric_1F1(b, a + b, p.sigma);
            e_routes = std::max(e_routes, rel_err(r.beta(i), kummer));
        }
    }

    const DiffusionParams unit{1.0, 1.0, 0.5};
    const State n = 200;
    const auto alpha = fearnhead_tails(unit);
    const auto a = solve_tail_a(pldasg_schedule(MoranParams{n, unit.sigma / n, unit.theta / n, unit.nu0}));
    double e_limit = 0.0;
    for (State i = 0; i <= n; ++i) {
        const double y = static_cast<double>(i) / n;
        e_limit = std::max(e_limit, std::abs(ancestral_type_prob_finite(a, i) -
                                             ancestral_type_prob_diffusion(alpha, y)));
    }
    const bool ok = e_neutral <= kNeutralTol && e_routes <= kDiffusionTol && e_limit <= kLimitTol;
    return {ok, fmt("neutral closed forms %.3g (tol 1e-10); identities and integral routes %.3g "
                    "(tol 1e-8); sup |g_200 - gamma| %.3g (tol 0.02)",
                    e_neutral, e_routes, e_limit)};
}

// 8. Same seed, same bytes.
Outcome determinism() {
    using namespace bdk::cli;
    const char* configs[] = {
        R"({"command": "simulate", "simulation": {"seed": 8, "replicates": 5000},
            "schedule": {"extent": 5, "kappa": 0.4, "lambda": [1, 2, 2, 1], "mu": [1, 1, 1, 1, 1]}})",
        R"({"command": "simulate", "process": "Z", "simulation": {"seed": 8, "replicates": 40, "horizon": 200},
            "schedule": {"extent": 5, "kappa": 0.4, "lambda": [1, 2, 2, 1], "mu": [1, 1, 1, 1, 1]}})",
        R"({"command": "excursions", "level": 2, "simulation": {"seed": 8, "replicates": 3000},
            "schedule": {"extent": 5, "kappa": 0.4, "lambda": [1, 2, 2, 1], "mu": [1, 1, 1, 1, 1]}})"};
    int same = 0, total = 0;
    for (const char* text : configs) {
        RunConfig c = parse_config(text);
        const std::string first = execute(c).text;
        c.sim.threads = 1;
        const std::string second = execute(c).text;
        c.sim.threads = 5;
        const std::string third = execute(c).text;
        total += 2;
        same += (first == second) + (first == third);
    }
    return {same == total, fmt("%.0f of %.0f reruns byte-identical (simulate X, simulate Z, excursions)",
                               same, total)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"b/a exchange closure", theorem_closure},
        {"hand micro-instance", hand_instance},
        {"Siegmund duality", siegmund},
        {"dual correspondences", correspondences},
        {"excursion lemmas (Monte Carlo)", excursion_lemmas},
        {"Moran finite application", moran},
        {"diffusion application", diffusion},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %zu %s  %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
