#include "bdk/duality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bdk/errors.hpp"

namespace bdk {

namespace {

// Primal position: [lo:hi] then the cemetery.
std::size_t primal_pos(const Generator& g, State s) { return g.index(s); }

// Dual label of dual position p in [0 : n], n = primal size.
State dual_label(const Generator& g, std::size_t p) {
    const auto interior = static_cast<std::size_t>(g.hi() - g.lo() + 1);
    if (p < interior) return g.lo() + static_cast<State>(p);
    if (g.has_cemetery() && p == interior) return g.hi() + 1;
    return kCemetery;
}

std::size_t dual_pos(const Generator& primal, State label) {
    const auto interior = static_cast<std::size_t>(primal.hi() - primal.lo() + 1);
    if (label == kCemetery) return primal.has_cemetery() ? interior + 1 : interior;
    if (label >= primal.lo() && label <= primal.hi()) return static_cast<std::size_t>(label - primal.lo());
    if (primal.has_cemetery() && label == primal.hi() + 1) return interior;
    throw RangeError("state " + std::to_string(label) + " is not a dual state");
}

} // namespace

DualResult siegmund_dual(const Generator& gen, double clamp_tol) {
    const std::size_t n = gen.size();
    const Eigen::MatrixXd q = gen.dense();
    // g(x, y) = sum_{k >= y} q(x, k), diagonal included; g(x, n) = 0.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n) + 1);
    for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(n); ++x)
        for (Eigen::Index y = static_cast<Eigen::Index>(n) - 1; y >= 0; --y)
            g(x, y) = g(x, y + 1) + q(x, y);
    const double scale = std::max(1.0, (-q.diagonal()).maxCoeff());

    const State top_label = gen.has_cemetery() ? gen.hi() + 1 : gen.hi();
    Generator::Builder full(gen.lo(), top_label, true);
    std::vector<char> touched(n + 1, 0);
    for (std::size_t y = 0; y <= n; ++y) {
        for (std::size_t z = 0; z <= n; ++z) {
            if (z == y) continue;
            double r;
            if (z < n) {
                const auto zi = static_cast<Eigen::Index>(z), yi = static_cast<Eigen::Index>(y);
                r = g(zi, yi) - (z == 0 ? 0.0 : g(zi - 1, yi));
            } else {
                r = -g(static_cast<Eigen::Index>(n) - 1, static_cast<Eigen::Index>(y));
            }
            if (r < 0.0) {
                if (r < -clamp_tol * scale)
                    throw NotMonotone(dual_label(gen, y), dual_label(gen, z), r);
                continue;
            }
            // Floating residue of exact cancellations.
            if (r <= clamp_tol * scale) continue;
            full.add(dual_label(gen, y), dual_label(gen, z), r);
            touched[y] = touched[z] = 1;
        }
    }
    const Generator f = full.label("dual:" + gen.label()).build();
    std::vector<State> iso;
    for (std::size_t p = 0; p <= n; ++p)
        if (!touched[p]) iso.push_back(dual_label(gen, p));

    // Restrict: drop isolated states at both ends and an isolated cemetery.
    auto isolated = [&](State s) { return std::find(iso.begin(), iso.end(), s) != iso.end(); };
    State lo = f.lo(), hi = f.hi();
    while (lo < hi && isolated(lo)) ++lo;
    while (hi > lo && isolated(hi)) --hi;
    const bool keep_cemetery = !isolated(kCemetery);
    Generator::Builder r(lo, hi, keep_cemetery);
    for (State s : f.states()) {
        if (s != kCemetery && (s < lo || s > hi)) continue;
        if (s == kCemetery && !keep_cemetery) continue;
        f.for_each(s, [&](State j, double rate) { r.add(s, j, rate); });
    }
    return DualResult{r.label(f.label()).build(), f, std::move(iso)};
}

DualityReport verify_duality(const Generator& gen, const Generator& dual,
                             const std::vector<double>& times, double tol, bool verbose) {
    DualityReport rep;
    rep.times = times;
    rep.tol = tol;
    const std::vector<State> xs = gen.states(), ys = dual.states();

    std::vector<std::pair<std::size_t, std::size_t>> grid;
    if (xs.size() <= 64) {
        for (std::size_t a = 0; a < xs.size(); ++a)
            for (std::size_t b = 0; b < ys.size(); ++b) grid.emplace_back(a, b);
    } else {
        std::mt19937_64 eng(0x5eed);
        for (int k = 0; k < 256; ++k)
            grid.emplace_back(eng() % xs.size(), eng() % ys.size());
    }
    rep.pairs = grid.size();

    for (double t : times) {
        const Eigen::MatrixXd p = transition_matrix(gen, t);
        const Eigen::MatrixXd ps = transition_matrix(dual, t);
        double worst = 0.0;
        for (auto [a, b] : grid) {
            const std::size_t xp = primal_pos(gen, xs[a]);
            const std::size_t yp = dual_pos(gen, ys[b]);
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k)
                if (primal_pos(gen, xs[k]) >= yp)
                    lhs += p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k));
            for (std::size_t k = 0; k < ys.size(); ++k)
                if (dual_pos(gen, ys[k]) <= xp)
                    rhs += ps(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k));
            const double d = std::abs(lhs - rhs);
            worst = std::max(worst, d);
            if (verbose) rep.detail.push_back({xs[a], ys[b], t, d});
        }
        rep.max_by_time.push_back(worst);
        rep.max_discrepancy = std::max(rep.max_discrepancy, worst);
    }
    rep.pass = rep.max_discrepancy <= tol;
    return rep;
}

namespace {

ojson state_json(State s) { return s == kCemetery ? ojson("cemetery") : ojson(s); }

} // namespace

ojson to_json(const DualityReport& r, bool verbose) {
    ojson j;
    j["times"] = r.times;
    j["max_by_time"] = r.max_by_time;
    j["max_discrepancy"] = r.max_discrepancy;
    j["tol"] = r.tol;
    j["pairs"] = r.pairs;
    j["pass"] = r.pass;
    if (verbose) {
        ojson d = ojson::array();
        for (const auto& p : r.detail)
            d.push_back({{"x", state_json(p.x)}, {"xstar", state_json(p.xstar)}, {"t", p.t},
                         {"discrepancy", p.discrepancy}});
        j["detail"] = d;
    }
    return j;
}

// ---------------------------------------------------------------------------

double rel_err(double x, double y) {
    if (x == y) return 0.0;
    return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
}

namespace {

// w_i over [1:N] from a: point masses when available.
std::vector<double> masses(const SolutionVector& a, State n) {
    std::vector<double> w(n + 1, 0.0);
    for (State i = 1; i <= n; ++i) {
        if (!a.point_masses.empty())
            w[i] = a.point_masses[static_cast<std::size_t>(i - a.lo)];
        else
            w[i] = a.at(i - 1) - a.at_or_zero(i);
    }
    return w;
}

State extent_of(const SolutionVector& v, const RateSchedule& sched) {
    if (v.lo != 0) throw RangeError("expected a vector indexed from 0");
    const State n = v.hi();
    if (sched.is_finite() && n != sched.size())
        throw RangeError("vector length does not match the schedule extent");
    return n;
}

} // namespace

SolutionVector relative_b_ratios(const SolutionVector& a, const RateSchedule& sched, State k) {
    const State n = extent_of(a, sched);
    if (k < 1 || k > n) throw RangeError("reference index outside [1:N]");
    const auto w = masses(a, n);
    if (!(w[k] > 0.0))
        throw DegenerateDenominator("a_" + std::to_string(k - 1) + " - a_" + std::to_string(k) +
                                    " vanishes");
    // Logs keep long products of rate ratios inside double range.
    SolutionVector out;
    out.lo = k;
    out.meta.label = "b_ratio";
    out.meta.truncation = a.meta.truncation;
    double log_prod = 0.0;
    bool zero = false;
    for (State i = k; i <= n; ++i) {
        if (i > k) {
            const double l = sched.lambda(i - 1), m = sched.mu(i);
            if (l == 0.0)
                throw HypothesisViolated("lambda_" + std::to_string(i - 1) + " = 0");
            if (m == 0.0) zero = true;
            else log_prod += std::log(m) - std::log(l);
        }
        if (zero || w[i] == 0.0)
            out.values.push_back(0.0);
        else
            out.values.push_back(std::exp(std::log(w[i]) - std::log(w[k]) + log_prod));
    }
    return out;
}

SolutionVector relate_b_from_a(const SolutionVector& a, const RateSchedule& sched) {
    return relative_b_ratios(a, sched, 1);
}

SolutionVector relate_a_from_b(const SolutionVector& b, const RateSchedule& sched) {
    const State n = extent_of(b, sched);
    for (State i = 1; i <= n; ++i)
        if (sched.mu(i) == 0.0)
            throw HypothesisViolated("mu_" + std::to_string(i) + " = 0; the a-from-b identity needs mu_i > 0");
    SolutionVector out;
    out.lo = 1;
    out.meta.label = "a_ratio";
    out.meta.truncation = b.meta.truncation;
    if (n < 2) return out;
    const double d1 = b.at(1) - b.at(2);
    if (!(d1 > 0.0)) throw DegenerateDenominator("b_1 - b_2 vanishes");
    double log_prod = 0.0;
    for (State i = 1; i <= n - 1; ++i) {
        if (i > 1) {
            const double l = sched.lambda(i);
            if (l == 0.0) {
                out.values.resize(static_cast<std::size_t>(n - 1), 0.0);
                break;
            }
            log_prod += std::log(l) - std::log(sched.mu(i));
        }
        const double d = b.at(i) - b.at_or_zero(i + 1);
        out.values.push_back(d <= 0.0 ? 0.0 : std::exp(std::log(d) - std::log(d1) + log_prod));
    }
    return out;
}

SolutionVector detailed_balance_product(const RateSchedule& sched) {
    const State n = sched.working_extent();
    SolutionVector out;
    out.lo = 1;
    out.meta.label = "detailed_balance_product";
    double p = 1.0;
    for (State i = 1; i <= n; ++i) {
        if (i > 1) p *= sched.mu(i) / sched.lambda(i - 1);
        out.values.push_back(p);
    }
    return out;
}

SolutionVector rho_from_b(const SolutionVector& b) {
    if (b.lo != 0) throw RangeError("b must be indexed from 0");
    SolutionVector out;
    out.lo = 1;
    out.meta.label = "rho";
    out.meta.truncation = b.meta.truncation;
    for (State i = 1; i <= b.hi(); ++i) out.values.push_back(b.at(i - 1) - b.at(i));
    out.values.push_back(b.at(b.hi()));
    return out;
}

SolutionVector zstar_absorption(const RateSchedule& sched) {
    const Generator g = build_generator(ProcessKind::Zstar, sched);
    const auto h = first_passage_vector(g, {1}, {});
    SolutionVector out;
    out.lo = 1;
    out.meta.label = "zstar_absorption";
    for (State i = 1; i <= g.hi(); ++i) out.values.push_back(h[g.index(i)]);
    return out;
}

TheoremReport check_theorem(const RateSchedule& sched, const SolverOptions& opts) {
    const SolutionVector b = solve_absorption_b(sched, opts);
    const SolutionVector a = solve_tail_a(sched, opts);
    TheoremReport rep;
    rep.n = b.hi();
    const SolutionVector rb = relate_b_from_a(a, sched);
    for (State i = 1; i <= rep.n; ++i)
        rep.b_from_a_max_rel = std::max(rep.b_from_a_max_rel, rel_err(rb(i), b(i) / b(1)));
    try {
        const SolutionVector ra = relate_a_from_b(b, sched);
        double worst = 0.0;
        for (State i = 1; i <= rep.n - 1; ++i) worst = std::max(worst, rel_err(ra(i), a(i) / a(1)));
        rep.a_from_b_max_rel = worst;
    } catch (const HypothesisViolated& e) {
        rep.a_from_b_note = e.what();
    }
    return rep;
}

ojson to_json(const TheoremReport& r) {
    ojson j;
    j["N"] = r.n;
    j["b_from_a_max_rel_err"] = r.b_from_a_max_rel;
    if (r.a_from_b_max_rel)
        j["a_from_b_max_rel_err"] = *r.a_from_b_max_rel;
    else
        j["a_from_b_skipped"] = r.a_from_b_note;
    return j;
}

double bar_absorption_check(const RateSchedule& sched, const SolverOptions& opts) {
    const SolutionVector a = solve_tail_a(sched, opts);
    const SolutionVector bb = solve_absorption_b(bar_transform(sched, 1.0), opts);
    double worst = 0.0;
    for (State i = 2; i <= std::min(a.hi(), bb.hi() - 1); ++i)
        worst = std::max(worst, rel_err(bb(i + 1) / bb(2), a(i) / a(1)));
    return worst;
}

} // namespace bdk
