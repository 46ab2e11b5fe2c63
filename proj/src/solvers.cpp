#include "bdk/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/LU>

#include "bdk/errors.hpp"

namespace bdk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Birth rate with the schedule cut at `top`.
double lam(const RateSchedule& s, State top, State i) { return i < top ? s.lambda(i) : 0.0; }

// b over [0:top]. With `dirichlet` the top value is pinned to 0 and rows
// [1:top-1] are solved; otherwise rows [1:top] with lambda_top = 0.
//
// Two-sweep elimination written so that every operation adds or divides
// positive numbers: f_i = 1 - e_i is carried directly instead of being formed
// by subtraction, which keeps componentwise relative accuracy.
std::vector<double> b_sweep(const RateSchedule& s, State top, bool dirichlet) {
    const State last = dirichlet ? top - 1 : top;
    const double kappa = s.kappa();
    std::vector<double> e(top + 1, 0.0), r(top + 1, 0.0), b(top + 1, 0.0);
    double f_prev = 1.0, r_prev = 1.0;
    for (State i = 1; i <= last; ++i) {
        const double l = dirichlet ? s.lambda(i) : lam(s, top, i);
        const double m = s.mu(i);
        const double den = l + kappa + m * f_prev;
        e[i] = l / den;
        r[i] = m * r_prev / den;
        f_prev = (m * f_prev + kappa) / den;
        r_prev = r[i];
    }
    b[0] = 1.0;
    if (last >= 1) {
        b[last] = r[last];
        for (State i = last - 1; i >= 1; --i) b[i] = r[i] + e[i] * b[i + 1];
    }
    return b;
}

// Stationary law of Z cut at top, by the cut-flux balance
// lambda_i w_i = mu_{i+1} w_{i+1} + kappa * sum_{j>i} w_j run downwards.
// Returns (a, w) over [0:top].
std::pair<std::vector<double>, std::vector<double>> cut_flux(const RateSchedule& s, State top) {
    State k = top;
    for (State i = 1; i < top; ++i)
        if (s.lambda(i) == 0.0) {
            k = i;
            break;
        }
    std::vector<double> w(top + 2, 0.0), tail(top + 2, 0.0);
    w[k] = 1.0;
    for (State i = k - 1; i >= 1; --i) {
        tail[i] = tail[i + 1] + w[i + 1];
        w[i] = (s.mu(i + 1) * w[i + 1] + s.kappa() * tail[i]) / s.lambda(i);
        if (w[i] > 1e200) {
            for (State j = i; j <= k; ++j) {
                w[j] *= 1e-200;
                tail[j] *= 1e-200;
            }
        }
    }
    const double total = tail[1] + w[1];
    std::vector<double> a(top + 1, 0.0), wn(top + 1, 0.0);
    a[0] = 1.0;
    for (State i = 1; i <= top; ++i) {
        a[i] = tail[i] / total;
        wn[i] = w[i] / total;
    }
    return {a, wn};
}

template <class Solve>
SolutionVector refine(const RateSchedule& sched, const SolverOptions& opts, Solve solve_at) {
    State m = std::max(opts.initial_truncation, sched.extent().n);
    SolutionVector prev = solve_at(m);
    std::vector<RefinementStep> history{{m, kInf}};
    for (;;) {
        const State next = 2 * m;
        if (next + 1 > opts.max_states)
            throw NoConvergence("truncation reached " + std::to_string(m) +
                                " states without sup-change below " + std::to_string(opts.tol));
        SolutionVector cur = solve_at(next);
        double change = 0.0;
        for (State i = 0; i <= m; ++i) change = std::max(change, std::abs(cur.at(i) - prev.at(i)));
        history.push_back({next, change});
        m = next;
        if (change < opts.tol) {
            cur.meta.history = std::move(history);
            return cur;
        }
        prev = std::move(cur);
    }
}

void tail_warning(const RateSchedule& sched, SolutionVector& v, bool birth) {
    const auto rep = tail_condition_diagnostic(sched, v.meta.truncation);
    const auto& ps = birth ? rep.lambda : rep.mu;
    if (ps.verdict == "divergence NOT plausible")
        v.meta.warnings.push_back(std::string(birth ? "(H_lambda)" : "(H_mu)") +
                                  ": partial sums of 1/rate look convergent");
}

} // namespace

double b_residual(const RateSchedule& s, const SolutionVector& b) {
    const State hi = b.hi();
    const State last = s.is_finite() ? hi : hi - 1;
    double res = 0.0;
    for (State i = 1; i <= last; ++i) {
        const double l = s.lambda(i);
        const double m = s.mu(i), diag = l + m + s.kappa();
        const double row = diag * b.at(i) - l * b.at_or_zero(i + 1) - m * b.at(i - 1);
        res = std::max(res, std::abs(row) / diag);
    }
    return res;
}

double a_residual(const RateSchedule& s, const SolutionVector& a) {
    const State hi = a.hi();
    double res = 0.0;
    for (State i = 1; i < hi; ++i) {
        const double l = s.lambda(i), m = s.mu(i + 1), diag = l + m + s.kappa();
        const double row = diag * a.at(i) - l * a.at(i - 1) - m * a.at_or_zero(i + 1);
        res = std::max(res, std::abs(row) / diag);
    }
    return res;
}

SolutionVector solve_absorption_b(const RateSchedule& sched, const SolverOptions& opts) {
    auto at = [&](State top, bool dirichlet) {
        SolutionVector v;
        v.lo = 0;
        v.values = b_sweep(sched, top, dirichlet);
        v.meta.truncation = top;
        v.meta.label = "b";
        v.meta.residual = b_residual(sched, v);
        return v;
    };
    if (sched.is_finite()) return at(sched.size(), false);
    SolutionVector v = refine(sched, opts, [&](State m) { return at(m, true); });
    tail_warning(sched, v, true);
    return v;
}

SolutionVector solve_tail_a(const RateSchedule& sched, const SolverOptions& opts) {
    auto at = [&](State top) {
        SolutionVector v;
        v.lo = 0;
        auto [a, w] = cut_flux(sched, top);
        v.values = std::move(a);
        v.point_masses = std::move(w);
        v.meta.truncation = top;
        v.meta.label = "a";
        v.meta.residual = a_residual(sched, v);
        return v;
    };
    if (sched.is_finite()) return at(sched.size());
    SolutionVector v = refine(sched, opts, at);
    tail_warning(sched, v, false);
    return v;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::size_t>> adjacency(const Generator& g, bool reverse) {
    std::vector<std::vector<std::size_t>> adj(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        g.for_each(g.state_at(k), [&](State j, double) {
            const std::size_t t = g.index(j);
            if (reverse)
                adj[t].push_back(k);
            else
                adj[k].push_back(t);
        });
    return adj;
}

// Positions reachable from `seeds`, never expanding through `blocked`.
std::vector<char> reach(const std::vector<std::vector<std::size_t>>& adj,
                        const std::vector<std::size_t>& seeds, const std::vector<char>& blocked) {
    std::vector<char> seen(adj.size(), 0);
    std::deque<std::size_t> queue;
    for (auto s : seeds) {
        seen[s] = 1;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        for (auto t : adj[k]) {
            if (seen[t]) continue;
            seen[t] = 1;
            if (!blocked[t]) queue.push_back(t);
        }
    }
    return seen;
}

} // namespace

SolutionVector stationary_distribution(const Generator& gen, const SolverOptions& opts) {
    const std::size_t n = gen.size();
    if (n > 1) {
        for (State s : gen.absorbing_states())
            throw NotIrreducible("state " +
                                 (s == kCemetery ? std::string("cemetery") : std::to_string(s)) +
                                 " is absorbing");
        const std::vector<char> none(n, 0);
        const auto fwd = reach(adjacency(gen, false), {0}, none);
        const auto bwd = reach(adjacency(gen, true), {0}, none);
        for (std::size_t k = 0; k < n; ++k)
            if (!fwd[k] || !bwd[k])
                throw NotIrreducible("state " + std::to_string(gen.state_at(k)) +
                                     " is not in the communicating class of " +
                                     std::to_string(gen.lo()));
    }
    const Eigen::MatrixXd q = gen.dense();
    Eigen::MatrixXd m = q.transpose();
    m.row(static_cast<Eigen::Index>(n) - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rhs(static_cast<Eigen::Index>(n) - 1) = 1.0;
    Eigen::VectorXd w = m.partialPivLu().solve(rhs);
    for (auto& x : w)
        if (x < 0.0 && x > -opts.tol) x = 0.0;

    SolutionVector v;
    v.lo = gen.lo();
    v.values.assign(w.data(), w.data() + w.size());
    v.meta.truncation = gen.hi();
    v.meta.label = "stationary:" + gen.label();
    v.meta.residual = (w.transpose() * q).cwiseAbs().maxCoeff();
    return v;
}

std::vector<double> first_passage_vector(const Generator& gen, const std::set<State>& target,
                                         const std::set<State>& taboo, bool cemetery_taboo) {
    const std::size_t n = gen.size();
    std::vector<char> boundary(n, 0), is_target(n, 0);
    std::vector<std::size_t> seeds;
    for (State s : target) {
        if (taboo.count(s)) throw ValidationError("target", "target and taboo overlap");
        const std::size_t k = gen.index(s);
        boundary[k] = is_target[k] = 1;
        seeds.push_back(k);
    }
    for (State s : taboo) boundary[gen.index(s)] = 1;
    if (cemetery_taboo && gen.has_cemetery() && !target.count(kCemetery))
        boundary[gen.index(kCemetery)] = 1;

    // States that reach the target without touching the boundary.
    const auto back = reach(adjacency(gen, true), seeds, boundary);
    std::vector<std::size_t> inner;
    std::vector<long> pos(n, -1);
    for (std::size_t k = 0; k < n; ++k)
        if (back[k] && !boundary[k]) {
            pos[k] = static_cast<long>(inner.size());
            inner.push_back(k);
        }

    std::vector<double> h(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        if (is_target[k]) h[k] = 1.0;
    if (inner.empty()) return h;

    const auto m = static_cast<Eigen::Index>(inner.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const State x = gen.state_at(inner[static_cast<std::size_t>(r)]);
        a(r, r) = gen.out_rate(x);
        gen.for_each(x, [&](State j, double rate) {
            const std::size_t t = gen.index(j);
            if (is_target[t])
                rhs(r) += rate;
            else if (pos[t] >= 0)
                a(r, pos[t]) -= rate;
        });
    }
    const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
    for (Eigen::Index r = 0; r < m; ++r)
        h[inner[static_cast<std::size_t>(r)]] = std::clamp(sol(r), 0.0, 1.0);
    return h;
}

double first_passage_prob(const Generator& gen, State start, const std::set<State>& target,
                          const std::set<State>& taboo, bool cemetery_taboo) {
    if (target.count(start) || taboo.count(start))
        throw ValidationError("start", "start lies in the target or taboo set");
    const auto h = first_passage_vector(gen, target, taboo, cemetery_taboo);
    const std::size_t k = gen.index(start);
    if (h[k] > 0.0) return h[k];

    std::vector<char> boundary(gen.size(), 0);
    std::vector<std::size_t> ends;
    for (State s : target) boundary[gen.index(s)] = 1;
    for (State s : taboo) boundary[gen.index(s)] = 1;
    if (cemetery_taboo && gen.has_cemetery()) boundary[gen.index(kCemetery)] = 1;
    const auto fwd = reach(adjacency(gen, false), {k}, boundary);
    bool any = false;
    for (std::size_t j = 0; j < gen.size(); ++j) any = any || (fwd[j] && boundary[j]);
    if (!any)
        throw SingularSystem("neither target nor taboo reachable from " + std::to_string(start));
    return h[k];
}

// ---------------------------------------------------------------------------

namespace {

struct SparseKernel {
    std::vector<std::size_t> from, to;
    std::vector<double> rate;
    std::vector<double> out;
};

SparseKernel kernel(const Generator& g) {
    SparseKernel k;
    k.out.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const State s = g.state_at(i);
        k.out[i] = g.out_rate(s);
        g.for_each(s, [&](State j, double r) {
            k.from.push_back(i);
            k.to.push_back(g.index(j));
            k.rate.push_back(r);
        });
    }
    return k;
}

double poisson_weight(double mean, std::size_t k) {
    const double kd = static_cast<double>(k);
    return std::exp(-mean + kd * std::log(mean) - std::lgamma(kd + 1.0));
}

} // namespace

std::vector<double> transient_distribution(const Generator& gen, double t,
                                           const std::vector<double>& init) {
    if (init.size() != gen.size()) throw RangeError("initial law has the wrong length");
    if (!(t >= 0.0)) throw RangeError("time must be non-negative");
    const SparseKernel k = kernel(gen);
    const double unif = *std::max_element(k.out.begin(), k.out.end());
    if (t == 0.0 || unif == 0.0) return init;

    // Keep each Poisson mean moderate; exp(Qt) = exp(Qt/steps)^steps.
    constexpr double kMaxMean = 500.0;
    const double total = unif * t;
    const auto steps = static_cast<std::size_t>(std::ceil(total / kMaxMean));
    const double mean = total / static_cast<double>(steps);
    const std::size_t hard_cap = static_cast<std::size_t>(mean + 40.0 * std::sqrt(mean) + 60.0);

    std::vector<double> cur = init, term(init.size()), next(init.size()), acc(init.size());
    for (std::size_t step = 0; step < steps; ++step) {
        term = cur;
        std::fill(acc.begin(), acc.end(), 0.0);
        double cum = 0.0;
        for (std::size_t j = 0;; ++j) {
            const double wgt = poisson_weight(mean, j);
            cum += wgt;
            for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += wgt * term[x];
            if ((static_cast<double>(j) > mean && 1.0 - cum < 1e-12) || j >= hard_cap) break;
            for (std::size_t x = 0; x < next.size(); ++x) next[x] = term[x] * (1.0 - k.out[x] / unif);
            for (std::size_t e = 0; e < k.rate.size(); ++e)
                next[k.to[e]] += term[k.from[e]] * k.rate[e] / unif;
            std::swap(term, next);
        }
        cur = acc;
    }
    return cur;
}

Eigen::MatrixXd transition_matrix(const Generator& gen, double t) {
    if (!(t >= 0.0)) throw RangeError("time must be non-negative");
    const auto n = static_cast<Eigen::Index>(gen.size());
    const Eigen::MatrixXd q = gen.dense();
    const double unif = (-q.diagonal()).maxCoeff();
    if (t == 0.0 || unif == 0.0) return Eigen::MatrixXd::Identity(n, n);

    int squarings = 0;
    double h = unif * t;
    while (h > 0.5) {
        h *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + q / unif;
    // Every term is non-negative, so the truncated series is accurate to the
    // last neglected weight, which is below double resolution here.
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    double wgt = std::exp(-h);
    for (int j = 0; j < 64; ++j) {
        out += wgt * power;
        wgt *= h / static_cast<double>(j + 1);
        if (wgt < 1e-20) break;
        power = power * p;
    }
    for (int k = 0; k < squarings; ++k) out = out * out;
    return out;
}

} // namespace bdk
