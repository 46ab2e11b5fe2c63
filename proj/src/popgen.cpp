#include "bdk/popgen.hpp"

#include <algorithm>
#include <cmath>

#include "bdk/duality.hpp"
#include "bdk/errors.hpp"
#include "bdk/quadrature.hpp"

namespace bdk {

void validate(const MoranParams& p) {
    if (p.n < 1) throw ValidationError("N", "must be at least 1");
    if (!(p.s >= 0.0)) throw ValidationError("s", "must be non-negative");
    if (!(p.u > 0.0)) throw ValidationError("u", "must be positive");
    if (!(p.nu0 > 0.0 && p.nu0 < 1.0)) throw ValidationError("nu0", "must lie in (0,1)");
}

void validate(const DiffusionParams& p) {
    if (!(p.sigma >= 0.0)) throw ValidationError("sigma", "must be non-negative");
    if (!(p.theta > 0.0)) throw ValidationError("theta", "must be positive");
    if (!(p.nu0 > 0.0 && p.nu0 < 1.0)) throw ValidationError("nu0", "must lie in (0,1)");
}

MoranForward moran_forward(const MoranParams& p) {
    validate(p);
    const State n = p.n;
    const double nd = static_cast<double>(n);
    auto up = [&](State i) {
        const double id = static_cast<double>(i);
        return id * (nd - id) / nd + p.u * p.nu1() * (nd - id);
    };
    auto down = [&](State i) {
        const double id = static_cast<double>(i);
        return (1.0 + p.s) * id * (nd - id) / nd + p.u * p.nu0 * id;
    };
    Generator::Builder b(0, n, false);
    for (State i = 0; i <= n; ++i) {
        if (i < n) b.add(i, i + 1, up(i));
        if (i > 0) b.add(i, i - 1, down(i));
    }
    MoranForward out{b.label("moran").build(), {}, 0.0};

    // Detailed balance in logs; the raw products overflow for large N.
    std::vector<double> logw(static_cast<std::size_t>(n) + 1, 0.0);
    for (State k = 1; k <= n; ++k)
        logw[static_cast<std::size_t>(k)] =
            logw[static_cast<std::size_t>(k - 1)] + std::log(up(k - 1)) - std::log(down(k));
    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (auto& x : logw) {
        x = std::exp(x - top);
        total += x;
    }
    out.pi.lo = 0;
    out.pi.meta.label = "pi";
    out.pi.meta.truncation = n;
    for (double x : logw) out.pi.values.push_back(x / total);

    if (n <= 400) {
        const SolutionVector lu = stationary_distribution(out.generator);
        for (State k = 0; k <= n; ++k)
            out.crosscheck = std::max(out.crosscheck, std::abs(lu(k) - out.pi(k)));
    }
    return out;
}

RateSchedule kasg_schedule(const MoranParams& p) {
    validate(p);
    return moran_kasg_schedule(p.n, p.s, p.u, p.nu0);
}

RateSchedule pldasg_schedule(const MoranParams& p) {
    validate(p);
    return moran_pldasg_schedule(p.n, p.s, p.u, p.nu0);
}

namespace {

// k^(i falling) / n^(i falling); 0 when k < i.
double falling_ratio(State k, State n, State i) {
    double r = 1.0;
    for (State j = 0; j < i; ++j) {
        if (k - j <= 0) return 0.0;
        r *= static_cast<double>(k - j) / static_cast<double>(n - j);
    }
    return r;
}

} // namespace

double sampling_moments(const SolutionVector& pi, State i) {
    const State n = pi.hi();
    if (pi.lo != 0) throw RangeError("pi must be indexed from 0");
    if (i < 0 || i > n) throw RangeError("sample size outside [0:N]");
    double sum = 0.0;
    for (State k = i; k <= n; ++k) sum += pi(k) * falling_ratio(k, n, i);
    return sum;
}

double ancestral_type_prob_finite(const SolutionVector& a, State i, bool strict_paper) {
    const State n = a.hi();
    if (a.lo != 0) throw RangeError("a must be indexed from 0");
    if (i < 0 || i > n) throw RangeError("i outside [0:N]");
    const double nd = static_cast<double>(n), id = static_cast<double>(i);
    double sum = 0.0;
    for (State j = 1; j <= n; ++j) {
        if (strict_paper) {
            // a_j i^(j) / N^(j-1)
            const double t = falling_ratio(i, n, j - 1) * (id - static_cast<double>(j - 1));
            sum += a(j) * t;
        } else {
            // a_{j-1} i^(j-1) / N^(j)
            sum += a(j - 1) * falling_ratio(i, n, j - 1) / (nd - static_cast<double>(j - 1));
        }
    }
    return 1.0 - (nd - id) * sum;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kFirstNodes = 32;
constexpr int kMaxNodes = 2048;

double max_rel_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, rel_err(a[k], b[k]));
    return worst;
}

// Integrals of each f against Wright's density, doubling the rule until
// every one has settled.
std::vector<double> wright_integrals(const DiffusionParams& p,
                                     const std::function<std::vector<double>(double)>& f,
                                     double tol) {
    validate(p);
    std::vector<double> prev;
    for (int n = kFirstNodes; n <= kMaxNodes; n *= 2) {
        const QuadratureRule rule = gauss_jacobi(n, p.theta * p.nu1(), p.theta * p.nu0);
        std::vector<double> acc;
        double norm = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double y = rule.nodes[k];
            const double w = rule.weights[k] * std::exp(-p.sigma * y);
            norm += w;
            const auto v = f(y);
            if (acc.empty()) acc.assign(v.size(), 0.0);
            for (std::size_t m = 0; m < v.size(); ++m) acc[m] += w * v[m];
        }
        for (auto& x : acc) x /= norm;
        if (!prev.empty() && max_rel_change(prev, acc) < tol) return acc;
        prev = std::move(acc);
    }
    throw QuadratureNoConvergence("Gauss-Jacobi rule did not settle below " +
                                  std::to_string(tol) + " with " + std::to_string(kMaxNodes) +
                                  " nodes");
}

} // namespace

double wright_expectation(const DiffusionParams& p, const std::function<double(double)>& f,
                          double tol) {
    return wright_integrals(p, [&](double y) { return std::vector<double>{f(y)}; }, tol)[0];
}

SolutionVector wright_moments(const DiffusionParams& p, State imax, double tol) {
    if (imax < 0) throw RangeError("imax must be non-negative");
    SolutionVector out;
    out.lo = 0;
    out.meta.label = "beta";
    out.values = wright_integrals(
        p,
        [&](double y) {
            std::vector<double> v(static_cast<std::size_t>(imax) + 1);
            double pw = 1.0;
            for (auto& x : v) {
                x = pw;
                pw *= y;
            }
            return v;
        },
        tol);
    out.values[0] = 1.0;
    return out;
}

SolutionVector fearnhead_tails(const DiffusionParams& p, const SolverOptions& opts) {
    validate(p);
    const State hint = 64 + static_cast<State>(std::ceil(10.0 * p.sigma));
    if (p.sigma == 0.0) {
        SolutionVector out;
        out.lo = 0;
        out.values.assign(static_cast<std::size_t>(hint) + 1, 0.0);
        out.values[0] = 1.0;
        out.point_masses.assign(out.values.size(), 0.0);
        out.point_masses[1] = 1.0;
        out.meta.label = "alpha";
        out.meta.truncation = hint;
        return out;
    }
    SolutionVector out = solve_tail_a(diffusion_pldasg_schedule(p.sigma, p.theta, p.nu0, hint), opts);
    out.meta.label = "alpha";
    return out;
}

double ancestral_type_prob_diffusion(const SolutionVector& alpha, double y, bool strict_paper) {
    if (!(y >= 0.0 && y <= 1.0)) throw RangeError("y outside [0,1]");
    if (y == 1.0) return 1.0;
    double sum = 0.0, pw = strict_paper ? y : 1.0;
    for (State i = strict_paper ? 1 : 0; i <= alpha.hi(); ++i) {
        const double term = alpha(i) * pw;
        sum += term;
        if (i > 0 && term < 1e-17 * sum) break;
        pw *= y;
    }
    return 1.0 - (1.0 - y) * sum;
}

// ---------------------------------------------------------------------------

double DiffusionReport::max_error() const {
    double m = recursion_residual;
    for (const auto& e : {beta_from_alpha, alpha_from_beta, beta_ratio_12, alpha_integral})
        if (e) m = std::max(m, *e);
    return m;
}

DiffusionReport diffusion_relations(const DiffusionParams& p, State imax, double tol) {
    validate(p);
    if (imax < 2) throw RangeError("imax must be at least 2");
    DiffusionReport r;
    r.params = p;
    r.imax = imax;
    r.beta = wright_moments(p, imax + 2, tol);
    r.alpha = fearnhead_tails(p);
    const double sigma = p.sigma, theta = p.theta, t1 = p.theta * p.nu1();
    const auto& beta = r.beta;
    const auto& alpha = r.alpha;

    for (State i = 1; i <= imax + 1; ++i) {
        const double d = sigma + static_cast<double>(i) - 1.0 + theta;
        const double row = d * beta(i) - sigma * beta(i + 1) -
                           (static_cast<double>(i) - 1.0 + t1) * beta(i - 1);
        r.recursion_residual = std::max(r.recursion_residual, std::abs(row) / d);
    }
    if (sigma == 0.0) return r;

    // alpha_{i-1} - alpha_i, taken from the point masses of the tail solve.
    auto dalpha = [&](State i) { return alpha.point_masses[static_cast<std::size_t>(i)]; };

    double e1 = 0.0;
    for (State i = 2; i <= imax; ++i) {
        double lg = std::log(dalpha(i - 1)) - std::log(dalpha(1));
        for (State j = 1; j <= i - 2; ++j) lg += std::log(static_cast<double>(j) + 1.0 + t1) - std::log(sigma);
        e1 = std::max(e1, rel_err(beta(i) / beta(2), std::exp(lg)));
    }
    r.beta_from_alpha = e1;

    auto scale = [&](State i) {
        double lg = static_cast<double>(i) * std::log(sigma);
        for (State j = 1; j <= i; ++j) lg -= std::log(static_cast<double>(j) + t1);
        return lg;
    };
    double e2 = 0.0;
    const double d12 = beta(1) - beta(2);
    for (State i = 0; i <= imax; ++i) {
        const double diff = beta(i + 1) - beta(i + 2);
        e2 = std::max(e2, rel_err(alpha(i), std::exp(std::log(diff) - std::log(d12) + scale(i))));
    }
    r.alpha_from_beta = e2;

    const double closed = (1.0 + sigma + theta) / (1.0 + t1) -
                          dalpha(2) / dalpha(1) * (2.0 + t1) / (1.0 + t1);
    r.beta_ratio_12 = rel_err(beta(1) / beta(2), closed);

    const auto moments = wright_integrals(
        p,
        [&](double y) {
            std::vector<double> v(static_cast<std::size_t>(imax) + 1);
            double pw = y * (1.0 - y);
            for (auto& x : v) {
                x = pw;
                pw *= y;
            }
            return v;
        },
        tol);
    double e4 = 0.0;
    for (State i = 0; i <= imax; ++i) {
        const double ratio = moments[static_cast<std::size_t>(i)] / moments[0];
        e4 = std::max(e4, rel_err(alpha(i), std::exp(std::log(ratio) + scale(i))));
    }
    r.alpha_integral = e4;
    return r;
}

// ---------------------------------------------------------------------------

double FiniteReport::max_error() const {
    double m = std::max({sampling_vs_absorption, b_from_smaller, a_from_larger, lemma_w, lemma_a,
                         a_integral});
    if (b12_ratio) m = std::max(m, *b12_ratio);
    return m;
}

FiniteReport finite_relations(const MoranParams& p) {
    validate(p);
    if (p.n < 2) throw RangeError("the finite identities need N >= 2");
    if (!(p.s > 0.0)) throw HypothesisViolated("the finite identities divide by s; s must be positive");
    FiniteReport r;
    r.params = p;
    const State n = p.n;
    const double nd = static_cast<double>(n), s = p.s, nu1 = p.nu1();
    const double nun = nd * p.u * nu1; // N u nu1
    r.u_left = nd * p.u / (nd - 1.0);
    r.u_right = nd * p.u / (nd + 1.0);

    const RateSchedule kasg = kasg_schedule(p);
    const SolutionVector b = solve_absorption_b(kasg);
    const MoranForward fwd = moran_forward(p);
    for (State i = 0; i <= n; ++i)
        r.sampling_vs_absorption =
            std::max(r.sampling_vs_absorption, rel_err(sampling_moments(fwd.pi, i), b(i)));

    // b^N from the tails of the size N-1 pLD-ASG.
    const SolutionVector a_small =
        solve_tail_a(moran_pldasg_schedule(n - 1, s, r.u_left, p.nu0));
    auto w_small = [&](State i) { return a_small.point_masses[static_cast<std::size_t>(i)]; };
    auto b_ratio = [&](State i) { // predicted b_i / b_2
        double lg = std::log(w_small(i - 1)) - std::log(w_small(1));
        for (State j = 1; j <= i - 2; ++j)
            lg += std::log(static_cast<double>(j) + 1.0 + nun) -
                  std::log((nd - static_cast<double>(j) - 1.0) * s);
        return std::exp(lg);
    };
    for (State i = 2; i <= n; ++i)
        r.b_from_smaller = std::max(r.b_from_smaller, rel_err(b(i) / b(2), b_ratio(i)));

    if (n > 2) {
        const double l2 = kasg.lambda(2), m2 = kasg.mu(2), k = kasg.kappa();
        const double predicted = (l2 + m2 + k) / m2 - l2 / m2 * b_ratio(3);
        r.b12_ratio = rel_err(b(1) / b(2), predicted);
    }

    // a^N from the absorption probabilities of the size N+1 k-ASG.
    const SolutionVector a = solve_tail_a(pldasg_schedule(p));
    const SolutionVector b_large = solve_absorption_b(moran_kasg_schedule(n + 1, s, r.u_right, p.nu0));
    const double d12 = b_large(1) - b_large(2);
    auto a_scale = [&](State i) {
        double lg = 0.0;
        for (State j = 1; j <= i; ++j)
            lg += std::log((nd - static_cast<double>(j)) * s) - std::log(static_cast<double>(j) + nun);
        return lg;
    };
    for (State i = 0; i <= n - 1; ++i) {
        const double diff = b_large(i + 1) - b_large.at_or_zero(i + 2);
        r.a_from_larger = std::max(
            r.a_from_larger, rel_err(a(i), std::exp(std::log(diff) - std::log(d12) + a_scale(i))));
    }

    // L-hat: the catastrophe chain built on the k-ASG rates.
    const SolutionVector a_hat = solve_tail_a(kasg);
    auto w_hat = [&](State i) { return a_hat.point_masses[static_cast<std::size_t>(i)]; };
    for (State j = 2; j <= n; ++j)
        r.lemma_w = std::max(r.lemma_w, rel_err(w_hat(j) / w_hat(2), w_small(j - 1) / w_small(1)));
    for (State j = 1; j <= n - 1; ++j)
        r.lemma_a = std::max(r.lemma_a, rel_err(a_hat(j) / a_hat(1), a_small(j - 1)));

    // Integral representation over the size N+1 sampling weights.
    const double nu0n = nd * p.u * p.nu0;
    std::vector<double> logpi(static_cast<std::size_t>(n) + 2, 0.0);
    for (State k = 2; k <= n + 1; ++k) {
        const double j = static_cast<double>(k - 1);
        logpi[static_cast<std::size_t>(k)] =
            logpi[static_cast<std::size_t>(k - 1)] + std::log((nd + 1.0 - j) * (j + nun)) -
            std::log((j + 1.0) * ((1.0 + s) * (nd - j) + nu0n));
    }
    const double top = *std::max_element(logpi.begin() + 1, logpi.end());
    std::vector<double> pit(logpi.size(), 0.0);
    for (State k = 1; k <= n + 1; ++k)
        pit[static_cast<std::size_t>(k)] = std::exp(logpi[static_cast<std::size_t>(k)] - top);
    double den = 0.0;
    for (State k = 1; k <= n + 1; ++k) {
        const double kd = static_cast<double>(k);
        den += kd / (nd + 1.0) * (1.0 - (kd - 1.0) / nd) * pit[static_cast<std::size_t>(k)];
    }
    for (State i = 0; i <= n - 1; ++i) {
        double num = 0.0;
        for (State k = i + 1; k <= n + 1; ++k) {
            const double kd = static_cast<double>(k);
            num += falling_ratio(k, n + 1, i + 1) *
                   (1.0 - (kd - static_cast<double>(i) - 1.0) / (nd - static_cast<double>(i))) *
                   pit[static_cast<std::size_t>(k)];
        }
        r.a_integral = std::max(r.a_integral, rel_err(a(i), num / den * std::exp(a_scale(i))));
    }
    return r;
}

namespace {

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

} // namespace

ojson to_json(const DiffusionReport& r) {
    ojson j;
    j["params"] = {{"sigma", r.params.sigma}, {"theta", r.params.theta}, {"nu0", r.params.nu0},
                   {"nu1", r.params.nu1()}};
    j["imax"] = r.imax;
    j["checks"] = {{"beta_from_alpha", opt(r.beta_from_alpha)},
                   {"alpha_from_beta", opt(r.alpha_from_beta)},
                   {"beta1_over_beta2", opt(r.beta_ratio_12)},
                   {"alpha_integral", opt(r.alpha_integral)},
                   {"beta_recursion_residual", r.recursion_residual}};
    j["max_error"] = r.max_error();
    return j;
}

ojson to_json(const FiniteReport& r) {
    ojson j;
    j["params"] = {{"N", r.params.n}, {"s", r.params.s}, {"u", r.params.u},
                   {"nu0", r.params.nu0}, {"nu1", r.params.nu1()}};
    j["u_left"] = r.u_left;
    j["u_right"] = r.u_right;
    j["checks"] = {{"sampling_vs_absorption", r.sampling_vs_absorption},
                   {"b_from_smaller", r.b_from_smaller},
                   {"a_from_larger", r.a_from_larger},
                   {"b1_over_b2", opt(r.b12_ratio)},
                   {"lhat_w", r.lemma_w},
                   {"lhat_a", r.lemma_a},
                   {"a_integral", r.a_integral}};
    j["max_error"] = r.max_error();
    return j;
}

} // namespace bdk
