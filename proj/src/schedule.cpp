#include "bdk/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdk/errors.hpp"

namespace bdk {

namespace {

// Closed-form schedules with no truncation hint are still checked on a
// leading window.
constexpr State kValidationWindow = 64;

std::string indexed(const char* name, State i) {
    return std::string(name) + "[" + std::to_string(i) + "]";
}

} // namespace

RateSchedule RateSchedule::finite(std::vector<double> lambda, std::vector<double> mu,
                                  double kappa, std::string family) {
    if (mu.empty()) throw ValidationError("mu", "finite extent needs at least one death rate");
    const State n = static_cast<State>(mu.size());
    if (static_cast<State>(lambda.size()) > n)
        throw ValidationError("lambda", "longer than mu; extent is taken from mu");
    if (static_cast<State>(lambda.size()) == n) {
        if (lambda.back() != 0.0)
            throw ValidationError(indexed("lambda", n),
                                  "lambda_N must be 0 for finite extent N = " +
                                      std::to_string(n));
        lambda.pop_back();
    }
    if (static_cast<State>(lambda.size()) != n - 1)
        throw ValidationError("lambda", "expected " + std::to_string(n - 1) +
                                            " birth rates for extent " + std::to_string(n));
    RateSchedule s;
    s.extent_ = Extent::make_finite(n);
    s.kappa_ = kappa;
    s.family_ = std::move(family);
    s.lambda_.assign(n + 2, 0.0);
    s.mu_.assign(n + 2, 0.0);
    std::copy(lambda.begin(), lambda.end(), s.lambda_.begin() + 1);
    std::copy(mu.begin(), mu.end(), s.mu_.begin() + 1);
    s.validate(n);
    return s;
}

RateSchedule RateSchedule::from_rates(Extent extent, RateFn lambda, RateFn mu, double kappa,
                                      std::string family) {
    if (extent.n < 1 && extent.finite)
        throw ValidationError("extent", "N must be positive");
    if (extent.n < 0) throw ValidationError("extent", "truncation hint must be positive");
    if (extent.finite) {
        std::vector<double> l(extent.n > 0 ? extent.n - 1 : 0), m(extent.n);
        for (State i = 1; i < extent.n; ++i) l[i - 1] = lambda(i);
        for (State i = 1; i <= extent.n; ++i) m[i - 1] = mu(i);
        return finite(std::move(l), std::move(m), kappa, std::move(family));
    }
    RateSchedule s;
    s.extent_ = extent;
    s.kappa_ = kappa;
    s.family_ = std::move(family);
    s.lambda_fn_ = std::make_shared<const RateFn>(std::move(lambda));
    s.mu_fn_ = std::make_shared<const RateFn>(std::move(mu));
    s.validate(std::max(extent.n, kValidationWindow));
    return s;
}

void RateSchedule::validate(State upto) const {
    if (!(kappa_ > 0.0) || !std::isfinite(kappa_))
        throw ValidationError("kappa", "must be a positive finite number");
    // Selection-free population-genetic schedules legitimately have zero
    // birth rates; every other family must keep lambda positive inside.
    const bool zero_birth_ok = family_.rfind("moran-", 0) == 0 ||
                               family_.rfind("diffusion-", 0) == 0;
    const State lmax = extent_.finite ? extent_.n - 1 : upto;
    for (State i = 1; i <= lmax; ++i) {
        const double l = lambda(i);
        if (!std::isfinite(l) || l < 0.0)
            throw ValidationError(indexed("lambda", i), "must be finite and non-negative");
        if (l == 0.0 && !zero_birth_ok)
            throw ValidationError(indexed("lambda", i), "interior birth rate must be positive");
    }
    const State mmax = extent_.finite ? extent_.n : upto;
    for (State i = 1; i <= mmax; ++i) {
        const double m = mu(i);
        if (!std::isfinite(m) || m < 0.0)
            throw ValidationError(indexed("mu", i), "must be finite and non-negative");
    }
}

double RateSchedule::lambda(State i) const {
    if (i < 1) return 0.0;
    if (extent_.finite) return i < extent_.n ? lambda_[i] : 0.0;
    return (*lambda_fn_)(i);
}

double RateSchedule::mu(State i) const {
    if (i < 1) return 0.0;
    if (extent_.finite) return i <= extent_.n ? mu_[i] : 0.0;
    return (*mu_fn_)(i);
}

State RateSchedule::size() const {
    if (!extent_.finite) throw RangeError("schedule has infinite extent");
    return extent_.n;
}

State RateSchedule::working_extent() const {
    if (extent_.finite) return extent_.n;
    if (extent_.n < 1)
        throw TruncationError("infinite extent without a truncation hint");
    return extent_.n;
}

RateSchedule RateSchedule::with_truncation(State hint) const {
    if (extent_.finite) return *this;
    if (hint < 1) throw ValidationError("truncation", "must be positive");
    RateSchedule s = *this;
    s.extent_.n = hint;
    return s;
}

// ---------------------------------------------------------------------------
// Families

RateSchedule constant_schedule(Extent extent, double lambda, double mu, double kappa) {
    return RateSchedule::from_rates(
        extent, [lambda](State) { return lambda; }, [mu](State) { return mu; }, kappa,
        "constant");
}

RateSchedule affine_schedule(Extent extent, double lambda0, double lambda1, double mu0,
                             double mu1, double kappa) {
    return RateSchedule::from_rates(
        extent, [=](State i) { return lambda0 + lambda1 * static_cast<double>(i); },
        [=](State i) { return mu0 + mu1 * static_cast<double>(i); }, kappa, "affine");
}

namespace {

void check_moran(State n, double s, double u, double nu0) {
    if (n < 1) throw ValidationError("N", "must be at least 1");
    if (!(s >= 0.0)) throw ValidationError("s", "must be non-negative");
    if (!(u > 0.0)) throw ValidationError("u", "must be positive");
    if (!(nu0 > 0.0 && nu0 < 1.0)) throw ValidationError("nu0", "must lie in (0,1)");
}

void check_diffusion(double sigma, double theta, double nu0) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma", "must be non-negative");
    if (!(theta > 0.0)) throw ValidationError("theta", "must be positive");
    if (!(nu0 > 0.0 && nu0 < 1.0)) throw ValidationError("nu0", "must lie in (0,1)");
}

} // namespace

RateSchedule moran_kasg_schedule(State n, double s, double u, double nu0) {
    check_moran(n, s, u, nu0);
    const double nd = static_cast<double>(n), nu1 = 1.0 - nu0;
    return RateSchedule::from_rates(
        Extent::make_finite(n),
        [=](State i) { return s * (nd - static_cast<double>(i)) / nd; },
        [=](State i) { return (static_cast<double>(i) - 1.0) / nd + u * nu1; }, u * nu0,
        "moran-kasg");
}

RateSchedule moran_pldasg_schedule(State n, double s, double u, double nu0) {
    check_moran(n, s, u, nu0);
    const double nd = static_cast<double>(n), nu1 = 1.0 - nu0;
    return RateSchedule::from_rates(
        Extent::make_finite(n),
        [=](State i) { return s * (nd - static_cast<double>(i)) / nd; },
        [=](State i) { return static_cast<double>(i) / nd + u * nu1; }, u * nu0,
        "moran-pldasg");
}

RateSchedule diffusion_kasg_schedule(double sigma, double theta, double nu0, State hint) {
    check_diffusion(sigma, theta, nu0);
    const double nu1 = 1.0 - nu0;
    return RateSchedule::from_rates(
        Extent::make_infinite(hint), [sigma](State) { return sigma; },
        [=](State i) { return static_cast<double>(i) - 1.0 + theta * nu1; }, theta * nu0,
        "diffusion-kasg");
}

RateSchedule diffusion_pldasg_schedule(double sigma, double theta, double nu0, State hint) {
    check_diffusion(sigma, theta, nu0);
    const double nu1 = 1.0 - nu0;
    return RateSchedule::from_rates(
        Extent::make_infinite(hint), [sigma](State) { return sigma; },
        [=](State i) { return static_cast<double>(i) + theta * nu1; }, theta * nu0,
        "diffusion-pldasg");
}

// ---------------------------------------------------------------------------
// v1 descriptions

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw SpecError("missing field '" + std::string(key) + "'" +
                        (where.empty() ? "" : " in " + where));
    return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number())
        throw ValidationError(where.empty() ? key : where + "." + key, "expected a number");
    return v.get<double>();
}

State integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ValidationError(where, "expected an integer");
    return v.get<State>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number())
            throw ValidationError(where + "[" + std::to_string(k + 1) + "]", "expected a number");
        out.push_back(v[k].get<double>());
    }
    return out;
}

// Accepts 5, {"finite": 5} or {"infinite": true, "truncation": 200}.
Extent parse_extent(const json& v) {
    if (v.is_number_integer()) {
        const State n = v.get<State>();
        if (n < 1) throw ValidationError("extent", "N must be positive");
        return Extent::make_finite(n);
    }
    if (v.is_object()) {
        if (v.contains("finite")) {
            const State n = integer(v.at("finite"), "extent.finite");
            if (n < 1) throw ValidationError("extent.finite", "N must be positive");
            return Extent::make_finite(n);
        }
        if (v.contains("infinite")) {
            State hint = 0;
            if (v.contains("truncation")) hint = integer(v.at("truncation"), "extent.truncation");
            if (hint < 0) throw ValidationError("extent.truncation", "must be positive");
            return Extent::make_infinite(hint);
        }
    }
    throw ValidationError("extent", "expected N, {\"finite\": N} or {\"infinite\": true}");
}

// nu0 may be given directly or through nu1; when both appear they must sum to 1.
double parse_nu0(const json& p, const std::string& where) {
    const bool h0 = p.contains("nu0"), h1 = p.contains("nu1");
    if (!h0 && !h1) throw SpecError("missing field 'nu0' in " + where);
    const double nu0 = h0 ? number(p, "nu0", where) : 1.0 - number(p, "nu1", where);
    if (h0 && h1 && std::abs(nu0 + number(p, "nu1", where) - 1.0) > 1e-12)
        throw ValidationError(where + ".nu1", "nu0 + nu1 must equal 1");
    return nu0;
}

State optional_truncation(const json& desc, const json& p) {
    if (p.contains("truncation")) return integer(p.at("truncation"), "family.params.truncation");
    if (desc.contains("extent")) {
        const Extent e = parse_extent(desc.at("extent"));
        if (!e.finite) return e.n;
    }
    return 0;
}

std::vector<RateSchedule> build(const json& desc) {
    if (!desc.is_object()) throw ValidationError("schedule", "expected an object");
    if (desc.contains("family")) {
        const json& fam = desc.at("family");
        const std::string name =
            fam.is_string() ? fam.get<std::string>()
                            : require(fam, "name", "family").get<std::string>();
        const json empty = json::object();
        const json& p = fam.is_object() && fam.contains("params") ? fam.at("params") : empty;
        const std::string where = "family.params";

        if (name == "constant" || name == "affine") {
            const Extent ext = parse_extent(require(desc, "extent", ""));
            const double kappa = number(desc, "kappa", "");
            if (name == "constant")
                return {constant_schedule(ext, number(p, "lambda", where),
                                          number(p, "mu", where), kappa)};
            return {affine_schedule(ext, number(p, "lambda0", where),
                                    number(p, "lambda1", where), number(p, "mu0", where),
                                    number(p, "mu1", where), kappa)};
        }
        if (name == "moran" || name == "moran-kasg" || name == "moran-pldasg") {
            const State n = integer(require(p, "N", where), where + ".N");
            const double s = number(p, "s", where), u = number(p, "u", where);
            const double nu0 = parse_nu0(p, where);
            if (name == "moran-kasg") return {moran_kasg_schedule(n, s, u, nu0)};
            if (name == "moran-pldasg") return {moran_pldasg_schedule(n, s, u, nu0)};
            return {moran_kasg_schedule(n, s, u, nu0), moran_pldasg_schedule(n, s, u, nu0)};
        }
        if (name == "diffusion-kasg" || name == "diffusion-pldasg") {
            const double sigma = number(p, "sigma", where), theta = number(p, "theta", where);
            const double nu0 = parse_nu0(p, where);
            const State hint = optional_truncation(desc, p);
            if (name == "diffusion-kasg") return {diffusion_kasg_schedule(sigma, theta, nu0, hint)};
            return {diffusion_pldasg_schedule(sigma, theta, nu0, hint)};
        }
        throw ValidationError("family.name", "unknown family '" + name + "'");
    }

    const double kappa = number(desc, "kappa", "");
    std::vector<double> mu = numbers(require(desc, "mu", ""), "mu");
    std::vector<double> lambda = numbers(require(desc, "lambda", ""), "lambda");
    if (desc.contains("extent")) {
        const Extent ext = parse_extent(desc.at("extent"));
        if (!ext.finite) throw ValidationError("extent", "explicit arrays need a finite extent");
        if (ext.n != static_cast<State>(mu.size()))
            throw ValidationError("mu", "length " + std::to_string(mu.size()) +
                                            " does not match extent " + std::to_string(ext.n));
    }
    return {RateSchedule::finite(std::move(lambda), std::move(mu), kappa)};
}

} // namespace

RateSchedule make_schedule(const json& description) {
    auto all = build(description);
    if (all.size() != 1)
        throw ValidationError("family.name",
                              "'moran' describes two schedules; name moran-kasg or moran-pldasg");
    return std::move(all.front());
}

std::vector<RateSchedule> make_schedules(const json& description) { return build(description); }

// ---------------------------------------------------------------------------

RateSchedule bar_transform(const RateSchedule& sched, double lambda0) {
    if (!(lambda0 >= 0.0)) throw ValidationError("lambda0", "must be non-negative");
    const std::string fam = sched.family().rfind("bar:", 0) == 0 ? sched.family()
                                                                   : "bar:" + sched.family();
    if (sched.is_finite()) {
        const State n = sched.size();
        std::vector<double> lb(n), mb(n + 1);
        for (State i = 1; i <= n; ++i) lb[i - 1] = sched.mu(i);
        for (State i = 1; i <= n + 1; ++i) mb[i - 1] = i == 1 ? lambda0 : sched.lambda(i - 1);
        for (State i = 1; i <= n; ++i)
            if (lb[i - 1] == 0.0)
                throw ValidationError(indexed("mu", i), "bar transform needs mu_i > 0");
        return RateSchedule::finite(std::move(lb), std::move(mb), sched.kappa(), fam);
    }
    RateSchedule base = sched;
    const State hint = sched.extent().n > 0 ? sched.extent().n + 1 : 0;
    return RateSchedule::from_rates(
        Extent::make_infinite(hint), [base](State i) { return base.mu(i); },
        [base, lambda0](State i) { return i == 1 ? lambda0 : base.lambda(i - 1); },
        sched.kappa(), fam);
}

// ---------------------------------------------------------------------------

namespace {

PartialSum partial_sum(const RateSchedule& sched, bool birth, State upto, State m) {
    PartialSum out;
    double total = 0.0, at_decade = 0.0, max_term = 0.0;
    const State decade = m / 10;
    for (State i = 1; i <= upto; ++i) {
        const double r = birth ? sched.lambda(i) : sched.mu(i);
        if (r == 0.0) {
            out.skipped.push_back(i);
        } else {
            total += 1.0 / r;
            max_term = std::max(max_term, 1.0 / r);
        }
        if (i == decade) at_decade = total;
    }
    out.value = total;
    out.decade_growth = max_term > 0.0 ? (total - at_decade) / max_term : 0.0;
    if (!birth && !out.skipped.empty()) {
        out.verdict = "automatically satisfied (mu_" + std::to_string(out.skipped.front()) +
                      " = 0)";
    } else if (max_term == 0.0) {
        out.verdict = "no nonzero terms";
    } else {
        out.verdict = out.decade_growth >= 0.2 ? "divergence plausible"
                                               : "divergence NOT plausible";
    }
    return out;
}

} // namespace

TailConditionReport tail_condition_diagnostic(const RateSchedule& sched, State m) {
    if (m < 1) throw ValidationError("M", "must be at least 1");
    TailConditionReport rep;
    rep.upto = m;
    const State lmax = sched.is_finite() ? std::min(m, sched.size() - 1) : m;
    const State mmax = sched.is_finite() ? std::min(m, sched.size()) : m;
    rep.lambda = partial_sum(sched, true, lmax, m);
    rep.mu = partial_sum(sched, false, mmax, m);
    return rep;
}

} // namespace bdk
