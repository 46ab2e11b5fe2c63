#include "bdk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "bdk/errors.hpp"

namespace bdk {

void validate(const SimConfig& cfg) {
    if (cfg.replicates < 1) throw ValidationError("replicates", "must be at least 1");
    if (!(cfg.burn_in >= 0.0 && cfg.burn_in < 1.0))
        throw ValidationError("burn_in", "must lie in [0, 1)");
    if (!(cfg.horizon >= 0.0)) throw ValidationError("horizon", "must be non-negative");
    if (cfg.max_events < 1) throw ValidationError("max_events", "must be positive");
}

std::string to_string(PathStatus s) {
    switch (s) {
    case PathStatus::Absorbed: return "absorbed";
    case PathStatus::Horizon: return "horizon";
    case PathStatus::EventCap: return "event-cap";
    }
    return "?";
}

namespace {

// Runs f(r) for r in [0, count) on contiguous chunks. Callers write results
// into slot r, so the reduction order never depends on scheduling.
template <class F>
void parallel_for(std::int64_t count, unsigned threads, F f) {
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::int64_t>(t, count));
    if (t <= 1) {
        for (std::int64_t r = 0; r < count; ++r) f(r);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    const std::int64_t chunk = (count + t - 1) / t;
    for (unsigned k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
            try {
                const std::int64_t lo = k * chunk, hi = std::min(count, lo + chunk);
                for (std::int64_t r = lo; r < hi; ++r) f(r);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Sampling view of a generator row: sparse entries first, then the run.
class JumpTable {
  public:
    explicit JumpTable(const Generator& g) : g_(g) {}

    double out(State s) const { return g_.out_rate(s); }

    State jump(State s, RandomStream& rng) const {
        const double total = g_.out_rate(s);
        double u = rng.uniform() * total;
        const auto& row = g_.transitions(s);
        for (const auto& t : row) {
            if (u < t.rate) return t.to;
            u -= t.rate;
        }
        const auto& run = g_.run(s);
        if (run) {
            const auto len = run->last - run->first + 1;
            auto k = static_cast<State>(u / run->rate);
            return run->first + std::clamp<State>(k, 0, len - 1);
        }
        return row.back().to;
    }

  private:
    const Generator& g_;
};

struct WalkResult {
    PathStatus status;
    State final_state;
    double end_time;
    std::int64_t events;
};

// Generic walk. `sojourn(s, t0, t1)` sees every completed or cut holding
// interval; `stop(s)` ends the walk early when it returns true on entry.
template <class Sojourn, class Stop>
WalkResult walk(const JumpTable& jt, State init, const SimConfig& cfg, RandomStream& rng,
                Sojourn sojourn, Stop stop) {
    State s = init;
    double t = 0.0;
    std::int64_t events = 0;
    for (;;) {
        const double rate = jt.out(s);
        if (rate == 0.0) {
            if (cfg.horizon > 0.0) sojourn(s, t, cfg.horizon);
            return {PathStatus::Absorbed, s, t, events};
        }
        if (events >= cfg.max_events) return {PathStatus::EventCap, s, t, events};
        const double hold = rng.exponential(rate);
        if (cfg.horizon > 0.0 && t + hold >= cfg.horizon) {
            sojourn(s, t, cfg.horizon);
            return {PathStatus::Horizon, s, cfg.horizon, events};
        }
        sojourn(s, t, t + hold);
        t += hold;
        s = jt.jump(s, rng);
        ++events;
        if (stop(s, t)) return {PathStatus::Absorbed, s, t, events};
    }
}

Estimate mean_estimate(const std::vector<double>& xs) {
    Estimate e;
    if (xs.empty()) return e;
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.value = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.value) * (x - e.value);
        e.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                              static_cast<double>(xs.size()));
    }
    return e;
}

Estimate proportion(std::int64_t hits, std::int64_t total) {
    Estimate e;
    if (total <= 0) return e;
    e.value = static_cast<double>(hits) / static_cast<double>(total);
    e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(total));
    return e;
}

// Independent stream families per purpose, all derived from the one seed.
constexpr std::uint64_t kReturnFromN = std::uint64_t{1} << 40;
constexpr std::uint64_t kReturnFromN1 = std::uint64_t{2} << 40;
constexpr std::uint64_t kOccupationSeedMix = 0x9E3779B97F4A7C15ull;

} // namespace

PathRecord simulate_path(const Generator& gen, State init, const SimConfig& cfg,
                         RandomStream& rng) {
    if (!gen.contains(init)) throw RangeError("initial state not in generator");
    const JumpTable jt(gen);
    PathRecord rec;
    rec.times.push_back(0.0);
    rec.states.push_back(init);
    const auto res = walk(
        jt, init, cfg, rng, [](State, double, double) {},
        [&](State s, double t) {
            rec.times.push_back(t);
            rec.states.push_back(s);
            return false;
        });
    rec.status = res.status;
    rec.end_time = res.end_time;
    return rec;
}

MarkedPathRecord simulate_marked_path(const RateSchedule& sched, State n, State init,
                                      const SimConfig& cfg, RandomStream& rng) {
    const State top = sched.working_extent();
    if (n < 1 || n > top) throw RangeError("level n outside [1:" + std::to_string(top) + "]");
    const State width = top - n + 1;
    if (init < n || init >= n + 2 * width) throw RangeError("initial state not in marked chain");
    MarkedPathRecord out;
    PathRecord& rec = out.path;
    State base = init >= n + width ? init - width : init;
    bool circ = init >= n + width;
    double t = 0.0;
    std::int64_t events = 0;
    rec.times.push_back(0.0);
    rec.states.push_back(init);
    for (;;) {
        const double up = base < top ? sched.lambda(base) : 0.0;
        const double down = base >= n + 1 ? sched.mu(base) : 0.0;
        const double cat = base >= n + 1 ? sched.kappa() : 0.0;
        const double total = up + down + cat;
        if (total == 0.0) {
            rec.status = PathStatus::Absorbed;
            break;
        }
        if (events >= cfg.max_events) {
            rec.status = PathStatus::EventCap;
            break;
        }
        const double hold = rng.exponential(total);
        if (cfg.horizon > 0.0 && t + hold >= cfg.horizon) {
            t = cfg.horizon;
            rec.status = PathStatus::Horizon;
            break;
        }
        t += hold;
        ++events;
        const double u = rng.uniform() * total;
        if (u < up) {
            ++base;
        } else if (u < up + down) {
            --base;
        } else {
            base = n;
            out.catastrophe_times.push_back(t);
            if (!circ) out.first_catastrophe = t;
            circ = true;
        }
        rec.times.push_back(t);
        rec.states.push_back(circ ? base + width : base);
    }
    rec.end_time = t;
    return out;
}

AbsorptionEstimate estimate_absorption(const RateSchedule& sched, State init,
                                       const SimConfig& cfg) {
    validate(cfg);
    const Generator g = build_generator(ProcessKind::X, sched);
    if (!g.contains(init)) throw RangeError("initial state not in range");
    SimConfig run = cfg;
    run.horizon = 0.0;
    const JumpTable jt(g);
    std::vector<State> ends(static_cast<std::size_t>(cfg.replicates));
    std::vector<char> done(ends.size(), 0);
    parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
        RandomStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        const auto res = walk(jt, init, run, rng, [](State, double, double) {},
                              [](State, double) { return false; });
        ends[static_cast<std::size_t>(r)] = res.final_state;
        done[static_cast<std::size_t>(r)] = res.status == PathStatus::Absorbed;
    });
    AbsorptionEstimate est;
    est.replicates = cfg.replicates;
    est.seed = cfg.seed;
    for (std::size_t r = 0; r < ends.size(); ++r) {
        if (!done[r]) ++est.unfinished;
        else if (ends[r] == 0) ++est.absorbed_zero;
        else ++est.absorbed_cemetery;
    }
    est.b = proportion(est.absorbed_zero, cfg.replicates);
    return est;
}

double batch_covariance(const DistributionEstimate& e, State i, State j) {
    const auto bi = static_cast<std::size_t>(i - e.lo), bj = static_cast<std::size_t>(j - e.lo);
    const double nb = static_cast<double>(e.batch_means.size());
    if (nb < 2) return 0.0;
    double mi = 0.0, mj = 0.0;
    for (const auto& b : e.batch_means) {
        mi += b[bi];
        mj += b[bj];
    }
    mi /= nb;
    mj /= nb;
    double c = 0.0;
    for (const auto& b : e.batch_means) c += (b[bi] - mi) * (b[bj] - mj);
    return c / (nb - 1.0) / nb;
}

DistributionEstimate estimate_stationary(const Generator& gen, const SimConfig& cfg,
                                         std::optional<State> init) {
    validate(cfg);
    if (!(cfg.horizon > 0.0)) throw ValidationError("horizon", "occupation estimates need a horizon");
    const State start = init.value_or(gen.lo());
    if (!gen.contains(start)) throw RangeError("initial state not in generator");
    const std::size_t n = gen.size();
    const std::int64_t reps = cfg.replicates;
    const int windows = reps < 16 ? 16 : 1;
    const double t0 = cfg.burn_in * cfg.horizon;
    const double span = (cfg.horizon - t0) / windows;
    const JumpTable jt(gen);

    // occ[r][w][state]
    std::vector<std::vector<std::vector<double>>> occ(
        static_cast<std::size_t>(reps),
        std::vector<std::vector<double>>(static_cast<std::size_t>(windows), std::vector<double>(n, 0.0)));
    parallel_for(reps, cfg.threads, [&](std::int64_t r) {
        RandomStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        auto& mine = occ[static_cast<std::size_t>(r)];
        walk(
            jt, start, cfg, rng,
            [&](State s, double a, double b) {
                a = std::max(a, t0);
                if (b <= a) return;
                const std::size_t k = gen.index(s);
                // Split the interval over the windows it touches.
                int w = std::min(windows - 1, static_cast<int>((a - t0) / span));
                while (a < b && w < windows) {
                    const double wend = w == windows - 1 ? cfg.horizon : t0 + (w + 1) * span;
                    const double cut = std::min(b, wend);
                    mine[static_cast<std::size_t>(w)][k] += (cut - a) / span;
                    a = cut;
                    ++w;
                }
            },
            [](State, double) { return false; });
    });

    DistributionEstimate est;
    est.lo = gen.lo();
    est.replicates = reps;
    est.seed = cfg.seed;
    est.values.assign(n, 0.0);
    est.stderr_.assign(n, 0.0);
    std::int64_t nb;
    if (windows > 1) {
        nb = windows;
        est.batch_means.assign(static_cast<std::size_t>(nb), std::vector<double>(n, 0.0));
        for (std::int64_t r = 0; r < reps; ++r)
            for (int w = 0; w < windows; ++w)
                for (std::size_t k = 0; k < n; ++k)
                    est.batch_means[static_cast<std::size_t>(w)][k] +=
                        occ[static_cast<std::size_t>(r)][static_cast<std::size_t>(w)][k] /
                        static_cast<double>(reps);
    } else {
        nb = std::min<std::int64_t>(reps, 64);
        est.batch_means.assign(static_cast<std::size_t>(nb), std::vector<double>(n, 0.0));
        std::vector<std::int64_t> sizes(static_cast<std::size_t>(nb), 0);
        for (std::int64_t r = 0; r < reps; ++r) {
            const auto b = static_cast<std::size_t>(r * nb / reps);
            ++sizes[b];
            for (std::size_t k = 0; k < n; ++k)
                est.batch_means[b][k] += occ[static_cast<std::size_t>(r)][0][k];
        }
        for (std::size_t b = 0; b < sizes.size(); ++b)
            for (auto& x : est.batch_means[b]) x /= static_cast<double>(sizes[b]);
    }
    est.batches = nb;
    for (std::int64_t r = 0; r < reps; ++r)
        for (int w = 0; w < windows; ++w)
            for (std::size_t k = 0; k < n; ++k)
                est.values[k] += occ[static_cast<std::size_t>(r)][static_cast<std::size_t>(w)][k] /
                                 static_cast<double>(reps * windows);
    for (std::size_t k = 0; k < n; ++k) {
        const State s = gen.state_at(k);
        est.stderr_[k] = std::sqrt(std::max(0.0, batch_covariance(est, s, s)));
    }
    return est;
}

ChiSquare geometric_chi_square(const std::vector<std::int64_t>& counts, double q) {
    ChiSquare out;
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0 || !(q > 0.0 && q < 1.0)) return out;
    const double r = static_cast<double>(total);
    const auto observed = [&](std::size_t m) {
        return m < counts.size() ? static_cast<double>(counts[m]) : 0.0;
    };
    double stat = 0.0;
    int bins = 0;
    std::size_t m = 0;
    double tail_prob = 1.0; // P(M >= m)
    for (;; ++m) {
        const double pm = tail_prob * q;
        const double rest = tail_prob - pm;
        if (r * pm < 5.0 || r * rest < 5.0) break;
        const double o = observed(m), e = r * pm;
        stat += (o - e) * (o - e) / e;
        ++bins;
        tail_prob = rest;
    }
    double o_tail = 0.0;
    for (std::size_t k = m; k < counts.size(); ++k) o_tail += static_cast<double>(counts[k]);
    const double e_tail = r * tail_prob;
    if (e_tail > 0.0) {
        stat += (o_tail - e_tail) * (o_tail - e_tail) / e_tail;
        ++bins;
    }
    out.statistic = stat;
    out.dof = bins - 2;
    if (out.dof < 1) return out;
    out.applicable = true;
    out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * stat);
    return out;
}

ExcursionStats excursion_statistics(const RateSchedule& sched, State n, const SimConfig& cfg) {
    validate(cfg);
    const State top = sched.working_extent();
    if (n < 1 || n > top - 1) throw RangeError("level n outside [1:N-1]");

    struct Rep {
        std::int64_t m = 0;
        bool down = false;
        bool finished = true;
        double first_duration = 0.0;
        double total = 0.0;
        std::vector<double> durations;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(cfg.replicates));
    const double kappa = sched.kappa();

    parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
        RandomStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        Rep& out = reps[static_cast<std::size_t>(r)];
        State i = n + 1;
        double t = 0.0, start = 0.0;
        std::int64_t events = 0;
        for (;;) {
            if (events++ >= cfg.max_events) {
                out.finished = false;
                return;
            }
            const double up = i < top ? sched.lambda(i) : 0.0;
            const double down = sched.mu(i);
            const double total = up + down + kappa;
            t += rng.exponential(total);
            const double u = rng.uniform() * total;
            if (u >= up + down) return; // catastrophe: flag flips, cycle ends in circ
            if (u < up) {
                if (i == n + 1) start = t;
                ++i;
                continue;
            }
            --i;
            if (i == n) {
                out.down = true;
                return;
            }
            if (i == n + 1) {
                const double d = t - start;
                if (out.m == 0) out.first_duration = d;
                ++out.m;
                out.total += d;
                out.durations.push_back(d);
            }
        }
    });

    ExcursionStats st;
    st.n = n;
    st.replicates = cfg.replicates;
    st.seed = cfg.seed;
    std::int64_t finished = 0, downs = 0, cats = 0, loops = 0;
    std::vector<double> durations, totals, firsts, had;
    for (const auto& rp : reps) {
        if (!rp.finished) continue;
        ++finished;
        loops += rp.m;
        if (rp.down) ++downs;
        else ++cats;
        totals.push_back(rp.total);
        had.push_back(rp.m > 0 ? 1.0 : 0.0);
        firsts.push_back(rp.m > 0 ? rp.first_duration : 0.0);
        durations.insert(durations.end(), rp.durations.begin(), rp.durations.end());
        if (static_cast<std::size_t>(rp.m) >= st.excursion_counts.size())
            st.excursion_counts.resize(static_cast<std::size_t>(rp.m) + 1, 0);
        ++st.excursion_counts[static_cast<std::size_t>(rp.m)];
    }
    st.catastrophes_logged = cats;
    st.cycles = finished + loops;
    st.p_down = proportion(downs, st.cycles);
    st.p_loop = proportion(loops, st.cycles);
    st.p_cat = proportion(cats, st.cycles);
    st.c_direct = proportion(downs, finished);
    st.c_ratio.value = st.p_loop.value < 1.0 ? st.p_down.value / (1.0 - st.p_loop.value) : 0.0;
    st.c_ratio.stderr_ = st.c_direct.stderr_;
    st.excursion_duration = mean_estimate(durations);
    st.total_excursion_time = mean_estimate(totals);

    // Wald: E[T_tot] = p/(1-p) E[T] with p and T taken from the first cycle.
    {
        const double R = static_cast<double>(finished);
        double mt = 0, mj = 0, mi = 0;
        for (std::size_t k = 0; k < totals.size(); ++k) {
            mt += totals[k];
            mj += firsts[k];
            mi += had[k];
        }
        mt /= R;
        mj /= R;
        mi /= R;
        if (mi < 1.0 && R > 1) {
            st.wald_difference = mt - mj / (1.0 - mi);
            const double g[3] = {1.0, -1.0 / (1.0 - mi), -mj / ((1.0 - mi) * (1.0 - mi))};
            double var = 0.0;
            for (std::size_t k = 0; k < totals.size(); ++k) {
                const double d[3] = {totals[k] - mt, firsts[k] - mj, had[k] - mi};
                const double proj = g[0] * d[0] + g[1] * d[1] + g[2] * d[2];
                var += proj * proj;
            }
            st.wald_stderr = std::sqrt(var / (R - 1.0) / R);
        }
    }

    const double q = 1.0 - st.p_loop.value;
    if (loops > 0) st.geometric_fit = geometric_chi_square(st.excursion_counts, q);

    // Return times in Z^(n) on their own streams.
    const Generator zn = build_generator(ProcessKind::Zn, sched, n);
    const JumpTable jt(zn);
    SimConfig run = cfg;
    run.horizon = 0.0;
    auto returns = [&](State from, std::uint64_t family) {
        std::vector<double> out(static_cast<std::size_t>(cfg.replicates), 0.0);
        std::vector<char> ok(out.size(), 0);
        parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
            RandomStream rng(cfg.seed, family + static_cast<std::uint64_t>(r));
            const auto res = walk(jt, from, run, rng, [](State, double, double) {},
                                  [&](State s, double) { return s == from; });
            ok[static_cast<std::size_t>(r)] = res.status == PathStatus::Absorbed && res.final_state == from;
            out[static_cast<std::size_t>(r)] = res.end_time;
        });
        std::vector<double> kept;
        for (std::size_t r = 0; r < out.size(); ++r)
            if (ok[r]) kept.push_back(out[r]);
        return mean_estimate(kept);
    };
    if (sched.lambda(n) > 0.0) {
        st.return_n = returns(n, kReturnFromN);
        st.return_n1 = returns(n + 1, kReturnFromN1);
        // Var of the pooled p_loop via the mean excursion count.
        const Estimate mbar = mean_estimate([&] {
            std::vector<double> ms;
            for (const auto& rp : reps)
                if (rp.finished) ms.push_back(static_cast<double>(rp.m));
            return ms;
        }());
        const double se_p = mbar.stderr_ / ((1.0 + mbar.value) * (1.0 + mbar.value));
        st.return_difference = st.return_n1.value - q * st.return_n.value;
        st.return_stderr = std::sqrt(st.return_n1.stderr_ * st.return_n1.stderr_ +
                                     q * q * st.return_n.stderr_ * st.return_n.stderr_ +
                                     st.return_n.value * st.return_n.value * se_p * se_p);
    }

    // Generalised detailed balance from occupation estimates of Z^(n).
    SimConfig occ = cfg;
    occ.seed = cfg.seed ^ kOccupationSeedMix;
    occ.replicates = std::max<std::int64_t>(16, cfg.replicates / 100);
    if (!(occ.horizon > 0.0)) occ.horizon = 1000.0;
    const DistributionEstimate w = estimate_stationary(zn, occ, n);
    st.w_n = {w.values[0], w.stderr_[0]};
    st.w_n1 = {w.values[1], w.stderr_[1]};
    const double ln = sched.lambda(n), mn1 = sched.mu(n + 1), c = st.c_direct.value;
    st.balance_difference = ln * c * st.w_n.value - mn1 * st.w_n1.value;
    const double var_w = ln * c * ln * c * batch_covariance(w, n, n) +
                         mn1 * mn1 * batch_covariance(w, n + 1, n + 1) -
                         2.0 * ln * c * mn1 * batch_covariance(w, n, n + 1);
    st.balance_stderr = std::sqrt(std::max(0.0, var_w) +
                                  ln * st.w_n.value * ln * st.w_n.value * st.c_direct.stderr_ *
                                      st.c_direct.stderr_);
    return st;
}

// ---------------------------------------------------------------------------

ojson to_json(const Estimate& e) { return {{"value", e.value}, {"stderr", e.stderr_}}; }

ojson to_json(const AbsorptionEstimate& e) {
    ojson j;
    j["value"] = e.b.value;
    j["stderr"] = e.b.stderr_;
    j["replicates"] = e.replicates;
    j["seed"] = e.seed;
    j["absorbed_zero"] = e.absorbed_zero;
    j["absorbed_cemetery"] = e.absorbed_cemetery;
    j["unfinished"] = e.unfinished;
    return j;
}

ojson to_json(const DistributionEstimate& e) {
    ojson j;
    j["lo"] = e.lo;
    j["values"] = e.values;
    j["stderr"] = e.stderr_;
    j["replicates"] = e.replicates;
    j["batches"] = e.batches;
    j["seed"] = e.seed;
    return j;
}

ojson to_json(const ExcursionStats& s) {
    ojson j;
    j["n"] = s.n;
    j["replicates"] = s.replicates;
    j["seed"] = s.seed;
    j["cycles"] = s.cycles;
    j["c_direct"] = to_json(s.c_direct);
    j["c_ratio"] = to_json(s.c_ratio);
    j["p_down"] = to_json(s.p_down);
    j["p_loop"] = to_json(s.p_loop);
    j["p_cat"] = to_json(s.p_cat);
    j["excursion_duration"] = to_json(s.excursion_duration);
    j["total_excursion_time"] = to_json(s.total_excursion_time);
    j["wald"] = {{"difference", s.wald_difference}, {"stderr", s.wald_stderr}};
    j["return_n"] = to_json(s.return_n);
    j["return_n1"] = to_json(s.return_n1);
    j["return_check"] = {{"difference", s.return_difference}, {"stderr", s.return_stderr}};
    j["w_n"] = to_json(s.w_n);
    j["w_n1"] = to_json(s.w_n1);
    j["balance_check"] = {{"difference", s.balance_difference}, {"stderr", s.balance_stderr}};
    j["excursion_counts"] = s.excursion_counts;
    j["geometric_fit"] = {{"applicable", s.geometric_fit.applicable},
                          {"statistic", s.geometric_fit.statistic},
                          {"dof", s.geometric_fit.dof},
                          {"p_value", s.geometric_fit.p_value}};
    j["catastrophes_logged"] = s.catastrophes_logged;
    return j;
}

ojson to_json(const PathRecord& p) {
    ojson j;
    j["status"] = to_string(p.status);
    j["end_time"] = p.end_time;
    ojson jumps = ojson::array();
    for (std::size_t k = 0; k < p.times.size(); ++k)
        jumps.push_back({p.times[k], p.states[k] == kCemetery ? ojson("cemetery") : ojson(p.states[k])});
    j["jumps"] = jumps;
    return j;
}

} // namespace bdk
