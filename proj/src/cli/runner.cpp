#include "bdk/cli/runner.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ios>
#include <ostream>

#include "bdk/duality.hpp"
#include "bdk/errors.hpp"
#include "bdk/generator.hpp"
#include "bdk/json_out.hpp"
#include "bdk/montecarlo.hpp"
#include "bdk/popgen.hpp"
#include "bdk/solvers.hpp"

namespace bdk::cli {

namespace {

constexpr const char* kSchema = "bdk-json v1";

std::string num(double x) { return format_double(x); }

std::string row(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out + "\n";
}

std::string state_csv(State s) { return s == kCemetery ? "cemetery" : std::to_string(s); }
ojson state_json(State s) { return s == kCemetery ? ojson("cemetery") : ojson(s); }

ojson header(const RunConfig& cfg) {
    ojson j;
    j["schema"] = kSchema;
    j["command"] = cfg.command;
    if (!cfg.warnings.empty()) j["warnings"] = cfg.warnings;
    return j;
}

ojson schedule_json(const RateSchedule& s) {
    ojson j;
    j["family"] = s.family();
    if (s.is_finite())
        j["extent"] = s.size();
    else
        j["extent"] = {{"infinite", true}, {"truncation", s.extent().n}};
    j["kappa"] = s.kappa();
    return j;
}

// The moran family expands to (k-ASG, pLD-ASG): b is read off the first and
// a off the second.
const RateSchedule& schedule_for_b(const RunConfig& cfg) { return cfg.schedules.front(); }
const RateSchedule& schedule_for_a(const RunConfig& cfg) { return cfg.schedules.back(); }

State level_of(const RunConfig& cfg) {
    if (!cfg.level) throw ValidationError("level", "missing; '" + cfg.command + "' needs a level n");
    return *cfg.level;
}

Generator generator_for(const RunConfig& cfg, const RateSchedule& sched) {
    const ProcessKind kind = parse_process_kind(cfg.process);
    if (kind == ProcessKind::ZnMarked)
        return build_marked_generator(sched, level_of(cfg)).generator();
    if ((kind == ProcessKind::Xn || kind == ProcessKind::Zn || kind == ProcessKind::Zn_cut))
        return build_generator(kind, sched, level_of(cfg));
    return build_generator(kind, sched);
}

ojson generator_json(const Generator& g) {
    ojson j;
    j["label"] = g.label();
    j["lo"] = g.lo();
    j["hi"] = g.hi();
    j["cemetery"] = g.has_cemetery();
    ojson rates = ojson::array();
    for (State s : g.states())
        g.for_each(s, [&](State to, double r) {
            rates.push_back({state_json(s), state_json(to), r});
        });
    j["rates"] = rates;
    return j;
}

std::string generator_csv(const Generator& g, const std::string& table) {
    std::string out = csv_header(table) + "from,to,rate\n";
    for (State s : g.states())
        g.for_each(s, [&](State to, double r) { out += row({state_csv(s), state_csv(to), num(r)}); });
    return out;
}

double tol_or(const RunConfig& cfg, double fallback) { return cfg.identity_tol.value_or(fallback); }

// ---------------------------------------------------------------------------

RunResult solve_b(const RunConfig& cfg) {
    const RateSchedule& s = schedule_for_b(cfg);
    const SolutionVector b = solve_absorption_b(s, cfg.solver);
    if (cfg.format == Format::Csv) return {kOk, to_csv(b)};
    ojson j = header(cfg);
    j["schedule"] = schedule_json(s);
    j["b"] = to_json(b);
    return {kOk, dump_json(j)};
}

RunResult solve_a(const RunConfig& cfg) {
    const RateSchedule& s = schedule_for_a(cfg);
    const SolutionVector a = solve_tail_a(s, cfg.solver);
    if (cfg.format == Format::Csv) {
        std::string out = csv_header("a") + "index,a,w\n";
        for (State i = a.lo; i <= a.hi(); ++i)
            out += row({std::to_string(i), num(a(i)),
                        num(a.point_masses[static_cast<std::size_t>(i - a.lo)])});
        return {kOk, out};
    }
    ojson j = header(cfg);
    j["schedule"] = schedule_json(s);
    j["a"] = to_json(a);
    return {kOk, dump_json(j)};
}

RunResult stationary(const RunConfig& cfg) {
    const Generator g = generator_for(cfg, cfg.schedules.front());
    SolutionVector pi = stationary_distribution(g, cfg.solver);
    pi.meta.label = "stationary";
    if (cfg.format == Format::Csv) return {kOk, to_csv(pi)};
    ojson j = header(cfg);
    j["process"] = cfg.process;
    j["stationary"] = to_json(pi);
    return {kOk, dump_json(j)};
}

RunResult dual(const RunConfig& cfg) {
    const Generator g = generator_for(cfg, cfg.schedules.front());
    const DualResult d = siegmund_dual(g);
    if (cfg.format == Format::Csv) return {kOk, generator_csv(d.dual, "dual")};
    ojson j = header(cfg);
    j["process"] = cfg.process;
    j["dual"] = generator_json(d.dual);
    ojson iso = ojson::array();
    for (State s : d.isolated) iso.push_back(state_json(s));
    j["isolated"] = iso;
    return {kOk, dump_json(j)};
}

RunResult verify(const RunConfig& cfg) {
    const Generator g = generator_for(cfg, cfg.schedules.front());
    const DualResult d = siegmund_dual(g);
    const DualityReport rep = verify_duality(g, d.full, cfg.times, cfg.duality_tol, cfg.verbose);
    const int code = rep.pass ? kOk : kIdentityFailed;
    if (cfg.format == Format::Csv) {
        std::string out = csv_header("duality") + "t,max_discrepancy\n";
        for (std::size_t k = 0; k < rep.times.size(); ++k)
            out += row({num(rep.times[k]), num(rep.max_by_time[k])});
        return {code, out};
    }
    ojson j = header(cfg);
    j["process"] = cfg.process;
    j["report"] = to_json(rep, cfg.verbose);
    return {code, dump_json(j)};
}

RunResult theorem(const RunConfig& cfg) {
    const RateSchedule& s = cfg.schedules.front();
    const TheoremReport rep = check_theorem(s, cfg.solver);
    const double tol = tol_or(cfg, 1e-9);
    std::optional<double> bar;
    std::string bar_note;
    try {
        bar = bar_absorption_check(s, cfg.solver);
    } catch (const HypothesisViolated& e) {
        bar_note = e.what();
    } catch (const ValidationError& e) {
        bar_note = e.what();
    }
    double worst = rep.b_from_a_max_rel;
    if (rep.a_from_b_max_rel) worst = std::max(worst, *rep.a_from_b_max_rel);
    if (bar) worst = std::max(worst, *bar);
    const int code = worst <= tol ? kOk : kIdentityFailed;
    if (cfg.format == Format::Csv) {
        std::string out = csv_header("theorem") + "check,max_rel_err\n";
        out += row({"b_from_a", num(rep.b_from_a_max_rel)});
        if (rep.a_from_b_max_rel) out += row({"a_from_b", num(*rep.a_from_b_max_rel)});
        if (bar) out += row({"bar_ratio", num(*bar)});
        return {code, out};
    }
    ojson j = header(cfg);
    j["schedule"] = schedule_json(s);
    j["report"] = to_json(rep);
    j["bar_ratio_max_rel"] = bar ? ojson(*bar) : ojson(nullptr);
    if (!bar_note.empty()) j["bar_note"] = bar_note;
    j["tol"] = tol;
    j["max_error"] = worst;
    j["pass"] = code == kOk;
    return {code, dump_json(j)};
}

RunResult simulate(const RunConfig& cfg) {
    const RateSchedule& s = cfg.schedules.front();
    const ProcessKind kind = parse_process_kind(cfg.process);
    if (kind == ProcessKind::X) {
        const State init = cfg.init.value_or(1);
        const AbsorptionEstimate e = estimate_absorption(s, init, cfg.sim);
        if (cfg.format == Format::Csv) {
            std::string out = csv_header("absorption") + "init,b,stderr,replicates,seed\n";
            out += row({std::to_string(init), num(e.b.value), num(e.b.stderr_),
                        std::to_string(e.replicates), std::to_string(e.seed)});
            return {kOk, out};
        }
        ojson j = header(cfg);
        j["process"] = cfg.process;
        j["init"] = init;
        j["absorption"] = to_json(e);
        return {kOk, dump_json(j)};
    }
    const Generator g = generator_for(cfg, s);
    SimConfig sim = cfg.sim;
    if (!(sim.horizon > 0.0)) sim.horizon = 1000.0;
    const DistributionEstimate e = estimate_stationary(g, sim, cfg.init);
    if (cfg.format == Format::Csv) {
        std::string out = csv_header("occupation") + "index,value,stderr\n";
        for (std::size_t k = 0; k < e.values.size(); ++k)
            out += row({state_csv(g.state_at(k)), num(e.values[k]), num(e.stderr_[k])});
        return {kOk, out};
    }
    ojson j = header(cfg);
    j["process"] = cfg.process;
    j["horizon"] = sim.horizon;
    j["occupation"] = to_json(e);
    return {kOk, dump_json(j)};
}

RunResult excursions(const RunConfig& cfg) {
    const RateSchedule& s = cfg.schedules.front();
    const ExcursionStats st = excursion_statistics(s, level_of(cfg), cfg.sim);
    if (cfg.format == Format::Csv) {
        std::string out = csv_header("excursions") + "m,count\n";
        for (std::size_t m = 0; m < st.excursion_counts.size(); ++m)
            out += row({std::to_string(m), std::to_string(st.excursion_counts[m])});
        return {kOk, out};
    }
    ojson j = header(cfg);
    j["schedule"] = schedule_json(s);
    j["excursions"] = to_json(st);
    return {kOk, dump_json(j)};
}

RunResult moran(const RunConfig& cfg) {
    const MoranParams& p = *cfg.moran;
    const MoranForward fwd = moran_forward(p);
    const SolutionVector b = solve_absorption_b(kasg_schedule(p), cfg.solver);
    const SolutionVector a = solve_tail_a(pldasg_schedule(p), cfg.solver);
    const State n = p.n;
    const double tol = tol_or(cfg, 1e-9);

    std::optional<FiniteReport> rep;
    std::string note;
    try {
        rep = finite_relations(p);
    } catch (const HypothesisViolated& e) {
        note = e.what();
    } catch (const RangeError& e) {
        note = e.what();
    }
    const int code = rep && rep->max_error() > tol ? kIdentityFailed : kOk;

    if (cfg.format == Format::Csv) {
        std::string out = csv_header("moran") + "i,pi,sampling,b,a,g\n";
        for (State i = 0; i <= n; ++i)
            out += row({std::to_string(i), num(fwd.pi(i)), num(sampling_moments(fwd.pi, i)),
                        num(b(i)), num(a(i)),
                        num(ancestral_type_prob_finite(a, i, cfg.strict_paper))});
        return {code, out};
    }
    ojson j = header(cfg);
    j["params"] = {{"N", p.n}, {"s", p.s}, {"u", p.u}, {"nu0", p.nu0}, {"nu1", p.nu1()}};
    j["strict_paper"] = cfg.strict_paper;
    ojson table = ojson::array();
    for (State i = 0; i <= n; ++i)
        table.push_back({{"i", i},
                         {"pi", fwd.pi(i)},
                         {"sampling", sampling_moments(fwd.pi, i)},
                         {"b", b(i)},
                         {"a", a(i)},
                         {"g", ancestral_type_prob_finite(a, i, cfg.strict_paper)}});
    j["table"] = table;
    j["pi_crosscheck"] = fwd.crosscheck;
    j["report"] = rep ? to_json(*rep) : ojson(nullptr);
    if (!note.empty()) j["report_note"] = note;
    j["tol"] = tol;
    j["pass"] = code == kOk;
    return {code, dump_json(j)};
}

RunResult diffusion(const RunConfig& cfg) {
    const DiffusionParams& p = *cfg.diffusion;
    const DiffusionReport rep = diffusion_relations(p, cfg.imax);
    const double tol = tol_or(cfg, 1e-8);
    const int code = rep.max_error() > tol ? kIdentityFailed : kOk;
    auto y_at = [&](State k) { return static_cast<double>(k) / static_cast<double>(cfg.grid - 1); };

    if (cfg.format == Format::Csv) {
        std::string out = csv_header("diffusion") + "i,beta,alpha\n";
        for (State i = 0; i <= cfg.imax; ++i)
            out += row({std::to_string(i), num(rep.beta(i)), num(rep.alpha.at_or_zero(i))});
        out += "\n" + csv_header("gamma") + "y,gamma\n";
        for (State k = 0; k < cfg.grid; ++k)
            out += row({num(y_at(k)),
                        num(ancestral_type_prob_diffusion(rep.alpha, y_at(k), cfg.strict_paper))});
        return {code, out};
    }
    ojson j = header(cfg);
    j["strict_paper"] = cfg.strict_paper;
    ojson table = ojson::array();
    for (State i = 0; i <= cfg.imax; ++i)
        table.push_back({{"i", i}, {"beta", rep.beta(i)}, {"alpha", rep.alpha.at_or_zero(i)}});
    j["table"] = table;
    ojson grid = ojson::array();
    for (State k = 0; k < cfg.grid; ++k)
        grid.push_back({{"y", y_at(k)},
                        {"gamma", ancestral_type_prob_diffusion(rep.alpha, y_at(k), cfg.strict_paper)}});
    j["gamma"] = grid;
    j["alpha_truncation"] = rep.alpha.meta.truncation;
    j["report"] = to_json(rep);
    j["tol"] = tol;
    j["pass"] = code == kOk;
    return {code, dump_json(j)};
}

} // namespace

RunResult execute(const RunConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "solve-b") return solve_b(cfg);
    if (c == "solve-a") return solve_a(cfg);
    if (c == "stationary") return stationary(cfg);
    if (c == "dual") return dual(cfg);
    if (c == "verify-duality") return verify(cfg);
    if (c == "verify-theorem") return theorem(cfg);
    if (c == "simulate") return simulate(cfg);
    if (c == "excursions") return excursions(cfg);
    if (c == "moran") return moran(cfg);
    if (c == "diffusion") return diffusion(cfg);
    throw ValidationError("command", "unknown command '" + c + "'");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const QuadratureNoConvergence*>(&e) ||
        dynamic_cast<const SingularSystem*>(&e) || dynamic_cast<const NotIrreducible*>(&e) ||
        dynamic_cast<const DegenerateDenominator*>(&e))
        return kNoConvergence;
    return kInputError;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
    RunResult res;
    try {
        res = execute(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    if (cfg.out) {
        std::ofstream f(*cfg.out, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << *cfg.out << " for writing\n";
            return kInputError;
        }
        f << res.text;
        if (!f) {
            err << "error: write to " << *cfg.out << " failed\n";
            return kInputError;
        }
    } else {
        out << res.text;
    }
    if (res.code == kIdentityFailed) err << "error: identity check exceeded its tolerance\n";
    return res.code;
}

} // namespace bdk::cli
