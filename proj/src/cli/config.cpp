#include "bdk/cli/config.hpp"

#include <algorithm>
#include <set>

#include "bdk/errors.hpp"

namespace bdk::cli {

using nlohmann::json;

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{
        "solve-b",  "solve-a",   "stationary", "dual",  "verify-duality",
        "verify-theorem", "simulate", "excursions", "moran", "diffusion"};
    return names;
}

Format parse_format(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    throw ValidationError("output.format", "expected csv or json, got '" + name + "'");
}

namespace {

enum class Needs { Schedule, Moran, Diffusion };

Needs needs(const std::string& command) {
    if (command == "moran") return Needs::Moran;
    if (command == "diffusion") return Needs::Diffusion;
    return Needs::Schedule;
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader {
  public:
    Reader(bool lenient, std::vector<std::string>& warnings)
        : lenient_(lenient), warnings_(warnings) {}

    void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
        if (!obj.is_object())
            throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (allowed.count(it.key())) continue;
            const std::string where = path.empty() ? it.key() : path + "." + it.key();
            if (!lenient_) throw ValidationError(where, "unknown key");
            warnings_.push_back("unknown key '" + where + "' ignored");
        }
    }

  private:
    bool lenient_;
    std::vector<std::string>& warnings_;
};

std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

double get_number(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ValidationError(join(path, key), "expected an integer");
    return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_string()) throw ValidationError(join(path, key), "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ValidationError(join(path, key), "expected true or false");
    return v.get<bool>();
}

double require_number(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ValidationError(join(path, key), "missing");
    return get_number(obj, key, path);
}

double nu0_of(const json& obj, const std::string& path) {
    const bool h0 = obj.contains("nu0"), h1 = obj.contains("nu1");
    if (!h0 && !h1) throw ValidationError(join(path, "nu0"), "missing (give nu0 or nu1)");
    const double nu0 = h0 ? get_number(obj, "nu0", path) : 1.0 - get_number(obj, "nu1", path);
    if (h0 && h1 && std::abs(nu0 + get_number(obj, "nu1", path) - 1.0) > 1e-12)
        throw ValidationError(join(path, "nu1"), "nu0 + nu1 must equal 1");
    return nu0;
}

// Re-prefixes library validation paths with the config block they came from.
template <class F>
auto within(const std::string& block, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(block + "." + e.where(),
                              std::string(e.what()).substr(e.where().size() + 2));
    } catch (const SpecError& e) {
        throw ValidationError(block, e.what());
    }
}

void read_schedule(const json& desc, Reader& r, RunConfig& cfg) {
    r.check_keys(desc, "schedule", {"extent", "kappa", "lambda", "mu", "family"});
    const bool popgen_family = [&] {
        if (!desc.contains("family")) return false;
        const json& f = desc.at("family");
        const std::string name = f.is_string() ? f.get<std::string>()
                                 : f.is_object() && f.contains("name") && f.at("name").is_string()
                                     ? f.at("name").get<std::string>()
                                     : std::string();
        return name.rfind("moran", 0) == 0 || name.rfind("diffusion", 0) == 0;
    }();
    if (desc.contains("family") && desc.at("family").is_object())
        r.check_keys(desc.at("family"), "schedule.family", {"name", "params"});
    if (!popgen_family && !desc.contains("kappa"))
        throw ValidationError("schedule.kappa", "missing");
    cfg.schedule_text = desc;
    cfg.schedules = within("schedule", [&] { return make_schedules(desc); });
}

MoranParams read_moran(const json& obj, Reader& r) {
    r.check_keys(obj, "moran", {"N", "s", "u", "nu0", "nu1"});
    MoranParams p;
    if (!obj.contains("N")) throw ValidationError("moran.N", "missing");
    p.n = get_integer(obj, "N", "moran");
    p.s = require_number(obj, "s", "moran");
    p.u = require_number(obj, "u", "moran");
    p.nu0 = nu0_of(obj, "moran");
    within("moran", [&] {
        validate(p);
        return 0;
    });
    return p;
}

DiffusionParams read_diffusion(const json& obj, Reader& r) {
    r.check_keys(obj, "diffusion", {"sigma", "theta", "nu0", "nu1"});
    DiffusionParams p;
    p.sigma = require_number(obj, "sigma", "diffusion");
    p.theta = require_number(obj, "theta", "diffusion");
    p.nu0 = nu0_of(obj, "diffusion");
    within("diffusion", [&] {
        validate(p);
        return 0;
    });
    return p;
}

void read_solver(const json& obj, Reader& r, SolverOptions& s) {
    r.check_keys(obj, "solver", {"tol", "max_states", "truncation"});
    if (obj.contains("tol")) s.tol = get_number(obj, "tol", "solver");
    if (obj.contains("max_states")) s.max_states = get_integer(obj, "max_states", "solver");
    if (obj.contains("truncation"))
        s.initial_truncation = get_integer(obj, "truncation", "solver");
    if (!(s.tol > 0.0)) throw ValidationError("solver.tol", "must be positive");
    if (s.initial_truncation < 1) throw ValidationError("solver.truncation", "must be positive");
    if (s.max_states < 2) throw ValidationError("solver.max_states", "must be at least 2");
}

void read_simulation(const json& obj, Reader& r, RunConfig& cfg) {
    const std::string p = "simulation";
    r.check_keys(obj, p,
                 {"seed", "replicates", "max_events", "burn_in", "horizon", "threads", "init"});
    SimConfig& s = cfg.sim;
    if (obj.contains("seed")) {
        const json& v = obj.at("seed");
        if (!v.is_number_unsigned())
            throw ValidationError("simulation.seed", "expected a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    if (obj.contains("replicates")) s.replicates = get_integer(obj, "replicates", p);
    if (obj.contains("max_events")) s.max_events = get_integer(obj, "max_events", p);
    if (obj.contains("burn_in")) s.burn_in = get_number(obj, "burn_in", p);
    if (obj.contains("horizon")) s.horizon = get_number(obj, "horizon", p);
    if (obj.contains("threads")) {
        const auto t = get_integer(obj, "threads", p);
        if (t < 0) throw ValidationError("simulation.threads", "must be non-negative");
        s.threads = static_cast<unsigned>(t);
    }
    if (obj.contains("init")) cfg.init = get_integer(obj, "init", p);
}

void read_checks(const json& obj, Reader& r, RunConfig& cfg) {
    r.check_keys(obj, "checks", {"times", "duality_tol", "identity_tol", "verbose"});
    if (obj.contains("times")) {
        const json& t = obj.at("times");
        if (!t.is_array() || t.empty())
            throw ValidationError("checks.times", "expected a non-empty array of times");
        cfg.times.clear();
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!t[k].is_number() || !(t[k].get<double>() >= 0.0))
                throw ValidationError("checks.times[" + std::to_string(k) + "]",
                                      "expected a non-negative number");
            cfg.times.push_back(t[k].get<double>());
        }
    }
    if (obj.contains("duality_tol")) cfg.duality_tol = get_number(obj, "duality_tol", "checks");
    if (obj.contains("identity_tol")) cfg.identity_tol = get_number(obj, "identity_tol", "checks");
    if (obj.contains("verbose")) cfg.verbose = get_bool(obj, "verbose", "checks");
    if (!(cfg.duality_tol > 0.0)) throw ValidationError("checks.duality_tol", "must be positive");
    if (cfg.identity_tol && !(*cfg.identity_tol > 0.0))
        throw ValidationError("checks.identity_tol", "must be positive");
}

void read_popgen(const json& obj, Reader& r, RunConfig& cfg) {
    r.check_keys(obj, "popgen", {"imax", "grid", "strict_paper"});
    if (obj.contains("imax")) cfg.imax = get_integer(obj, "imax", "popgen");
    if (obj.contains("grid")) cfg.grid = get_integer(obj, "grid", "popgen");
    if (obj.contains("strict_paper")) cfg.strict_paper = get_bool(obj, "strict_paper", "popgen");
    if (cfg.imax < 2) throw ValidationError("popgen.imax", "must be at least 2");
    if (cfg.grid < 2) throw ValidationError("popgen.grid", "must be at least 2");
}

void read_output(const json& obj, Reader& r, RunConfig& cfg) {
    r.check_keys(obj, "output", {"format", "path"});
    if (obj.contains("format")) cfg.format = parse_format(get_string(obj, "format", "output"));
    if (obj.contains("path")) cfg.out = get_string(obj, "path", "output");
}

} // namespace

RunConfig parse_config(const std::string& text, const ParseOptions& opts) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        std::string what = e.what();
        // Drop nlohmann's "[json.exception.parse_error.101] parse error at line..: " prefix.
        if (const auto colon = what.rfind(": "); colon != std::string::npos)
            what = what.substr(colon + 2);
        throw ParseError(line, col, what);
    }

    RunConfig cfg;
    Reader r(opts.lenient, cfg.warnings);
    r.check_keys(doc, "",
                 {"version", "command", "schedule", "moran", "diffusion", "solver", "simulation",
                  "process", "level", "checks", "popgen", "output"});

    if (doc.contains("version") &&
        (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != 1))
        throw ValidationError("version", "only schema version 1 is supported");

    if (opts.command) {
        cfg.command = *opts.command;
    } else if (doc.contains("command")) {
        cfg.command = get_string(doc, "command", "");
    } else {
        throw ValidationError("command", "missing");
    }
    const auto& names = commands();
    if (std::find(names.begin(), names.end(), cfg.command) == names.end())
        throw ValidationError("command", "unknown command '" + cfg.command + "'");

    const Needs need = needs(cfg.command);
    const bool hs = doc.contains("schedule"), hm = doc.contains("moran"),
               hd = doc.contains("diffusion");
    if (static_cast<int>(hs) + static_cast<int>(hm) + static_cast<int>(hd) > 1)
        throw ValidationError("schedule", "give exactly one of schedule, moran, diffusion");
    switch (need) {
    case Needs::Schedule:
        if (!hs) throw ValidationError("schedule", "missing; '" + cfg.command + "' needs a schedule");
        read_schedule(doc.at("schedule"), r, cfg);
        break;
    case Needs::Moran:
        if (!hm) throw ValidationError("moran", "missing; 'moran' needs Moran parameters");
        cfg.moran = read_moran(doc.at("moran"), r);
        break;
    case Needs::Diffusion:
        if (!hd) throw ValidationError("diffusion", "missing; 'diffusion' needs diffusion parameters");
        cfg.diffusion = read_diffusion(doc.at("diffusion"), r);
        break;
    }

    if (doc.contains("solver")) read_solver(doc.at("solver"), r, cfg.solver);
    if (doc.contains("simulation")) read_simulation(doc.at("simulation"), r, cfg);
    if (doc.contains("process")) {
        cfg.process = get_string(doc, "process", "");
        parse_process_kind(cfg.process);
    }
    if (doc.contains("level")) cfg.level = get_integer(doc, "level", "");
    if (doc.contains("checks")) read_checks(doc.at("checks"), r, cfg);
    if (doc.contains("popgen")) read_popgen(doc.at("popgen"), r, cfg);
    if (doc.contains("output")) read_output(doc.at("output"), r, cfg);
    return cfg;
}

} // namespace bdk::cli
