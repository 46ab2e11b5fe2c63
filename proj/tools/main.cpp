#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bdk/cli/config.hpp"
#include "bdk/cli/runner.hpp"
#include "bdk/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birth-death processes with killing and catastrophes"};
    app.require_subcommand(1, 1);

    std::string config_path, out_path, format;
    std::uint64_t seed = 0;
    std::int64_t replicates = 0, trunc = 0;
    double tol = 0.0;
    bool strict_paper = false, lenient = false;

    for (const auto& name : bdk::cli::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "v1 config document")->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "simulation seed");
        sub->add_option("--replicates", replicates, "simulation replicates")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--trunc", trunc, "initial truncation")->check(CLI::PositiveNumber);
        sub->add_flag("--strict-paper", strict_paper, "printed index ranges in g_N and gamma");
        sub->add_flag("--lenient", lenient, "warn on unknown config keys instead of failing");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bdk::cli::kInputError;
    }
    const CLI::App* sub = app.get_subcommands().front();

    bdk::cli::RunConfig cfg;
    try {
        bdk::cli::ParseOptions po;
        po.lenient = lenient;
        po.command = sub->get_name();
        cfg = bdk::cli::parse_config(read_file(config_path), po);
        // Flags win over the config.
        if (sub->count("--out")) cfg.out = out_path;
        if (sub->count("--format")) cfg.format = bdk::cli::parse_format(format);
        if (sub->count("--seed")) cfg.sim.seed = seed;
        if (sub->count("--replicates")) cfg.sim.replicates = replicates;
        if (sub->count("--tol")) cfg.solver.tol = tol;
        if (sub->count("--trunc")) cfg.solver.initial_truncation = trunc;
        if (strict_paper) cfg.strict_paper = true;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bdk::cli::kInputError;
    }
    return bdk::cli::run(cfg, std::cout, std::cerr);
}
