// Command-line front end: tables, density, paths, validate, airy-dump.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "transq/airy.hpp"
#include "transq/csv.hpp"
#include "transq/errors.hpp"
#include "transq/experiments.hpp"

namespace fs = std::filesystem;
using namespace transq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "JSON experiment config");
    sub->add_option("--seed", f.seed, "master seed (overrides config)");
    sub->add_option("--reps", f.reps, "replications (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "output directory (overrides config)");
    sub->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

ExperimentConfig load(const CommonFlags& f, Experiment e) {
    nlohmann::json j = nlohmann::json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw ConfigError(f.config, "cannot open config file");
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& err) {
            throw ConfigError(f.config, err.what());
        }
    }
    if (f.seed) j["seed"] = *f.seed;
    if (f.reps) j["replications"] = *f.reps;
    if (f.out) j["outputs"] = *f.out;
    if (f.threads) j["threads"] = *f.threads;
    return config_from_json(j, e);
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.outputs);
    const auto path = fs::path(cfg.outputs) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    std::cerr << "wrote " << path.string() << '\n';
    return os;
}

template <class Report>
void write_outputs(const ExperimentConfig& cfg, const std::string& stem, const Report& report) {
    {
        auto os = open_output(cfg, stem + ".csv");
        os << header_line(cfg) << '\n';
        write_csv(os, report);
    }
    {
        auto os = open_output(cfg, stem + ".json");
        const std::string header = header_line(cfg);
        nlohmann::json j = to_json(report);
        j["meta"] = {{"header", header}, {"tool_version", kToolVersion}, {"config", to_json(cfg)}};
        os << j.dump(2) << '\n';
    }
}

int run(Experiment e, const CommonFlags& f) {
    const auto cfg = load(f, e);
    switch (e) {
        case Experiment::table2:
        case Experiment::table3:
        case Experiment::table4: {
            const auto report = run_table(cfg, e);
            write_outputs(cfg, to_string(e), report);
            write_csv(std::cout, report);
            return kExitOk;
        }
        case Experiment::density: {
            const auto report = run_density(cfg);
            write_outputs(cfg, "density", report);
            std::cout << to_json(report).dump(2) << '\n';
            return kExitOk;
        }
        case Experiment::paths: {
            const auto report = run_paths(cfg);
            write_outputs(cfg, "paths", report);
            write_csv(std::cout, report);
            return kExitOk;
        }
        case Experiment::validate: {
            const auto report = run_validate(cfg);
            auto os = open_output(cfg, "validate.json");
            nlohmann::json j = to_json(report);
            j["meta"] = {{"header", header_line(cfg)}, {"tool_version", kToolVersion}, {"config", to_json(cfg)}};
            os << j.dump(2) << '\n';
            for (const auto& [suite, checks] : report.suites) {
                for (const auto& c : checks) {
                    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
                    if (!c.detail.empty()) std::cout << "  " << c.detail;
                    std::cout << '\n';
                }
            }
            return report.passed() ? kExitOk : kExitValidation;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transitory queue simulations and first-passage analytics"};
    app.set_version_flag("--version", std::string("transq ") + kToolVersion);
    app.require_subcommand(1);

    const std::pair<const char*, Experiment> experiments[] = {
        {"table2", Experiment::table2},   {"table3", Experiment::table3}, {"table4", Experiment::table4},
        {"density", Experiment::density}, {"paths", Experiment::paths},   {"validate", Experiment::validate}};
    const char* help[] = {"mean busy period, exponential clocks",
                          "mean busy period, hyperexponential clocks",
                          "mean busy period, half-normal clocks (n^{1/5} scaling)",
                          "kernel density of busy periods vs the analytic density",
                          "rescaled queue paths vs the reflected diffusion",
                          "run every invariant suite"};
    CommonFlags flags;
    std::optional<Experiment> chosen;
    for (std::size_t i = 0; i < std::size(experiments); ++i) {
        auto* sub = app.add_subcommand(experiments[i].first, help[i]);
        add_common(sub, flags);
        sub->callback([&, e = experiments[i].second] { chosen = e; });
    }

    double x_min = -8.0, x_max = 8.0;
    std::size_t points = 321;
    std::optional<double> branch;
    std::string dump_out;
    auto* dump = app.add_subcommand("airy-dump", "CSV of x, Ai, Bi, Ai', Bi' on a uniform grid");
    dump->add_option("--from", x_min, "first x");
    dump->add_option("--to", x_max, "last x");
    dump->add_option("--points", points, "grid size")->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
    dump->add_option("--branch-point", branch, "series/asymptotic switch");
    dump->add_option("--out", dump_out, "file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version come through here with exit code 0.
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (chosen) return run(*chosen, flags);

        AiryOptions opts;
        if (branch) opts.branch_point = *branch;
        std::ofstream file;
        if (!dump_out.empty()) {
            file.open(dump_out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot write " + dump_out);
        }
        std::ostream& os = dump_out.empty() ? std::cout : file;
        os << "x,Ai,Bi,Ai',Bi'\n";
        for (std::size_t i = 0; i < points; ++i) {
            const double x = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(points - 1);
            const auto a = airy(x, opts);
            os << fmt(x) << ',' << fmt(a.ai) << ',' << fmt(a.bi) << ',' << fmt(a.ai_prime) << ',' << fmt(a.bi_prime)
               << '\n';
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
