#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transq/dist.hpp"
#include "transq/stats.hpp"
#include "transq/validation.hpp"

namespace transq {

#ifndef TRANSQ_VERSION
#define TRANSQ_VERSION "0.0.0"
#endif

inline constexpr const char* kToolVersion = TRANSQ_VERSION;

enum class Experiment { table2, table3, table4, density, paths, validate };

const char* to_string(Experiment e) noexcept;

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t replications = 10000;
    std::vector<std::size_t> n_values;
    ModelPair model{ArrivalModel::exponential(1.0), ServiceModel::exponential(1.0)};
    // Rescale the service law so that f_T(0) E[S] = 1 before simulating.
    bool critical_scaling = true;
    double beta = 1.0;
    // A single q or a list; tables produce one block per value.
    std::vector<double> q_values{1.0};
    int ell = 1;
    std::string outputs = "out";
    unsigned threads = 1;

    // Limit-scale horizon for simulations; 0 picks one from the drift.
    double horizon = 0.0;
    // Diffusion time step.
    double dt = 1e-4;
    // Limit times for `paths`.
    std::vector<double> times{0.5, 1.0, 2.0};
    // Number of grid points for `density`.
    std::size_t grid_points = 200;
    // Fault injection for `validate`.
    std::optional<double> airy_branch_point;
};

ExperimentConfig default_config(Experiment e);
// Missing fields fall back to default_config(e); bad fields throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, Experiment e);
nlohmann::json to_json(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);
// "# transq <version> config_hash=<16 hex digits>"
std::string header_line(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Tables: n^{1-alpha} times the first busy period
// ---------------------------------------------------------------------------

struct TableRow {
    std::optional<std::size_t> n;  // empty for the n = infinity row
    double q = 0.0;
    std::size_t initial_queue = 0;
    std::optional<McSummary> summary;
    double value = 0.0;
    std::optional<double> rel_error;
};

struct TableReport {
    Experiment which = Experiment::table2;
    std::vector<TableRow> rows;
};

// Scaled first busy periods of `replications` independent queues.
std::vector<std::optional<double>> simulate_scaled_busy_periods(const ExperimentConfig& cfg, std::size_t n,
                                                                double q);

// Limit mean for l = 1 from the first-passage analytics; empty for l > 1.
std::optional<double> limit_mean(const ExperimentConfig& cfg, double q);

TableReport run_table(const ExperimentConfig& cfg, Experiment which);
void write_csv(std::ostream& os, const TableReport& report);
nlohmann::json to_json(const TableReport& report);

// ---------------------------------------------------------------------------
// Density: kernel estimate of simulated busy periods vs the analytic density
// ---------------------------------------------------------------------------

struct DensityReport {
    std::vector<double> grid;
    std::vector<double> kde;
    std::vector<double> analytic;
    double bandwidth = 0.0;
    double sup_distance = 0.0;
    double analytic_mass = 0.0;
    McSummary summary;
};

DensityReport run_density(const ExperimentConfig& cfg);
void write_csv(std::ostream& os, const DensityReport& report);
nlohmann::json to_json(const DensityReport& report);

// ---------------------------------------------------------------------------
// Paths: rescaled physical queue vs reflected limit diffusion
// ---------------------------------------------------------------------------

struct PathPoint {
    std::size_t n = 0;
    double t = 0.0;
    double queue_mean = 0.0;
    double queue_var = 0.0;
    double diffusion_mean = 0.0;
    double diffusion_var = 0.0;
    std::size_t replications = 0;

    double gap() const;
    // sqrt((queue_var + diffusion_var) / replications)
    double joint_se() const;
};

struct PathsReport {
    std::vector<PathPoint> points;  // n-major, then t
};

PathsReport run_paths(const ExperimentConfig& cfg);
void write_csv(std::ostream& os, const PathsReport& report);
nlohmann::json to_json(const PathsReport& report);

// ---------------------------------------------------------------------------
// Validate: every invariant suite
// ---------------------------------------------------------------------------

struct ValidateReport {
    std::map<std::string, CheckList> suites;
    bool passed() const;
};

ValidateReport run_validate(const ExperimentConfig& cfg);
nlohmann::json to_json(const ValidateReport& report);

}  // namespace transq
