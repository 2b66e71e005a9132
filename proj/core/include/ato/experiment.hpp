#pragma once

#include "ato/demand.hpp"
#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/metrics.hpp"
#include "ato/simulate.hpp"
#include "ato/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ato {

/// One policy request from a config file.
struct PolicySpec {
    std::string kind; // FOSVA, TS, TS_noS, MP_n, MS3, MS3_n, SS, DET
    int tail = 0;
    double alpha = 0.0;
};

/// Full experiment description: instance, demand, the (years, gamma) grid,
/// policies, and engine settings. Parsed from a single JSON file.
struct ExperimentConfig {
    InstanceConfig instance_config;
    std::optional<std::string> instance_path; // load instead of generating
    std::string correlation = "family";       // "independent" or "family"
    std::vector<int> years_list{10};
    std::vector<double> gammas{1.3};
    std::vector<PolicySpec> policies;
    FosvaConfig fosva;                        // inventory_cap empty -> derived default
    std::optional<std::string> fosva_path;    // pre-trained value approximation to load
    SolverConfig solver;
    SimulationConfig simulation;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    int threads = 0; // 0 -> hardware concurrency

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct ExperimentResult {
    std::vector<RecordSummary> records;
    MetricsReport metrics;
};

/// Runs the whole grid: per (years, gamma) it derives capacities, trains
/// FOSVA when requested, simulates every policy over shared out-of-sample
/// paths, and benchmarks against perfect information. Writes periods.csv,
/// records.csv, metrics.csv, the wide per-metric tables, and manifest.json
/// into cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Rebuilds metrics.csv and the wide tables from an existing records.csv.
MetricsReport run_report(const std::string& records_csv_path, const std::string& output_dir);

/// records.csv round-trip used by run_experiment and run_report.
std::string records_to_csv(const std::vector<RecordSummary>& records);
std::vector<RecordSummary> records_from_csv(const std::string& text);

Policy policy_from_spec(const PolicySpec& spec);

} // namespace ato
