#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmimo/config.hpp"
#include "dmimo/estimation.hpp"
#include "dmimo/harness/table.hpp"
#include "dmimo/optimizer/alternating.hpp"
#include "dmimo/rate.hpp"

namespace dmimo::harness {

enum class Experiment { nmse_sweep, bound_validate, schedule_compare, convergence, benchmark };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
std::vector<std::string> experiment_names();

struct ExperimentSpec {
    Experiment experiment = Experiment::nmse_sweep;
    SystemConfig config;
    std::filesystem::path config_path;  // echoed into the manifest; may be empty
    std::uint64_t seed = 1;
    std::size_t trials = 0;             // 0 selects the experiment's default
    std::vector<double> grid;           // empty selects the experiment's default
    bool paper_scale = false;           // 10x10 array instead of the config's
    std::filesystem::path out_dir = ".";

    /// Throws ConfigError on a non-increasing grid or an invalid config.
    void validate() const;
    std::size_t trials_or(std::size_t fallback) const { return trials ? trials : fallback; }
};

// Typed drivers; the CLI and the acceptance suite both build on these.

struct Instance {
    Scenario scenario;
    EstimationTable table;
    ChannelEstimate estimate;
};

/// Scenario, its estimation statistics and one channel estimate, all drawn from `seed`.
Instance draw_instance(const SystemConfig& config, std::uint64_t seed);

struct NmsePoint {
    double rician = 0.0;
    double mse = 0.0;   // closed form, averaged over every link
    double nmse = 0.0;
    McEstimate mse_mc;
    McEstimate nmse_mc;
};

/// K-bar sweep of the estimation error; every link of the scenario is averaged.
std::vector<NmsePoint> nmse_sweep(const SystemConfig& config, const std::vector<double>& grid, std::size_t trials,
                                  std::uint64_t seed);

struct BoundPoint {
    double rician = 0.0;
    std::vector<double> rate_lb;            // per user, bit/s
    std::vector<McEstimate> ergodic;        // per user
    std::vector<double> bound_form;         // per user, from the Monte Carlo moments
    double sum_lb = 0.0;
    McEstimate sum_ergodic;
    double sum_bound_form = 0.0;
};

/// K = 5, tau = 3, |M_k| = 2, one band.
SystemConfig bound_setup(SystemConfig base);

/// Serving weights drawn uniformly in (0, 1] and normalized per user.
Eigen::MatrixXd random_weights(const Scenario& scenario, std::uint64_t seed);

/// All users share the full band at full power with random weights.
std::vector<BoundPoint> bound_validation(const SystemConfig& config, const std::vector<double>& grid,
                                         std::size_t trials, std::uint64_t seed);

struct ScheduleComparison {
    int users = 0;
    double algorithm1 = 0.0;
    double exhaustive = 0.0;
    double all_share = 0.0;
    bool algorithm1_feasible = false;
    std::string violation;  // validator message for the Algorithm 1 groups, empty when valid
    long partitions = 0;
    double seconds_algorithm1 = 0.0;
    double seconds_exhaustive = 0.0;
};

/// One drawn instance compared across the three arms. K <= 10.
ScheduleComparison compare_schedules(const SystemConfig& config, std::uint64_t seed);

/// Scheduling setup with I sub-bands, tau = K - 1 and the given capacity.
SystemConfig schedule_setup(SystemConfig base, int users, int subbands, int capacity);

struct ConvergenceRun {
    int antennas = 0;
    AlternatingResult result;
};

ConvergenceRun convergence_run(const SystemConfig& config, std::uint64_t seed);

/// K = 8, M = 4, |M_k| = 3, I = 4, tau = 6 with an antennas_x by antennas_y array.
SystemConfig convergence_setup(SystemConfig base, int antennas_x, int antennas_y);

struct BenchmarkSample {
    double proposed = 0.0;
    double equal_weights = 0.0;
    double estimate_weights = 0.0;
    bool proposed_meets = false;
};

/// The alternating loop and both fixed-weight benchmarks on one drawn instance.
BenchmarkSample benchmark_instance(const SystemConfig& config, std::uint64_t seed);

/// I = 4, tau = K - 2, P^max = 0.2 W, |M_k| = 3.
SystemConfig benchmark_setup(SystemConfig base, int users);

/// Seed of instance `index` within a run.
std::uint64_t instance_seed(std::uint64_t run_seed, std::uint64_t index);

struct ExperimentOutput {
    std::vector<Table> tables;  // tables[0] is <name>.csv
    std::vector<Plot> plots;
    nlohmann::json summary;
};

ExperimentOutput run_nmse_sweep(const ExperimentSpec& spec);
ExperimentOutput run_bound_validation(const ExperimentSpec& spec);
ExperimentOutput run_schedule_compare(const ExperimentSpec& spec);
ExperimentOutput run_convergence(const ExperimentSpec& spec);
ExperimentOutput run_benchmark(const ExperimentSpec& spec);

ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Writes every table, the plot script and run-manifest.json into spec.out_dir; returns the file names.
std::vector<std::string> write_outputs(const ExperimentSpec& spec, const ExperimentOutput& output);

}  // namespace dmimo::harness
