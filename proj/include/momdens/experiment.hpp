#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momdens/maxent.hpp"
#include "momdens/sampling.hpp"
#include "momdens/serialization.hpp"

namespace momdens {

// One experiment: a benchmark case (or a custom mixture), Monte Carlo
// repetitions, the estimators to run, and output locations. A config plus a
// seed determines every output byte.
struct ExperimentConfig {
    int example_id = 1;
    std::optional<BenchmarkCase> custom;   // takes precedence over example_id
    int mc_runs = -1;                      // -1: use the case default
    std::optional<int> sample_count;       // override per-run m
    std::vector<int> sample_counts = {50, 100, 200, 400};  // sweep mode
    std::uint64_t seed = 42;
    GridOptions grid;
    double metrics_half_width_sigmas = 8.0;  // metrics grid, in truth-sigma units
    std::vector<std::string> estimators = {"dpmsh", "dpmkl", "kde", "gmm"};
    std::string output_dir = "out";
    int workers = 1;
    int eval_points = 1000;
    int gmm_components = 2;
};

Json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
std::string config_hash(const ExperimentConfig& config);

BenchmarkCase resolve_case(const ExperimentConfig& config);

struct EstimatorStats {
    std::string name;
    std::vector<double> tv;           // per successful run
    std::vector<double> kl;
    std::vector<double> mean_curve;   // average density over runs, on xs
    double tv_mean = 0.0, tv_std = 0.0;
    double kl_mean = 0.0, kl_std = 0.0;
    double moment_residual_max = 0.0;  // 0 for kde/gmm
    int runs_succeeded = 0;
    std::vector<std::string> failures;
};

struct ExperimentReport {
    BenchmarkCase bench;
    int sample_count = 0;
    int mc_runs = 0;
    std::uint64_t seed = 0;
    std::string hash;
    std::vector<double> xs;           // evaluation abscissae
    std::vector<double> truth_curve;
    std::vector<EstimatorStats> estimators;
    BoundReport bound;                // from population moments
    double bound_measured_tv = 0.0;
    bool bound_ok = false;
    std::string bound_error;
    bool partial = false;
};

ExperimentReport run_example(const ExperimentConfig& config);

// Writes mean_curves.csv, metrics.csv, bound.json, overlay.svg and
// report.json into config.output_dir.
void write_example_report(const ExperimentReport& report,
                          const std::string& dir);

struct SweepRow {
    std::string estimator;
    int sample_count = 0;
    double tv_mean = 0.0, tv_std = 0.0;
    double kl_mean = 0.0, kl_std = 0.0;
    int runs_succeeded = 0;
};

struct SweepReport {
    BenchmarkCase bench;
    std::vector<int> sample_counts;
    int mc_runs = 0;
    std::uint64_t seed = 0;
    std::string hash;
    std::vector<SweepRow> rows;  // grouped by estimator, then by m
    bool partial = false;
};

SweepReport run_sweep(const ExperimentConfig& config);

// Writes sweep_metrics.csv, tv_vs_m.svg, kl_vs_m.svg and report.json.
void write_sweep_report(const SweepReport& report, const std::string& dir);

// Error-bound report against the known truth of a benchmark case, using
// population moments (order_override < 0 keeps the case order). The returned
// JSON includes the measured sup-CDF distance.
Json example_bound_json(const ExperimentConfig& config, int order_override);

// Chart builders shared by the writers and the tests: both are pure
// functions of table data that also lands in the CSVs.
std::string render_overlay_svg(const std::vector<double>& xs,
                               const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& curves);
std::string render_metric_svg(const std::string& metric,
                              const std::vector<SweepRow>& rows);

// Estimator line colors (truth is black).
std::string estimator_color(const std::string& name);

}  // namespace momdens
