// momdens: moment-matched density estimation on the real line.
//
// Subcommands:
//   fit      estimate a density from a sample file
//   example  run one of the built-in benchmark experiments end to end
//   sweep    benchmark metrics over a range of sample counts
//   bound    entropy-based sup-CDF error bound report
//
// Exit codes: 0 success, 2 input error, 3 degenerate moments, 4 solver
// non-convergence, 5 partial experiment.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "momdens/baselines.hpp"
#include "momdens/experiment.hpp"
#include "momdens/hellinger.hpp"
#include "momdens/maxent.hpp"
#include "momdens/metrics.hpp"
#include "momdens/serialization.hpp"

namespace {

using namespace momdens;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitSolver = 4;
constexpr int kExitPartial = 5;

struct GridFlags {
    double half_width_sigmas = 12.0;
    int panels = 40;
    int nodes_per_panel = 16;

    void attach(CLI::App* cmd) {
        cmd->add_option("--half-width-sigmas", half_width_sigmas,
                        "solver grid half-width in units of the prior sigma");
        cmd->add_option("--panels", panels, "quadrature panels");
        cmd->add_option("--nodes-per-panel", nodes_per_panel,
                        "Gauss nodes per panel");
    }

    GridOptions options() const {
        return GridOptions{half_width_sigmas, panels, nodes_per_panel};
    }
};

int run_fit(const std::string& samples_path, int order, const std::string& out,
            bool no_standardize, double inflation, double prior_mean,
            double prior_std, bool prior_set, const GridFlags& grid,
            int max_iter, double tol_grad, double tol_mom) {
    const std::vector<double> samples = read_samples(samples_path);

    FitOptions opts;
    opts.standardize = !no_standardize;
    opts.prior_inflation = inflation;
    if (prior_set)
        opts.prior = GaussianPrior{prior_mean, prior_std};
    opts.grid = grid.options();
    opts.solver.max_iter = max_iter;
    opts.solver.tol_grad = tol_grad;
    opts.solver.tol_mom = tol_mom;

    const DensityEstimate estimate = fit_dpmsh(samples, order, opts);
    write_text_file(out + ".json", to_json(estimate).dump(2) + "\n");

    // Evaluation table on 1000 points over prior mean +- 10 sigma (in raw
    // coordinates).
    const GaussianPrior prior_raw{
        estimate.prior.mean * estimate.standardization.scale +
            estimate.standardization.shift,
        estimate.prior.std_dev * estimate.standardization.scale};
    std::ostringstream csv;
    csv << "x,density\n";
    const int points = 1000;
    const double lo = prior_raw.mean - 10.0 * prior_raw.std_dev;
    const double hi = prior_raw.mean + 10.0 * prior_raw.std_dev;
    for (int i = 0; i < points; ++i) {
        const double x =
            lo + (hi - lo) * static_cast<double>(i) / (points - 1);
        csv << format_double(x) << "," << format_double(eval_density(estimate, x))
            << "\n";
    }
    write_text_file(out + ".csv", csv.str());

    std::cout << "estimate written to " << out << ".json / " << out
              << ".csv (iterations " << estimate.diagnostics.iterations
              << ", gradient norm "
              << format_double(estimate.diagnostics.final_gradient_norm)
              << ")\n";
    return kExitOk;
}

ExperimentConfig load_config(const std::string& config_path) {
    if (config_path.empty())
        return ExperimentConfig{};
    return config_from_json(Json::parse(read_text_file(config_path)));
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

int run_bound(const ExperimentConfig& config, const std::string& samples_path,
              int order, bool population, const std::string& entropy_mode,
              const std::string& out_path, double inflation, double prior_mean,
              double prior_std, bool prior_set) {
    Json result;
    if (samples_path.empty() && population) {
        result = example_bound_json(config, order);
    } else if (!samples_path.empty()) {
        const std::vector<double> samples = read_samples(samples_path);
        if (order <= 0)
            throw InvalidInput("--order is required with --samples");
        const MomentSequence raw = compute_sample_moments(samples, order);

        FitOptions opts;
        opts.prior_inflation = inflation;
        if (prior_set)
            opts.prior = GaussianPrior{prior_mean, prior_std};
        opts.grid = config.grid;
        const DensityEstimate estimate = fit_dpmsh(samples, order, opts);

        const GaussianPrior prior_raw{
            estimate.prior.mean * estimate.standardization.scale +
                estimate.standardization.shift,
            estimate.prior.std_dev * estimate.standardization.scale};
        const QuadratureGrid grid = grid_for_prior(prior_raw, config.grid);

        const double h_plugin = entropy_mode == "empirical"
                                    ? empirical_entropy(samples)
                                    : histogram_entropy(samples);
        result =
            to_json(error_bound_report_plugin(estimate, h_plugin, raw, grid));
        result["entropy_mode"] = entropy_mode;
        result["order"] = order;
    } else {
        throw InvalidInput("bound needs --samples or --population");
    }
    write_text_file(out_path, result.dump(2) + "\n");
    std::cout << "bound report written to " << out_path << " (total "
              << format_double(result["total"].get<double>()) << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment-matched density estimation on the real line"};
    app.require_subcommand(1);

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "fit a density to a sample file");
    std::string fit_samples, fit_out = "estimate";
    int fit_order = 4;
    bool fit_no_standardize = false;
    double fit_inflation = 4.0, fit_prior_mean = 0.0, fit_prior_std = 1.0;
    int fit_max_iter = 200;
    double fit_tol_grad = 1e-9, fit_tol_mom = 1e-6;
    GridFlags fit_grid;
    fit->add_option("--samples", fit_samples, "sample file (one value per line)")
        ->required();
    fit->add_option("--order", fit_order, "moment order 2n (even)")->required();
    fit->add_option("--out", fit_out, "output prefix");
    fit->add_flag("--no-standardize", fit_no_standardize,
                  "solve in raw coordinates");
    fit->add_option("--inflation", fit_inflation,
                    "variance inflation of the default prior");
    auto* opt_pm = fit->add_option("--prior-mean", fit_prior_mean,
                                   "reference density mean");
    auto* opt_ps = fit->add_option("--prior-std", fit_prior_std,
                                   "reference density standard deviation");
    fit->add_option("--max-iter", fit_max_iter, "Newton iteration cap");
    fit->add_option("--tol-grad", fit_tol_grad, "gradient stopping tolerance");
    fit->add_option("--tol-mom", fit_tol_mom,
                    "relative moment-residual tolerance");
    fit_grid.attach(fit);

    // --- example ---
    auto* example = app.add_subcommand("example", "run a benchmark experiment");
    std::string ex_config_path, ex_out, ex_estimators;
    int ex_id = 0, ex_runs = 0, ex_m = 0, ex_workers = 0, ex_gmm_k = 0;
    std::uint64_t ex_seed = 0;
    double ex_metrics_sigmas = 0.0;
    GridFlags ex_grid;
    example->add_option("--id", ex_id, "benchmark id 1..5");
    example->add_option("--config", ex_config_path, "experiment config JSON");
    example->add_option("--runs", ex_runs, "Monte Carlo repetitions");
    example->add_option("--samples-per-run", ex_m, "samples per run");
    example->add_option("--seed", ex_seed, "base seed");
    example->add_option("--estimators", ex_estimators,
                        "comma list from dpmsh,dpmkl,kde,gmm");
    example->add_option("--out", ex_out, "output directory");
    example->add_option("--workers", ex_workers, "parallel workers");
    example->add_option("--gmm-components", ex_gmm_k, "GMM component count");
    example->add_option("--metrics-sigmas", ex_metrics_sigmas,
                        "metrics grid half-width in truth sigmas");
    ex_grid.attach(example);

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "metrics over sample counts");
    std::string sw_config_path, sw_out, sw_estimators, sw_counts;
    int sw_id = 0, sw_runs = 0, sw_workers = 0;
    std::uint64_t sw_seed = 0;
    GridFlags sw_grid;
    sweep->add_option("--id", sw_id, "benchmark id 1..5");
    sweep->add_option("--config", sw_config_path, "experiment config JSON");
    sweep->add_option("--counts", sw_counts, "comma list of sample counts");
    sweep->add_option("--runs", sw_runs, "Monte Carlo repetitions per count");
    sweep->add_option("--seed", sw_seed, "base seed");
    sweep->add_option("--estimators", sw_estimators,
                      "comma list from dpmsh,dpmkl,kde,gmm");
    sweep->add_option("--out", sw_out, "output directory");
    sweep->add_option("--workers", sw_workers, "parallel workers");
    sw_grid.attach(sweep);

    // --- bound ---
    auto* bound = app.add_subcommand("bound", "entropy error-bound report");
    std::string bd_config_path, bd_samples, bd_out = "bound.json",
                bd_entropy = "hist";
    int bd_id = 0, bd_order = 0;
    bool bd_population = false, bd_prior_set = false;
    double bd_inflation = 4.0, bd_prior_mean = 0.0, bd_prior_std = 1.0;
    bound->add_option("--id", bd_id, "benchmark id 1..5");
    bound->add_option("--config", bd_config_path, "experiment config JSON");
    bound->add_option("--samples", bd_samples, "sample file");
    bound->add_option("--order", bd_order, "moment order 2n");
    bound->add_flag("--population", bd_population,
                    "use analytic population moments of the benchmark truth");
    bound->add_option("--entropy", bd_entropy,
                      "true-entropy plug-in for sample mode: hist|empirical")
        ->check(CLI::IsMember({"hist", "empirical"}));
    bound->add_option("--out", bd_out, "output file");
    bound->add_option("--inflation", bd_inflation, "default prior inflation");
    auto* bd_pm = bound->add_option("--prior-mean", bd_prior_mean,
                                    "reference density mean");
    auto* bd_ps = bound->add_option("--prior-std", bd_prior_std,
                                    "reference density standard deviation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            const bool prior_set = opt_pm->count() > 0 || opt_ps->count() > 0;
            if (prior_set && (opt_pm->count() == 0 || opt_ps->count() == 0))
                throw InvalidInput("--prior-mean and --prior-std go together");
            return run_fit(fit_samples, fit_order, fit_out, fit_no_standardize,
                           fit_inflation, fit_prior_mean, fit_prior_std,
                           prior_set, fit_grid, fit_max_iter, fit_tol_grad,
                           fit_tol_mom);
        }

        if (*example) {
            ExperimentConfig config = load_config(ex_config_path);
            if (example->count("--id")) config.example_id = ex_id;
            if (example->count("--runs")) config.mc_runs = ex_runs;
            if (example->count("--samples-per-run")) config.sample_count = ex_m;
            if (example->count("--seed")) config.seed = ex_seed;
            if (example->count("--estimators"))
                config.estimators = split_list(ex_estimators);
            if (example->count("--out")) config.output_dir = ex_out;
            if (example->count("--workers")) config.workers = ex_workers;
            if (example->count("--gmm-components"))
                config.gmm_components = ex_gmm_k;
            if (example->count("--metrics-sigmas"))
                config.metrics_half_width_sigmas = ex_metrics_sigmas;
            if (example->count("--half-width-sigmas"))
                config.grid.half_width_sigmas = ex_grid.half_width_sigmas;
            if (example->count("--panels")) config.grid.panels = ex_grid.panels;
            if (example->count("--nodes-per-panel"))
                config.grid.nodes_per_panel = ex_grid.nodes_per_panel;

            const ExperimentReport report = run_example(config);
            write_example_report(report, config.output_dir);
            std::cout << "experiment written to " << config.output_dir
                      << (report.partial ? " (partial)" : "") << "\n";
            return report.partial ? kExitPartial : kExitOk;
        }

        if (*sweep) {
            ExperimentConfig config = load_config(sw_config_path);
            if (sweep->count("--id")) config.example_id = sw_id;
            if (sweep->count("--runs")) config.mc_runs = sw_runs;
            if (sweep->count("--seed")) config.seed = sw_seed;
            if (sweep->count("--estimators"))
                config.estimators = split_list(sw_estimators);
            if (sweep->count("--out")) config.output_dir = sw_out;
            if (sweep->count("--workers")) config.workers = sw_workers;
            if (sweep->count("--counts")) {
                config.sample_counts.clear();
                for (const auto& tok : split_list(sw_counts))
                    config.sample_counts.push_back(std::stoi(tok));
            }
            if (sweep->count("--half-width-sigmas"))
                config.grid.half_width_sigmas = sw_grid.half_width_sigmas;
            if (sweep->count("--panels")) config.grid.panels = sw_grid.panels;
            if (sweep->count("--nodes-per-panel"))
                config.grid.nodes_per_panel = sw_grid.nodes_per_panel;

            const SweepReport report = run_sweep(config);
            write_sweep_report(report, config.output_dir);
            std::cout << "sweep written to " << config.output_dir
                      << (report.partial ? " (partial)" : "") << "\n";
            return report.partial ? kExitPartial : kExitOk;
        }

        if (*bound) {
            ExperimentConfig config = load_config(bd_config_path);
            if (bound->count("--id")) config.example_id = bd_id;
            bd_prior_set = bd_pm->count() > 0 || bd_ps->count() > 0;
            if (bd_prior_set && (bd_pm->count() == 0 || bd_ps->count() == 0))
                throw InvalidInput("--prior-mean and --prior-std go together");
            return run_bound(config, bd_samples, bd_order, bd_population,
                             bd_entropy, bd_out, bd_inflation, bd_prior_mean,
                             bd_prior_std, bd_prior_set);
        }
    } catch (const DegenerateSamples& e) {
        std::cerr << "error: degenerate samples: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const NotConverged& e) {
        std::cerr << "error: solver did not converge after " << e.iterations
                  << " iterations (gradient norm " << e.gradient_norm << ")\n";
        return kExitSolver;
    } catch (const LineSearchStalled& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const GridInsufficient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NonIntegrable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
