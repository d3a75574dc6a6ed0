#include "momdens/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

#include "momdens/baselines.hpp"
#include "momdens/metrics.hpp"
#include "momdens/svg.hpp"

namespace momdens {

namespace {

// Sweep runs are seeded by a counter that keeps the per-m streams disjoint.
constexpr std::uint64_t kSweepStride = 1000000;

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (v.empty())
        return;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2)
        return;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void parallel_runs(int runs, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, runs));
    if (workers == 1) {
        for (int r = 0; r < runs; ++r)
            body(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const int r = next.fetch_add(1);
                if (r >= runs)
                    return;
                body(r);
            }
        });
    }
    for (auto& th : pool)
        th.join();
}

struct RunOutcome {
    bool ok = false;
    std::string error;
    double tv = 0.0;
    double kl = 0.0;
    double residual_max = 0.0;
    std::vector<double> curve;
};

// Fit + evaluate one estimator on one sample set.
RunOutcome run_estimator(const std::string& name,
                         const std::vector<double>& samples,
                         const BenchmarkCase& bench,
                         const ExperimentConfig& config,
                         const std::vector<double>& xs,
                         const QuadratureGrid& metrics_grid,
                         const DensityFn& truth, std::uint64_t run_seed) {
    RunOutcome out;
    try {
        DensityFn estimate;
        FitOptions fit_opts;
        fit_opts.prior = bench.prior;
        fit_opts.grid = config.grid;

        if (name == "dpmsh") {
            auto model = fit_dpmsh(samples, bench.order, fit_opts);
            for (double res : model.diagnostics.moment_residuals)
                out.residual_max = std::max(out.residual_max, std::abs(res));
            estimate = [model](double x) { return eval_density(model, x); };
        } else if (name == "dpmkl") {
            auto model = fit_dpmkl(samples, bench.order, fit_opts);
            for (double res : model.diagnostics.moment_residuals)
                out.residual_max = std::max(out.residual_max, std::abs(res));
            estimate = [model](double x) { return eval_kl_estimate(model, x); };
        } else if (name == "kde") {
            auto model = kde_fit(samples);
            estimate = [model](double x) { return eval_kde(model, x); };
        } else if (name == "gmm") {
            auto model = gmm_fit(samples, config.gmm_components,
                                 Rng::child_seed(run_seed, 0xC0));
            estimate = [model](double x) { return eval_gmm(model, x); };
        } else {
            throw InvalidInput("unknown estimator: " + name);
        }

        out.curve.resize(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double v = estimate(xs[i]);
            // flush sub-normal tail values: they carry no information and
            // break strict readers of the archived tables
            out.curve[i] = v < 1e-300 ? 0.0 : v;
        }
        out.tv = tv_distance(estimate, truth, metrics_grid);
        out.kl = kl_divergence(truth, estimate, metrics_grid);
        out.ok = true;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<double> eval_abscissae(const BenchmarkCase& bench, int points) {
    std::vector<double> xs(points);
    const double lo = bench.prior.mean - 10.0 * bench.prior.std_dev;
    const double hi = bench.prior.mean + 10.0 * bench.prior.std_dev;
    for (int i = 0; i < points; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
    return xs;
}

QuadratureGrid metrics_grid_for(const BenchmarkCase& bench,
                                const ExperimentConfig& config) {
    return build_grid(mixture_mean(bench.spec),
                      config.metrics_half_width_sigmas * mixture_std(bench.spec),
                      config.grid.panels, config.grid.nodes_per_panel);
}

std::string csv_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            row += ",";
        row += format_double(values[i]);
    }
    return row;
}

}  // namespace

Json to_json(const ExperimentConfig& config) {
    Json j{{"example_id", config.example_id},
           {"mc_runs", config.mc_runs},
           {"sample_counts", config.sample_counts},
           {"seed", config.seed},
           {"grid",
            Json{{"half_width_sigmas", config.grid.half_width_sigmas},
                 {"panels", config.grid.panels},
                 {"nodes_per_panel", config.grid.nodes_per_panel}}},
           {"metrics_half_width_sigmas", config.metrics_half_width_sigmas},
           {"estimators", config.estimators},
           {"output_dir", config.output_dir},
           {"workers", config.workers},
           {"eval_points", config.eval_points},
           {"gmm_components", config.gmm_components}};
    if (config.sample_count)
        j["sample_count"] = *config.sample_count;
    if (config.custom) {
        j["custom"] = Json{{"spec", to_json(config.custom->spec)},
                           {"prior",
                            Json{{"mean", config.custom->prior.mean},
                                 {"std_dev", config.custom->prior.std_dev}}},
                           {"order", config.custom->order},
                           {"sample_count", config.custom->sample_count},
                           {"mc_runs", config.custom->mc_runs}};
    }
    return j;
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig config;
    if (j.contains("example_id"))
        config.example_id = j.at("example_id").get<int>();
    if (j.contains("mc_runs"))
        config.mc_runs = j.at("mc_runs").get<int>();
    if (j.contains("sample_count"))
        config.sample_count = j.at("sample_count").get<int>();
    if (j.contains("sample_counts"))
        config.sample_counts = j.at("sample_counts").get<std::vector<int>>();
    if (j.contains("seed"))
        config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("half_width_sigmas"))
            config.grid.half_width_sigmas = g.at("half_width_sigmas").get<double>();
        if (g.contains("panels"))
            config.grid.panels = g.at("panels").get<int>();
        if (g.contains("nodes_per_panel"))
            config.grid.nodes_per_panel = g.at("nodes_per_panel").get<int>();
    }
    if (j.contains("metrics_half_width_sigmas"))
        config.metrics_half_width_sigmas =
            j.at("metrics_half_width_sigmas").get<double>();
    if (j.contains("estimators"))
        config.estimators = j.at("estimators").get<std::vector<std::string>>();
    if (j.contains("output_dir"))
        config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers"))
        config.workers = j.at("workers").get<int>();
    if (j.contains("eval_points"))
        config.eval_points = j.at("eval_points").get<int>();
    if (j.contains("gmm_components"))
        config.gmm_components = j.at("gmm_components").get<int>();
    if (j.contains("custom")) {
        const auto& c = j.at("custom");
        BenchmarkCase bench;
        bench.spec = mixture_from_json(c.at("spec"));
        bench.prior = GaussianPrior{c.at("prior").at("mean").get<double>(),
                                    c.at("prior").at("std_dev").get<double>()};
        bench.order = c.at("order").get<int>();
        if (c.contains("sample_count"))
            bench.sample_count = c.at("sample_count").get<int>();
        if (c.contains("mc_runs"))
            bench.mc_runs = c.at("mc_runs").get<int>();
        config.custom = bench;
    }
    return config;
}

std::string config_hash(const ExperimentConfig& config) {
    // Only experiment-defining fields: where the artifacts land and how many
    // workers ran must not change the recorded identity.
    Json canonical = to_json(config);
    canonical.erase("output_dir");
    canonical.erase("workers");
    const std::string dump = canonical.dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

BenchmarkCase resolve_case(const ExperimentConfig& config) {
    BenchmarkCase bench =
        config.custom ? *config.custom : benchmark_case(config.example_id);
    if (config.sample_count)
        bench.sample_count = *config.sample_count;
    if (config.mc_runs > 0)
        bench.mc_runs = config.mc_runs;
    return bench;
}

ExperimentReport run_example(const ExperimentConfig& config) {
    if (config.estimators.empty())
        throw InvalidInput("no estimators configured");
    const BenchmarkCase bench = resolve_case(config);
    const int runs = bench.mc_runs;
    const int m = bench.sample_count;

    ExperimentReport report;
    report.bench = bench;
    report.sample_count = m;
    report.mc_runs = runs;
    report.seed = config.seed;
    report.hash = config_hash(config);
    report.xs = eval_abscissae(bench, config.eval_points);
    report.truth_curve.resize(report.xs.size());
    for (std::size_t i = 0; i < report.xs.size(); ++i) {
        const double v = eval_mixture(bench.spec, report.xs[i]);
        report.truth_curve[i] = v < 1e-300 ? 0.0 : v;
    }

    const QuadratureGrid metrics_grid = metrics_grid_for(bench, config);
    const DensityFn truth = [&bench](double x) {
        return eval_mixture(bench.spec, x);
    };

    // outcomes[estimator][run]
    std::vector<std::vector<RunOutcome>> outcomes(
        config.estimators.size(), std::vector<RunOutcome>(runs));

    parallel_runs(runs, config.workers, [&](int r) {
        const std::uint64_t run_seed =
            Rng::child_seed(config.seed, static_cast<std::uint64_t>(r));
        const std::vector<double> samples =
            sample_mixture(bench.spec, m, run_seed);
        for (std::size_t e = 0; e < config.estimators.size(); ++e)
            outcomes[e][r] =
                run_estimator(config.estimators[e], samples, bench, config,
                              report.xs, metrics_grid, truth, run_seed);
    });

    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        EstimatorStats stats;
        stats.name = config.estimators[e];
        stats.mean_curve.assign(report.xs.size(), 0.0);
        for (int r = 0; r < runs; ++r) {
            const RunOutcome& out = outcomes[e][r];
            if (!out.ok) {
                stats.failures.push_back("run " + std::to_string(r) + ": " +
                                         out.error);
                report.partial = true;
                continue;
            }
            ++stats.runs_succeeded;
            stats.tv.push_back(out.tv);
            stats.kl.push_back(out.kl);
            stats.moment_residual_max =
                std::max(stats.moment_residual_max, out.residual_max);
            for (std::size_t i = 0; i < report.xs.size(); ++i)
                stats.mean_curve[i] += out.curve[i];
        }
        if (stats.runs_succeeded > 0)
            for (double& v : stats.mean_curve)
                v /= static_cast<double>(stats.runs_succeeded);
        mean_std(stats.tv, stats.tv_mean, stats.tv_std);
        mean_std(stats.kl, stats.kl_mean, stats.kl_std);
        report.estimators.push_back(std::move(stats));
    }

    // Asymptotic bound block from population moments. High-order maxent
    // fits do not exist for every moment vector (heavy-tailed targets), so a
    // failure here is recorded rather than fatal.
    try {
        const MomentSequence population =
            mixture_moments(bench.spec, bench.order);
        FitOptions fit_opts;
        fit_opts.prior = bench.prior;
        fit_opts.grid = config.grid;
        const DensityEstimate ideal = fit_dpmsh_moments(population, fit_opts);
        report.bound = error_bound_report(ideal, truth, population, metrics_grid);
        report.bound_measured_tv = tv_distance(
            [&](double x) { return eval_density(ideal, x); }, truth,
            metrics_grid);
        report.bound_ok = true;
    } catch (const Error& e) {
        report.bound_ok = false;
        report.bound_error = e.what();
    }

    return report;
}

std::string render_overlay_svg(const std::vector<double>& xs,
                               const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& curves) {
    std::vector<SvgSeries> series;
    for (std::size_t i = 0; i < names.size(); ++i)
        series.push_back(SvgSeries{names[i], estimator_color(names[i]), xs,
                                   curves[i]});
    return line_chart_svg("mean density estimates", "x", "density", series);
}

std::string render_metric_svg(const std::string& metric,
                              const std::vector<SweepRow>& rows) {
    std::vector<SvgSeries> series;
    for (const auto& row : rows) {
        if (series.empty() || series.back().name != row.estimator)
            series.push_back(SvgSeries{row.estimator,
                                       estimator_color(row.estimator),
                                       {},
                                       {}});
        series.back().xs.push_back(static_cast<double>(row.sample_count));
        series.back().ys.push_back(metric == "tv" ? row.tv_mean : row.kl_mean);
    }
    return line_chart_svg(metric == "tv" ? "sup-CDF distance vs sample count"
                                         : "KL divergence vs sample count",
                          "samples", metric == "tv" ? "tv" : "kl", series);
}

std::string estimator_color(const std::string& name) {
    if (name == "dpmsh") return "#1f77b4";  // blue
    if (name == "dpmkl") return "#ff7f0e";  // orange
    if (name == "kde") return "#2ca02c";    // green
    if (name == "gmm") return "#d62728";    // red
    return "#000000";
}

void write_example_report(const ExperimentReport& report,
                          const std::string& dir) {
    std::filesystem::create_directories(dir);

    // mean_curves.csv
    std::ostringstream curves;
    curves << "x,true";
    for (const auto& stats : report.estimators)
        curves << "," << stats.name;
    curves << "\n";
    for (std::size_t i = 0; i < report.xs.size(); ++i) {
        std::vector<double> row{report.xs[i], report.truth_curve[i]};
        for (const auto& stats : report.estimators)
            row.push_back(stats.mean_curve[i]);
        curves << csv_row(row) << "\n";
    }
    write_text_file(dir + "/mean_curves.csv", curves.str());

    // metrics.csv
    std::ostringstream metrics;
    metrics << "estimator,m,tv_mean,tv_std,kl_mean,kl_std\n";
    for (const auto& stats : report.estimators) {
        metrics << stats.name << "," << report.sample_count << ","
                << format_double(stats.tv_mean) << ","
                << format_double(stats.tv_std) << ","
                << format_double(stats.kl_mean) << ","
                << format_double(stats.kl_std) << "\n";
    }
    write_text_file(dir + "/metrics.csv", metrics.str());

    // bound.json
    Json bound;
    if (report.bound_ok) {
        bound = to_json(report.bound);
        bound["measured_tv"] = report.bound_measured_tv;
    } else {
        bound = Json{{"schema_version", 1}, {"error", report.bound_error}};
    }
    write_text_file(dir + "/bound.json", bound.dump(2) + "\n");

    // overlay.svg from exactly the mean-curve table
    std::vector<std::string> names{"true"};
    std::vector<std::vector<double>> columns{report.truth_curve};
    for (const auto& stats : report.estimators) {
        names.push_back(stats.name);
        columns.push_back(stats.mean_curve);
    }
    write_text_file(dir + "/overlay.svg",
                    render_overlay_svg(report.xs, names, columns));

    // report.json
    Json estimators = Json::object();
    for (const auto& stats : report.estimators) {
        estimators[stats.name] =
            Json{{"tv_mean", stats.tv_mean},
                 {"tv_std", stats.tv_std},
                 {"kl_mean", stats.kl_mean},
                 {"kl_std", stats.kl_std},
                 {"moment_residual_max", stats.moment_residual_max},
                 {"runs_succeeded", stats.runs_succeeded},
                 {"tv", stats.tv},
                 {"kl", stats.kl},
                 {"failures", stats.failures}};
    }
    Json j{{"schema_version", 1},
           {"provenance",
            Json{{"seed", report.seed}, {"config_hash", report.hash}}},
           {"sample_count", report.sample_count},
           {"mc_runs", report.mc_runs},
           {"order", report.bench.order},
           {"partial", report.partial},
           {"estimators", estimators},
           {"bound", bound}};
    write_text_file(dir + "/report.json", j.dump(2) + "\n");
}

SweepReport run_sweep(const ExperimentConfig& config) {
    if (config.sample_counts.empty())
        throw InvalidInput("sweep needs at least one sample count");
    if (config.estimators.empty())
        throw InvalidInput("no estimators configured");
    const BenchmarkCase bench = resolve_case(config);

    SweepReport report;
    report.bench = bench;
    report.sample_counts = config.sample_counts;
    report.mc_runs = bench.mc_runs;
    report.seed = config.seed;
    report.hash = config_hash(config);

    const QuadratureGrid metrics_grid = metrics_grid_for(bench, config);
    const DensityFn truth = [&bench](double x) {
        return eval_mixture(bench.spec, x);
    };
    const std::vector<double> xs = eval_abscissae(bench, 2);  // unused curves

    // collected[estimator][count_index] = outcomes
    std::vector<std::vector<std::vector<RunOutcome>>> collected(
        config.estimators.size());
    for (auto& per_est : collected)
        per_est.assign(config.sample_counts.size(),
                       std::vector<RunOutcome>(report.mc_runs));

    for (std::size_t ci = 0; ci < config.sample_counts.size(); ++ci) {
        const int m = config.sample_counts[ci];
        parallel_runs(report.mc_runs, config.workers, [&](int r) {
            const std::uint64_t run_seed = Rng::child_seed(
                config.seed, kSweepStride * ci + static_cast<std::uint64_t>(r));
            const std::vector<double> samples =
                sample_mixture(bench.spec, m, run_seed);
            for (std::size_t e = 0; e < config.estimators.size(); ++e)
                collected[e][ci][r] =
                    run_estimator(config.estimators[e], samples, bench, config,
                                  xs, metrics_grid, truth, run_seed);
        });
    }

    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        for (std::size_t ci = 0; ci < config.sample_counts.size(); ++ci) {
            SweepRow row;
            row.estimator = config.estimators[e];
            row.sample_count = config.sample_counts[ci];
            std::vector<double> tv, kl;
            for (const auto& out : collected[e][ci]) {
                if (!out.ok) {
                    report.partial = true;
                    continue;
                }
                tv.push_back(out.tv);
                kl.push_back(out.kl);
                ++row.runs_succeeded;
            }
            mean_std(tv, row.tv_mean, row.tv_std);
            mean_std(kl, row.kl_mean, row.kl_std);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

void write_sweep_report(const SweepReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);

    std::ostringstream csv;
    csv << "estimator,m,tv_mean,tv_std,kl_mean,kl_std\n";
    for (const auto& row : report.rows) {
        csv << row.estimator << "," << row.sample_count << ","
            << format_double(row.tv_mean) << "," << format_double(row.tv_std)
            << "," << format_double(row.kl_mean) << ","
            << format_double(row.kl_std) << "\n";
    }
    write_text_file(dir + "/sweep_metrics.csv", csv.str());

    write_text_file(dir + "/tv_vs_m.svg", render_metric_svg("tv", report.rows));
    write_text_file(dir + "/kl_vs_m.svg", render_metric_svg("kl", report.rows));

    Json rows = Json::array();
    for (const auto& row : report.rows)
        rows.push_back(Json{{"estimator", row.estimator},
                            {"m", row.sample_count},
                            {"tv_mean", row.tv_mean},
                            {"tv_std", row.tv_std},
                            {"kl_mean", row.kl_mean},
                            {"kl_std", row.kl_std},
                            {"runs_succeeded", row.runs_succeeded}});
    Json j{{"schema_version", 1},
           {"provenance",
            Json{{"seed", report.seed}, {"config_hash", report.hash}}},
           {"mc_runs", report.mc_runs},
           {"partial", report.partial},
           {"rows", rows}};
    write_text_file(dir + "/report.json", j.dump(2) + "\n");
}

Json example_bound_json(const ExperimentConfig& config, int order_override) {
    BenchmarkCase bench = resolve_case(config);
    if (order_override > 0)
        bench.order = order_override;

    const QuadratureGrid metrics_grid = metrics_grid_for(bench, config);
    const DensityFn truth = [&bench](double x) {
        return eval_mixture(bench.spec, x);
    };
    const MomentSequence population = mixture_moments(bench.spec, bench.order);

    FitOptions fit_opts;
    fit_opts.prior = bench.prior;
    fit_opts.grid = config.grid;
    const DensityEstimate ideal = fit_dpmsh_moments(population, fit_opts);

    Json out = to_json(error_bound_report(ideal, truth, population, metrics_grid));
    out["measured_tv"] = tv_distance(
        [&](double x) { return eval_density(ideal, x); }, truth, metrics_grid);
    out["order"] = bench.order;
    return out;
}

}  // namespace momdens
