#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "momdens/experiment.hpp"

using namespace momdens;

namespace {

std::string temp_dir(const std::string& name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    return path.string();
}

ExperimentConfig small_config() {
    ExperimentConfig config;
    config.example_id = 1;
    config.mc_runs = 3;
    config.sample_count = 60;
    config.seed = 99;
    config.estimators = {"dpmsh", "kde"};
    config.eval_points = 200;
    return config;
}

}  // namespace

TEST_CASE("experiment reports cover every configured estimator") {
    const auto report = run_example(small_config());
    CHECK_FALSE(report.partial);
    REQUIRE(report.estimators.size() == 2);
    CHECK(report.estimators[0].name == "dpmsh");
    CHECK(report.estimators[1].name == "kde");
    for (const auto& stats : report.estimators) {
        CHECK(stats.runs_succeeded == 3);
        CHECK(stats.tv.size() == 3);
        CHECK(stats.kl.size() == 3);
        CHECK(stats.mean_curve.size() == report.xs.size());
        for (double v : stats.mean_curve)
            CHECK(v >= 0.0);
        CHECK(stats.tv_mean > 0.0);
    }
    CHECK(report.bound_ok);
    CHECK(report.bound_measured_tv <= report.bound.total);
}

TEST_CASE("worker count does not change results") {
    auto config = small_config();
    const auto serial = run_example(config);
    config.workers = 4;
    const auto parallel = run_example(config);
    for (std::size_t e = 0; e < serial.estimators.size(); ++e) {
        CHECK(serial.estimators[e].tv_mean == parallel.estimators[e].tv_mean);
        CHECK(serial.estimators[e].kl_mean == parallel.estimators[e].kl_mean);
        for (std::size_t i = 0; i < serial.xs.size(); ++i)
            CHECK(serial.estimators[e].mean_curve[i] ==
                  parallel.estimators[e].mean_curve[i]);
    }
}

TEST_CASE("written artifacts are byte-identical across repeated runs") {
    auto config = small_config();
    const auto report = run_example(config);

    const auto dir_a = temp_dir("momdens_exp_a");
    const auto dir_b = temp_dir("momdens_exp_b");
    write_example_report(report, dir_a);
    write_example_report(run_example(config), dir_b);

    for (const auto& name :
         {"mean_curves.csv", "metrics.csv", "bound.json", "overlay.svg",
          "report.json"}) {
        const auto a = read_text_file(dir_a + "/" + name);
        const auto b = read_text_file(dir_b + "/" + name);
        CHECK(a == b);
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("overlay chart is a pure function of the curve table") {
    auto config = small_config();
    const auto report = run_example(config);
    const auto dir = temp_dir("momdens_exp_svg");
    write_example_report(report, dir);

    // Rebuild the chart from the CSV alone.
    std::istringstream csv(read_text_file(dir + "/mean_curves.csv"));
    std::string header;
    std::getline(csv, header);
    std::vector<std::string> names;
    {
        std::istringstream hs(header);
        std::string tok;
        std::getline(hs, tok, ',');  // x column
        while (std::getline(hs, tok, ','))
            names.push_back(tok);
    }
    std::vector<double> xs;
    std::vector<std::vector<double>> curves(names.size());
    std::string line;
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        xs.push_back(std::strtod(tok.c_str(), nullptr));
        for (auto& curve : curves) {
            std::getline(ls, tok, ',');
            curve.push_back(std::strtod(tok.c_str(), nullptr));
        }
    }
    CHECK(render_overlay_svg(xs, names, curves) ==
          read_text_file(dir + "/overlay.svg"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep produces one row per estimator and sample count") {
    ExperimentConfig config;
    config.example_id = 1;
    config.mc_runs = 2;
    config.sample_counts = {40, 80};
    config.seed = 7;
    config.estimators = {"dpmsh", "gmm"};
    const auto report = run_sweep(config);
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0].estimator == "dpmsh");
    CHECK(report.rows[0].sample_count == 40);
    CHECK(report.rows[1].estimator == "dpmsh");
    CHECK(report.rows[1].sample_count == 80);
    CHECK(report.rows[2].estimator == "gmm");
    for (const auto& row : report.rows)
        CHECK(row.runs_succeeded == 2);

    const auto dir = temp_dir("momdens_sweep");
    write_sweep_report(report, dir);
    CHECK(std::filesystem::exists(dir + "/sweep_metrics.csv"));
    CHECK(std::filesystem::exists(dir + "/tv_vs_m.svg"));
    CHECK(std::filesystem::exists(dir + "/kl_vs_m.svg"));
    CHECK(std::filesystem::exists(dir + "/report.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("config JSON honors custom benchmark cases") {
    const char* text = R"({
        "custom": {
            "spec": {"components": [
                {"family": "gaussian", "weight": 1.0, "location": 2.0, "scale": 1.5}
            ]},
            "prior": {"mean": 2.0, "std_dev": 1.5},
            "order": 2,
            "sample_count": 80,
            "mc_runs": 4
        },
        "seed": 5,
        "estimators": ["dpmsh"]
    })";
    const auto config = config_from_json(Json::parse(text));
    REQUIRE(config.custom.has_value());
    const auto bench = resolve_case(config);
    CHECK(bench.order == 2);
    CHECK(bench.sample_count == 80);
    CHECK(bench.mc_runs == 4);
    CHECK(bench.prior.mean == 2.0);

    // hash is stable under round-trip
    const auto round = config_from_json(to_json(config));
    CHECK(config_hash(round) == config_hash(config));
}

TEST_CASE("bound report in population mode validates the measured distance") {
    ExperimentConfig config;
    config.example_id = 3;
    const auto j = example_bound_json(config, -1);
    CHECK(j.at("measured_tv").get<double>() <= j.at("total").get<double>());
    CHECK(j.at("order").get<int>() == 4);
}
