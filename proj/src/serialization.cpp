#include "momdens/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace momdens {

namespace {

Json diagnostics_to_json(const SolveDiagnostics& d) {
    return Json{{"iterations", d.iterations},
                {"final_gradient_norm", d.final_gradient_norm},
                {"moment_residuals", d.moment_residuals},
                {"objective", d.objective},
                {"converged", d.converged}};
}

SolveDiagnostics diagnostics_from_json(const Json& j) {
    SolveDiagnostics d;
    d.iterations = j.at("iterations").get<int>();
    d.final_gradient_norm = j.at("final_gradient_norm").get<double>();
    d.moment_residuals = j.at("moment_residuals").get<std::vector<double>>();
    d.objective = j.at("objective").get<double>();
    d.converged = j.at("converged").get<bool>();
    return d;
}

Json standardization_to_json(const Standardization& st) {
    return Json{{"shift", st.shift}, {"scale", st.scale}};
}

Standardization standardization_from_json(const Json& j) {
    return Standardization{j.at("shift").get<double>(),
                           j.at("scale").get<double>()};
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Laplace: return "laplace";
        case Family::Gumbel: return "gumbel";
    }
    throw InvalidInput("unknown mixture family");
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "laplace") return Family::Laplace;
    if (name == "gumbel") return Family::Gumbel;
    throw InvalidInput("unknown mixture family: " + name);
}

}  // namespace

Json to_json(const DensityEstimate& estimate) {
    return Json{{"schema_version", 1},
                {"type", "dpmsh"},
                {"order", estimate.coeffs.order},
                {"prior",
                 Json{{"mean", estimate.prior.mean},
                      {"std_dev", estimate.prior.std_dev}}},
                {"b", estimate.coeffs.b},
                {"standardization",
                 standardization_to_json(estimate.standardization)},
                {"diagnostics", diagnostics_to_json(estimate.diagnostics)}};
}

DensityEstimate density_estimate_from_json(const Json& j) {
    DensityEstimate e;
    e.coeffs.order = j.at("order").get<int>();
    e.coeffs.b = j.at("b").get<std::vector<double>>();
    e.prior.mean = j.at("prior").at("mean").get<double>();
    e.prior.std_dev = j.at("prior").at("std_dev").get<double>();
    e.standardization = standardization_from_json(j.at("standardization"));
    e.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    return e;
}

Json to_json(const KlEstimate& estimate) {
    return Json{{"schema_version", 1},
                {"type", "dpmkl"},
                {"order", estimate.coeffs.order},
                {"prior",
                 Json{{"mean", estimate.prior.mean},
                      {"std_dev", estimate.prior.std_dev}}},
                {"b", estimate.coeffs.b},
                {"standardization",
                 standardization_to_json(estimate.standardization)},
                {"diagnostics", diagnostics_to_json(estimate.diagnostics)}};
}

KlEstimate kl_estimate_from_json(const Json& j) {
    KlEstimate e;
    e.coeffs.order = j.at("order").get<int>();
    e.coeffs.b = j.at("b").get<std::vector<double>>();
    e.prior.mean = j.at("prior").at("mean").get<double>();
    e.prior.std_dev = j.at("prior").at("std_dev").get<double>();
    e.standardization = standardization_from_json(j.at("standardization"));
    e.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    return e;
}

Json to_json(const KdeModel& model) {
    return Json{{"schema_version", 1},
                {"type", "kde"},
                {"bandwidth", model.bandwidth},
                {"centers", model.centers}};
}

KdeModel kde_from_json(const Json& j) {
    return KdeModel{j.at("centers").get<std::vector<double>>(),
                    j.at("bandwidth").get<double>()};
}

Json to_json(const GmmModel& model) {
    return Json{{"schema_version", 1},
                {"type", "gmm"},
                {"weights", model.weights},
                {"means", model.means},
                {"std_devs", model.std_devs}};
}

GmmModel gmm_from_json(const Json& j) {
    return GmmModel{j.at("weights").get<std::vector<double>>(),
                    j.at("means").get<std::vector<double>>(),
                    j.at("std_devs").get<std::vector<double>>()};
}

Json to_json(const MixtureSpec& spec) {
    Json components = Json::array();
    for (const auto& c : spec.components)
        components.push_back(Json{{"family", family_name(c.family)},
                                  {"weight", c.weight},
                                  {"location", c.location},
                                  {"scale", c.scale}});
    return Json{{"components", components}};
}

MixtureSpec mixture_from_json(const Json& j) {
    MixtureSpec spec;
    for (const auto& c : j.at("components")) {
        spec.components.push_back(
            MixtureComponent{family_from_name(c.at("family").get<std::string>()),
                             c.at("weight").get<double>(),
                             c.at("location").get<double>(),
                             c.at("scale").get<double>()});
    }
    validate_mixture(spec);
    return spec;
}

Json to_json(const BoundReport& report) {
    return Json{{"schema_version", 1},
                {"h_maxent", report.h_maxent},
                {"h_estimate", report.h_estimate},
                {"h_true", report.h_true},
                {"term_estimate", report.term_estimate},
                {"term_true", report.term_true},
                {"total", report.total},
                {"approximate", report.approximate}};
}

std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open sample file: " + path);

    std::vector<double> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip whitespace and a possible trailing comma (one-column CSV).
        while (!line.empty() && (std::isspace(static_cast<unsigned char>(
                                     line.back())) ||
                                 line.back() == ','))
            line.pop_back();
        std::size_t start = 0;
        while (start < line.size() &&
               std::isspace(static_cast<unsigned char>(line[start])))
            ++start;
        if (start == line.size())
            continue;

        const std::string token = line.substr(start);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            if (line_no == 1 && samples.empty())
                continue;  // header row
            throw InvalidInput("cannot parse line " + std::to_string(line_no) +
                               " of " + path + ": '" + token + "'");
        }
        if (!std::isfinite(v))
            throw NonFiniteValue("non-finite sample on line " +
                                 std::to_string(line_no));
        samples.push_back(v);
    }
    if (samples.empty())
        throw InvalidInput("no samples found in " + path);
    return samples;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot open for writing: " + path);
    out << content;
    if (!out)
        throw InvalidInput("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace momdens
