#pragma once

#include <string>

#include "json.hpp"

#include "momdens/baselines.hpp"
#include "momdens/hellinger.hpp"
#include "momdens/maxent.hpp"
#include "momdens/sampling.hpp"

namespace momdens {

using Json = nlohmann::ordered_json;

// All schemas carry a schema_version field; doubles round-trip bit-exactly
// through the decimal representations written.

Json to_json(const DensityEstimate& estimate);
DensityEstimate density_estimate_from_json(const Json& j);

Json to_json(const KlEstimate& estimate);
KlEstimate kl_estimate_from_json(const Json& j);

Json to_json(const KdeModel& model);
KdeModel kde_from_json(const Json& j);

Json to_json(const GmmModel& model);
GmmModel gmm_from_json(const Json& j);

Json to_json(const MixtureSpec& spec);
MixtureSpec mixture_from_json(const Json& j);

Json to_json(const BoundReport& report);

// Samples as one-column CSV or newline-delimited decimals. A single leading
// non-numeric line is treated as a header.
std::vector<double> read_samples(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Stable decimal formatting used by every CSV writer (%.12g).
std::string format_double(double v);

}  // namespace momdens
