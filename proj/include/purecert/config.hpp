#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "purecert/certify.hpp"
#include "purecert/distribution.hpp"
#include "purecert/sampler.hpp"
#include "purecert/schedule.hpp"

namespace purecert {

using Json = nlohmann::json;

// Parsed experiment configuration. `raw` keeps the full document so that
// subcommands can read their own sections.
struct ExperimentConfig {
    Json raw;
    std::optional<LabeledDistribution> distribution;
    std::optional<NoiseSchedule> schedule;
    SmoothingParams smoothing;
    ReverseConfig reverse;
    ClassifierKind classifier = ClassifierKind::NearestPrototype;
    std::vector<Vec> points;
    std::vector<int> point_labels;
    std::vector<double> epsilons;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
};

// Parse and fully validate; throws ConfigInvalid with the first error, or use
// validate_config for the complete machine-readable list.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

std::vector<std::string> validate_config(const Json& doc);

LabeledDistribution parse_distribution(const Json& spec);
NoiseSchedule parse_schedule(const Json& spec);

// Apply a dotted-path override ("smoothing.sigma=0.5") to a document.
void apply_override(Json& doc, const std::string& assignment);

// FNV-1a of the canonical (sorted-key) serialization; stable under key
// reordering in the source file.
std::uint64_t config_hash(const Json& doc);

Json read_json_file(const std::string& path);

}  // namespace purecert
