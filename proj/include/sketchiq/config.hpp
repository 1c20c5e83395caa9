#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchiq/evaluation.hpp"
#include "sketchiq/metrics.hpp"
#include "sketchiq/synthesis.hpp"

namespace sketchiq {

// Fixed default so runs without an explicit seed are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 0x5EEDBA5EULL;

struct RunConfig {
    int version = 1;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;  // 0 = use hardware concurrency
    std::vector<MetricKind> metrics = {MetricKind::SSIM, MetricKind::VIF, MetricKind::FSIM,
                                       MetricKind::GMSD};
    std::vector<std::string> galleries;  // empty = every available gallery
    std::string output;
    MetricParams metric_params;
    SynthesisParams synthesis_params;
    SplitProtocol protocol;  // its seed field is mirrored from `seed` at use time
    double eigenface_retain = 0.99;
    bool eigenface_sweep = false;
};

void validate_run_config(const RunConfig& config);

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sketchiq
