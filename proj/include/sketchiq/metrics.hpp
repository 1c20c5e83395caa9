#pragma once

#include <string>

#include <json.hpp>

#include "sketchiq/image.hpp"

namespace sketchiq {

enum class MetricKind { SSIM, VIF, FSIM, GMSD };

// Polarity makes "best score" well-defined: GMSD is a distortion measure,
// so its best value is the smallest; the other three are similarities.
enum class Polarity { Similarity, Distortion };

struct MetricScore {
    double value = 0.0;
    Polarity polarity = Polarity::Similarity;
};

struct SsimParams {
    int window_size = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

struct VifParams {
    int scales = 4;
    double noise_variance = 2.0;  // sigma_n^2
    double epsilon = 1e-10;
};

struct FsimParams {
    int pc_scales = 4;
    int pc_orientations = 4;
    double min_wavelength = 6.0;
    double scale_mult = 2.0;
    double sigma_on_f = 0.55;
    double t1 = 0.85;
    double t2 = 160.0;
    int downsample_target = 256;
};

struct GmsdParams {
    double c = 170.0;
};

struct MetricParams {
    SsimParams ssim;
    VifParams vif;
    FsimParams fsim;
    GmsdParams gmsd;
};

// Throws ParamError unless every field is positive and window_size is odd.
void validate_metric_params(const MetricParams& p);

// Lowercase names used in configs and on the command line: ssim, vif, fsim, gmsd.
std::string metric_name(MetricKind kind);
MetricKind metric_kind_from_name(const std::string& name);

std::string polarity_name(Polarity polarity);

// Similarity for SSIM/VIF/FSIM, Distortion for GMSD.
Polarity metric_polarity(MetricKind kind);

// Higher-is-better comparison respecting polarity: true when a beats b.
bool score_better(const MetricScore& a, const MetricScore& b);

MetricScore ssim(const GrayImage& ref, const GrayImage& dist, const MetricParams& p = {});
MetricScore vif(const GrayImage& ref, const GrayImage& dist, const MetricParams& p = {});
MetricScore fsim(const GrayImage& ref, const GrayImage& dist, const MetricParams& p = {});
MetricScore gmsd(const GrayImage& ref, const GrayImage& dist, const MetricParams& p = {});

MetricScore compute_metric(MetricKind kind, const GrayImage& ref, const GrayImage& dist,
                           const MetricParams& p = {});

// Round-trip JSON for the params block. from_json starts from defaults and
// patches the keys present; unknown keys raise ConfigError.
nlohmann::json metric_params_to_json(const MetricParams& p);
MetricParams metric_params_from_json(const nlohmann::json& j);

}  // namespace sketchiq
