#include "sketchiq/metrics.hpp"

#include <set>

#include "sketchiq/errors.hpp"

namespace sketchiq {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ParamError(std::string(name) + " must be positive");
}

// Rejects keys outside `allowed` so config typos fail loudly.
void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& block) {
    if (!j.is_object()) throw ConfigError(block + " params must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key \"" + item.key() + "\" in " + block + " params");
    }
}

double get_num(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

int get_int(const nlohmann::json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return j.at(key).get<int>();
}

}  // namespace

void validate_metric_params(const MetricParams& p) {
    require_positive(p.ssim.window_size, "ssim.window_size");
    if (p.ssim.window_size % 2 == 0) throw ParamError("ssim.window_size must be odd");
    require_positive(p.ssim.sigma, "ssim.sigma");
    require_positive(p.ssim.k1, "ssim.k1");
    require_positive(p.ssim.k2, "ssim.k2");
    require_positive(p.ssim.dynamic_range, "ssim.dynamic_range");
    require_positive(p.vif.scales, "vif.scales");
    require_positive(p.vif.noise_variance, "vif.noise_variance");
    require_positive(p.vif.epsilon, "vif.epsilon");
    require_positive(p.fsim.pc_scales, "fsim.pc_scales");
    require_positive(p.fsim.pc_orientations, "fsim.pc_orientations");
    require_positive(p.fsim.min_wavelength, "fsim.min_wavelength");
    require_positive(p.fsim.scale_mult, "fsim.scale_mult");
    require_positive(p.fsim.sigma_on_f, "fsim.sigma_on_f");
    require_positive(p.fsim.t1, "fsim.t1");
    require_positive(p.fsim.t2, "fsim.t2");
    require_positive(p.fsim.downsample_target, "fsim.downsample_target");
    require_positive(p.gmsd.c, "gmsd.c");
}

std::string metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::SSIM: return "ssim";
        case MetricKind::VIF: return "vif";
        case MetricKind::FSIM: return "fsim";
        case MetricKind::GMSD: return "gmsd";
    }
    throw ParamError("invalid metric kind");
}

MetricKind metric_kind_from_name(const std::string& name) {
    if (name == "ssim") return MetricKind::SSIM;
    if (name == "vif") return MetricKind::VIF;
    if (name == "fsim") return MetricKind::FSIM;
    if (name == "gmsd") return MetricKind::GMSD;
    throw ConfigError("unknown metric \"" + name + "\" (expected ssim, vif, fsim or gmsd)");
}

std::string polarity_name(Polarity polarity) {
    return polarity == Polarity::Similarity ? "similarity" : "distortion";
}

Polarity metric_polarity(MetricKind kind) {
    return kind == MetricKind::GMSD ? Polarity::Distortion : Polarity::Similarity;
}

bool score_better(const MetricScore& a, const MetricScore& b) {
    if (a.polarity != b.polarity) throw ParamError("cannot compare scores of mixed polarity");
    return a.polarity == Polarity::Similarity ? a.value > b.value : a.value < b.value;
}

MetricScore compute_metric(MetricKind kind, const GrayImage& ref, const GrayImage& dist,
                           const MetricParams& p) {
    switch (kind) {
        case MetricKind::SSIM: return ssim(ref, dist, p);
        case MetricKind::VIF: return vif(ref, dist, p);
        case MetricKind::FSIM: return fsim(ref, dist, p);
        case MetricKind::GMSD: return gmsd(ref, dist, p);
    }
    throw ParamError("invalid metric kind");
}

nlohmann::json metric_params_to_json(const MetricParams& p) {
    return nlohmann::json{
        {"ssim",
         {{"window_size", p.ssim.window_size},
          {"sigma", p.ssim.sigma},
          {"k1", p.ssim.k1},
          {"k2", p.ssim.k2},
          {"dynamic_range", p.ssim.dynamic_range}}},
        {"vif",
         {{"scales", p.vif.scales},
          {"noise_variance", p.vif.noise_variance},
          {"epsilon", p.vif.epsilon}}},
        {"fsim",
         {{"pc_scales", p.fsim.pc_scales},
          {"pc_orientations", p.fsim.pc_orientations},
          {"min_wavelength", p.fsim.min_wavelength},
          {"scale_mult", p.fsim.scale_mult},
          {"sigma_on_f", p.fsim.sigma_on_f},
          {"t1", p.fsim.t1},
          {"t2", p.fsim.t2},
          {"downsample_target", p.fsim.downsample_target}}},
        {"gmsd", {{"c", p.gmsd.c}}}};
}

MetricParams metric_params_from_json(const nlohmann::json& j) {
    MetricParams p;
    check_keys(j, {"ssim", "vif", "fsim", "gmsd"}, "metric");
    if (j.contains("ssim")) {
        const auto& b = j.at("ssim");
        check_keys(b, {"window_size", "sigma", "k1", "k2", "dynamic_range"}, "ssim");
        p.ssim.window_size = get_int(b, "window_size", p.ssim.window_size);
        p.ssim.sigma = get_num(b, "sigma", p.ssim.sigma);
        p.ssim.k1 = get_num(b, "k1", p.ssim.k1);
        p.ssim.k2 = get_num(b, "k2", p.ssim.k2);
        p.ssim.dynamic_range = get_num(b, "dynamic_range", p.ssim.dynamic_range);
    }
    if (j.contains("vif")) {
        const auto& b = j.at("vif");
        check_keys(b, {"scales", "noise_variance", "epsilon"}, "vif");
        p.vif.scales = get_int(b, "scales", p.vif.scales);
        p.vif.noise_variance = get_num(b, "noise_variance", p.vif.noise_variance);
        p.vif.epsilon = get_num(b, "epsilon", p.vif.epsilon);
    }
    if (j.contains("fsim")) {
        const auto& b = j.at("fsim");
        check_keys(b,
                   {"pc_scales", "pc_orientations", "min_wavelength", "scale_mult", "sigma_on_f",
                    "t1", "t2", "downsample_target"},
                   "fsim");
        p.fsim.pc_scales = get_int(b, "pc_scales", p.fsim.pc_scales);
        p.fsim.pc_orientations = get_int(b, "pc_orientations", p.fsim.pc_orientations);
        p.fsim.min_wavelength = get_num(b, "min_wavelength", p.fsim.min_wavelength);
        p.fsim.scale_mult = get_num(b, "scale_mult", p.fsim.scale_mult);
        p.fsim.sigma_on_f = get_num(b, "sigma_on_f", p.fsim.sigma_on_f);
        p.fsim.t1 = get_num(b, "t1", p.fsim.t1);
        p.fsim.t2 = get_num(b, "t2", p.fsim.t2);
        p.fsim.downsample_target = get_int(b, "downsample_target", p.fsim.downsample_target);
    }
    if (j.contains("gmsd")) {
        const auto& b = j.at("gmsd");
        check_keys(b, {"c"}, "gmsd");
        p.gmsd.c = get_num(b, "c", p.gmsd.c);
    }
    validate_metric_params(p);
    return p;
}

}  // namespace sketchiq
