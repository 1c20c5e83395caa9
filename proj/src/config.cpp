#include "sketchiq/config.hpp"

#include <fstream>
#include <set>

#include "sketchiq/errors.hpp"

namespace sketchiq {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& block) {
    if (!j.is_object()) throw ConfigError(block + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key \"" + item.key() + "\" in " + block);
    }
}

}  // namespace

void validate_run_config(const RunConfig& config) {
    if (config.version != 1)
        throw ConfigError("unsupported config version " + std::to_string(config.version));
    if (config.threads < 0) throw ConfigError("threads must be >= 0");
    if (config.metrics.empty()) throw ConfigError("metrics selection is empty");
    if (config.protocol.train_count < 1) throw ConfigError("protocol.train_count must be positive");
    if (config.protocol.repeats < 1) throw ConfigError("protocol.repeats must be positive");
    if (!(config.eigenface_retain > 0.0) || config.eigenface_retain > 1.0)
        throw ConfigError("eigenface_retain must be in (0, 1]");
    validate_metric_params(config.metric_params);
    validate_synthesis_params(config.synthesis_params);
}

nlohmann::json run_config_to_json(const RunConfig& config) {
    std::vector<std::string> names;
    for (MetricKind kind : config.metrics) names.push_back(metric_name(kind));
    return nlohmann::json{{"version", config.version},
                          {"seed", config.seed},
                          {"threads", config.threads},
                          {"metrics", names},
                          {"galleries", config.galleries},
                          {"output", config.output},
                          {"metric_params", metric_params_to_json(config.metric_params)},
                          {"synthesis_params", synthesis_params_to_json(config.synthesis_params)},
                          {"protocol",
                           {{"train_count", config.protocol.train_count},
                            {"repeats", config.protocol.repeats}}},
                          {"eigenface_retain", config.eigenface_retain},
                          {"eigenface_sweep", config.eigenface_sweep}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig config;
    check_keys(j,
               {"version", "seed", "threads", "metrics", "galleries", "output", "metric_params",
                "synthesis_params", "protocol", "eigenface_retain", "eigenface_sweep"},
               "config");
    if (j.contains("version")) config.version = j.at("version").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) config.threads = j.at("threads").get<int>();
    if (j.contains("metrics")) {
        config.metrics.clear();
        for (const auto& name : j.at("metrics"))
            config.metrics.push_back(metric_kind_from_name(name.get<std::string>()));
    }
    if (j.contains("galleries"))
        config.galleries = j.at("galleries").get<std::vector<std::string>>();
    if (j.contains("output")) config.output = j.at("output").get<std::string>();
    if (j.contains("metric_params"))
        config.metric_params = metric_params_from_json(j.at("metric_params"));
    if (j.contains("synthesis_params"))
        config.synthesis_params = synthesis_params_from_json(j.at("synthesis_params"));
    if (j.contains("protocol")) {
        const auto& block = j.at("protocol");
        check_keys(block, {"train_count", "repeats"}, "protocol");
        if (block.contains("train_count"))
            config.protocol.train_count = block.at("train_count").get<int>();
        if (block.contains("repeats")) config.protocol.repeats = block.at("repeats").get<int>();
    }
    if (j.contains("eigenface_retain"))
        config.eigenface_retain = j.at("eigenface_retain").get<double>();
    if (j.contains("eigenface_sweep"))
        config.eigenface_sweep = j.at("eigenface_sweep").get<bool>();
    validate_run_config(config);
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
}

}  // namespace sketchiq
