#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sketchiq/config.hpp"
#include "sketchiq/corpus.hpp"
#include "sketchiq/errors.hpp"
#include "sketchiq/evaluation.hpp"
#include "sketchiq/image_io.hpp"
#include "sketchiq/metrics.hpp"
#include "sketchiq/recognition.hpp"
#include "sketchiq/synthesis.hpp"

namespace {

using namespace sketchiq;

struct CommonOpts {
    std::string config_path;
    int threads = -1;        // -1 = not given on the command line
    long long seed = -1;     // -1 = not given
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", opts.seed, "random seed");
}

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig config =
        opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
    if (opts.threads >= 0) config.threads = opts.threads;
    if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
    validate_run_config(config);
    return config;
}

Corpus load_with_adapter(const std::string& dir, const std::string& adapter) {
    if (adapter.empty()) return load_corpus(dir);
    if (adapter == "flat") return load_corpus_flat(dir);
    throw ConfigError("unknown adapter \"" + adapter + "\" (expected flat)");
}

std::vector<TrainingPair> training_pairs(const Corpus& corpus,
                                         const std::vector<std::string>& ids) {
    std::map<std::string, const GrayImage*> photo_by_id, sketch_by_id;
    for (const auto& e : corpus.photos) photo_by_id[e.id] = &e.image;
    for (const auto& e : corpus.sketches) sketch_by_id[e.id] = &e.image;
    std::vector<TrainingPair> pairs;
    for (const auto& id : ids) {
        const auto photo = photo_by_id.find(id);
        const auto sketch = sketch_by_id.find(id);
        if (photo == photo_by_id.end() || sketch == sketch_by_id.end())
            throw DataError("training id \"" + id + "\" missing a photo/sketch mate");
        pairs.push_back({*photo->second, *sketch->second, id});
    }
    return pairs;
}

Gallery named_gallery(const Corpus& corpus, const std::string& name) {
    Gallery gallery;
    if (name == "photos") {
        gallery.kind = GalleryKind::Photos;
        gallery.entries = corpus.photos;
        return gallery;
    }
    const auto it = corpus.synthesized.find(name);
    if (it == corpus.synthesized.end())
        throw DataError("unknown gallery \"" + name + "\" (photos or a synth/<method> directory)");
    gallery.kind = GalleryKind::SynthesizedSketches;
    gallery.entries = it->second;
    return gallery;
}

Gallery restrict_gallery(const Gallery& gallery, const std::set<std::string>& ids) {
    Gallery out;
    out.kind = gallery.kind;
    for (const auto& e : gallery.entries)
        if (ids.count(e.id)) out.entries.push_back(e);
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string current;
    for (char ch : text) {
        if (ch == ',') {
            if (!current.empty()) items.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    if (!current.empty()) items.push_back(current);
    return items;
}

int run_metric(const CommonOpts& opts, const std::string& kind_name, const std::string& ref_path,
               const std::string& dist_path) {
    const RunConfig config = resolve_config(opts);
    const MetricKind kind = metric_kind_from_name(kind_name);
    const GrayImage ref = load_image(ref_path);
    const GrayImage dist = load_image(dist_path);
    const MetricScore score = compute_metric(kind, ref, dist, config.metric_params);
    std::printf("%s %.6f %s\n", metric_name(kind).c_str(), score.value,
                polarity_name(score.polarity).c_str());
    return 0;
}

int run_synthesize(const CommonOpts& opts, const std::string& corpus_dir,
                   const std::string& out_dir, const std::string& params_text,
                   const std::string& adapter) {
    RunConfig config = resolve_config(opts);
    if (!params_text.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(params_text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("invalid --params JSON: ") + e.what());
        }
        config.synthesis_params = synthesis_params_from_json(j);
    }
    const Corpus corpus = load_with_adapter(corpus_dir, adapter);
    std::vector<std::string> train_ids = corpus.train_ids;
    if (train_ids.empty())
        for (const auto& e : corpus.photos) train_ids.push_back(e.id);
    const std::vector<TrainingPair> training = training_pairs(corpus, train_ids);

    const Gallery gallery =
        build_gallery(corpus.photos, training, config.synthesis_params, config.threads);
    std::filesystem::create_directories(out_dir);
    for (const auto& entry : gallery.entries)
        save_png(entry.image, std::filesystem::path(out_dir) / (entry.id + ".png"));
    std::printf("synthesized %zu sketches to %s\n", gallery.entries.size(), out_dir.c_str());
    return 0;
}

int run_match(const CommonOpts& opts, const std::string& corpus_dir,
              const std::string& gallery_name, const std::string& kind_name,
              const std::string& probe_path, const std::string& adapter) {
    const RunConfig config = resolve_config(opts);
    const MetricKind kind = metric_kind_from_name(kind_name);
    const Corpus corpus = load_with_adapter(corpus_dir, adapter);
    const Gallery gallery = named_gallery(corpus, gallery_name);
    const GrayImage probe = load_image(probe_path);
    const std::string probe_id = std::filesystem::path(probe_path).stem().string();
    const MatchResult result =
        match_probe(probe, gallery, kind, config.metric_params, probe_id, config.threads);
    for (const auto& entry : result.ranking)
        std::printf("%s %.6f\n", entry.id.c_str(), entry.score);
    return 0;
}

int run_evaluate(const CommonOpts& opts, const std::string& corpus_dir,
                 const std::string& galleries_text, const std::string& metrics_text,
                 const std::string& out_path, const std::string& protocol_name, int train_count,
                 int repeats, double retain, bool sweep, const std::string& adapter) {
    RunConfig config = resolve_config(opts);
    if (!metrics_text.empty()) {
        config.metrics.clear();
        for (const auto& name : split_list(metrics_text))
            config.metrics.push_back(metric_kind_from_name(name));
    }
    if (!galleries_text.empty()) config.galleries = split_list(galleries_text);
    if (!out_path.empty()) config.output = out_path;
    if (train_count > 0) config.protocol.train_count = train_count;
    if (repeats > 0) config.protocol.repeats = repeats;
    if (retain > 0.0) config.eigenface_retain = retain;
    if (sweep) config.eigenface_sweep = true;
    validate_run_config(config);
    if (config.output.empty()) throw ConfigError("evaluate needs --out (or output in the config)");
    if (protocol_name != "cmc" && protocol_name != "split")
        throw ConfigError("unknown protocol \"" + protocol_name + "\" (expected cmc or split)");

    const Corpus corpus = load_with_adapter(corpus_dir, adapter);
    std::vector<std::string> gallery_names = config.galleries;
    if (gallery_names.empty()) {
        for (const auto& [method, entries] : corpus.synthesized) gallery_names.push_back(method);
        gallery_names.push_back("photos");
    }

    EvalReport report;
    if (protocol_name == "cmc") {
        std::vector<std::string> probe_ids_list = corpus.test_ids;
        if (probe_ids_list.empty())
            for (const auto& e : corpus.photos) probe_ids_list.push_back(e.id);
        const std::set<std::string> probe_ids(probe_ids_list.begin(), probe_ids_list.end());
        std::vector<GalleryEntry> probes;
        for (const auto& e : corpus.sketches)
            if (probe_ids.count(e.id)) probes.push_back(e);

        std::vector<std::pair<std::string, Gallery>> galleries;
        for (const auto& name : gallery_names)
            galleries.emplace_back(name,
                                   restrict_gallery(named_gallery(corpus, name), probe_ids));
        report = compare_methods(galleries, probes, config.metrics, config.metric_params,
                                 config.threads);
    } else {
        SplitProtocol protocol = config.protocol;
        protocol.seed = config.seed;
        SplitMethods methods;
        methods.eigenface = true;
        methods.retain = config.eigenface_retain;
        methods.sweep = config.eigenface_sweep;
        methods.kinds = config.metrics;
        for (const auto& name : gallery_names) {
            const Gallery gallery = named_gallery(corpus, name);
            EvalReport partial = repeated_split_eval(gallery.entries, corpus.sketches, protocol,
                                                     methods, config.metric_params,
                                                     config.threads);
            for (auto& entry : partial.splits) {
                entry.method = name;
                report.splits.push_back(std::move(entry));
            }
        }
    }
    report.seed = config.seed;
    // The hash fingerprints result-determining parameters; where the report is
    // written and how many threads computed it are not among them.
    nlohmann::json hashed = run_config_to_json(config);
    hashed.erase("output");
    hashed.erase("threads");
    report.params_hash = params_hash_fnv1a(hashed);

    std::string ext = std::filesystem::path(config.output).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    export_report(report, ext == ".csv" ? ReportFormat::CSV : ReportFormat::JSON, config.output);
    std::printf("wrote %s\n", config.output.c_str());
    return 0;
}

int run_gen_testdata(const CommonOpts& opts, const std::string& out_dir, int identities, int size,
                     int train_count) {
    const RunConfig config = resolve_config(opts);
    if (train_count < 0) train_count = identities / 2;
    if (train_count >= identities)
        throw ConfigError("train-count must be smaller than identities");
    Corpus corpus = make_synthetic_corpus(identities, size, config.seed);
    for (int i = 0; i < static_cast<int>(corpus.photos.size()); ++i) {
        if (i < train_count)
            corpus.train_ids.push_back(corpus.photos[static_cast<std::size_t>(i)].id);
        else
            corpus.test_ids.push_back(corpus.photos[static_cast<std::size_t>(i)].id);
    }
    if (train_count == 0) corpus.test_ids.clear();
    write_corpus(corpus, out_dir);
    std::printf("wrote %d identities (%dx%d) to %s\n", identities, size, size, out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IQA-based face sketch recognition toolkit"};
    app.require_subcommand(1);

    CommonOpts metric_opts;
    std::string metric_kind, metric_ref, metric_dist;
    CLI::App* metric_cmd = app.add_subcommand("metric", "score one reference/distorted pair");
    metric_cmd->add_option("--kind", metric_kind, "ssim | vif | fsim | gmsd")->required();
    metric_cmd->add_option("--ref", metric_ref, "reference image")->required();
    metric_cmd->add_option("--dist", metric_dist, "distorted image")->required();
    add_common(metric_cmd, metric_opts);

    CommonOpts synth_opts;
    std::string synth_corpus, synth_out, synth_params, synth_adapter;
    CLI::App* synth_cmd = app.add_subcommand("synthesize", "synthesize sketches for every photo");
    synth_cmd->add_option("--corpus", synth_corpus, "corpus directory")->required();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--params", synth_params, "synthesis params as inline JSON");
    synth_cmd->add_option("--adapter", synth_adapter, "alternate corpus layout (flat)");
    add_common(synth_cmd, synth_opts);

    CommonOpts match_opts;
    std::string match_corpus, match_gallery, match_metric, match_probe_path, match_adapter;
    CLI::App* match_cmd = app.add_subcommand("match", "rank a gallery against one probe");
    match_cmd->add_option("--corpus", match_corpus, "corpus directory")->required();
    match_cmd->add_option("--gallery", match_gallery, "photos or a synth method name")->required();
    match_cmd->add_option("--metric", match_metric, "ssim | vif | fsim | gmsd")->required();
    match_cmd->add_option("--probe", match_probe_path, "probe sketch file")->required();
    match_cmd->add_option("--adapter", match_adapter, "alternate corpus layout (flat)");
    add_common(match_cmd, match_opts);

    CommonOpts eval_opts;
    std::string eval_corpus, eval_galleries, eval_metrics, eval_out, eval_adapter;
    std::string eval_protocol = "cmc";
    int eval_train_count = 0, eval_repeats = 0;
    double eval_retain = 0.0;
    bool eval_sweep = false;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "CMC or split-protocol evaluation");
    eval_cmd->add_option("--corpus", eval_corpus, "corpus directory")->required();
    eval_cmd->add_option("--galleries", eval_galleries, "comma-separated gallery names");
    eval_cmd->add_option("--metrics", eval_metrics, "comma-separated metric names");
    eval_cmd->add_option("--out", eval_out, "output file (.csv or .json)");
    eval_cmd->add_option("--protocol", eval_protocol, "cmc (default) or split");
    eval_cmd->add_option("--train-count", eval_train_count, "split protocol training draw");
    eval_cmd->add_option("--repeats", eval_repeats, "split protocol repeats");
    eval_cmd->add_option("--retain", eval_retain, "eigenface retained variance fraction");
    eval_cmd->add_flag("--sweep", eval_sweep, "also report best eigenface dim");
    eval_cmd->add_option("--adapter", eval_adapter, "alternate corpus layout (flat)");
    add_common(eval_cmd, eval_opts);

    CommonOpts gen_opts;
    std::string gen_out;
    int gen_identities = 60, gen_size = 64, gen_train_count = -1;
    CLI::App* gen_cmd = app.add_subcommand("gen-testdata", "write a seeded synthetic corpus");
    gen_cmd->add_option("--out", gen_out, "corpus directory to create")->required();
    gen_cmd->add_option("--identities", gen_identities, "identity count (default 60)");
    gen_cmd->add_option("--size", gen_size, "square image size (default 64)");
    gen_cmd->add_option("--train-count", gen_train_count,
                        "ids listed in splits/train.txt (default half)");
    add_common(gen_cmd, gen_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (metric_cmd->parsed())
            return run_metric(metric_opts, metric_kind, metric_ref, metric_dist);
        if (synth_cmd->parsed())
            return run_synthesize(synth_opts, synth_corpus, synth_out, synth_params,
                                  synth_adapter);
        if (match_cmd->parsed())
            return run_match(match_opts, match_corpus, match_gallery, match_metric,
                             match_probe_path, match_adapter);
        if (eval_cmd->parsed())
            return run_evaluate(eval_opts, eval_corpus, eval_galleries, eval_metrics, eval_out,
                                eval_protocol, eval_train_count, eval_repeats, eval_retain,
                                eval_sweep, eval_adapter);
        if (gen_cmd->parsed())
            return run_gen_testdata(gen_opts, gen_out, gen_identities, gen_size, gen_train_count);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
