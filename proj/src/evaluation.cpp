#include "sketchiq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "sketchiq/errors.hpp"
#include "sketchiq/image_io.hpp"
#include "sketchiq/parallel.hpp"
#include "sketchiq/random.hpp"

namespace sketchiq {

namespace {

constexpr int kSweepStep = 5;

std::vector<GalleryEntry> sorted_by_id(std::vector<GalleryEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const GalleryEntry& a, const GalleryEntry& b) { return a.id < b.id; });
    return entries;
}

void check_probe_ids(const std::vector<GalleryEntry>& probes, const Gallery& gallery) {
    std::set<std::string> ids;
    for (const auto& e : gallery.entries) ids.insert(e.id);
    for (const auto& probe : probes)
        if (!ids.count(probe.id))
            throw DataError("probe id \"" + probe.id + "\" missing from the gallery");
}

CMCCurve curve_for_method(const std::vector<GalleryEntry>& probes, const Gallery& gallery,
                          const std::function<MatchResult(const GalleryEntry&)>& matcher,
                          int threads) {
    std::vector<MatchResult> results(probes.size());
    parallel_for(static_cast<int>(probes.size()), threads,
                 [&](int i) { results[static_cast<std::size_t>(i)] =
                                  matcher(probes[static_cast<std::size_t>(i)]); });
    std::map<std::string, std::string> truth;
    for (const auto& probe : probes) truth[probe.id] = probe.id;
    (void)gallery;
    return cmc(results, truth);
}

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double vec_mean(const std::vector<double>& values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

}  // namespace

void validate_cmc(const CMCCurve& curve) {
    if (curve.accuracies.empty()) throw DataError("empty CMC curve");
    if (curve.probe_count < 1) throw DataError("CMC curve with nonpositive probe count");
    for (std::size_t i = 0; i < curve.accuracies.size(); ++i) {
        const double a = curve.accuracies[i];
        if (a < 0.0 || a > 1.0) throw DataError("CMC accuracy outside [0, 1]");
        if (i > 0 && a < curve.accuracies[i - 1]) throw DataError("CMC curve decreases");
    }
    if (curve.accuracies.back() != 1.0) throw DataError("CMC curve does not end at 1.0");
}

CMCCurve cmc(const std::vector<MatchResult>& results,
             const std::map<std::string, std::string>& truth) {
    if (results.empty()) throw ConfigError("cmc requires at least one match result");
    const std::size_t gallery_size = results.front().ranking.size();
    std::vector<int> counts(gallery_size, 0);
    for (const auto& result : results) {
        if (result.ranking.size() != gallery_size)
            throw DataError("match results have mixed ranking lengths");
        const auto it = truth.find(result.probe_id);
        if (it == truth.end())
            throw DataError("no truth entry for probe \"" + result.probe_id + "\"");
        std::size_t rank = gallery_size;
        for (std::size_t k = 0; k < gallery_size; ++k) {
            if (result.ranking[k].id == it->second) {
                rank = k;
                break;
            }
        }
        if (rank == gallery_size)
            throw DataError("truth id \"" + it->second + "\" absent from the ranking of \"" +
                            result.probe_id + "\"");
        counts[rank] += 1;
    }
    CMCCurve curve;
    curve.probe_count = static_cast<int>(results.size());
    curve.accuracies.resize(gallery_size);
    int cumulative = 0;
    for (std::size_t k = 0; k < gallery_size; ++k) {
        cumulative += counts[k];
        curve.accuracies[k] = static_cast<double>(cumulative) / curve.probe_count;
    }
    return curve;
}

EvalReport evaluate_framework(const std::vector<GalleryEntry>& probes, const Gallery& gallery,
                              const std::vector<MetricKind>& kinds, const MetricParams& p,
                              int threads) {
    if (probes.empty()) throw ConfigError("no probes given");
    validate_gallery(gallery);
    validate_metric_params(p);
    check_probe_ids(probes, gallery);

    EvalReport report;
    report.params_hash = params_hash_fnv1a(nlohmann::json{
        {"metric_params", metric_params_to_json(p)},
        {"metrics", [&] {
             std::vector<std::string> names;
             for (MetricKind k : kinds) names.push_back(metric_name(k));
             return names;
         }()}});
    for (MetricKind kind : kinds) {
        CMCCurve curve = curve_for_method(
            probes, gallery,
            [&](const GalleryEntry& probe) {
                return match_probe(probe.image, gallery, kind, p, probe.id, 1);
            },
            threads);
        report.curves.push_back({"gallery", metric_name(kind), std::move(curve)});
    }
    CMCCurve knn_curve = curve_for_method(
        probes, gallery,
        [&](const GalleryEntry& probe) { return knn_direct(probe.image, gallery, probe.id); },
        threads);
    report.curves.push_back({"gallery", "knn", std::move(knn_curve)});
    return report;
}

EvalReport repeated_split_eval(const std::vector<GalleryEntry>& synth,
                               const std::vector<GalleryEntry>& drawn,
                               const SplitProtocol& protocol, const SplitMethods& methods,
                               const MetricParams& p, int threads) {
    const std::vector<GalleryEntry> gallery_set = sorted_by_id(synth);
    const std::vector<GalleryEntry> probe_set = sorted_by_id(drawn);
    if (gallery_set.size() != probe_set.size())
        throw DataError("synthesized and drawn sets differ in size");
    for (std::size_t i = 0; i < gallery_set.size(); ++i)
        if (gallery_set[i].id != probe_set[i].id)
            throw DataError("label mismatch between synthesized and drawn sets at \"" +
                            gallery_set[i].id + "\" vs \"" + probe_set[i].id + "\"");
    const int m = static_cast<int>(gallery_set.size());
    if (protocol.train_count < 1) throw ParamError("train_count must be positive");
    if (protocol.repeats < 1) throw ParamError("repeats must be positive");
    if (protocol.train_count >= m)
        throw ConfigError("train_count must be smaller than the identity count");
    validate_metric_params(p);
    for (std::size_t i = 0; i < gallery_set.size(); ++i) {
        if (!gallery_set[i].image.same_shape(gallery_set.front().image) ||
            !probe_set[i].image.same_shape(gallery_set.front().image))
            throw ShapeError("split evaluation requires uniform image dimensions");
    }

    // One score matrix per metric over all (drawn probe, synth gallery) pairs;
    // every repeat reads from it, so each pair is scored exactly once.
    std::vector<std::vector<double>> score(methods.kinds.size());
    for (std::size_t ki = 0; ki < methods.kinds.size(); ++ki) {
        score[ki].resize(static_cast<std::size_t>(m) * m);
        const MetricKind kind = methods.kinds[ki];
        parallel_for(m * m, threads, [&](int cell) {
            const int i = cell / m;
            const int j = cell % m;
            score[ki][static_cast<std::size_t>(cell)] =
                compute_metric(kind, probe_set[static_cast<std::size_t>(i)].image,
                               gallery_set[static_cast<std::size_t>(j)].image, p)
                    .value;
        });
    }

    struct RepeatOutcome {
        double eigenface = 0.0;
        std::vector<double> sweep;      // rank-1 accuracy for dim = index + 1
        std::vector<double> per_kind;
    };
    std::vector<RepeatOutcome> outcomes(static_cast<std::size_t>(protocol.repeats));

    for (int rep = 0; rep < protocol.repeats; ++rep) {
        std::mt19937_64 rng(protocol.seed + static_cast<std::uint64_t>(rep));
        const std::vector<int> perm = shuffled_indices(m, rng);
        std::vector<int> test(perm.begin() + protocol.train_count, perm.end());
        std::sort(test.begin(), test.end());
        std::vector<int> train(perm.begin(), perm.begin() + protocol.train_count);
        std::sort(train.begin(), train.end());

        RepeatOutcome& out = outcomes[static_cast<std::size_t>(rep)];
        out.per_kind.resize(methods.kinds.size(), 0.0);

        for (std::size_t ki = 0; ki < methods.kinds.size(); ++ki) {
            const bool ascending = metric_polarity(methods.kinds[ki]) == Polarity::Distortion;
            int correct = 0;
            for (int i : test) {
                int best = -1;
                double best_value = 0.0;
                for (int j : test) {
                    const double v = score[ki][static_cast<std::size_t>(i) * m + j];
                    if (best < 0 || (ascending ? v < best_value : v > best_value)) {
                        best = j;
                        best_value = v;
                    }
                }
                if (best == i) ++correct;
            }
            out.per_kind[ki] = static_cast<double>(correct) / static_cast<double>(test.size());
        }

        if (methods.eigenface || methods.sweep) {
            std::vector<GrayImage> train_images;
            train_images.reserve(2 * train.size());
            for (int idx : train) {
                train_images.push_back(gallery_set[static_cast<std::size_t>(idx)].image);
                train_images.push_back(probe_set[static_cast<std::size_t>(idx)].image);
            }
            const EigenfaceModel model = eigenface_train(train_images, methods.retain);
            const int basis_size = static_cast<int>(model.basis.size());
            const int d = model.rows * model.cols;

            // Coefficients on the full basis; rank-1 per dim then follows from
            // prefix distances.
            auto project_full = [&](const GrayImage& img) {
                std::vector<double> coeff(static_cast<std::size_t>(basis_size));
                for (int k = 0; k < basis_size; ++k) {
                    double acc = 0.0;
                    const auto& b = model.basis[static_cast<std::size_t>(k)];
                    for (int t = 0; t < d; ++t)
                        acc += b[static_cast<std::size_t>(t)] *
                               (img.data()[t] - model.mean[static_cast<std::size_t>(t)]);
                    coeff[static_cast<std::size_t>(k)] = acc;
                }
                return coeff;
            };
            std::vector<std::vector<double>> probe_coeff(test.size()), gallery_coeff(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                probe_coeff[i] = project_full(probe_set[static_cast<std::size_t>(test[i])].image);
                gallery_coeff[i] =
                    project_full(gallery_set[static_cast<std::size_t>(test[i])].image);
            }

            std::vector<int> correct_at_dim(static_cast<std::size_t>(basis_size), 0);
            for (std::size_t i = 0; i < test.size(); ++i) {
                std::vector<double> d2(test.size(), 0.0);
                for (int k = 0; k < basis_size; ++k) {
                    int best = 0;
                    for (std::size_t j = 0; j < test.size(); ++j) {
                        const double diff = probe_coeff[i][static_cast<std::size_t>(k)] -
                                            gallery_coeff[j][static_cast<std::size_t>(k)];
                        d2[j] += diff * diff;
                        if (d2[j] < d2[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
                    }
                    if (best == static_cast<int>(i)) ++correct_at_dim[static_cast<std::size_t>(k)];
                }
            }
            out.sweep.resize(static_cast<std::size_t>(basis_size));
            for (int k = 0; k < basis_size; ++k)
                out.sweep[static_cast<std::size_t>(k)] =
                    static_cast<double>(correct_at_dim[static_cast<std::size_t>(k)]) /
                    static_cast<double>(test.size());
            const int used_dim = std::min(model.dim, basis_size);
            out.eigenface = out.sweep[static_cast<std::size_t>(used_dim - 1)];
        }
    }

    EvalReport report;
    report.seed = protocol.seed;
    report.params_hash = params_hash_fnv1a(nlohmann::json{
        {"metric_params", metric_params_to_json(p)},
        {"protocol",
         {{"train_count", protocol.train_count}, {"repeats", protocol.repeats}}},
        {"methods",
         {{"eigenface", methods.eigenface},
          {"retain", methods.retain},
          {"sweep", methods.sweep},
          {"metrics", [&] {
               std::vector<std::string> names;
               for (MetricKind k : methods.kinds) names.push_back(metric_name(k));
               return names;
           }()}}}});

    if (methods.eigenface) {
        std::vector<double> accs;
        for (const auto& out : outcomes) accs.push_back(out.eigenface);
        const double mean_acc = vec_mean(accs);
        report.splits.push_back(
            {"gallery", "eigenface", mean_acc, sample_std(accs, mean_acc), protocol.repeats});
    }
    if (methods.sweep) {
        int min_basis = 0;
        for (const auto& out : outcomes) {
            const int b = static_cast<int>(out.sweep.size());
            min_basis = min_basis == 0 ? b : std::min(min_basis, b);
        }
        std::vector<int> dims;
        for (int k = kSweepStep; k < min_basis; k += kSweepStep) dims.push_back(k);
        dims.push_back(min_basis);
        int best_dim = dims.front();
        double best_mean = -1.0;
        std::vector<double> best_accs;
        for (int dim : dims) {
            std::vector<double> accs;
            for (const auto& out : outcomes)
                accs.push_back(out.sweep[static_cast<std::size_t>(dim - 1)]);
            const double mean_acc = vec_mean(accs);
            if (mean_acc > best_mean) {
                best_mean = mean_acc;
                best_dim = dim;
                best_accs = std::move(accs);
            }
        }
        (void)best_dim;
        report.splits.push_back({"gallery", "eigenface-best", best_mean,
                                 sample_std(best_accs, best_mean), protocol.repeats});
    }
    for (std::size_t ki = 0; ki < methods.kinds.size(); ++ki) {
        std::vector<double> accs;
        for (const auto& out : outcomes) accs.push_back(out.per_kind[ki]);
        const double mean_acc = vec_mean(accs);
        report.splits.push_back({"gallery", metric_name(methods.kinds[ki]), mean_acc,
                                 sample_std(accs, mean_acc), protocol.repeats});
    }
    return report;
}

EvalReport compare_methods(const std::vector<std::pair<std::string, Gallery>>& galleries,
                           const std::vector<GalleryEntry>& probes,
                           const std::vector<MetricKind>& kinds, const MetricParams& p,
                           int threads) {
    if (galleries.empty()) throw ConfigError("no galleries given");
    EvalReport report;
    for (const auto& [name, gallery] : galleries) {
        EvalReport partial = evaluate_framework(probes, gallery, kinds, p, threads);
        report.params_hash = partial.params_hash;
        for (auto& entry : partial.curves) {
            entry.method = name;
            report.curves.push_back(std::move(entry));
        }
    }
    return report;
}

namespace {

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& entry : report.curves) {
        curves.push_back({{"method", entry.method},
                          {"metric", entry.metric},
                          {"probe_count", entry.curve.probe_count},
                          {"accuracies", entry.curve.accuracies}});
    }
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& entry : report.splits) {
        splits.push_back({{"method", entry.method},
                          {"metric", entry.metric},
                          {"mean_rank1", entry.mean_rank1},
                          {"std_rank1", entry.std_rank1},
                          {"repeats", entry.repeats}});
    }
    return nlohmann::json{{"seed", report.seed},
                          {"params_hash", report.params_hash},
                          {"curves", curves},
                          {"splits", splits}};
}

}  // namespace

void export_report(const EvalReport& report, ReportFormat format,
                   const std::filesystem::path& path) {
    for (const auto& entry : report.curves) validate_cmc(entry.curve);
    if (format == ReportFormat::CSV) {
        std::ostringstream out;
        out << "method,metric,rank,accuracy\n";
        char buf[32];
        for (const auto& entry : report.curves) {
            for (std::size_t k = 0; k < entry.curve.accuracies.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%.6f", entry.curve.accuracies[k]);
                out << entry.method << ',' << entry.metric << ',' << (k + 1) << ',' << buf
                    << '\n';
            }
        }
        write_file_atomic(path, out.str());
        return;
    }
    write_file_atomic(path, report_to_json(report).dump(2) + "\n");
}

EvalReport import_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid report JSON in " + path.string() + ": " + e.what());
    }
    EvalReport report;
    try {
        report.seed = j.at("seed").get<std::uint64_t>();
        report.params_hash = j.at("params_hash").get<std::string>();
        for (const auto& entry : j.at("curves")) {
            CurveEntry curve;
            curve.method = entry.at("method").get<std::string>();
            curve.metric = entry.at("metric").get<std::string>();
            curve.curve.probe_count = entry.at("probe_count").get<int>();
            curve.curve.accuracies = entry.at("accuracies").get<std::vector<double>>();
            report.curves.push_back(std::move(curve));
        }
        for (const auto& entry : j.at("splits")) {
            SplitEntry split;
            split.method = entry.at("method").get<std::string>();
            split.metric = entry.at("metric").get<std::string>();
            split.mean_rank1 = entry.at("mean_rank1").get<double>();
            split.std_rank1 = entry.at("std_rank1").get<double>();
            split.repeats = entry.at("repeats").get<int>();
            report.splits.push_back(std::move(split));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed report in " + path.string() + ": " + e.what());
    }
    for (const auto& entry : report.curves) validate_cmc(entry.curve);
    return report;
}

std::string params_hash_fnv1a(const nlohmann::json& params) {
    const std::string text = params.dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace sketchiq
