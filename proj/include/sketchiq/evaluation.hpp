#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sketchiq/metrics.hpp"
#include "sketchiq/recognition.hpp"

namespace sketchiq {

// accuracies[k-1] = fraction of probes whose mate ranks <= k. Nondecreasing,
// length = gallery size, final entry exactly 1.0.
struct CMCCurve {
    std::vector<double> accuracies;
    int probe_count = 0;
};

void validate_cmc(const CMCCurve& curve);

struct CurveEntry {
    std::string method;  // gallery / synthesis-method name
    std::string metric;  // lowercase metric name or baseline tag
    CMCCurve curve;
};

struct SplitEntry {
    std::string method;
    std::string metric;
    double mean_rank1 = 0.0;
    double std_rank1 = 0.0;
    int repeats = 0;
};

struct EvalReport {
    std::vector<CurveEntry> curves;
    std::vector<SplitEntry> splits;
    std::uint64_t seed = 0;
    std::string params_hash;
};

struct SplitProtocol {
    int train_count = 150;
    int repeats = 100;
    std::uint64_t seed = 0;
};

struct SplitMethods {
    bool eigenface = true;
    double retain = 0.99;
    // Adds an "eigenface-best" row: best mean rank-1 over dims {5, 10, ..., full}.
    bool sweep = false;
    std::vector<MetricKind> kinds;
};

enum class ReportFormat { CSV, JSON };

CMCCurve cmc(const std::vector<MatchResult>& results,
             const std::map<std::string, std::string>& truth);

// match_probe per metric kind plus knn_direct against the same gallery; one
// curve per method under method label "gallery".
EvalReport evaluate_framework(const std::vector<GalleryEntry>& probes, const Gallery& gallery,
                              const std::vector<MetricKind>& kinds, const MetricParams& p = {},
                              int threads = 1);

// Per repeat r: seed the generator with protocol.seed + r, draw train_count
// identities, train Eigenface on their pooled synth + drawn images, and score
// rank-1 on the held-out identities (synth = gallery, drawn = probes). IQA
// kinds are scored on the same held-out splits without training.
EvalReport repeated_split_eval(const std::vector<GalleryEntry>& synth,
                               const std::vector<GalleryEntry>& drawn,
                               const SplitProtocol& protocol, const SplitMethods& methods,
                               const MetricParams& p = {}, int threads = 1);

// Full method x metric CMC grid; per gallery identical to evaluate_framework
// with the method label replaced by the gallery's name.
EvalReport compare_methods(const std::vector<std::pair<std::string, Gallery>>& galleries,
                           const std::vector<GalleryEntry>& probes,
                           const std::vector<MetricKind>& kinds, const MetricParams& p = {},
                           int threads = 1);

// CSV: header method,metric,rank,accuracy, one row per (curve, rank), 6
// decimal places. JSON mirrors EvalReport exactly (full double precision) and
// round-trips through import_report.
void export_report(const EvalReport& report, ReportFormat format,
                   const std::filesystem::path& path);
EvalReport import_report(const std::filesystem::path& path);

// 64-bit FNV-1a over the serialized JSON, as hex.
std::string params_hash_fnv1a(const nlohmann::json& params);

}  // namespace sketchiq
