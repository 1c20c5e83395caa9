#pragma once

#include <string>
#include <vector>

#include "sketchiq/image.hpp"
#include "sketchiq/metrics.hpp"

namespace sketchiq {

// Distinguishes the mug-shot photo gallery (direct-matching protocols) from a
// synthesized-sketch gallery (the IQA framework protocol).
enum class GalleryKind { Photos, SynthesizedSketches };

struct GalleryEntry {
    std::string id;
    GrayImage image;
};

struct Gallery {
    std::vector<GalleryEntry> entries;
    GalleryKind kind = GalleryKind::SynthesizedSketches;
};

// Unique ids, uniform dimensions. Throws DataError / ShapeError.
void validate_gallery(const Gallery& gallery);

struct RankedEntry {
    std::string id;
    double score = 0.0;
};

// ranking is a permutation of the gallery ids, best first; ties keep gallery
// insertion order. metric is the lowercase metric name or a baseline tag
// ("knn", "eigenface").
struct MatchResult {
    std::string probe_id;
    std::vector<RankedEntry> ranking;
    std::string metric;
};

struct EigenfaceModel {
    int rows = 0;
    int cols = 0;
    std::vector<double> mean;                // rows*cols
    std::vector<std::vector<double>> basis;  // orthonormal, one vector per component
    std::vector<double> eigenvalues;         // nonincreasing, positive
    int dim = 0;                             // components used for matching
};

// Probe is the reference image; every gallery image is scored as the
// distorted one. Ranking is best-first under the metric's polarity.
MatchResult match_probe(const GrayImage& probe, const Gallery& gallery, MetricKind kind,
                        const MetricParams& p = {}, const std::string& probe_id = "",
                        int threads = 1);

// Euclidean distance on raw pixel vectors, ascending.
MatchResult knn_direct(const GrayImage& probe, const Gallery& gallery,
                       const std::string& probe_id = "");

// PCA via the Gram trick: eigen-decompose the N x N inner-product matrix of the
// centered images, back-project, orthonormalize. dim is the smallest count
// whose eigenvalue mass reaches retain * total.
EigenfaceModel eigenface_train(const std::vector<GrayImage>& images, double retain = 0.99);

// Euclidean distance between coefficient vectors on the first model.dim
// components, ascending.
MatchResult eigenface_match(const GrayImage& probe, const Gallery& gallery,
                            const EigenfaceModel& model, const std::string& probe_id = "");

}  // namespace sketchiq
