#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sketchiq/image.hpp"
#include "sketchiq/recognition.hpp"

namespace sketchiq {

struct TrainingPair {
    GrayImage photo;
    GrayImage sketch;
    std::string id;
};

struct SynthesisParams {
    int patch_size = 8;
    int overlap = 4;
    int k = 5;
    int search_radius = 5;
    double lambda = 1e-4;
};

void validate_synthesis_params(const SynthesisParams& p);

// Nonempty, photo/sketch dimensions equal per pair and uniform across pairs,
// ids nonempty and unique.
void validate_training(const std::vector<TrainingPair>& training);

// Anchors at multiples of stride = patch_size - overlap; the final anchor is
// clamped so the last patch ends exactly at the border.
struct PatchGrid {
    int patch_size = 0;
    int stride = 0;
    std::vector<int> row_anchors;
    std::vector<int> col_anchors;
};

PatchGrid build_grid(int rows, int cols, const SynthesisParams& p);

// Row-major copy of the patch_size x patch_size window anchored at (row, col).
std::vector<double> extract_patch(const GrayImage& img, int row, int col, int patch_size);

struct Neighbor {
    int pair_index = 0;
    int row = 0;
    int col = 0;
    double distance = 0.0;
};

// K training photo patches nearest to test_patch, drawn from all patches whose
// anchor lies within search_radius (Chebyshev) of (row, col). Ties break by
// (pair_index, row, col) ascending; fewer than K candidates returns them all.
std::vector<Neighbor> find_neighbors(const std::vector<double>& test_patch, int row, int col,
                                     const std::vector<TrainingPair>& training,
                                     const SynthesisParams& p);

// Solves min_w ||test - sum w_i n_i||^2 subject to sum w_i = 1 through the
// local Gram system (G + lambda*trace(G)/K * I) w = 1, then normalizes.
std::vector<double> lle_weights(const std::vector<double>& test_patch,
                                const std::vector<std::vector<double>>& neighbors, double lambda);

// Per grid patch: neighbors -> weights -> weighted sum of the neighbors'
// sketch patches; overlaps resolved by accumulate / coverage-count averaging;
// output clamped to [0, 255].
GrayImage synthesize_sketch(const GrayImage& photo, const std::vector<TrainingPair>& training,
                            const SynthesisParams& p, int threads = 1);

// One synthesized sketch per input photo, labels and order preserved.
Gallery build_gallery(const std::vector<GalleryEntry>& photos,
                      const std::vector<TrainingPair>& training, const SynthesisParams& p,
                      int threads = 1);

nlohmann::json synthesis_params_to_json(const SynthesisParams& p);
SynthesisParams synthesis_params_from_json(const nlohmann::json& j);

}  // namespace sketchiq
