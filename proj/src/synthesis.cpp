#include "sketchiq/synthesis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "sketchiq/errors.hpp"
#include "sketchiq/parallel.hpp"

namespace sketchiq {

namespace {

void check_json_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("synthesis params must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key \"" + item.key() + "\" in synthesis params");
    }
}

std::vector<int> axis_anchors(int dim, int patch, int stride) {
    std::vector<int> anchors;
    for (int a = 0; a + patch <= dim; a += stride) anchors.push_back(a);
    if (anchors.back() + patch < dim) anchors.push_back(dim - patch);
    return anchors;
}

}  // namespace

void validate_synthesis_params(const SynthesisParams& p) {
    if (p.patch_size < 1) throw ParamError("patch_size must be positive");
    if (p.overlap < 0 || p.overlap >= p.patch_size)
        throw ParamError("overlap must be in [0, patch_size)");
    if (p.k < 1) throw ParamError("K must be >= 1");
    if (p.search_radius < 0) throw ParamError("search_radius must be nonnegative");
    if (!(p.lambda >= 0.0)) throw ParamError("lambda must be nonnegative");
}

void validate_training(const std::vector<TrainingPair>& training) {
    if (training.empty()) throw ConfigError("training set is empty");
    std::set<std::string> seen;
    for (const auto& pair : training) {
        if (pair.id.empty()) throw DataError("training pair with empty id");
        if (!seen.insert(pair.id).second)
            throw DataError("duplicate training id \"" + pair.id + "\"");
        if (!pair.photo.same_shape(pair.sketch))
            throw ShapeError("photo/sketch dimension mismatch for id \"" + pair.id + "\"");
        if (!pair.photo.same_shape(training.front().photo))
            throw ShapeError("training pair \"" + pair.id + "\" has mismatched dimensions");
    }
}

PatchGrid build_grid(int rows, int cols, const SynthesisParams& p) {
    validate_synthesis_params(p);
    if (rows < p.patch_size || cols < p.patch_size)
        throw SizeError("image smaller than patch size " + std::to_string(p.patch_size));
    PatchGrid grid;
    grid.patch_size = p.patch_size;
    grid.stride = p.patch_size - p.overlap;
    grid.row_anchors = axis_anchors(rows, p.patch_size, grid.stride);
    grid.col_anchors = axis_anchors(cols, p.patch_size, grid.stride);
    return grid;
}

std::vector<double> extract_patch(const GrayImage& img, int row, int col, int patch_size) {
    if (row < 0 || col < 0 || row + patch_size > img.rows() || col + patch_size > img.cols())
        throw ShapeError("patch anchor out of bounds");
    std::vector<double> patch(static_cast<std::size_t>(patch_size) * patch_size);
    for (int r = 0; r < patch_size; ++r)
        for (int c = 0; c < patch_size; ++c)
            patch[static_cast<std::size_t>(r) * patch_size + c] = img.at(row + r, col + c);
    return patch;
}

std::vector<Neighbor> find_neighbors(const std::vector<double>& test_patch, int row, int col,
                                     const std::vector<TrainingPair>& training,
                                     const SynthesisParams& p) {
    validate_synthesis_params(p);
    if (training.empty()) throw ConfigError("training set is empty");
    const int patch = p.patch_size;
    if (test_patch.size() != static_cast<std::size_t>(patch) * patch)
        throw ShapeError("test patch length does not match patch_size^2");

    struct Candidate {
        double dist2;
        int pair_index;
        int row;
        int col;
    };
    std::vector<Candidate> candidates;
    for (int idx = 0; idx < static_cast<int>(training.size()); ++idx) {
        const GrayImage& photo = training[idx].photo;
        if (photo.rows() < patch || photo.cols() < patch)
            throw SizeError("training photo smaller than patch size");
        const int r_lo = std::max(0, row - p.search_radius);
        const int r_hi = std::min(photo.rows() - patch, row + p.search_radius);
        const int c_lo = std::max(0, col - p.search_radius);
        const int c_hi = std::min(photo.cols() - patch, col + p.search_radius);
        for (int r = r_lo; r <= r_hi; ++r) {
            for (int c = c_lo; c <= c_hi; ++c) {
                double d2 = 0.0;
                for (int pr = 0; pr < patch; ++pr) {
                    for (int pc = 0; pc < patch; ++pc) {
                        const double diff =
                            test_patch[static_cast<std::size_t>(pr) * patch + pc] -
                            photo.at(r + pr, c + pc);
                        d2 += diff * diff;
                    }
                }
                candidates.push_back({d2, idx, r, c});
            }
        }
    }
    if (candidates.empty()) throw ConfigError("no candidate patches within search radius");

    const std::size_t keep = std::min<std::size_t>(p.k, candidates.size());
    const auto before = [](const Candidate& a, const Candidate& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        if (a.pair_index != b.pair_index) return a.pair_index < b.pair_index;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), before);

    std::vector<Neighbor> result(keep);
    for (std::size_t i = 0; i < keep; ++i)
        result[i] = {candidates[i].pair_index, candidates[i].row, candidates[i].col,
                     std::sqrt(candidates[i].dist2)};
    return result;
}

std::vector<double> lle_weights(const std::vector<double>& test_patch,
                                const std::vector<std::vector<double>>& neighbors, double lambda) {
    if (neighbors.empty()) throw ParamError("lle_weights requires at least one neighbor");
    if (!(lambda >= 0.0)) throw ParamError("lambda must be nonnegative");
    const int k = static_cast<int>(neighbors.size());
    const int d = static_cast<int>(test_patch.size());
    for (const auto& n : neighbors)
        if (static_cast<int>(n.size()) != d)
            throw ShapeError("neighbor length does not match test patch");

    Eigen::MatrixXd diff(d, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < d; ++i) diff(i, j) = neighbors[j][i] - test_patch[i];
    const Eigen::MatrixXd gram = diff.transpose() * diff;

    const double trace = gram.trace();
    std::vector<double> weights(static_cast<std::size_t>(k));
    if (trace == 0.0) {
        // Every neighbor coincides with the test patch; any affine combination
        // is exact, so the uniform one is returned.
        std::fill(weights.begin(), weights.end(), 1.0 / k);
        return weights;
    }

    Eigen::MatrixXd system = gram;
    system.diagonal().array() += lambda * trace / k;
    const Eigen::VectorXd w = system.ldlt().solve(Eigen::VectorXd::Ones(k));
    const double sum = w.sum();
    if (!std::isfinite(sum) ||
        std::abs(sum) < 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()))
        throw NumericError("singular local Gram system; use lambda > 0");
    for (int j = 0; j < k; ++j) weights[j] = w(j) / sum;
    return weights;
}

GrayImage synthesize_sketch(const GrayImage& photo, const std::vector<TrainingPair>& training,
                            const SynthesisParams& p, int threads) {
    validate_synthesis_params(p);
    validate_training(training);
    if (!photo.same_shape(training.front().photo))
        throw ShapeError("photo dimensions do not match the training set");

    const PatchGrid grid = build_grid(photo.rows(), photo.cols(), p);
    const int patch = p.patch_size;
    std::vector<std::pair<int, int>> anchors;
    for (int r : grid.row_anchors)
        for (int c : grid.col_anchors) anchors.emplace_back(r, c);

    // Patch targets land in per-patch slots; the overlap sum below runs in
    // grid order so the result is identical for every thread count.
    std::vector<std::vector<double>> targets(anchors.size());
    parallel_for(static_cast<int>(anchors.size()), threads, [&](int i) {
        const auto [r, c] = anchors[static_cast<std::size_t>(i)];
        const std::vector<double> test = extract_patch(photo, r, c, patch);
        const std::vector<Neighbor> nbs = find_neighbors(test, r, c, training, p);
        std::vector<std::vector<double>> nb_patches(nbs.size());
        for (std::size_t j = 0; j < nbs.size(); ++j)
            nb_patches[j] =
                extract_patch(training[nbs[j].pair_index].photo, nbs[j].row, nbs[j].col, patch);
        const std::vector<double> w = lle_weights(test, nb_patches, p.lambda);
        std::vector<double> target(static_cast<std::size_t>(patch) * patch, 0.0);
        for (std::size_t j = 0; j < nbs.size(); ++j) {
            const std::vector<double> sk =
                extract_patch(training[nbs[j].pair_index].sketch, nbs[j].row, nbs[j].col, patch);
            for (std::size_t t = 0; t < target.size(); ++t) target[t] += w[j] * sk[t];
        }
        targets[static_cast<std::size_t>(i)] = std::move(target);
    });

    std::vector<double> acc(photo.size(), 0.0);
    std::vector<double> count(photo.size(), 0.0);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const auto [r, c] = anchors[i];
        for (int pr = 0; pr < patch; ++pr) {
            for (int pc = 0; pc < patch; ++pc) {
                const std::size_t at = static_cast<std::size_t>(r + pr) * photo.cols() + (c + pc);
                acc[at] += targets[i][static_cast<std::size_t>(pr) * patch + pc];
                count[at] += 1.0;
            }
        }
    }
    std::vector<double> out(photo.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(acc[i] / count[i], 0.0, 255.0);
    return GrayImage::from_data(photo.rows(), photo.cols(), std::move(out));
}

Gallery build_gallery(const std::vector<GalleryEntry>& photos,
                      const std::vector<TrainingPair>& training, const SynthesisParams& p,
                      int threads) {
    Gallery gallery;
    gallery.kind = GalleryKind::SynthesizedSketches;
    if (photos.empty()) return gallery;
    std::set<std::string> seen;
    for (const auto& entry : photos)
        if (!seen.insert(entry.id).second)
            throw DataError("duplicate gallery id \"" + entry.id + "\"");

    std::vector<GrayImage> synthesized(photos.size());
    parallel_for(static_cast<int>(photos.size()), threads, [&](int i) {
        synthesized[static_cast<std::size_t>(i)] =
            synthesize_sketch(photos[static_cast<std::size_t>(i)].image, training, p, 1);
    });
    gallery.entries.reserve(photos.size());
    for (std::size_t i = 0; i < photos.size(); ++i)
        gallery.entries.push_back({photos[i].id, std::move(synthesized[i])});
    return gallery;
}

nlohmann::json synthesis_params_to_json(const SynthesisParams& p) {
    return nlohmann::json{{"patch_size", p.patch_size},
                          {"overlap", p.overlap},
                          {"k", p.k},
                          {"search_radius", p.search_radius},
                          {"lambda", p.lambda}};
}

SynthesisParams synthesis_params_from_json(const nlohmann::json& j) {
    SynthesisParams p;
    check_json_keys(j, {"patch_size", "overlap", "k", "search_radius", "lambda"});
    if (j.contains("patch_size")) p.patch_size = j.at("patch_size").get<int>();
    if (j.contains("overlap")) p.overlap = j.at("overlap").get<int>();
    if (j.contains("k")) p.k = j.at("k").get<int>();
    if (j.contains("search_radius")) p.search_radius = j.at("search_radius").get<int>();
    if (j.contains("lambda")) p.lambda = j.at("lambda").get<double>();
    validate_synthesis_params(p);
    return p;
}

}  // namespace sketchiq
