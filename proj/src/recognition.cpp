#include "sketchiq/recognition.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sketchiq/errors.hpp"
#include "sketchiq/parallel.hpp"

namespace sketchiq {

namespace {

void check_probe(const GrayImage& probe, const Gallery& gallery) {
    if (gallery.entries.empty()) throw ConfigError("gallery is empty");
    validate_gallery(gallery);
    if (!probe.same_shape(gallery.entries.front().image))
        throw ShapeError("probe dimensions do not match the gallery");
}

// Best-first permutation of entry indices; stable sort keeps gallery
// insertion order on exact ties.
MatchResult rank_entries(const Gallery& gallery, const std::vector<double>& values,
                         bool ascending, const std::string& probe_id, const std::string& tag) {
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ascending ? values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)]
                         : values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    MatchResult result;
    result.probe_id = probe_id;
    result.metric = tag;
    result.ranking.reserve(order.size());
    for (int idx : order)
        result.ranking.push_back({gallery.entries[static_cast<std::size_t>(idx)].id,
                                  values[static_cast<std::size_t>(idx)]});
    return result;
}

}  // namespace

void validate_gallery(const Gallery& gallery) {
    std::set<std::string> seen;
    for (const auto& entry : gallery.entries) {
        if (entry.id.empty()) throw DataError("gallery entry with empty id");
        if (!seen.insert(entry.id).second)
            throw DataError("duplicate gallery id \"" + entry.id + "\"");
        if (!entry.image.same_shape(gallery.entries.front().image))
            throw ShapeError("gallery entry \"" + entry.id + "\" has mismatched dimensions");
    }
}

MatchResult match_probe(const GrayImage& probe, const Gallery& gallery, MetricKind kind,
                        const MetricParams& p, const std::string& probe_id, int threads) {
    check_probe(probe, gallery);
    validate_metric_params(p);
    const int n = static_cast<int>(gallery.entries.size());
    std::vector<double> values(static_cast<std::size_t>(n));
    // Probe is the reference; the candidate sketch plays the distorted image.
    parallel_for(n, threads, [&](int i) {
        values[static_cast<std::size_t>(i)] =
            compute_metric(kind, probe, gallery.entries[static_cast<std::size_t>(i)].image, p)
                .value;
    });
    return rank_entries(gallery, values, metric_polarity(kind) == Polarity::Distortion, probe_id,
                        metric_name(kind));
}

MatchResult knn_direct(const GrayImage& probe, const Gallery& gallery,
                       const std::string& probe_id) {
    check_probe(probe, gallery);
    std::vector<double> values(gallery.entries.size());
    for (std::size_t i = 0; i < gallery.entries.size(); ++i) {
        const GrayImage& img = gallery.entries[i].image;
        double d2 = 0.0;
        for (std::size_t t = 0; t < img.size(); ++t) {
            const double diff = probe.data()[t] - img.data()[t];
            d2 += diff * diff;
        }
        values[i] = std::sqrt(d2);
    }
    return rank_entries(gallery, values, true, probe_id, "knn");
}

EigenfaceModel eigenface_train(const std::vector<GrayImage>& images, double retain) {
    if (images.size() < 2) throw ConfigError("eigenface training needs at least 2 images");
    if (!(retain > 0.0) || retain > 1.0) throw ParamError("retain must be in (0, 1]");
    for (const auto& img : images)
        if (!img.same_shape(images.front()))
            throw ShapeError("eigenface training images have mixed dimensions");

    const int n = static_cast<int>(images.size());
    const int d = static_cast<int>(images.front().size());
    Eigen::MatrixXd centered(d, n);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < n; ++j)
        mean += Eigen::Map<const Eigen::VectorXd>(images[static_cast<std::size_t>(j)].data(), d);
    mean /= static_cast<double>(n);
    for (int j = 0; j < n; ++j)
        centered.col(j) =
            Eigen::Map<const Eigen::VectorXd>(images[static_cast<std::size_t>(j)].data(), d) -
            mean;

    // Gram trick: the N x N inner-product matrix shares the nonzero spectrum
    // of the d x d scatter matrix.
    const Eigen::MatrixXd gram = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericError("eigen decomposition failed");

    std::vector<std::pair<double, int>> spectrum;  // (eigenvalue, column), descending
    for (int i = 0; i < n; ++i) spectrum.emplace_back(solver.eigenvalues()(i), i);
    std::sort(spectrum.begin(), spectrum.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const double largest = spectrum.empty() ? 0.0 : spectrum.front().first;
    if (!(largest > 0.0)) throw DataError("zero total variance: all training images identical");
    const double cutoff = 1e-10 * largest;

    EigenfaceModel model;
    model.rows = images.front().rows();
    model.cols = images.front().cols();
    model.mean.assign(mean.data(), mean.data() + d);
    std::vector<Eigen::VectorXd> basis;
    for (const auto& [value, col] : spectrum) {
        if (value < cutoff) break;
        Eigen::VectorXd v = centered * solver.eigenvectors().col(col);
        // Modified Gram-Schmidt against the vectors kept so far.
        for (const auto& b : basis) v -= b.dot(v) * b;
        const double norm = v.norm();
        if (norm < 1e-12) continue;
        v /= norm;
        basis.push_back(v);
        model.eigenvalues.push_back(value);
    }
    if (basis.empty()) throw DataError("zero total variance: all training images identical");
    model.basis.reserve(basis.size());
    for (const auto& b : basis) model.basis.emplace_back(b.data(), b.data() + d);

    const double total =
        std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    double mass = 0.0;
    model.dim = static_cast<int>(model.eigenvalues.size());
    for (std::size_t i = 0; i < model.eigenvalues.size(); ++i) {
        mass += model.eigenvalues[i];
        if (mass >= retain * total) {
            model.dim = static_cast<int>(i) + 1;
            break;
        }
    }
    return model;
}

MatchResult eigenface_match(const GrayImage& probe, const Gallery& gallery,
                            const EigenfaceModel& model, const std::string& probe_id) {
    check_probe(probe, gallery);
    if (probe.rows() != model.rows || probe.cols() != model.cols)
        throw ShapeError("probe dimensions do not match the eigenface model");
    const int d = model.rows * model.cols;
    const int dim = model.dim;
    if (dim < 1 || dim > static_cast<int>(model.basis.size()))
        throw ParamError("model dim outside the available basis");

    auto project = [&](const GrayImage& img) {
        std::vector<double> coeff(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            const auto& b = model.basis[static_cast<std::size_t>(k)];
            double acc = 0.0;
            for (int i = 0; i < d; ++i)
                acc += b[static_cast<std::size_t>(i)] *
                       (img.data()[i] - model.mean[static_cast<std::size_t>(i)]);
            coeff[static_cast<std::size_t>(k)] = acc;
        }
        return coeff;
    };

    const std::vector<double> probe_coeff = project(probe);
    std::vector<double> values(gallery.entries.size());
    for (std::size_t i = 0; i < gallery.entries.size(); ++i) {
        const std::vector<double> g = project(gallery.entries[i].image);
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double diff = probe_coeff[static_cast<std::size_t>(k)] -
                                g[static_cast<std::size_t>(k)];
            d2 += diff * diff;
        }
        values[i] = std::sqrt(d2);
    }
    return rank_entries(gallery, values, true, probe_id, "eigenface");
}

}  // namespace sketchiq
