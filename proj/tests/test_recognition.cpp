#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sketchiq/corpus.hpp"
#include "sketchiq/errors.hpp"
#include "sketchiq/recognition.hpp"
#include "test_util.hpp"

using sketchiq::EigenfaceModel;
using sketchiq::Gallery;
using sketchiq::GalleryEntry;
using sketchiq::GrayImage;
using sketchiq::MatchResult;
using sketchiq::MetricKind;

namespace {

Gallery textured_gallery(int identities, int size, std::uint64_t seed) {
    Gallery gallery;
    gallery.kind = sketchiq::GalleryKind::Photos;
    sketchiq::Corpus corpus = sketchiq::make_synthetic_corpus(identities, size, seed);
    gallery.entries = std::move(corpus.photos);
    return gallery;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("matching ranks the probe's own image first under both polarities") {
    const Gallery gallery = textured_gallery(4, 32, 61);
    const GrayImage& probe = gallery.entries[2].image;

    const MatchResult ssim = sketchiq::match_probe(probe, gallery, MetricKind::SSIM, {}, "p");
    CHECK(ssim.probe_id == "p");
    CHECK(ssim.metric == "ssim");
    CHECK(ssim.ranking.front().id == gallery.entries[2].id);
    CHECK(ssim.ranking.front().score == doctest::Approx(1.0).epsilon(1e-9));

    const MatchResult gmsd = sketchiq::match_probe(probe, gallery, MetricKind::GMSD);
    CHECK(gmsd.ranking.front().id == gallery.entries[2].id);
    CHECK(std::abs(gmsd.ranking.front().score) < 1e-12);
}

TEST_CASE("match ranking agrees with scoring every entry directly") {
    const Gallery gallery = textured_gallery(3, 32, 62);
    const GrayImage probe = sketchiq::gaussian_blur(gallery.entries[0].image, 1.5);

    struct Scored {
        std::string id;
        double value;
    };
    for (const MetricKind kind : {MetricKind::SSIM, MetricKind::GMSD}) {
        std::vector<Scored> expect;
        for (const auto& entry : gallery.entries)
            expect.push_back({entry.id, sketchiq::compute_metric(kind, probe, entry.image).value});
        std::stable_sort(expect.begin(), expect.end(), [&](const Scored& a, const Scored& b) {
            return kind == MetricKind::GMSD ? a.value < b.value : a.value > b.value;
        });
        const MatchResult got = sketchiq::match_probe(probe, gallery, kind);
        REQUIRE(got.ranking.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) {
            CHECK(got.ranking[i].id == expect[i].id);
            CHECK(got.ranking[i].score == expect[i].value);
        }
    }
}

TEST_CASE("match ranking is a permutation and survives gallery reordering") {
    Gallery gallery = textured_gallery(5, 32, 63);
    const GrayImage probe = sketchiq::gaussian_blur(gallery.entries[3].image, 1.0);
    const MatchResult before = sketchiq::match_probe(probe, gallery, MetricKind::SSIM);

    std::vector<std::string> ids;
    for (const auto& r : before.ranking) ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    std::vector<std::string> gallery_ids;
    for (const auto& e : gallery.entries) gallery_ids.push_back(e.id);
    std::sort(gallery_ids.begin(), gallery_ids.end());
    CHECK(ids == gallery_ids);

    std::rotate(gallery.entries.begin(), gallery.entries.begin() + 2, gallery.entries.end());
    const MatchResult after = sketchiq::match_probe(probe, gallery, MetricKind::SSIM);
    for (std::size_t i = 0; i < before.ranking.size(); ++i) {
        CHECK(after.ranking[i].id == before.ranking[i].id);
        CHECK(after.ranking[i].score == before.ranking[i].score);
    }
}

TEST_CASE("match results are identical across thread counts") {
    const Gallery gallery = textured_gallery(6, 32, 64);
    const GrayImage probe = sketchiq::gaussian_blur(gallery.entries[1].image, 0.8);
    const MatchResult one = sketchiq::match_probe(probe, gallery, MetricKind::GMSD, {}, "p", 1);
    const MatchResult four = sketchiq::match_probe(probe, gallery, MetricKind::GMSD, {}, "p", 4);
    REQUIRE(one.ranking.size() == four.ranking.size());
    for (std::size_t i = 0; i < one.ranking.size(); ++i) {
        CHECK(one.ranking[i].id == four.ranking[i].id);
        CHECK(one.ranking[i].score == four.ranking[i].score);
    }
}

TEST_CASE("matching validates the gallery and probe shape") {
    Gallery empty;
    CHECK_THROWS_AS(sketchiq::match_probe(GrayImage(32, 32, 0.0), empty, MetricKind::SSIM),
                    sketchiq::ConfigError);
    Gallery gallery = textured_gallery(3, 32, 65);
    CHECK_THROWS_AS(sketchiq::match_probe(GrayImage(32, 31, 0.0), gallery, MetricKind::SSIM),
                    sketchiq::ShapeError);
    gallery.entries[1].id = gallery.entries[0].id;
    CHECK_THROWS_AS(sketchiq::match_probe(gallery.entries[0].image, gallery, MetricKind::SSIM),
                    sketchiq::DataError);
}

TEST_CASE("pixel nearest-neighbor matches a hand-rolled distance sort") {
    std::mt19937_64 rng(66);
    Gallery gallery;
    for (int i = 0; i < 5; ++i)
        gallery.entries.push_back({"g" + std::to_string(i), testutil::random_image(rng, 8, 8)});
    const GrayImage probe = testutil::random_image(rng, 8, 8);

    const MatchResult got = sketchiq::knn_direct(probe, gallery, "p");
    CHECK(got.metric == "knn");
    struct Scored {
        std::string id;
        double value;
    };
    std::vector<Scored> expect;
    for (const auto& entry : gallery.entries) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < probe.size(); ++i) {
            const double d = probe.data()[i] - entry.image.data()[i];
            d2 += d * d;
        }
        expect.push_back({entry.id, std::sqrt(d2)});
    }
    std::stable_sort(expect.begin(), expect.end(),
                     [](const Scored& a, const Scored& b) { return a.value < b.value; });
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(got.ranking[i].id == expect[i].id);
        CHECK(got.ranking[i].score == doctest::Approx(expect[i].value).epsilon(1e-12));
    }

    const MatchResult self = sketchiq::knn_direct(gallery.entries[3].image, gallery);
    CHECK(self.ranking.front().id == "g3");
    CHECK(self.ranking.front().score == 0.0);
}

TEST_CASE("scaling all images uniformly preserves nearest-neighbor order") {
    std::mt19937_64 rng(67);
    Gallery gallery, scaled;
    for (int i = 0; i < 4; ++i) {
        GrayImage img = testutil::random_image(rng, 8, 8, 0.0, 100.0);
        std::vector<double> twice(img.size());
        for (std::size_t j = 0; j < img.size(); ++j) twice[j] = 2.0 * img.data()[j];
        gallery.entries.push_back({"g" + std::to_string(i), img});
        scaled.entries.push_back(
            {"g" + std::to_string(i), GrayImage::from_data(8, 8, std::move(twice))});
    }
    const GrayImage probe = testutil::random_image(rng, 8, 8, 0.0, 100.0);
    std::vector<double> probe_twice(probe.size());
    for (std::size_t j = 0; j < probe.size(); ++j) probe_twice[j] = 2.0 * probe.data()[j];

    const MatchResult base = sketchiq::knn_direct(probe, gallery);
    const MatchResult two =
        sketchiq::knn_direct(GrayImage::from_data(8, 8, std::move(probe_twice)), scaled);
    for (std::size_t i = 0; i < base.ranking.size(); ++i) {
        CHECK(two.ranking[i].id == base.ranking[i].id);
        CHECK(two.ranking[i].score == doctest::Approx(2.0 * base.ranking[i].score).epsilon(1e-12));
    }
}

TEST_CASE("eigenface training recovers a one-dimensional subspace") {
    std::mt19937_64 rng(68);
    std::vector<double> u = testutil::random_vector(rng, 16, -1.0, 1.0);
    const double norm = std::sqrt(dot(u, u));
    for (double& v : u) v /= norm;

    std::vector<GrayImage> images;
    for (const double a : {3.0, -1.0, 2.0, -4.0}) {
        std::vector<double> px(16);
        for (int i = 0; i < 16; ++i) px[i] = 100.0 + a * u[i];
        images.push_back(GrayImage::from_data(4, 4, std::move(px)));
    }
    const EigenfaceModel model = sketchiq::eigenface_train(images, 0.99);
    REQUIRE(model.basis.size() == 1);
    CHECK(model.dim == 1);
    CHECK(model.eigenvalues.size() == 1);
    CHECK(std::abs(dot(model.basis[0], u)) >= 1.0 - 1e-6);
}

TEST_CASE("eigenface basis is orthonormal with a nonincreasing spectrum") {
    std::mt19937_64 rng(69);
    std::vector<GrayImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(testutil::random_image(rng, 8, 8));
    const EigenfaceModel model = sketchiq::eigenface_train(images, 1.0);
    REQUIRE(model.basis.size() == 5);
    for (std::size_t i = 0; i < model.basis.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            CHECK(std::abs(dot(model.basis[i], model.basis[j]) - want) <= 1e-8);
        }
    for (std::size_t i = 1; i < model.eigenvalues.size(); ++i) {
        CHECK(model.eigenvalues[i] > 0.0);
        CHECK(model.eigenvalues[i] <= model.eigenvalues[i - 1]);
    }
}

TEST_CASE("full retention reconstructs the training images") {
    std::mt19937_64 rng(70);
    std::vector<GrayImage> images;
    for (int i = 0; i < 5; ++i) images.push_back(testutil::random_image(rng, 8, 8));
    const EigenfaceModel model = sketchiq::eigenface_train(images, 1.0);
    CHECK(model.dim == static_cast<int>(model.basis.size()));
    for (const auto& img : images) {
        std::vector<double> centered(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) centered[i] = img.data()[i] - model.mean[i];
        std::vector<double> recon(img.size(), 0.0);
        for (const auto& b : model.basis) {
            const double coeff = dot(centered, b);
            for (std::size_t i = 0; i < recon.size(); ++i) recon[i] += coeff * b[i];
        }
        double err2 = 0.0, ref2 = 0.0;
        for (std::size_t i = 0; i < recon.size(); ++i) {
            const double d = recon[i] - centered[i];
            err2 += d * d;
            ref2 += img.data()[i] * img.data()[i];
        }
        CHECK(std::sqrt(err2) <= 1e-6 * std::sqrt(ref2));
    }
}

TEST_CASE("eigenface training rejects degenerate inputs") {
    CHECK_THROWS_AS(sketchiq::eigenface_train({}), sketchiq::ConfigError);
    CHECK_THROWS_AS(sketchiq::eigenface_train({GrayImage(4, 4, 1.0)}), sketchiq::ConfigError);
    CHECK_THROWS_AS(sketchiq::eigenface_train({GrayImage(4, 4, 7.0), GrayImage(4, 4, 7.0)}),
                    sketchiq::DataError);
    CHECK_THROWS_AS(sketchiq::eigenface_train({GrayImage(4, 4, 1.0), GrayImage(4, 5, 1.0)}),
                    sketchiq::ShapeError);
    CHECK_THROWS_AS(
        sketchiq::eigenface_train({GrayImage(4, 4, 1.0), GrayImage(4, 4, 2.0)}, 0.0),
        sketchiq::ParamError);

    // Two distinct images span exactly one centered direction.
    const EigenfaceModel pair =
        sketchiq::eigenface_train({GrayImage(4, 4, 1.0), GrayImage(4, 4, 2.0)});
    CHECK(pair.basis.size() == 1);
    CHECK(pair.eigenvalues.size() == 1);
}

TEST_CASE("partial retention keeps only the dominant modes") {
    std::vector<GrayImage> images;
    for (const auto& ab :
         std::vector<std::pair<double, double>>{{2, 1}, {-2, 1}, {1, -1}, {-1, -1}}) {
        std::vector<double> px(9, 100.0);
        px[0] += ab.first;
        px[1] += ab.second;
        images.push_back(GrayImage::from_data(3, 3, std::move(px)));
    }
    const EigenfaceModel model = sketchiq::eigenface_train(images, 0.99);
    REQUIRE(model.basis.size() == 2);
    CHECK(model.dim == 2);
    CHECK(model.eigenvalues[0] == doctest::Approx(2.5 * model.eigenvalues[1]).epsilon(1e-9));

    const EigenfaceModel half = sketchiq::eigenface_train(images, 0.5);
    CHECK(half.basis.size() == 2);
    CHECK(half.dim == 1);
}

TEST_CASE("eigenface matching reproduces subspace geometry") {
    // Images vary only in two pixels, so coefficient distances reduce to plane
    // geometry between the (a, b) offsets regardless of basis orientation.
    const std::vector<std::pair<double, double>> offsets{{2, 1}, {-2, 1}, {1, -1}, {-1, -1}};
    std::vector<GrayImage> images;
    Gallery gallery;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        std::vector<double> px(9, 100.0);
        px[0] += offsets[i].first;
        px[1] += offsets[i].second;
        images.push_back(GrayImage::from_data(3, 3, std::move(px)));
        gallery.entries.push_back({"g" + std::to_string(i), images.back()});
    }
    const EigenfaceModel model = sketchiq::eigenface_train(images, 0.99);
    const MatchResult got = sketchiq::eigenface_match(images[0], gallery, model, "p");
    CHECK(got.metric == "eigenface");
    REQUIRE(got.ranking.size() == 4);
    CHECK(got.ranking[0].id == "g0");
    CHECK(got.ranking[0].score == doctest::Approx(0.0).scale(1.0));
    CHECK(got.ranking[1].id == "g2");
    CHECK(got.ranking[1].score == doctest::Approx(std::sqrt(5.0)).epsilon(1e-8));
    CHECK(got.ranking[2].id == "g3");
    CHECK(got.ranking[2].score == doctest::Approx(std::sqrt(13.0)).epsilon(1e-8));
    CHECK(got.ranking[3].id == "g1");
    CHECK(got.ranking[3].score == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("shifting every image by a constant leaves eigenface distances unchanged") {
    std::mt19937_64 rng(71);
    std::vector<GrayImage> images, shifted;
    Gallery gallery, gallery_shifted;
    for (int i = 0; i < 4; ++i) {
        const GrayImage img = testutil::random_image(rng, 6, 6, 0.0, 200.0);
        std::vector<double> px(img.data(), img.data() + img.size());
        for (double& v : px) v += 20.0;
        images.push_back(img);
        shifted.push_back(GrayImage::from_data(6, 6, std::move(px)));
        gallery.entries.push_back({"g" + std::to_string(i), images.back()});
        gallery_shifted.entries.push_back({"g" + std::to_string(i), shifted.back()});
    }
    const EigenfaceModel model = sketchiq::eigenface_train(images, 1.0);
    const EigenfaceModel model_shifted = sketchiq::eigenface_train(shifted, 1.0);
    const MatchResult base = sketchiq::eigenface_match(images[1], gallery, model);
    const MatchResult moved =
        sketchiq::eigenface_match(shifted[1], gallery_shifted, model_shifted);
    for (std::size_t i = 0; i < base.ranking.size(); ++i) {
        CHECK(moved.ranking[i].id == base.ranking[i].id);
        CHECK(moved.ranking[i].score == doctest::Approx(base.ranking[i].score).epsilon(1e-9));
    }
}

TEST_CASE("eigenface matching validates model and probe agreement") {
    std::mt19937_64 rng(72);
    std::vector<GrayImage> images;
    Gallery gallery;
    for (int i = 0; i < 3; ++i) {
        images.push_back(testutil::random_image(rng, 5, 5));
        gallery.entries.push_back({"g" + std::to_string(i), images.back()});
    }
    EigenfaceModel model = sketchiq::eigenface_train(images, 1.0);
    CHECK_THROWS_AS(sketchiq::eigenface_match(GrayImage(6, 5, 0.0), gallery, model),
                    sketchiq::ShapeError);
    model.dim = static_cast<int>(model.basis.size()) + 1;
    CHECK_THROWS_AS(sketchiq::eigenface_match(images[0], gallery, model), sketchiq::ParamError);
}
