#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sketchiq/corpus.hpp"
#include "sketchiq/errors.hpp"
#include "sketchiq/metrics.hpp"
#include "test_util.hpp"

using sketchiq::GrayImage;
using sketchiq::MetricKind;
using sketchiq::MetricParams;
using sketchiq::MetricScore;
using sketchiq::Polarity;

namespace {

GrayImage textured(int size, std::uint64_t seed) {
    return sketchiq::make_synthetic_corpus(2, size, seed).photos[0].image;
}

}  // namespace

TEST_CASE("identical inputs score at the identity bound") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 3; ++i) {
        const GrayImage x = testutil::random_image(rng, 64, 64);
        CHECK(sketchiq::ssim(x, x).value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sketchiq::vif(x, x).value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(sketchiq::fsim(x, x).value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(sketchiq::gmsd(x, x).value) < 1e-12);
    }
}

TEST_CASE("constant pairs hit the degenerate closed forms") {
    const GrayImage a(48, 48, 80.0);
    const GrayImage b(48, 48, 140.0);
    CHECK(sketchiq::ssim(a, a).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(sketchiq::gmsd(a, b).value) < 1e-12);
    // Zero reference variance at every location and scale: fidelity is exact.
    CHECK(sketchiq::vif(a, b).value == doctest::Approx(1.0));
    CHECK(sketchiq::fsim(a, b).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim and gmsd are symmetric in their arguments") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 2; ++i) {
        const GrayImage x = testutil::random_image(rng, 48, 40);
        const GrayImage y = testutil::random_image(rng, 48, 40);
        CHECK(sketchiq::ssim(x, y).value ==
              doctest::Approx(sketchiq::ssim(y, x).value).epsilon(1e-12));
        CHECK(sketchiq::gmsd(x, y).value ==
              doctest::Approx(sketchiq::gmsd(y, x).value).epsilon(1e-12));
    }
}

TEST_CASE("scores stay inside their documented ranges") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 3; ++i) {
        const GrayImage x = testutil::random_image(rng, 48, 48);
        const GrayImage y = testutil::random_image(rng, 48, 48);
        const double s = sketchiq::ssim(x, y).value;
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        const double f = sketchiq::fsim(x, y).value;
        CHECK(f > 0.0);
        CHECK(f <= 1.0);
        CHECK(sketchiq::vif(x, y).value >= 0.0);
        CHECK(sketchiq::gmsd(x, y).value >= 0.0);
    }
    // Inverted-contrast pair: strongly negative structure, still within [-1, 1].
    const GrayImage x = textured(64, 7);
    std::vector<double> inv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) inv[i] = 255.0 - x.data()[i];
    const GrayImage y = GrayImage::from_data(x.rows(), x.cols(), std::move(inv));
    const double s = sketchiq::ssim(x, y).value;
    CHECK(s >= -1.0);
    CHECK(s < 0.5);
}

TEST_CASE("gaussian blur degrades every metric monotonically") {
    const GrayImage ref = textured(64, 41);
    std::vector<double> s_ssim, s_vif, s_fsim, s_gmsd;
    for (const double sigma : {0.5, 1.0, 2.0, 4.0}) {
        const GrayImage blurred = sketchiq::gaussian_blur(ref, sigma);
        s_ssim.push_back(sketchiq::ssim(ref, blurred).value);
        s_vif.push_back(sketchiq::vif(ref, blurred).value);
        s_fsim.push_back(sketchiq::fsim(ref, blurred).value);
        s_gmsd.push_back(sketchiq::gmsd(ref, blurred).value);
    }
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(s_ssim[i] < s_ssim[i - 1]);
        CHECK(s_vif[i] < s_vif[i - 1]);
        CHECK(s_fsim[i] < s_fsim[i - 1]);
        CHECK(s_gmsd[i] > s_gmsd[i - 1]);
    }
}

TEST_CASE("blur loses visual information") {
    const GrayImage x = textured(128, 42);
    CHECK(sketchiq::vif(x, sketchiq::gaussian_blur(x, 2.0)).value < 1.0);
}

TEST_CASE("ssim matches the direct windowed-statistics computation") {
    std::mt19937_64 rng(24);
    const MetricParams p;
    for (int i = 0; i < 3; ++i) {
        const GrayImage x = testutil::random_image(rng, 64, 64);
        const GrayImage y = testutil::random_image(rng, 64, 64);
        CHECK(sketchiq::ssim(x, y).value ==
              doctest::Approx(oracle::naive_ssim(x, y, p.ssim)).epsilon(1e-10));
    }
}

TEST_CASE("vif matches the per-scale direct computation") {
    std::mt19937_64 rng(25);
    const MetricParams p;
    for (int i = 0; i < 2; ++i) {
        const GrayImage x = testutil::random_image(rng, 128, 128);
        const GrayImage y = testutil::random_image(rng, 128, 128);
        CHECK(sketchiq::vif(x, y).value ==
              doctest::Approx(oracle::naive_vif(x, y, p.vif)).epsilon(1e-8));
    }
}

TEST_CASE("fsim matches the dense filter-bank computation") {
    std::mt19937_64 rng(26);
    const MetricParams p;
    {
        const GrayImage x = testutil::random_image(rng, 128, 128);
        const GrayImage y = testutil::random_image(rng, 128, 128);
        CHECK(sketchiq::fsim(x, y).value ==
              doctest::Approx(oracle::naive_fsim(x, y, p.fsim)).epsilon(1e-6));
    }
    {
        const GrayImage x = textured(64, 43);
        const GrayImage y = sketchiq::gaussian_blur(x, 1.0);
        CHECK(sketchiq::fsim(x, y).value ==
              doctest::Approx(oracle::naive_fsim(x, y, p.fsim)).epsilon(1e-6));
    }
}

TEST_CASE("gmsd matches the direct per-pixel computation") {
    std::mt19937_64 rng(27);
    const MetricParams p;
    for (int i = 0; i < 3; ++i) {
        const GrayImage x = testutil::random_image(rng, 64, 64);
        const GrayImage y = testutil::random_image(rng, 64, 64);
        CHECK(sketchiq::gmsd(x, y).value ==
              doctest::Approx(oracle::naive_gmsd(x, y, p.gmsd)).epsilon(1e-12));
    }
}

TEST_CASE("undersized or mismatched inputs are rejected") {
    const GrayImage small10(10, 12, 0.0);
    const GrayImage mid32(32, 32, 0.0);
    const GrayImage tall(64, 31, 0.0);
    const GrayImage tiny(5, 8, 0.0);
    CHECK_THROWS_AS(sketchiq::ssim(small10, small10), sketchiq::SizeError);
    CHECK_THROWS_AS(sketchiq::vif(mid32, mid32), sketchiq::SizeError);
    CHECK_THROWS_AS(sketchiq::fsim(tall, tall), sketchiq::SizeError);
    CHECK_THROWS_AS(sketchiq::gmsd(tiny, tiny), sketchiq::SizeError);

    const GrayImage a(64, 64, 0.0);
    const GrayImage b(64, 63, 0.0);
    CHECK_THROWS_AS(sketchiq::ssim(a, b), sketchiq::ShapeError);
    CHECK_THROWS_AS(sketchiq::vif(a, b), sketchiq::ShapeError);
    CHECK_THROWS_AS(sketchiq::fsim(a, b), sketchiq::ShapeError);
    CHECK_THROWS_AS(sketchiq::gmsd(a, b), sketchiq::ShapeError);
}

TEST_CASE("dispatch returns the same values with the right polarity") {
    std::mt19937_64 rng(28);
    const GrayImage x = testutil::random_image(rng, 64, 64);
    const GrayImage y = testutil::random_image(rng, 64, 64);

    const MetricScore s = sketchiq::compute_metric(MetricKind::SSIM, x, y);
    CHECK(s.value == sketchiq::ssim(x, y).value);
    CHECK(s.polarity == Polarity::Similarity);
    const MetricScore v = sketchiq::compute_metric(MetricKind::VIF, x, y);
    CHECK(v.value == sketchiq::vif(x, y).value);
    CHECK(v.polarity == Polarity::Similarity);
    const MetricScore f = sketchiq::compute_metric(MetricKind::FSIM, x, y);
    CHECK(f.value == sketchiq::fsim(x, y).value);
    CHECK(f.polarity == Polarity::Similarity);
    const MetricScore g = sketchiq::compute_metric(MetricKind::GMSD, x, y);
    CHECK(g.value == sketchiq::gmsd(x, y).value);
    CHECK(g.polarity == Polarity::Distortion);
}

TEST_CASE("polarity drives score comparison") {
    CHECK(sketchiq::score_better({0.9, Polarity::Similarity}, {0.5, Polarity::Similarity}));
    CHECK_FALSE(
        sketchiq::score_better({0.2, Polarity::Similarity}, {0.5, Polarity::Similarity}));
    CHECK(sketchiq::score_better({0.1, Polarity::Distortion}, {0.5, Polarity::Distortion}));
    CHECK_THROWS_AS(
        sketchiq::score_better({0.1, Polarity::Distortion}, {0.5, Polarity::Similarity}),
        sketchiq::ParamError);
    CHECK(sketchiq::polarity_name(Polarity::Similarity) == "similarity");
    CHECK(sketchiq::polarity_name(Polarity::Distortion) == "distortion");
}

TEST_CASE("metric names round-trip and reject unknown strings") {
    for (const MetricKind kind :
         {MetricKind::SSIM, MetricKind::VIF, MetricKind::FSIM, MetricKind::GMSD})
        CHECK(sketchiq::metric_kind_from_name(sketchiq::metric_name(kind)) == kind);
    CHECK(sketchiq::metric_name(MetricKind::SSIM) == "ssim");
    CHECK_THROWS_AS(sketchiq::metric_kind_from_name("psnr"), sketchiq::ConfigError);
}

TEST_CASE("metric params serialize, patch, and reject unknown keys") {
    MetricParams p;
    p.ssim.sigma = 2.25;
    p.gmsd.c = 400.0;
    const nlohmann::json j = sketchiq::metric_params_to_json(p);
    const MetricParams back = sketchiq::metric_params_from_json(j);
    CHECK(back.ssim.sigma == 2.25);
    CHECK(back.gmsd.c == 400.0);
    CHECK(sketchiq::metric_params_to_json(back) == j);

    const MetricParams patched =
        sketchiq::metric_params_from_json(nlohmann::json{{"vif", {{"scales", 3}}}});
    CHECK(patched.vif.scales == 3);
    CHECK(patched.ssim.window_size == 11);

    CHECK_THROWS_AS(sketchiq::metric_params_from_json(nlohmann::json{{"blur", 1}}),
                    sketchiq::ConfigError);
    CHECK_THROWS_AS(
        sketchiq::metric_params_from_json(nlohmann::json{{"ssim", {{"radius", 4}}}}),
        sketchiq::ConfigError);

    MetricParams bad;
    bad.ssim.window_size = 10;
    CHECK_THROWS_AS(sketchiq::validate_metric_params(bad), sketchiq::ParamError);
    bad = MetricParams{};
    bad.fsim.t2 = -1.0;
    CHECK_THROWS_AS(sketchiq::validate_metric_params(bad), sketchiq::ParamError);
}
