#include <algorithm>
#include <cmath>
#include <vector>

#include "sketchiq/errors.hpp"
#include "sketchiq/metrics.hpp"

namespace sketchiq {

namespace {

GrayImage elementwise_product(const GrayImage& a, const GrayImage& b) {
    std::vector<double> px(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) px[i] = a.data()[i] * b.data()[i];
    return GrayImage::from_data(a.rows(), a.cols(), std::move(px));
}

}  // namespace

MetricScore ssim(const GrayImage& ref, const GrayImage& dist, const MetricParams& p) {
    validate_metric_params(p);
    if (!ref.same_shape(dist)) throw ShapeError("ssim requires equal image dimensions");
    const int w = p.ssim.window_size;
    if (ref.rows() < w || ref.cols() < w)
        throw SizeError("ssim requires both dimensions >= window size " + std::to_string(w));

    const std::vector<double> taps = gaussian_taps_1d(w, p.ssim.sigma);
    const GrayImage mu_x = separable_convolve_valid(ref, taps);
    const GrayImage mu_y = separable_convolve_valid(dist, taps);
    const GrayImage m_xx = separable_convolve_valid(elementwise_product(ref, ref), taps);
    const GrayImage m_yy = separable_convolve_valid(elementwise_product(dist, dist), taps);
    const GrayImage m_xy = separable_convolve_valid(elementwise_product(ref, dist), taps);

    const double c1 = p.ssim.k1 * p.ssim.dynamic_range * p.ssim.k1 * p.ssim.dynamic_range;
    const double c2 = p.ssim.k2 * p.ssim.dynamic_range * p.ssim.k2 * p.ssim.dynamic_range;

    double sum = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x.data()[i];
        const double my = mu_y.data()[i];
        const double vx = std::max(m_xx.data()[i] - mx * mx, 0.0);
        const double vy = std::max(m_yy.data()[i] - my * my, 0.0);
        // Cauchy-Schwarz clamp keeps each map value inside [-1, 1] under rounding.
        const double bound = std::sqrt(vx) * std::sqrt(vy);
        const double cxy = std::clamp(m_xy.data()[i] - mx * my, -bound, bound);
        sum += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return {sum / static_cast<double>(mu_x.size()), Polarity::Similarity};
}

}  // namespace sketchiq
