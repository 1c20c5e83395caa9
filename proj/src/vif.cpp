#include <algorithm>
#include <cmath>
#include <string>
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

// Keeps every other row and column, starting at index 0.
GrayImage decimate2(const GrayImage& img) {
    const int rows = (img.rows() + 1) / 2;
    const int cols = (img.cols() + 1) / 2;
    std::vector<double> px(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            px[static_cast<std::size_t>(r) * cols + c] = img.at(2 * r, 2 * c);
    return GrayImage::from_data(rows, cols, std::move(px));
}

int window_size_for_scale(int total_scales, int scale) {
    return (1 << (total_scales - scale + 1)) + 1;
}

}  // namespace

MetricScore vif(const GrayImage& ref, const GrayImage& dist, const MetricParams& p) {
    validate_metric_params(p);
    if (!ref.same_shape(dist)) throw ShapeError("vif requires equal image dimensions");
    const int scales = p.vif.scales;

    // Walk the pyramid sizes up front so undersized inputs fail before any work.
    {
        int r = ref.rows(), c = ref.cols();
        for (int s = 1; s <= scales; ++s) {
            const int n = window_size_for_scale(scales, s);
            if (s > 1) {
                r = r - n + 1;
                c = c - n + 1;
                if (r < 1 || c < 1)
                    throw SizeError("vif input too small for scale " + std::to_string(s));
                r = (r + 1) / 2;
                c = (c + 1) / 2;
            }
            if (r < n || c < n)
                throw SizeError("vif input too small for scale " + std::to_string(s) +
                                " window " + std::to_string(n));
        }
    }

    const double sigma_n2 = p.vif.noise_variance;
    const double eps = p.vif.epsilon;
    GrayImage x = ref;
    GrayImage y = dist;
    double num = 0.0;
    double den = 0.0;
    for (int s = 1; s <= scales; ++s) {
        const int n = window_size_for_scale(scales, s);
        const std::vector<double> taps = gaussian_taps_1d(n, n / 5.0);
        if (s > 1) {
            x = decimate2(separable_convolve_valid(x, taps));
            y = decimate2(separable_convolve_valid(y, taps));
        }
        const GrayImage mu_x = separable_convolve_valid(x, taps);
        const GrayImage mu_y = separable_convolve_valid(y, taps);
        const GrayImage m_xx = separable_convolve_valid(elementwise_product(x, x), taps);
        const GrayImage m_yy = separable_convolve_valid(elementwise_product(y, y), taps);
        const GrayImage m_xy = separable_convolve_valid(elementwise_product(x, y), taps);
        for (std::size_t i = 0; i < mu_x.size(); ++i) {
            const double mx = mu_x.data()[i];
            const double my = mu_y.data()[i];
            const double vx = std::max(m_xx.data()[i] - mx * mx, 0.0);
            const double vy = std::max(m_yy.data()[i] - my * my, 0.0);
            const double cxy = m_xy.data()[i] - mx * my;
            const double g = vx > 0.0 ? std::max(cxy / (vx + eps), 0.0) : 0.0;
            const double sv2 = std::max(vy - g * cxy, 0.0);
            num += std::log10(1.0 + g * g * vx / (sv2 + sigma_n2));
            den += std::log10(1.0 + vx / sigma_n2);
        }
    }
    // A reference with no local variance at any scale carries no information; the
    // fidelity ratio is taken as exact.
    return {den > 0.0 ? num / den : 1.0, Polarity::Similarity};
}

}  // namespace sketchiq
