#include <cmath>
#include <string>

#include "sketchiq/errors.hpp"
#include "sketchiq/metrics.hpp"

namespace sketchiq {

MetricScore gmsd(const GrayImage& ref, const GrayImage& dist, const MetricParams& p) {
    validate_metric_params(p);
    if (!ref.same_shape(dist)) throw ShapeError("gmsd requires equal image dimensions");
    // Downsampled images must support a 3x3 gradient stencil.
    if (ref.rows() < 6 || ref.cols() < 6)
        throw SizeError("gmsd requires both dimensions >= 6");

    const GrayImage g1 = gradient_magnitude(downsample2(ref), GradientOperator::Prewitt);
    const GrayImage g2 = gradient_magnitude(downsample2(dist), GradientOperator::Prewitt);
    const double c = p.gmsd.c;

    double sum = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double a = g1.data()[i];
        const double b = g2.data()[i];
        sum += (2.0 * a * b + c) / (a * a + b * b + c);
    }
    const double mean = sum / static_cast<double>(g1.size());
    double var = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double a = g1.data()[i];
        const double b = g2.data()[i];
        const double d = (2.0 * a * b + c) / (a * a + b * b + c) - mean;
        var += d * d;
    }
    // Population standard deviation: deviation pooling divides by N.
    return {std::sqrt(var / static_cast<double>(g1.size())), Polarity::Distortion};
}

}  // namespace sketchiq
