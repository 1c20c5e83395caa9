#include <algorithm>
#include <cmath>

#include "sketchiq/errors.hpp"
#include "sketchiq/metrics.hpp"
#include "sketchiq/phase_congruency.hpp"

namespace sketchiq {

MetricScore fsim(const GrayImage& ref, const GrayImage& dist, const MetricParams& p) {
    validate_metric_params(p);
    if (!ref.same_shape(dist)) throw ShapeError("fsim requires equal image dimensions");
    const int min_dim = std::min(ref.rows(), ref.cols());
    if (min_dim < 32) throw SizeError("fsim requires min(rows, cols) >= 32");

    const int factor = std::max(
        1L, std::lround(static_cast<double>(min_dim) / p.fsim.downsample_target));
    const GrayImage a = factor > 1 ? block_downsample(ref, factor) : ref;
    const GrayImage b = factor > 1 ? block_downsample(dist, factor) : dist;

    const GrayImage pc1 = phase_congruency(a, p.fsim);
    const GrayImage pc2 = phase_congruency(b, p.fsim);
    const GrayImage g1 = gradient_magnitude(a, GradientOperator::Scharr);
    const GrayImage g2 = gradient_magnitude(b, GradientOperator::Scharr);

    const double t1 = p.fsim.t1;
    const double t2 = p.fsim.t2;
    double num = 0.0;
    double den = 0.0;
    double plain = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double c1 = pc1.data()[i];
        const double c2 = pc2.data()[i];
        const double m1 = g1.data()[i];
        const double m2 = g2.data()[i];
        const double s_pc = (2.0 * c1 * c2 + t1) / (c1 * c1 + c2 * c2 + t1);
        const double s_g = (2.0 * m1 * m2 + t2) / (m1 * m1 + m2 * m2 + t2);
        const double w = std::max(c1, c2);
        num += s_pc * s_g * w;
        den += w;
        plain += s_pc * s_g;
    }
    // Featureless pair (all-zero congruency): fall back to the unweighted mean.
    const double value = den > 0.0 ? num / den : plain / static_cast<double>(a.size());
    return {value, Polarity::Similarity};
}

}  // namespace sketchiq
