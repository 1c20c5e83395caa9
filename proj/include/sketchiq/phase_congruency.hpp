#pragma once

#include "sketchiq/image.hpp"
#include "sketchiq/metrics.hpp"

namespace sketchiq {

// Phase congruency map in [0, 1): frequency-domain log-Gabor bank over
// pc_scales x pc_orientations, per-orientation local energy with a
// Rayleigh-model noise threshold estimated from the smallest scale.
GrayImage phase_congruency(const GrayImage& img, const FsimParams& p);

}  // namespace sketchiq
