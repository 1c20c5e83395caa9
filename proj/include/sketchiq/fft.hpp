#pragma once

#include <complex>
#include <vector>

#include "sketchiq/image.hpp"

namespace sketchiq {

// Forward 2-D DFT of a real image. Output is row-major, rows*cols, unnormalized.
std::vector<std::complex<double>> fft2(const GrayImage& img);

// Inverse 2-D DFT, scaled by 1/(rows*cols) so ifft2(fft2(x)) == x.
std::vector<std::complex<double>> ifft2(const std::vector<std::complex<double>>& spectrum,
                                        int rows, int cols);

}  // namespace sketchiq
