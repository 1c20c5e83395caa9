#pragma once

#include <cstddef>
#include <vector>

#include "sketchiq/errors.hpp"

namespace sketchiq {

// Row-major grid of luminance samples, nominal range [0, 255]. Stored as
// double so metric arithmetic never quantizes; 8-bit inputs are promoted on
// load.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int rows, int cols, double fill = 0.0);

    // Takes ownership of `pixels`; rejects wrong length and non-finite values.
    static GrayImage from_data(int rows, int cols, std::vector<double> pixels);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return px_.size(); }
    bool same_shape(const GrayImage& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    double& at(int r, int c) { return px_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return px_[static_cast<std::size_t>(r) * cols_ + c]; }
    double* data() { return px_.data(); }
    const double* data() const { return px_.data(); }
    const std::vector<double>& pixels() const { return px_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> px_;
};

enum class BorderMode { Valid, Replicate, Symmetric };

// Square correlation kernel; size is odd so the center is well defined.
struct Kernel {
    int size = 1;
    std::vector<double> taps;  // size*size, row-major

    double at(int r, int c) const { return taps[static_cast<std::size_t>(r) * size + c]; }
};

enum class GradientOperator { Prewitt, Scharr };

// Luma conversion, 0.299 R + 0.587 G + 0.114 B.
GrayImage to_gray(const GrayImage& red, const GrayImage& green, const GrayImage& blue);

// Normalized Gaussian window, taps sum to 1.
Kernel gaussian_kernel(int size, double sigma);
std::vector<double> gaussian_taps_1d(int size, double sigma);

// Sliding-window correlation (no kernel flip). Valid mode shrinks the output
// by size-1 in each dimension; Replicate and Symmetric preserve dimensions.
GrayImage convolve_2d(const GrayImage& img, const Kernel& k, BorderMode mode);

// Valid-mode correlation with a separable kernel taps x taps^T. Same result
// as convolve_2d with the outer-product kernel up to roundoff, much faster.
GrayImage separable_convolve_valid(const GrayImage& img, const std::vector<double>& taps);

// 2x2 block average, one sample kept per block; trailing odd row/column
// dropped.
GrayImage downsample2(const GrayImage& img);

// f x f block average with the same trailing-remainder convention; factor 1
// returns a copy.
GrayImage block_downsample(const GrayImage& img, int factor);

// sqrt(gx^2 + gy^2) with Prewitt or Scharr 3x3 taps, replicate borders.
GrayImage gradient_magnitude(const GrayImage& img, GradientOperator op);

// Same-size Gaussian smoothing with symmetric borders; window covers +-3
// sigma.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

double mean(const GrayImage& img);

}  // namespace sketchiq
