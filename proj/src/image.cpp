#include "sketchiq/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sketchiq {

GrayImage::GrayImage(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1)
        throw ParamError("image dimensions must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    px_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

GrayImage GrayImage::from_data(int rows, int cols, std::vector<double> pixels) {
    if (rows < 1 || cols < 1)
        throw ParamError("image dimensions must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    if (pixels.size() != static_cast<std::size_t>(rows) * cols)
        throw ShapeError("pixel count " + std::to_string(pixels.size()) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    for (double v : pixels)
        if (!std::isfinite(v)) throw NumericError("non-finite pixel value");
    GrayImage img;
    img.rows_ = rows;
    img.cols_ = cols;
    img.px_ = std::move(pixels);
    return img;
}

GrayImage to_gray(const GrayImage& red, const GrayImage& green, const GrayImage& blue) {
    if (!red.same_shape(green) || !red.same_shape(blue))
        throw ShapeError("color planes differ in size");
    GrayImage out(red.rows(), red.cols());
    const std::size_t n = red.size();
    for (std::size_t i = 0; i < n; ++i)
        out.data()[i] = 0.299 * red.data()[i] + 0.587 * green.data()[i] + 0.114 * blue.data()[i];
    return out;
}

std::vector<double> gaussian_taps_1d(int size, double sigma) {
    if (size < 1 || size % 2 == 0)
        throw ParamError("gaussian window size must be odd and positive, got " + std::to_string(size));
    if (!(sigma > 0.0)) throw ParamError("gaussian sigma must be positive");
    std::vector<double> taps(static_cast<std::size_t>(size));
    const int h = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - h;
        taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

Kernel gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0)
        throw ParamError("gaussian kernel size must be odd and positive, got " + std::to_string(size));
    if (!(sigma > 0.0)) throw ParamError("gaussian sigma must be positive");
    Kernel k;
    k.size = size;
    k.taps.resize(static_cast<std::size_t>(size) * size);
    const int h = size / 2;
    double sum = 0.0;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double dy = r - h;
            const double dx = c - h;
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.taps[static_cast<std::size_t>(r) * size + c] = v;
            sum += v;
        }
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

namespace {

void check_kernel(const Kernel& k) {
    if (k.size < 1 || k.size % 2 == 0) throw ParamError("kernel size must be odd and positive");
    if (k.taps.size() != static_cast<std::size_t>(k.size) * k.size)
        throw ShapeError("kernel tap count does not match its size");
    for (double t : k.taps)
        if (!std::isfinite(t)) throw NumericError("non-finite kernel tap");
}

int border_index(int i, int n, BorderMode mode) {
    if (mode == BorderMode::Replicate) return std::clamp(i, 0, n - 1);
    // Symmetric: half-sample reflection, applied until inside.
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        else i = 2 * n - 1 - i;
    }
    return i;
}

}  // namespace

GrayImage convolve_2d(const GrayImage& img, const Kernel& k, BorderMode mode) {
    check_kernel(k);
    const int size = k.size;
    const int h = size / 2;
    if (mode == BorderMode::Valid) {
        if (img.rows() < size || img.cols() < size)
            throw SizeError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                            " smaller than kernel " + std::to_string(size) + " in valid mode");
        GrayImage out(img.rows() - size + 1, img.cols() - size + 1);
        for (int r = 0; r < out.rows(); ++r) {
            for (int c = 0; c < out.cols(); ++c) {
                double acc = 0.0;
                for (int i = 0; i < size; ++i)
                    for (int j = 0; j < size; ++j) acc += k.at(i, j) * img.at(r + i, c + j);
                out.at(r, c) = acc;
            }
        }
        return out;
    }
    GrayImage out(img.rows(), img.cols());
    for (int r = 0; r < out.rows(); ++r) {
        for (int c = 0; c < out.cols(); ++c) {
            double acc = 0.0;
            for (int i = 0; i < size; ++i) {
                const int rr = border_index(r + i - h, img.rows(), mode);
                for (int j = 0; j < size; ++j) {
                    const int cc = border_index(c + j - h, img.cols(), mode);
                    acc += k.at(i, j) * img.at(rr, cc);
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

GrayImage separable_convolve_valid(const GrayImage& img, const std::vector<double>& taps) {
    const int size = static_cast<int>(taps.size());
    if (size < 1 || size % 2 == 0) throw ParamError("separable kernel size must be odd and positive");
    if (img.rows() < size || img.cols() < size)
        throw SizeError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                        " smaller than kernel " + std::to_string(size) + " in valid mode");
    // Horizontal pass, then vertical; row-major accumulation in both.
    GrayImage tmp(img.rows(), img.cols() - size + 1);
    for (int r = 0; r < img.rows(); ++r) {
        const double* src = img.data() + static_cast<std::size_t>(r) * img.cols();
        double* dst = tmp.data() + static_cast<std::size_t>(r) * tmp.cols();
        for (int c = 0; c < tmp.cols(); ++c) {
            double acc = 0.0;
            for (int j = 0; j < size; ++j) acc += taps[j] * src[c + j];
            dst[c] = acc;
        }
    }
    GrayImage out(img.rows() - size + 1, tmp.cols());
    for (int r = 0; r < out.rows(); ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * out.cols();
        for (int c = 0; c < out.cols(); ++c) {
            double acc = 0.0;
            for (int i = 0; i < size; ++i) acc += taps[i] * tmp.at(r + i, c);
            dst[c] = acc;
        }
    }
    return out;
}

GrayImage downsample2(const GrayImage& img) {
    if (img.rows() < 2 || img.cols() < 2)
        throw SizeError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                        " too small to downsample");
    return block_downsample(img, 2);
}

GrayImage block_downsample(const GrayImage& img, int factor) {
    if (factor < 1) throw ParamError("downsample factor must be >= 1");
    if (factor == 1) return img;
    const int out_rows = img.rows() / factor;
    const int out_cols = img.cols() / factor;
    if (out_rows < 1 || out_cols < 1)
        throw SizeError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                        " too small for factor-" + std::to_string(factor) + " downsampling");
    GrayImage out(out_rows, out_cols);
    const double norm = 1.0 / (static_cast<double>(factor) * factor);
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < factor; ++i)
                for (int j = 0; j < factor; ++j) acc += img.at(r * factor + i, c * factor + j);
            out.at(r, c) = acc * norm;
        }
    }
    return out;
}

GrayImage gradient_magnitude(const GrayImage& img, GradientOperator op) {
    if (img.rows() < 3 || img.cols() < 3)
        throw SizeError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                        " too small for 3x3 gradients");
    Kernel kx;
    kx.size = 3;
    if (op == GradientOperator::Prewitt) {
        const double w = 1.0 / 3.0;
        kx.taps = {w, 0, -w, w, 0, -w, w, 0, -w};
    } else {
        kx.taps = {3.0 / 16, 0, -3.0 / 16, 10.0 / 16, 0, -10.0 / 16, 3.0 / 16, 0, -3.0 / 16};
    }
    Kernel ky;
    ky.size = 3;
    ky.taps.resize(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) ky.taps[static_cast<std::size_t>(r) * 3 + c] = kx.at(c, r);
    const GrayImage gx = convolve_2d(img, kx, BorderMode::Replicate);
    const GrayImage gy = convolve_2d(img, ky, BorderMode::Replicate);
    GrayImage out(img.rows(), img.cols());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::sqrt(gx.data()[i] * gx.data()[i] + gy.data()[i] * gy.data()[i]);
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (!(sigma > 0.0)) throw ParamError("blur sigma must be positive");
    const int size = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    return convolve_2d(img, gaussian_kernel(size, sigma), BorderMode::Symmetric);
}

double mean(const GrayImage& img) {
    double acc = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) acc += img.data()[i];
    return acc / static_cast<double>(img.size());
}

}  // namespace sketchiq
