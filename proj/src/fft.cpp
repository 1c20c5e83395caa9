#include "sketchiq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "sketchiq/errors.hpp"

namespace sketchiq {

namespace {

// Plan creation is not thread-safe; execution via fftw_execute_dft is.
// FFTW_UNALIGNED lets one cached plan serve any caller-provided buffer.
class PlanCache {
public:
    fftw_plan get(int rows, int cols, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(rows, cols, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> scratch(static_cast<std::size_t>(rows) * cols);
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, scratch.data(), scratch.data(), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw NumericError("FFT plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

std::vector<std::complex<double>> fft2(const GrayImage& img) {
    const int rows = img.rows();
    const int cols = img.cols();
    std::vector<std::complex<double>> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = img.data()[i];
    fftw_plan plan = plan_cache().get(rows, cols, FFTW_FORWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    return buf;
}

std::vector<std::complex<double>> ifft2(const std::vector<std::complex<double>>& spectrum,
                                        int rows, int cols) {
    if (rows < 1 || cols < 1) throw ShapeError("ifft2 requires positive dimensions");
    if (spectrum.size() != static_cast<std::size_t>(rows) * cols)
        throw ShapeError("ifft2 spectrum size does not match rows*cols");
    std::vector<std::complex<double>> buf = spectrum;
    fftw_plan plan = plan_cache().get(rows, cols, FFTW_BACKWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    const double scale = 1.0 / (static_cast<double>(rows) * cols);
    for (auto& v : buf) v *= scale;
    return buf;
}

}  // namespace sketchiq
