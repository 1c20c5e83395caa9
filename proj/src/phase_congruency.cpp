#include "sketchiq/phase_congruency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "sketchiq/fft.hpp"

namespace sketchiq {

namespace {

constexpr double kPcEpsilon = 1e-4;
constexpr double kLowpassCutoff = 0.45;
constexpr int kLowpassOrder = 15;
constexpr double kNoiseStdDevs = 2.0;

struct FilterBank {
    int rows = 0;
    int cols = 0;
    int scales = 0;
    int orients = 0;
    // filters[s * orients + o], each rows*cols row-major, real-valued.
    std::vector<std::vector<double>> filters;
};

std::string bank_key(int rows, int cols, const FsimParams& p) {
    std::ostringstream key;
    key << rows << 'x' << cols << '|' << p.pc_scales << '|' << p.pc_orientations << '|'
        << p.min_wavelength << '|' << p.scale_mult << '|' << p.sigma_on_f;
    return key.str();
}

std::shared_ptr<const FilterBank> build_bank(int rows, int cols, const FsimParams& p) {
    auto bank = std::make_shared<FilterBank>();
    bank->rows = rows;
    bank->cols = cols;
    bank->scales = p.pc_scales;
    bank->orients = p.pc_orientations;
    const std::size_t n = static_cast<std::size_t>(rows) * cols;

    // Normalized frequency grid in FFT index order, DC at (0, 0).
    std::vector<double> radius(n), theta(n);
    for (int r = 0; r < rows; ++r) {
        const double fy = r < (rows + 1) / 2 ? static_cast<double>(r) / rows
                                             : static_cast<double>(r - rows) / rows;
        for (int c = 0; c < cols; ++c) {
            const double fx = c < (cols + 1) / 2 ? static_cast<double>(c) / cols
                                                 : static_cast<double>(c - cols) / cols;
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            radius[i] = std::sqrt(fx * fx + fy * fy);
            theta[i] = std::atan2(-fy, fx);
        }
    }
    radius[0] = 1.0;  // keeps log(radius) finite; DC is zeroed below anyway

    std::vector<std::vector<double>> radial(static_cast<std::size_t>(p.pc_scales));
    const double log_sof = std::log(p.sigma_on_f);
    for (int s = 0; s < p.pc_scales; ++s) {
        radial[s].resize(n);
        const double f0 = 1.0 / (p.min_wavelength * std::pow(p.scale_mult, s));
        for (std::size_t i = 0; i < n; ++i) {
            const double lr = std::log(radius[i] / f0);
            const double lowpass =
                1.0 / (1.0 + std::pow(radius[i] / kLowpassCutoff, 2.0 * kLowpassOrder));
            radial[s][i] = std::exp(-(lr * lr) / (2.0 * log_sof * log_sof)) * lowpass;
        }
        radial[s][0] = 0.0;
    }

    const double theta_sigma = std::numbers::pi / p.pc_orientations / 1.2;
    std::vector<std::vector<double>> spread(static_cast<std::size_t>(p.pc_orientations));
    for (int o = 0; o < p.pc_orientations; ++o) {
        spread[o].resize(n);
        const double angle = o * std::numbers::pi / p.pc_orientations;
        for (std::size_t i = 0; i < n; ++i) {
            const double ds = std::abs(
                std::atan2(std::sin(theta[i] - angle), std::cos(theta[i] - angle)));
            spread[o][i] = std::exp(-(ds * ds) / (2.0 * theta_sigma * theta_sigma));
        }
    }

    bank->filters.resize(static_cast<std::size_t>(p.pc_scales) * p.pc_orientations);
    for (int s = 0; s < p.pc_scales; ++s) {
        for (int o = 0; o < p.pc_orientations; ++o) {
            auto& f = bank->filters[static_cast<std::size_t>(s) * p.pc_orientations + o];
            f.resize(n);
            for (std::size_t i = 0; i < n; ++i) f[i] = radial[s][i] * spread[o][i];
        }
    }
    return bank;
}

std::shared_ptr<const FilterBank> cached_bank(int rows, int cols, const FsimParams& p) {
    static std::mutex mutex;
    static std::map<std::string, std::shared_ptr<const FilterBank>> cache;
    const std::string key = bank_key(rows, cols, p);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto bank = build_bank(rows, cols, p);
    cache.emplace(key, bank);
    return bank;
}

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    auto mid = values.begin() + n / 2;
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

GrayImage phase_congruency(const GrayImage& img, const FsimParams& p) {
    const int rows = img.rows();
    const int cols = img.cols();
    const std::size_t n = img.size();
    const auto bank = cached_bank(rows, cols, p);
    const std::vector<std::complex<double>> spectrum = fft2(img);

    std::vector<double> pc_num(n, 0.0);
    std::vector<double> pc_den(n, 0.0);
    std::vector<double> sum_even(n), sum_odd(n), sum_amp(n), smallest_amp2(n);
    std::vector<std::complex<double>> filtered(n);

    for (int o = 0; o < p.pc_orientations; ++o) {
        std::fill(sum_even.begin(), sum_even.end(), 0.0);
        std::fill(sum_odd.begin(), sum_odd.end(), 0.0);
        std::fill(sum_amp.begin(), sum_amp.end(), 0.0);
        for (int s = 0; s < p.pc_scales; ++s) {
            const auto& filter = bank->filters[static_cast<std::size_t>(s) * p.pc_orientations + o];
            for (std::size_t i = 0; i < n; ++i) filtered[i] = spectrum[i] * filter[i];
            const std::vector<std::complex<double>> resp = ifft2(filtered, rows, cols);
            for (std::size_t i = 0; i < n; ++i) {
                const double even = resp[i].real();
                const double odd = resp[i].imag();
                sum_even[i] += even;
                sum_odd[i] += odd;
                const double amp2 = even * even + odd * odd;
                sum_amp[i] += std::sqrt(amp2);
                if (s == 0) smallest_amp2[i] = amp2;
            }
        }
        // Rayleigh noise model: the smallest-scale squared amplitude is
        // exponential with mean 2*sigma_r^2 and median mean*ln 2.
        const double mean_amp2 = median_of(smallest_amp2) / std::numbers::ln2;
        const double sigma_r = std::sqrt(mean_amp2 / 2.0);
        double scale_gain = 0.0;
        for (int s = 0; s < p.pc_scales; ++s) scale_gain += std::pow(1.0 / p.scale_mult, s);
        const double total_sigma = sigma_r * scale_gain;
        const double threshold =
            total_sigma * (std::sqrt(std::numbers::pi / 2.0) +
                           kNoiseStdDevs * std::sqrt((4.0 - std::numbers::pi) / 2.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double energy =
                std::sqrt(sum_even[i] * sum_even[i] + sum_odd[i] * sum_odd[i]);
            pc_num[i] += std::max(energy - threshold, 0.0);
            pc_den[i] += sum_amp[i];
        }
    }

    std::vector<double> pc(n);
    for (std::size_t i = 0; i < n; ++i) pc[i] = pc_num[i] / (kPcEpsilon + pc_den[i]);
    return GrayImage::from_data(rows, cols, std::move(pc));
}

}  // namespace sketchiq
