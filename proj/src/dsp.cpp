// SPDX-License-Identifier: Apache-2.0
#include "rydberg/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "rydberg/errors.hpp"

namespace rydberg::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

// Modified Bessel function I0, power series (converges quickly for beta < 20).
double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double to_db(double amplitude) { return 20.0 * std::log10(std::max(amplitude, 1e-300)); }

}  // namespace

double kaiser_beta(double a) {
    if (a > 50.0) return 0.1102 * (a - 8.7);
    if (a >= 21.0) return 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
    return 0.0;
}

std::vector<double> kaiser_lowpass(double cutoff_hz, double transition_hz, double fs, double attenuation_db) {
    if (!(fs > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * fs) || !(transition_hz > 0.0)) {
        throw PreconditionError("kaiser_lowpass: need 0 < cutoff < fs/2 and a positive transition width");
    }
    const double dw = 2.0 * kPi * transition_hz / fs;
    auto length = static_cast<std::size_t>(std::ceil((attenuation_db - 7.95) / (2.285 * dw))) + 1;
    if (length % 2 == 0) ++length;
    const double beta = kaiser_beta(attenuation_db);
    const double m = 0.5 * static_cast<double>(length - 1);
    const double fc = cutoff_hz / fs;
    const double norm = bessel_i0(beta);

    std::vector<double> taps(length);
    for (std::size_t k = 0; k < length; ++k) {
        const double n = static_cast<double>(k) - m;
        const double ideal = n == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * n) / (kPi * n);
        const double r = n / m;
        taps[k] = ideal * bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    }
    const double dc = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) t /= dc;
    return taps;
}

std::vector<double> lowpass_to_bandpass(const std::vector<double>& lowpass, double center_hz, double fs) {
    const double m = 0.5 * static_cast<double>(lowpass.size() - 1);
    std::vector<double> taps(lowpass.size());
    for (std::size_t k = 0; k < taps.size(); ++k) {
        taps[k] = 2.0 * lowpass[k] * std::cos(2.0 * kPi * center_hz * (static_cast<double>(k) - m) / fs);
    }
    return taps;
}

namespace {

template <typename T>
std::vector<T> convolve_centered(const std::vector<T>& x, const std::vector<double>& taps) {
    const auto n = static_cast<long long>(x.size());
    const auto len = static_cast<long long>(taps.size());
    const long long half = len / 2;
    std::vector<T> y(x.size(), T{});
    for (long long i = 0; i < n; ++i) {
        T acc{};
        const long long k_lo = std::max(0LL, i + half - (n - 1));
        const long long k_hi = std::min(len - 1, i + half);
        for (long long k = k_lo; k <= k_hi; ++k) acc += taps[k] * x[i + half - k];
        y[i] = acc;
    }
    return y;
}

}  // namespace

std::vector<double> filter_centered(const std::vector<double>& x, const std::vector<double>& taps) {
    return convolve_centered(x, taps);
}

std::vector<std::complex<double>> filter_centered(const std::vector<std::complex<double>>& x,
                                                  const std::vector<double>& taps) {
    return convolve_centered(x, taps);
}

double response_magnitude(const std::vector<double>& taps, double f_hz, double fs) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) {
        acc += taps[k] * std::polar(1.0, -2.0 * kPi * f_hz * static_cast<double>(k) / fs);
    }
    return std::abs(acc);
}

std::vector<double> make_window(Window window, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    const double denom = static_cast<double>(n);  // periodic form
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / denom;
        switch (window) {
            case Window::kRectangular: break;
            case Window::kHann: w[i] = 0.5 - 0.5 * std::cos(x); break;
            case Window::kBlackmanHarris:
                w[i] = 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2 * x) - 0.01168 * std::cos(3 * x);
                break;
        }
    }
    return w;
}

namespace {

// Amplitude spectrum of one windowed segment; `plan` works on in/out.
void segment_spectrum(const double* x, std::size_t n, const std::vector<double>& w, double* in, fftw_complex* out,
                      fftw_plan plan, std::vector<double>& db) {
    const double gain = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) in[i] = x[i] * w[i];
    fftw_execute(plan);
    const std::size_t bins = n / 2 + 1;
    db.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double mag = std::hypot(out[k][0], out[k][1]);
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        db[k] = to_db((edge ? 1.0 : 2.0) * mag / gain);
    }
}

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftBuffers {
    explicit FftBuffers(std::size_t n) : in(fftw_alloc_real(n)), out(fftw_alloc_complex(n / 2 + 1)) {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    ~FftBuffers() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;

    double* in;
    fftw_complex* out;
    fftw_plan plan = nullptr;
};

}  // namespace

Spectrum amplitude_spectrum(const std::vector<double>& x, double fs, Window window) {
    if (x.size() < 2) throw PreconditionError("amplitude_spectrum: need at least two samples");
    const std::size_t n = x.size();
    FftBuffers buffers(n);
    Spectrum s;
    segment_spectrum(x.data(), n, make_window(window, n), buffers.in, buffers.out, buffers.plan, s.amplitude_db);
    for (std::size_t k = 0; k < s.amplitude_db.size(); ++k) {
        s.frequency_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(n));
    }
    return s;
}

Spectrogram spectrogram(const std::vector<double>& x, double fs, std::size_t segment, std::size_t hop,
                        Window window) {
    if (segment < 2 || hop == 0 || x.size() < segment) {
        throw PreconditionError("spectrogram: need 2 <= segment <= signal length and hop > 0");
    }
    FftBuffers buffers(segment);
    const auto w = make_window(window, segment);
    Spectrogram sg;
    for (std::size_t k = 0; k <= segment / 2; ++k) {
        sg.frequency_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(segment));
    }
    std::vector<double> db;
    for (std::size_t start = 0; start + segment <= x.size(); start += hop) {
        segment_spectrum(x.data() + start, segment, w, buffers.in, buffers.out, buffers.plan, db);
        sg.time_s.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(segment)) / fs);
        sg.amplitude_db.insert(sg.amplitude_db.end(), db.begin(), db.end());
    }
    return sg;
}

double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace rydberg::dsp
