// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rydberg::dsp {

/// Kaiser window shape parameter for a given stopband attenuation (dB).
double kaiser_beta(double attenuation_db);

/// Odd-length linear-phase low-pass FIR (windowed sinc, Kaiser window).
/// `cutoff_hz` is the -6 dB point; the transition band is centered on it.
std::vector<double> kaiser_lowpass(double cutoff_hz, double transition_hz, double sample_rate_hz,
                                   double attenuation_db = 60.0);

/// Shifts a low-pass prototype to a band-pass centered on center_hz
/// (passband width = twice the prototype cutoff, unit gain at the center).
std::vector<double> lowpass_to_bandpass(const std::vector<double>& lowpass, double center_hz, double sample_rate_hz);

/// Convolution aligned on the filter center (zero delay for odd-length,
/// linear-phase taps); output has the input's length.
std::vector<double> filter_centered(const std::vector<double>& x, const std::vector<double>& taps);
std::vector<std::complex<double>> filter_centered(const std::vector<std::complex<double>>& x,
                                                  const std::vector<double>& taps);

/// Frequency response magnitude of real taps at f (Hz).
double response_magnitude(const std::vector<double>& taps, double f_hz, double sample_rate_hz);

enum class Window { kRectangular, kHann, kBlackmanHarris };

std::vector<double> make_window(Window window, std::size_t n);

struct Spectrum {
    std::vector<double> frequency_hz;
    /// 20 log10 of the amplitude estimate: a sinusoid of amplitude a centered
    /// on a bin reads 20 log10(a).
    std::vector<double> amplitude_db;
};

/// One-sided amplitude spectrum of a real signal (FFTW r2c).
Spectrum amplitude_spectrum(const std::vector<double>& x, double sample_rate_hz, Window window = Window::kHann);

struct Spectrogram {
    std::vector<double> time_s;  // segment centers
    std::vector<double> frequency_hz;
    std::vector<double> amplitude_db;  // row-major by time: [it * frequency_hz.size() + ifreq]
};

Spectrogram spectrogram(const std::vector<double>& x, double sample_rate_hz, std::size_t segment, std::size_t hop,
                        Window window = Window::kHann);

double mean(const std::vector<double>& x);
double rms(const std::vector<double>& x);

}  // namespace rydberg::dsp
