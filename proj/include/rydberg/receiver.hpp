// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydberg/fidelity.hpp"

namespace rydberg {

/// Vapor cell and probe readout, SI units throughout.
struct VaporCellParams {
    double cell_length = 0.02;            // m
    double atomic_density = 4.89e16;      // m^-3
    double probe_dipole = 0.0;            // C m
    double probe_wavelength = 852.35e-9;  // m
    double probe_power = 1e-3;            // W
    double responsivity = 1.0;            // A / W
    double omega_p = 0.0;                 // probe Rabi, rad/us
    /// Replaces the computed susceptibility constant (e.g. 0 for a transparent cell).
    std::optional<double> xi0_override;

    /// 2 pi d N0 mu_P^2 / (eps0 hbar lambda_P Omega_P), Omega_P in rad/s.
    double xi0() const;
    /// Probe angular frequency 2 pi c / lambda_P, rad/s.
    double probe_angular_frequency() const;
    /// Throws ConfigError on non-positive or non-finite fields.
    void validate() const;

    /// Cesium cell; mu_P follows from Omega_P and the probe field amplitude
    /// (mu_P = hbar Omega_P / A_P). The default field is a calibration choice.
    static VaporCellParams cesium_default(double omega_p, double probe_field_v_per_m = 1000.0);
};

enum class ProbeKind { kAnalytic, kNumerical };

std::string_view to_string(ProbeKind kind);
ProbeKind parse_probe_kind(std::string_view text);

/// Where rho_21 comes from: the closed form (gamma_21 read from the scheme)
/// or the full-decay numerical state of `numerical`.
struct ProbeModel {
    ProbeKind kind = ProbeKind::kAnalytic;
    NumericalModel numerical;
};

Complex probe_coherence(const DriveConfig& drive, const ProbeModel& model);

/// y = R (P0 / 2) exp(2 Xi0 Im rho_21), in A.
double photodetector_output(const DriveConfig& drive, const VaporCellParams& cell, const ProbeModel& model);

struct GainVector {
    std::array<double, 4> gain{};          // A per (V/m); 0 for absent channels
    std::array<double, 4> slope{};         // dy/dOmega_n, A per (rad/s)
    std::array<double, 4> half_step_gain{};  // same with the step halved
    std::vector<std::string> warnings;     // step-halving disagreement above tolerance

    double relative_step_change(int channel) const;
};

/// G_n = (mu_n / hbar) dy/dOmega_n by central differences with step
/// `step` (rad/us, default 2 pi 1 kHz), repeated at step/2 as a smoothness
/// check. Throws NumericalError for non-finite derivatives.
GainVector gain_coefficients(const DriveConfig& lo, const VaporCellParams& cell, const LevelScheme& scheme,
                             const ProbeModel& model, double step = 0.0);

/// One RF tone riding on the LO of `channel`.
struct RfChannelSignal {
    int channel = 1;
    double amplitude = 0.0;     // A_RF, V/m
    double offset = 0.0;        // delta omega, rad/us
    double phase = 0.0;         // delta phi, rad
    double bandwidth_hz = 1e5;  // baseband bandwidth B_n
    /// Optional complex baseband symbols (zero-order hold at symbol_rate_hz)
    /// multiplying the tone; empty means a pure tone.
    std::vector<std::complex<double>> envelope;
    double symbol_rate_hz = 0.0;

    std::complex<double> envelope_at(double t_us) const;
};

struct RfSignalSpec {
    std::vector<RfChannelSignal> channels;
    double max_field_ratio = 0.01;  // heterodyne condition A_RF / A_LO

    /// Throws PreconditionError on duplicate channels or overlapping bands
    /// (|f_n - f_m| must exceed B_n + B_m).
    void validate() const;
};

/// A_LO,n = hbar Omega_LO,n / mu_n (V/m).
double lo_field(int channel, const DriveConfig& lo, const LevelScheme& scheme);

/// Omega_n(t) = Omega_LO,n + (mu_n / hbar) Re{A_RF,n s_n(t) exp(i(delta omega_n t + delta phi_n))}, rad/us.
double heterodyne_rabi(int channel, double t_us, const RfSignalSpec& spec, const DriveConfig& lo,
                       const LevelScheme& scheme);

/// Messages for every channel whose A_RF / A_LO exceeds spec.max_field_ratio.
std::vector<std::string> heterodyne_warnings(const RfSignalSpec& spec, const DriveConfig& lo,
                                             const LevelScheme& scheme);

enum class WaveformMode { kExact, kLinearized };

struct NoiseSpec {
    double sigma = 0.0;  // A, standard deviation per sample
    std::uint64_t seed = 1;
};

struct Waveform {
    std::vector<double> time_us;
    std::vector<double> current;  // A
    double sample_rate_hz = 0.0;
};

struct WaveformRequest {
    double duration_us = 100.0;
    double sample_rate_mhz = 10.0;
    WaveformMode mode = WaveformMode::kExact;
    NoiseSpec noise;
    unsigned workers = 1;
};

/// Photodetector current along the heterodyne Rabi trajectory. Exact mode
/// re-solves rho_21 per sample (adiabatic readout); linearized mode uses
/// y_LO + sum G_n Re{...}. Noise, if any, is the same seeded sequence in both
/// modes. Throws PreconditionError when the sample rate is not above
/// 4 max(f_n + B_n / 2).
Waveform synthesize_pd_waveform(const RfSignalSpec& spec, const DriveConfig& lo, const VaporCellParams& cell,
                                const LevelScheme& scheme, const ProbeModel& model, const WaveformRequest& request);

/// Same, with precomputed gains (linearized mode) to avoid repeating them.
Waveform synthesize_pd_waveform(const RfSignalSpec& spec, const DriveConfig& lo, const VaporCellParams& cell,
                                const LevelScheme& scheme, const ProbeModel& model, const WaveformRequest& request,
                                const GainVector& gains);

/// Subtracts the mean and divides by the largest magnitude.
std::vector<double> dc_removed_normalized(const std::vector<double>& x);

/// rms(a' - b') / rms(b') with a', b' the DC-removed normalized waveforms.
double normalized_discrepancy(const std::vector<double>& a, const std::vector<double>& b);

/// rms((a - mean a) - (b - mean b)), in the waveforms' own units.
double dc_removed_rms_difference(const std::vector<double>& a, const std::vector<double>& b);

struct DemodChannel {
    int channel = 0;
    double offset_hz = 0.0;
    double bandwidth_hz = 0.0;
};

struct DemodOptions {
    double attenuation_db = 60.0;
    double bandpass_half_width = 0.6;  // x B, so the passband is 1.2 B wide
    double lowpass_cutoff = 0.6;       // x B
    double transition = 0.4;           // x B
};

struct Baseband {
    int channel = 0;
    double sample_rate_hz = 0.0;
    std::vector<double> time_us;
    std::vector<std::complex<double>> samples;  // complex envelope, filter transients removed

    /// Mean of the samples (the recovered phasor for a steady tone).
    std::complex<double> mean() const;
    double mean_magnitude() const;
};

/// Band-pass, mix down with cos / -sin, low-pass, scale by 2 and decimate,
/// for every channel. Throws PreconditionError on overlapping bands or a
/// record too short to survive the filter transients.
std::vector<Baseband> iq_demodulate(const Waveform& waveform, const std::vector<DemodChannel>& channels,
                                    const DemodOptions& options = {}, unsigned workers = 1);

}  // namespace rydberg
