// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rydberg/analytic.hpp"
#include "rydberg/lindblad.hpp"

namespace rydberg {

/// Uhlmann fidelity [Tr sqrt(sqrt(rho_a) rho_n sqrt(rho_a))]^2, clamped to
/// [0, 1]. Both inputs must be valid density matrices of equal size.
double fidelity(const ComplexMatrix& rho_n, const ComplexMatrix& rho_a);

/// How the full-decay numerical state is produced.
enum class NumericalRoute {
    kNullSpace,  // kernel of the Liouvillian (converged state)
    kEvolve,     // RK4 from the ground state up to evolve.t_end
};

std::string_view to_string(NumericalRoute route);
NumericalRoute parse_route(std::string_view text);

struct NumericalModel {
    LevelScheme scheme = cesium_scheme();
    NumericalRoute route = NumericalRoute::kNullSpace;
    EvolveOptions evolve{10.0, 1e-4, 0.0, 0.1};
};

/// Numerical steady state of `drive` under `model` (resonant drives).
ComplexMatrix numerical_state(const DriveConfig& drive, const NumericalModel& model);

/// Fidelity between the numerical state and the closed form at the same
/// drives. The closed form uses gamma_21 taken from the model's scheme.
double point_fidelity(const DriveConfig& drive, const NumericalModel& model);

struct FidelityScanSpec {
    DriveConfig base;    // Omega_P, Omega_C and the two fixed RF Rabi values
    int axis_x = 2;      // channel varied along x (1..4)
    int axis_y = 3;      // channel varied along y (1..4)
    double min = 0.0;    // rad/us, both axes
    double max = 0.0;    // rad/us, both axes
    int resolution = 21;  // points per axis; 1 evaluates only `min`
};

struct FidelityScan {
    FidelityScanSpec spec;
    std::vector<double> axis_values;  // shared by x and y
    /// Row-major by y: value(ix, iy) = values[iy * n + ix]. NaN marks a point
    /// whose solver failed; the reason is kept in `failures`.
    std::vector<double> values;
    std::vector<std::string> failures;

    std::size_t size() const { return axis_values.size(); }
    double value(std::size_t ix, std::size_t iy) const { return values[iy * size() + ix]; }
    DriveConfig drive_at(std::size_t ix, std::size_t iy) const;
};

FidelityScan fidelity_scan(const FidelityScanSpec& spec, const NumericalModel& model, unsigned workers = 1);

/// Long-form CSV: omega1_mhz..omega4_mhz, fidelity (empty for failures).
void write_scan_csv(std::ostream& out, const FidelityScan& scan);

struct PerturbationRegion {
    std::array<double, 4> center{};       // rad/us
    std::array<double, 4> half_widths{};  // rad/us, >= 0
    int samples_per_axis = 3;

    /// Tensor-grid sample points; axes with zero half width collapse to the
    /// center, samples below zero are clamped to zero.
    std::vector<std::array<double, 4>> sample_points() const;
};

/// Mean point_fidelity over the region, Omega_P and Omega_C taken from `base`.
double average_fidelity(const PerturbationRegion& region, const DriveConfig& base, const NumericalModel& model,
                        unsigned workers = 1);

struct OptimizerSpec {
    DriveConfig base;                          // Omega_P, Omega_C
    std::array<std::vector<double>, 4> grids;  // candidate values per channel (rad/us)
    double sum_max = 0.0;                      // rad/us, constraint sum Omega_n <= sum_max
    std::array<double, 4> half_widths{};       // region around each candidate
    int samples_per_axis = 3;

    /// Evenly spaced grid min, min+step, ..., <= max (+ tiny slack) on every axis.
    static std::vector<double> axis_grid(double min, double max, double step);

    /// Same grid on each of `channels`; the remaining channels are pinned at 0
    /// with zero half width.
    static OptimizerSpec restricted(const DriveConfig& base, const std::vector<int>& channels, double min, double max,
                                    double step, double sum_max, double half_width, int samples_per_axis);
};

struct OptimizerCandidate {
    std::array<double, 4> point{};
    double average_fidelity = 0.0;  // NaN if the region could not be evaluated
};

struct OptimizerResult {
    OptimizerCandidate best;
    std::vector<OptimizerCandidate> candidates;  // every feasible point, enumeration order
    std::size_t feasible = 0;
    std::size_t failed = 0;
};

/// Exhaustive search. Highest average fidelity wins; ties go to the smaller
/// sum of Rabi values, then to the lexicographically smaller point. Throws
/// PreconditionError if no candidate satisfies the constraint.
OptimizerResult optimize_operating_point(const OptimizerSpec& spec, const NumericalModel& model,
                                         unsigned workers = 1);

}  // namespace rydberg
