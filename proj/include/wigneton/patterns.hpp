#pragma once

// Pattern diagnostics for Wigner fields: discrete Wigner transform of 1-D
// wave functions, per-level wavelet energies, and a threshold classifier
// into localized / chaotic / intermediate patterns.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wigneton/phase_space_grid.hpp"

namespace wigneton {

struct WignerTransformResult {
    WignerField field;
    double input_norm = 1.0;   // sum |psi|^2 dq before normalization
    bool renormalized = false; // set when |input_norm - 1| > 1e-10
};

// W(q_k, p_j) = (1/(pi hbar)) sum_m conj(psi_{k+m}) psi_{k-m} exp(2 i p_j m dq / hbar) dq
// with psi taken as zero outside the grid. The p axis is fixed by the
// offsets: p_j = pi hbar j / (N dq), j in [-N/2, N/2). psi.size() must be a
// power of two >= 4.
WignerTransformResult wigner_transform(const std::vector<std::complex<double>>& psi, double q0, double dq,
                                       double hbar);

enum class PatternClass { localized_waveleton, chaotic, intermediate };
std::string to_string(PatternClass c);

// Versioned classification constants.
struct PatternThresholds {
    int version = 1;
    double top2_concentration = 0.8;  // localized: two densest levels hold this share
    double radius_fraction = 0.25;    // localized: radius <= this share of the diameter
    double entropy_fraction = 0.9;    // chaotic: entropy >= this share of log(n_levels)
    double stability_variation = 0.1; // trajectory window: relative spread below this
};

struct PatternReport {
    std::vector<double> level_energies;  // raw, sum = sum of W^2
    std::vector<double> level_shares;    // per-coefficient densities normalized to 1
    double scale_entropy = 0.0;
    double participation_ratio = 0.0;
    double top2_share = 0.0;
    double negativity_volume = 0.0;
    double localization_radius = 0.0;
    double domain_diameter = 0.0;
    PatternClass classification = PatternClass::intermediate;
    double time = 0.0;
    std::optional<std::pair<double, double>> time_window;
};

// Energy sum of squared 2-D wavelet coefficients per level: element 0 is
// the approximation, 1..levels the details coarse to fine.
std::vector<double> scale_energy_spectrum(const WignerField& field, const WaveletBasis& basis, int levels);

double negativity_volume(const WignerField& field);

// I.i.d. values uniform on [-1, 1] from a seeded mt19937_64; the reference
// "chaotic" field.
WignerField random_field(const Grid2D& grid, std::uint64_t seed, double hbar = 1.0);

PatternClass classify(const PatternReport& r, std::size_t n_levels, const PatternThresholds& t = {});

PatternReport analyze(const WignerField& field, const WaveletBasis& basis, int levels,
                      const PatternThresholds& t = {});

struct TrajectoryReport {
    std::vector<PatternReport> snapshots;
    // Longest run of consecutive snapshots over which entropy, participation
    // ratio and localization radius each vary by less than the threshold.
    std::size_t window_begin = 0, window_end = 0;  // inclusive indices
    PatternReport summary;  // metrics averaged over the window, classified
};

TrajectoryReport analyze(const std::vector<WignerField>& trajectory, const WaveletBasis& basis, int levels,
                         const PatternThresholds& t = {});

nlohmann::json to_json(const PatternReport& r);
nlohmann::json to_json(const TrajectoryReport& r);

}  // namespace wigneton
