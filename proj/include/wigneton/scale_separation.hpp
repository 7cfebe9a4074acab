#pragma once

// Space-time multiresolution split of a stored trajectory.
//
// Every snapshot is taken to 2-D wavelet coefficients (Mallat layout, M
// levels). Each coefficient's time series is then split by a periodic MRA in
// time into a slow part on V_N and fast parts on the detail levels
// l = N .. J-1 (J = log2 of the number of samples). Detail level l carries
// DFT bins in [2^(l-1), 2^l] cycles per record, so omega_l ~ 2^l.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "wigneton/propagate.hpp"

namespace wigneton {

struct FastLevel {
    int level = 0;               // temporal MRA level l
    Eigen::MatrixXd trajectory;  // samples x spatial coefficients
    int dominant_bin = 0;        // cycles per record, argmax of the summed power
    double omega = 0.0;          // 2 pi dominant_bin / record length
    bool in_band = false;        // dominant_bin within [2^(l-1), 2^l]
    double energy = 0.0;
};

struct ScaleSeparatedSolution {
    Grid2D grid;
    int spatial_levels = 0;       // M
    int time_coarse_level = 0;    // N
    std::vector<double> times;    // the 2^J samples used
    Eigen::MatrixXd coefficients; // samples x spatial coefficients
    Eigen::MatrixXd slow;         // projection onto V_N in time
    std::vector<FastLevel> fast;  // ordered coarse to fine
    // amplitudes(i, j): energy of spatial level i (0 = approximation,
    // 1..M coarse to fine details) in temporal band j (0 = slow, 1.. fast).
    Eigen::MatrixXd amplitudes;
    double dominant_omega = 0.0;  // strongest nonzero frequency of the whole record
    double reconstruction_error = 0.0;  // max |slow + sum fast - coefficients|

    Eigen::MatrixXd reconstruct() const;
    double slow_energy() const;
    double fast_energy() const;
};

// Spatial level (0 = approximation, 1..levels coarse to fine) of the Mallat
// index (r, c) on an nq x np array.
int spatial_level(std::size_t r, std::size_t c, std::size_t nq, std::size_t np, int levels);

// Splits the first 2^J snapshots (largest power of two available; snapshots
// should be equally spaced). Throws std::invalid_argument when there are
// fewer than 2^(time_coarse_level + 1) snapshots or the grids differ.
ScaleSeparatedSolution scale_separate(const std::vector<WignerField>& snapshots, const WaveletBasis& basis,
                                      int spatial_levels, int time_coarse_level);

// propagate() followed by scale_separate().
ScaleSeparatedSolution scale_separated_solve(const Hamiltonian& h, const WaveletBasis& basis, int spatial_levels,
                                             const WignerField& w0, const PropagateOptions& options,
                                             int time_coarse_level);

}  // namespace wigneton
