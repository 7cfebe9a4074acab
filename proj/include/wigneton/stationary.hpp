#pragma once

// Stationary Wigner functions: H * W = eps W on a periodic phase-space grid.
//
// The stargen operator splits as L = L_real + i L_imag. L_real (symmetrized)
// is diagonalized; L_imag W = 0 is checked a posteriori. Eigenvalues of
// L_real that are (nearly) degenerate are grouped, and inside each group the
// combination that best satisfies the constraint is taken as the mode.

#include <vector>

#include "wigneton/lanczos.hpp"
#include "wigneton/phase_space_grid.hpp"

namespace wigneton {

struct LevelRange {
    int coarse = 2;
    int fine = 6;
    int transform_levels() const noexcept { return fine - coarse; }
};

struct StationaryOperators {
    Grid2D grid;
    double hbar = 1.0;
    KroneckerOperator real_part;   // unsymmetrized
    KroneckerOperator imag_part;
    SparseMatrix real_symmetric;   // (L + L^T) / 2
    SparseMatrix imag;
    double asymmetry = 0.0;        // ||L - L^T||_F / ||L||_F before symmetrizing
};

// Throws std::invalid_argument for a kicked Hamiltonian, an invalid grid, or
// levels that do not divide the grid.
StationaryOperators assemble_stationary(const Hamiltonian& h, const WaveletBasis& basis, const LevelRange& levels,
                                        const Grid2D& grid);

struct StationaryOptions {
    double cluster_tolerance = 0.05;     // eigenvalues closer than this form one group
    double constraint_tolerance = 0.25;  // groups whose best ||L_imag W|| / ||W|| exceeds this are spurious
    double flag_tolerance = 1e-6;        // modes above this residual are flagged
    int initial_pairs = 0;               // 0: chosen from n_modes
    int max_pairs = 480;
    EigenOptions eigen;
};

struct StationaryResult {
    std::vector<double> eigenvalues;       // ascending
    std::vector<WignerField> modes;        // integral normalized to 1
    std::vector<double> residuals;         // ||L_real W - eps W|| / ||W||
    std::vector<double> imag_residuals;    // ||L_imag W|| / ||W||
    std::vector<bool> flagged;             // residual or imag_residual above flag tolerance
    std::vector<int> cluster_sizes;
    std::vector<double> rejected_eigenvalues;  // groups failing the constraint, for diagnostics
    int eigenpairs_computed = 0;
    double asymmetry = 0.0;
};

// Throws NumericalError when fewer than n_modes constrained modes are found.
StationaryResult solve_stationary(const StationaryOperators& ops, int n_modes, const StationaryOptions& options = {});

}  // namespace wigneton
