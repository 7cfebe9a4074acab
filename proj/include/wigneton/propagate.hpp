#pragma once

// Time evolution of Wigner fields, dW/dt = {H, W}_Moyal, by the method of
// lines on a periodic grid. Kicks K(q) or K(p) at t = n T (n >= 1) are
// applied exactly in the mixed (q, y) or (x, p) representation.

#include <vector>

#include "wigneton/phase_space_grid.hpp"

namespace wigneton {

enum class Scheme { rk4, implicit_midpoint };

struct PropagateOptions {
    Scheme scheme = Scheme::implicit_midpoint;
    double t_end = 1.0;
    double dt = 1e-2;
    int stride = 1;                // keep every stride-th step (plus the start and end)
    double rk4_cfl_limit = 2.78;   // dt * rho(L) bound; RK4 is stable up to 2 sqrt 2 on the imaginary axis
    double growth_limit = 10.0;    // abort if ||W|| exceeds this multiple of ||W0||
};

struct Trajectory {
    std::vector<WignerField> snapshots;
    int steps = 0;
    int kicks_applied = 0;
    double max_mass_drift = 0.0;  // max |integral(W_t) - integral(W_0)|
    double spectral_bound = 0.0;  // Gershgorin bound on |lambda(L)|
};

// Gershgorin bound on the spectral radius of a sparse matrix.
double spectral_radius_bound(const SparseMatrix& m);

// Exact kick map W -> W' for U = exp(-i K / hbar). K must depend on q only
// or on p only; mixed symbols throw std::invalid_argument.
WignerField apply_kick(const WignerField& w, const PolySymbol& kick);

// Throws std::invalid_argument for bad options (dt <= 0, t_end < 0, RK4 step
// above the stability bound) and NumericalError when the norm blows up.
Trajectory propagate(const WignerField& w0, const Hamiltonian& h, const WaveletBasis& basis,
                     const PropagateOptions& options);

}  // namespace wigneton
