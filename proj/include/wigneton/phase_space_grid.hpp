#pragma once

// Rectangular periodic phase-space grids, sampled Wigner fields, and the
// discretization of PhaseSpaceOperators as sums of Kronecker products of
// 1-D factors (q outer, p inner).

#include <cstddef>
#include <vector>

#include "wigneton/operator_compression.hpp"
#include "wigneton/symbol_algebra.hpp"

namespace wigneton {

// Nodes q_i = q0 + i*dq on [q0, q1), p_j = p0 + j*dp on [p0, p1).
// Flat index i * np + j.
struct Grid2D {
    double q0 = -8.0, q1 = 8.0;
    double p0 = -8.0, p1 = 8.0;
    std::size_t nq = 64, np = 64;

    double dq() const noexcept { return (q1 - q0) / static_cast<double>(nq); }
    double dp() const noexcept { return (p1 - p0) / static_cast<double>(np); }
    double q(std::size_t i) const noexcept { return q0 + static_cast<double>(i) * dq(); }
    double p(std::size_t j) const noexcept { return p0 + static_cast<double>(j) * dp(); }
    std::size_t size() const noexcept { return nq * np; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * np + j; }
    PeriodicGrid1D q_axis() const noexcept { return {q0, q1 - q0, nq}; }
    PeriodicGrid1D p_axis() const noexcept { return {p0, p1 - p0, np}; }

    // Throws std::invalid_argument unless both counts are powers of two >= 4
    // and the extents are positive.
    void validate() const;
};

struct WignerField {
    Grid2D grid;
    std::vector<double> values;  // row-major, q outer
    double hbar = 1.0;
    double time = 0.0;

    WignerField() = default;
    WignerField(Grid2D g, double hbar_, double time_ = 0.0);

    double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    double integral() const;  // sum W dq dp
    double l2_norm() const;   // sqrt(sum W^2 dq dp)
    // Scales so that integral() == 1. Throws NumericalError if the integral
    // is zero or not finite.
    void normalize();
};

// Samples f(q, p) on the grid.
template <class F>
WignerField sample_field(const Grid2D& grid, double hbar, F&& f) {
    WignerField w(grid, hbar);
    for (std::size_t i = 0; i < grid.nq; ++i)
        for (std::size_t j = 0; j < grid.np; ++j) w.at(i, j) = f(grid.q(i), grid.p(j));
    return w;
}

// Coherent-state Wigner function centered at (q_c, p_c) with widths
// sqrt(hbar/2) in both directions.
WignerField coherent_state(const Grid2D& grid, double hbar, double q_c, double p_c);

struct KroneckerTerm {
    double coeff = 1.0;
    SparseMatrix q_factor;  // nq x nq
    SparseMatrix p_factor;  // np x np
};

// sum_t coeff_t (Q_t kron P_t) acting on flat (q outer, p inner) vectors.
class KroneckerOperator {
public:
    KroneckerOperator() = default;
    explicit KroneckerOperator(Grid2D grid) : grid_(grid) {}

    const Grid2D& grid() const noexcept { return grid_; }
    const std::vector<KroneckerTerm>& terms() const noexcept { return terms_; }
    void add(KroneckerTerm t) { terms_.push_back(std::move(t)); }
    bool empty() const noexcept { return terms_.empty(); }

    SparseMatrix assemble() const;
    // Applies term by term without assembling: (Q kron P) v = vec(Q V P^T).
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

private:
    Grid2D grid_;
    std::vector<KroneckerTerm> terms_;
};

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

// Discretizes an operator whose coefficient symbols are real. Monomial
// c p^i q^j d_q^a d_p^b becomes c (diag(q^j) D_a) kron (diag(p^i) D_b).
// Throws std::invalid_argument if a coefficient has an imaginary part.
KroneckerOperator discretize(const PhaseSpaceOperator& op, const WaveletBasis& basis, const Grid2D& grid);

}  // namespace wigneton
