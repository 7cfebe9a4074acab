#pragma once

// Wavelet-Galerkin operators on periodic 1-D grids and their nonstandard
// (level-decoupled block) form.
//
// Grid convention: `points` nodes x_k = x0 + k*h on [x0, x0 + length),
// h = length / points. A coefficient vector is read as point values at the
// nodes; derivative matrices come from connection coefficients and
// multiplication operators are collocated at the nodes.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wigneton/wavelet.hpp"

namespace wigneton {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Lambda^{d1,d2}_l = integral of phi^{(d1)}(x) phi^{(d2)}(x + l) dx, stored for
// l in [-(genus-2), genus-2]; zero outside.
struct ConnectionTable {
    WaveletBasis basis;
    int d1 = 0;
    int d2 = 0;
    std::vector<double> values;

    int max_shift() const noexcept { return basis.genus() - 2; }
    double at(int l) const noexcept {
        const int m = max_shift();
        return (l < -m || l > m) ? 0.0 : values[static_cast<std::size_t>(l + m)];
    }
};

// Solves the refinement eigen-system for Lambda^{0,d1+d2} with the moment
// normalization sum_l l^d Lambda_l = (-1)^d d!, then integrates by parts.
// Throws std::invalid_argument unless d1 + d2 < genus / 2.
ConnectionTable connection_coefficients(const WaveletBasis& basis, int d1, int d2);

struct Derivative {
    int order = 1;
};
struct MultiplyByX {};
// Multiplication by sum_k c[k] x^k.
struct MultiplyByPoly {
    std::vector<double> coeffs;
};
using OperatorKind = std::variant<Derivative, MultiplyByX, MultiplyByPoly>;

struct PeriodicGrid1D {
    double x0 = 0.0;
    double length = 1.0;
    std::size_t points = 0;

    double step() const noexcept { return length / static_cast<double>(points); }
    double node(std::size_t k) const noexcept { return x0 + static_cast<double>(k) * step(); }
};

// Grid with 2^level nodes. Throws on level < 1 or length <= 0.
PeriodicGrid1D dyadic_grid(int level, double x0, double length);

// Derivative orders below genus/2 use one connection table; higher orders
// are products of lower ones (e.g. d^4 = d^2 d^2 for genus 8).
SparseMatrix assemble_1d_sparse(const OperatorKind& kind, const WaveletBasis& basis, const PeriodicGrid1D& grid);
Eigen::MatrixXd assemble_1d_operator(const OperatorKind& kind, const WaveletBasis& basis,
                                     const PeriodicGrid1D& grid);

struct LevelBlocks {
    SparseMatrix A;      // detail -> detail
    SparseMatrix B;      // approx -> detail
    SparseMatrix Gamma;  // detail -> approx
};

// Nonstandard form of an n x n operator over `levels` transform levels.
// blocks[k-1] holds level k (k = 1 is the finest split, size n/2);
// T is the remaining coarse block of size n / 2^levels.
struct OperatorBlockMatrix {
    WaveletBasis basis;
    std::size_t dim = 0;
    int levels = 0;
    double threshold = 0.0;
    std::vector<LevelBlocks> blocks;
    SparseMatrix T;

    std::size_t nonzeros() const;
};

// Entries below 64 eps max|M| are roundoff of exact zeros and are not stored.
OperatorBlockMatrix to_nonstandard_form(const Eigen::MatrixXd& m, const WaveletBasis& basis, int levels);
// Inverse of to_nonstandard_form (exact up to the stored entries).
Eigen::MatrixXd reconstruct_dense(const OperatorBlockMatrix& m);

struct CompressionStats {
    double epsilon = 0.0;
    std::size_t dense_dim = 0;
    std::size_t retained_entries = 0;
    double retained_fraction = 0.0;
    // Sum over blocks of the Frobenius norm of the dropped entries. Bounds
    // ||apply(compressed, v) - apply(original, v)|| / ||v|| because the
    // wavelet transform is orthogonal.
    double max_apply_error_bound = 0.0;
};

struct CompressedOperator {
    OperatorBlockMatrix matrix;
    CompressionStats stats;
};

// Drops entries with |a| < eps. Throws std::invalid_argument for eps < 0.
CompressedOperator threshold_compress(const OperatorBlockMatrix& m, double eps);

// y = M v in the original (fine-level) coordinates.
// Throws std::invalid_argument on dimension mismatch.
Eigen::VectorXd apply(const OperatorBlockMatrix& m, const Eigen::VectorXd& v);

}  // namespace wigneton
