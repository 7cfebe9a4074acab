#pragma once

// Lowest eigenpairs of a sparse symmetric matrix: block Lanczos on the
// shift-inverted operator (A - sigma I)^{-1} with full reorthogonalization.
// The shift sits below the spectrum, so the factorization is a Cholesky
// factorization and its success certifies sigma < lambda_min.

#include "wigneton/operator_compression.hpp"

namespace wigneton {

struct EigenOptions {
    int block_size = 16;
    int max_basis = 1600;        // Krylov basis columns before giving up
    double tolerance = 1e-10;    // on ||A x - lambda x|| / max(1, |lambda|)
    int dense_threshold = 600;   // below this dimension use a dense solver
    unsigned long long seed = 0x5eed;
};

struct EigenResult {
    Eigen::VectorXd values;      // ascending
    Eigen::MatrixXd vectors;     // orthonormal columns
    Eigen::VectorXd residuals;   // ||A x - lambda x||
    double shift = 0.0;
    int basis_size = 0;
    int factorizations = 0;
};

// Throws NumericalError if the requested pairs do not converge within
// max_basis; the message carries the basis size and worst residual.
EigenResult lowest_eigenpairs(const SparseMatrix& a, int count, const EigenOptions& options = {});

}  // namespace wigneton
