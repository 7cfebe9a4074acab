#include "wigneton/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "wigneton/errors.hpp"

namespace wigneton {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

Eigen::MatrixXd random_block(Eigen::Index n, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd m(n, cols);
    for (auto& v : m.reshaped()) v = d(rng);
    return m;
}

// Orthonormalizes `block` against the first `used` columns of q (twice, for
// stability) and internally. Columns that collapse are replaced by fresh
// random directions.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& q, Eigen::Index used, Eigen::MatrixXd block,
                               std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        for (int pass = 0; pass < 2; ++pass)
            if (used > 0) block -= q.leftCols(used) * (q.leftCols(used).transpose() * block);
        bool ok = true;
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index i = 0; i < j; ++i) block.col(j) -= block.col(i).dot(block.col(j)) * block.col(i);
            const double nrm = block.col(j).norm();
            if (nrm < 1e-10) {
                ok = false;
                block.col(j) = random_block(block.rows(), 1, rng);
            } else {
                block.col(j) /= nrm;
            }
        }
        if (ok) return block;
    }
    return block;
}

// Lower bound on the spectrum from Gershgorin discs.
double gershgorin_lower(const ColSparse& a) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(a.rows()), off = Eigen::VectorXd::Zero(a.rows());
    for (int c = 0; c < a.outerSize(); ++c)
        for (ColSparse::InnerIterator it(a, c); it; ++it) {
            if (it.row() == it.col()) diag(it.row()) += it.value();
            else off(it.row()) += std::abs(it.value());
        }
    return (diag - off).minCoeff();
}

}  // namespace

EigenResult lowest_eigenpairs(const SparseMatrix& a_in, int count, const EigenOptions& options) {
    const Eigen::Index n = a_in.rows();
    if (a_in.cols() != n) throw std::invalid_argument("lowest_eigenpairs: matrix must be square");
    if (count < 1 || count > n) throw std::invalid_argument("lowest_eigenpairs: count out of range");
    const ColSparse a(a_in);
    EigenResult out;

    if (n <= options.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(a)};
        out.values = es.eigenvalues().head(count);
        out.vectors = es.eigenvectors().leftCols(count);
        out.residuals = (Eigen::MatrixXd(a * out.vectors) - out.vectors * out.values.asDiagonal()).colwise().norm();
        out.basis_size = static_cast<int>(n);
        return out;
    }

    std::mt19937_64 rng(options.seed);
    ColSparse id(n, n);
    id.setIdentity();
    const double scale = std::max(1.0, Eigen::Map<const Eigen::VectorXd>(a.valuePtr(), a.nonZeros()).cwiseAbs().maxCoeff());
    const int b = std::max(1, std::min<int>(options.block_size, static_cast<int>(n)));
    const Eigen::Index cap = std::min<Eigen::Index>(n, std::max(options.max_basis, count + 2 * b));
    Eigen::SimplicialLLT<ColSparse> llt;

    // Block Lanczos on (A - sigma I)^{-1}; returns the worst relative residual
    // of the `want` lowest Ritz pairs once they are all computed.
    auto run = [&](double sigma, int want, Eigen::Index limit, double tol) -> double {
        Eigen::MatrixXd q(n, limit), w(n, limit), t(limit, limit);
        Eigen::Index used = 0;
        Eigen::MatrixXd block = orthonormalize(q, 0, random_block(n, b, rng), rng);
        double worst = std::numeric_limits<double>::infinity();
        int since_check = 0;
        for (;;) {
            const Eigen::Index cols = std::min<Eigen::Index>(block.cols(), limit - used);
            q.middleCols(used, cols) = block.leftCols(cols);
            w.middleCols(used, cols) = llt.solve(block.leftCols(cols));
            // Extend the projected matrix Q^T W by the new columns and rows.
            t.block(0, used, used + cols, cols) = q.leftCols(used + cols).transpose() * w.middleCols(used, cols);
            t.block(used, 0, cols, used) = t.block(0, used, used, cols).transpose();
            used += cols;
            ++since_check;
            const bool full = used >= limit;
            if (used >= want + b && (since_check >= 2 || full)) {
                since_check = 0;
                Eigen::MatrixXd tt = t.topLeftCorner(used, used);
                tt = 0.5 * (tt + tt.transpose()).eval();
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tt);
                // Largest inverse values map to the smallest eigenvalues.
                std::vector<std::pair<double, Eigen::Index>> order;
                for (Eigen::Index i = 0; i < used; ++i)
                    if (es.eigenvalues()(i) > 0.0) order.emplace_back(sigma + 1.0 / es.eigenvalues()(i), i);
                std::sort(order.begin(), order.end());
                if (static_cast<int>(order.size()) >= want) {
                    out.values.resize(want);
                    out.vectors.resize(n, want);
                    for (int k = 0; k < want; ++k) {
                        const auto idx = order[static_cast<std::size_t>(k)].second;
                        out.values(k) = order[static_cast<std::size_t>(k)].first;
                        out.vectors.col(k) = (q.leftCols(used) * es.eigenvectors().col(idx)).normalized();
                    }
                    const Eigen::MatrixXd ax = a * out.vectors;
                    out.residuals = (ax - out.vectors * out.values.asDiagonal()).colwise().norm();
                    worst = 0.0;
                    for (int k = 0; k < want; ++k)
                        worst = std::max(worst, out.residuals(k) / std::max(1.0, std::abs(out.values(k))));
                    out.basis_size = static_cast<int>(used);
                    if (worst <= tol) return worst;
                }
            }
            if (full) return worst;
            block = orthonormalize(q, used, w.middleCols(used - cols, cols), rng);
        }
    };

    // Phase 1: a shift below the Gershgorin bound is always admissible; a
    // short run there locates the bottom of the spectrum.
    double sigma = gershgorin_lower(a) - 1e-8 * scale;
    llt.compute(a - sigma * id);
    ++out.factorizations;
    if (llt.info() != Eigen::Success) throw NumericalError("lowest_eigenpairs: factorization failed below the spectrum");
    // Phase 2: shift just below the current estimate. Cholesky success
    // proves the shift is below lambda_min; otherwise widen the margin. A
    // short run at each accepted shift sharpens the estimate; the loop ends
    // once the tight margin is accepted.
    out.shift = sigma;
    for (int pass = 0; pass < 4; ++pass) {
        run(out.shift, 1, std::min<Eigen::Index>(cap, 24 * b), 1e-6);
        const double theta = out.values(0);
        // An unconverged Ritz value can sit far above lambda_min; its
        // residual bounds the distance to some eigenvalue, which is a better
        // first margin than the default.
        const double tight = 1e-2 * std::max(1.0, std::abs(theta));
        double margin = std::max(tight, out.residuals(0));
        int tries = 0;
        for (;;) {
            const double trial = theta - margin;
            llt.compute(a - trial * id);
            ++out.factorizations;
            ++tries;
            if (llt.info() == Eigen::Success) {
                out.shift = trial;
                break;
            }
            margin *= 4.0;
            if (tries > 30) throw NumericalError("lowest_eigenpairs: no shift below the spectrum found");
        }
        if (tries == 1 && margin == tight) break;
    }
    const double worst = run(out.shift, count, cap, options.tolerance);
    if (worst <= options.tolerance) return out;

    std::ostringstream msg;
    msg << "lowest_eigenpairs: " << count << " pairs not converged with basis " << out.basis_size << " (worst relative residual "
        << worst << ", tolerance " << options.tolerance << ")";
    throw NumericalError(msg.str());
}

}  // namespace wigneton
