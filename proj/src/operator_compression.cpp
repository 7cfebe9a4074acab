#include "wigneton/operator_compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wigneton {

PeriodicGrid1D dyadic_grid(int level, double x0, double length) {
    if (level < 1 || level > 24) throw std::invalid_argument("dyadic_grid: level must be in [1, 24]");
    if (!(length > 0.0)) throw std::invalid_argument("dyadic_grid: length must be positive");
    return PeriodicGrid1D{x0, length, std::size_t{1} << level};
}

namespace {

SparseMatrix direct_derivative(const WaveletBasis& basis, const PeriodicGrid1D& grid, int order) {
    const auto table = connection_coefficients(basis, 0, order);
    const auto n = static_cast<long>(grid.points);
    const double scale = ((order % 2 == 0) ? 1.0 : -1.0) / std::pow(grid.step(), order);
    std::vector<Eigen::Triplet<double>> trip;
    for (long j = 0; j < n; ++j)
        for (int m = -table.max_shift(); m <= table.max_shift(); ++m) {
            const double v = table.at(m);
            if (v != 0.0) trip.emplace_back(j, ((j + m) % n + n) % n, scale * v);
        }
    SparseMatrix d(n, n);
    d.setFromTriplets(trip.begin(), trip.end());
    return d;
}

SparseMatrix derivative_matrix(const WaveletBasis& basis, const PeriodicGrid1D& grid, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be nonnegative");
    const int max_direct = basis.genus() / 2 - 1;
    if (order == 0) {
        SparseMatrix id(grid.points, grid.points);
        id.setIdentity();
        return id;
    }
    if (max_direct < 1)
        throw std::invalid_argument("derivative: genus " + std::to_string(basis.genus()) +
                                    " has no differentiable scaling function");
    if (order <= max_direct) return direct_derivative(basis, grid, order);
    SparseMatrix out = direct_derivative(basis, grid, max_direct);
    int remaining = order - max_direct;
    while (remaining > 0) {
        const int step = std::min(remaining, max_direct);
        out = SparseMatrix(direct_derivative(basis, grid, step) * out);
        remaining -= step;
    }
    return out;
}

SparseMatrix diagonal(const PeriodicGrid1D& grid, const std::vector<double>& coeffs) {
    SparseMatrix d(grid.points, grid.points);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double x = grid.node(k);
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        if (acc != 0.0) trip.emplace_back(k, k, acc);
    }
    d.setFromTriplets(trip.begin(), trip.end());
    return d;
}

}  // namespace

SparseMatrix assemble_1d_sparse(const OperatorKind& kind, const WaveletBasis& basis, const PeriodicGrid1D& grid) {
    if (grid.points < 2 || (grid.points & (grid.points - 1)) != 0)
        throw std::invalid_argument("assemble_1d_operator: point count must be a power of two");
    if (const auto* d = std::get_if<Derivative>(&kind)) return derivative_matrix(basis, grid, d->order);
    if (std::holds_alternative<MultiplyByX>(kind)) return diagonal(grid, {0.0, 1.0});
    return diagonal(grid, std::get<MultiplyByPoly>(kind).coeffs);
}

Eigen::MatrixXd assemble_1d_operator(const OperatorKind& kind, const WaveletBasis& basis,
                                     const PeriodicGrid1D& grid) {
    return Eigen::MatrixXd(assemble_1d_sparse(kind, basis, grid));
}

// --- nonstandard form ------------------------------------------------------

namespace {

// Applies the analysis step to every column: low = H M, high = G M.
void analyze_columns(const WaveletBasis& basis, const Eigen::MatrixXd& m, Eigen::MatrixXd& low,
                     Eigen::MatrixXd& high) {
    const Eigen::Index half = m.rows() / 2;
    low.resize(half, m.cols());
    high.resize(half, m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        analysis_step(basis, std::span<const double>(m.col(j).data(), m.rows()),
                      std::span<double>(low.col(j).data(), half), std::span<double>(high.col(j).data(), half));
}

// out = H^T low + G^T high, column by column.
Eigen::MatrixXd synthesize_columns(const WaveletBasis& basis, const Eigen::MatrixXd& low,
                                   const Eigen::MatrixXd& high) {
    Eigen::MatrixXd out(2 * low.rows(), low.cols());
    for (Eigen::Index j = 0; j < low.cols(); ++j)
        synthesis_step(basis, std::span<const double>(low.col(j).data(), low.rows()),
                       std::span<const double>(high.col(j).data(), high.rows()),
                       std::span<double>(out.col(j).data(), out.rows()));
    return out;
}

SparseMatrix sparsify(const Eigen::MatrixXd& m, double tol) {
    SparseMatrix s(m.rows(), m.cols());
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > tol) trip.emplace_back(i, j, m(i, j));
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

}  // namespace

std::size_t OperatorBlockMatrix::nonzeros() const {
    std::size_t n = static_cast<std::size_t>(T.nonZeros());
    for (const auto& b : blocks)
        n += static_cast<std::size_t>(b.A.nonZeros() + b.B.nonZeros() + b.Gamma.nonZeros());
    return n;
}

OperatorBlockMatrix to_nonstandard_form(const Eigen::MatrixXd& m, const WaveletBasis& basis, int levels) {
    if (m.rows() != m.cols()) throw std::invalid_argument("to_nonstandard_form: matrix must be square");
    if (levels < 0) throw std::invalid_argument("to_nonstandard_form: levels must be nonnegative");
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0 || n % (std::size_t{1} << levels) != 0 || (n >> levels) < 1)
        throw std::invalid_argument("to_nonstandard_form: size " + std::to_string(n) + " not divisible by 2^" +
                                    std::to_string(levels));
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * m.cwiseAbs().maxCoeff();

    OperatorBlockMatrix out{basis, n, levels, 0.0, {}, {}};
    Eigen::MatrixXd t = m;
    for (int k = 1; k <= levels; ++k) {
        Eigen::MatrixXd ht, gt;  // H T, G T
        analyze_columns(basis, t, ht, gt);
        Eigen::MatrixXd tt_low, tt_high, bt_low, bt_high;
        // (H T) H^T = (H (H T)^T)^T and so on for the other three blocks.
        analyze_columns(basis, ht.transpose(), tt_low, tt_high);
        analyze_columns(basis, gt.transpose(), bt_low, bt_high);
        LevelBlocks blk;
        blk.Gamma = sparsify(tt_high.transpose(), tol);
        blk.B = sparsify(bt_low.transpose(), tol);
        blk.A = sparsify(bt_high.transpose(), tol);
        out.blocks.push_back(std::move(blk));
        t = tt_low.transpose();
    }
    out.T = sparsify(t, tol);
    return out;
}

Eigen::MatrixXd reconstruct_dense(const OperatorBlockMatrix& m) {
    Eigen::MatrixXd t(m.T);
    for (int k = m.levels; k >= 1; --k) {
        const auto& blk = m.blocks[static_cast<std::size_t>(k - 1)];
        // Left factor: [H^T G^T] applied to the block rows.
        const Eigen::MatrixXd p = synthesize_columns(m.basis, t, Eigen::MatrixXd(blk.B));
        const Eigen::MatrixXd q = synthesize_columns(m.basis, Eigen::MatrixXd(blk.Gamma), Eigen::MatrixXd(blk.A));
        // Right factor: P H + Q G = (H^T P^T + G^T Q^T)^T.
        t = synthesize_columns(m.basis, p.transpose(), q.transpose()).transpose();
    }
    return t;
}

CompressedOperator threshold_compress(const OperatorBlockMatrix& m, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("threshold_compress: epsilon must be >= 0");
    CompressedOperator out{m, {}};
    out.matrix.threshold = eps;
    double bound = 0.0;
    auto prune = [&](SparseMatrix& s) {
        double dropped = 0.0;
        for (int r = 0; r < s.outerSize(); ++r)
            for (SparseMatrix::InnerIterator it(s, r); it; ++it)
                if (std::abs(it.value()) < eps) dropped += it.value() * it.value();
        s.prune([eps](Eigen::Index, Eigen::Index, double v) { return std::abs(v) >= eps; });
        bound += std::sqrt(dropped);
    };
    for (auto& b : out.matrix.blocks) {
        prune(b.A);
        prune(b.B);
        prune(b.Gamma);
    }
    prune(out.matrix.T);
    const std::size_t nnz = out.matrix.nonzeros();
    out.stats.epsilon = eps;
    out.stats.dense_dim = m.dim;
    out.stats.retained_entries = nnz;
    out.stats.retained_fraction = static_cast<double>(nnz) / (static_cast<double>(m.dim) * static_cast<double>(m.dim));
    out.stats.max_apply_error_bound = bound;
    return out;
}

Eigen::VectorXd apply(const OperatorBlockMatrix& m, const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != m.dim)
        throw std::invalid_argument("apply: vector length " + std::to_string(v.size()) + " != operator dimension " +
                                    std::to_string(m.dim));
    std::vector<Eigen::VectorXd> s{v}, d{Eigen::VectorXd()};
    for (int k = 1; k <= m.levels; ++k) {
        const auto& prev = s.back();
        const Eigen::Index half = prev.size() / 2;
        Eigen::VectorXd lo(half), hi(half);
        analysis_step(m.basis, std::span<const double>(prev.data(), prev.size()), std::span<double>(lo.data(), half),
                      std::span<double>(hi.data(), half));
        s.push_back(std::move(lo));
        d.push_back(std::move(hi));
    }
    Eigen::VectorXd r = m.T * s.back();
    for (int k = m.levels; k >= 1; --k) {
        const auto& blk = m.blocks[static_cast<std::size_t>(k - 1)];
        const Eigen::VectorXd lo = r + blk.Gamma * d[k];
        const Eigen::VectorXd hi = blk.B * s[k] + blk.A * d[k];
        Eigen::VectorXd up(2 * lo.size());
        synthesis_step(m.basis, std::span<const double>(lo.data(), lo.size()),
                       std::span<const double>(hi.data(), hi.size()), std::span<double>(up.data(), up.size()));
        r = std::move(up);
    }
    return r;
}

}  // namespace wigneton
