#include "wigneton/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wigneton/errors.hpp"

namespace wigneton {

StationaryOperators assemble_stationary(const Hamiltonian& h, const WaveletBasis& basis, const LevelRange& levels,
                                        const Grid2D& grid) {
    h.validate();
    if (h.time_dependent()) throw std::invalid_argument("assemble_stationary: Hamiltonian has kicks");
    grid.validate();
    if (levels.coarse < 0 || levels.transform_levels() < 1)
        throw std::invalid_argument("assemble_stationary: levels need 0 <= coarse < fine");
    const std::size_t block = std::size_t{1} << levels.transform_levels();
    if (grid.nq % block != 0 || grid.np % block != 0)
        throw std::invalid_argument("assemble_stationary: grid not divisible by 2^(fine - coarse)");

    const PhaseSpaceOperator op = stargen_operator(h.base, h.hbar);
    StationaryOperators out;
    out.grid = grid;
    out.hbar = h.hbar;
    out.real_part = discretize(op.real_part(), basis, grid);
    out.imag_part = discretize(op.imag_part(), basis, grid);
    const SparseMatrix lr = out.real_part.assemble();
    const SparseMatrix lrt = lr.transpose();
    const double nrm = lr.norm();
    out.asymmetry = nrm > 0.0 ? SparseMatrix(lr - lrt).norm() / nrm : 0.0;
    out.real_symmetric = 0.5 * (lr + lrt);
    out.real_symmetric.prune(0.0);
    out.imag = out.imag_part.assemble();
    if (out.real_symmetric.nonZeros() == 0) {
        // Zero Hamiltonian: keep an explicit zero diagonal so the eigensolver
        // sees a well-formed matrix.
        out.real_symmetric.resize(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
    }
    return out;
}

namespace {

WignerField to_field(const Grid2D& grid, double hbar, const Eigen::VectorXd& v) {
    WignerField w(grid, hbar);
    for (std::size_t k = 0; k < grid.size(); ++k) w.values[k] = v(static_cast<Eigen::Index>(k));
    return w;
}

}  // namespace

StationaryResult solve_stationary(const StationaryOperators& ops, int n_modes, const StationaryOptions& options) {
    const auto dim = static_cast<int>(ops.grid.size());
    if (n_modes < 1 || n_modes > dim) throw std::invalid_argument("solve_stationary: n_modes out of range");
    const SparseMatrix& lr = ops.real_symmetric;
    const SparseMatrix& li = ops.imag;
    const bool has_constraint = li.nonZeros() > 0;

    int pairs = options.initial_pairs > 0 ? options.initial_pairs : std::max(4 * n_modes, 24);
    pairs = std::min(pairs, dim);
    for (;;) {
        const EigenResult eig = lowest_eigenpairs(lr, pairs, options.eigen);
        StationaryResult res;
        res.eigenpairs_computed = pairs;
        res.asymmetry = ops.asymmetry;

        // Gap clustering. The last group may be cut off by `pairs`, so it is
        // only used when every eigenpair has been computed.
        std::vector<std::pair<int, int>> groups;
        int start = 0;
        for (int k = 1; k <= pairs; ++k)
            if (k == pairs || eig.values(k) - eig.values(k - 1) > options.cluster_tolerance) {
                groups.emplace_back(start, k);
                start = k;
            }
        if (pairs < dim) groups.pop_back();
        if (!has_constraint) {
            // Every eigenvector is admissible; no grouping needed.
            groups.clear();
            for (int k = 0; k < pairs; ++k) groups.emplace_back(k, k + 1);
        }

        for (const auto& [g0, g1] : groups) {
            if (static_cast<int>(res.eigenvalues.size()) == n_modes) break;
            const Eigen::MatrixXd basis = eig.vectors.middleCols(g0, g1 - g0);
            Eigen::VectorXd v;
            if (has_constraint) {
                const Eigen::MatrixXd c = li * basis;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.transpose() * c);
                v = basis * es.eigenvectors().col(0);
            } else {
                v = basis.col(0);
            }
            v.normalize();
            const double imag_res = has_constraint ? (li * v).norm() : 0.0;
            const double eps = v.dot(lr * v);
            if (imag_res > options.constraint_tolerance) {
                res.rejected_eigenvalues.push_back(eps);
                continue;
            }
            const double residual = (lr * v - eps * v).norm();
            WignerField w = to_field(ops.grid, ops.hbar, v);
            // Trace normalization. A mode with vanishing integral cannot be a
            // pure-state Wigner function; keep it unit-L2 and flag it.
            const double mass = w.integral();
            const bool massless = std::abs(mass) < 1e-8 * w.l2_norm();
            if (!massless) w.normalize();
            res.eigenvalues.push_back(eps);
            res.modes.push_back(std::move(w));
            res.residuals.push_back(residual);
            res.imag_residuals.push_back(imag_res);
            res.flagged.push_back(massless || residual > options.flag_tolerance || imag_res > options.flag_tolerance);
            res.cluster_sizes.push_back(g1 - g0);
        }
        if (static_cast<int>(res.eigenvalues.size()) >= n_modes) return res;
        if (pairs >= std::min(dim, options.max_pairs)) {
            std::ostringstream msg;
            msg << "solve_stationary: found " << res.eigenvalues.size() << " of " << n_modes
                << " constrained modes among " << pairs << " eigenpairs (" << res.rejected_eigenvalues.size()
                << " groups rejected by the constraint)";
            throw NumericalError(msg.str());
        }
        pairs = std::min({2 * pairs, dim, options.max_pairs});
    }
}

}  // namespace wigneton
