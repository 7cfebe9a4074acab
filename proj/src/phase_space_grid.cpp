#include "wigneton/phase_space_grid.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wigneton/errors.hpp"

namespace wigneton {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void Grid2D::validate() const {
    if (!is_power_of_two(nq) || nq < 4)
        throw std::invalid_argument("grid: Nq = " + std::to_string(nq) + " is not a power of two >= 4");
    if (!is_power_of_two(np) || np < 4)
        throw std::invalid_argument("grid: Np = " + std::to_string(np) + " is not a power of two >= 4");
    if (!(q1 > q0) || !(p1 > p0)) throw std::invalid_argument("grid: empty extent");
}

WignerField::WignerField(Grid2D g, double hbar_, double time_)
    : grid(g), values(g.size(), 0.0), hbar(hbar_), time(time_) {}

double WignerField::integral() const {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * grid.dq() * grid.dp();
}

double WignerField::l2_norm() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(acc * grid.dq() * grid.dp());
}

void WignerField::normalize() {
    const double s = integral();
    if (!std::isfinite(s) || s == 0.0) throw NumericalError("normalize: field integral is zero or not finite");
    for (double& v : values) v /= s;
}

WignerField coherent_state(const Grid2D& grid, double hbar, double q_c, double p_c) {
    return sample_field(grid, hbar, [&](double q, double p) {
        const double r2 = ((q - q_c) * (q - q_c) + (p - p_c) * (p - p_c)) / hbar;
        return std::exp(-r2) / (std::numbers::pi * hbar);
    });
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ra = 0; ra < a.outerSize(); ++ra)
        for (SparseMatrix::InnerIterator ia(a, ra); ia; ++ia)
            for (int rb = 0; rb < b.outerSize(); ++rb)
                for (SparseMatrix::InnerIterator ib(b, rb); ib; ++ib)
                    trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                      ia.value() * ib.value());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseMatrix KroneckerOperator::assemble() const {
    SparseMatrix out(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(grid_.size()));
    for (const auto& t : terms_) out += t.coeff * kron(t.q_factor, t.p_factor);
    out.prune(0.0);
    return out;
}

Eigen::VectorXd KroneckerOperator::apply(const Eigen::VectorXd& v) const {
    const auto nq = static_cast<Eigen::Index>(grid_.nq), np = static_cast<Eigen::Index>(grid_.np);
    if (v.size() != nq * np) throw std::invalid_argument("KroneckerOperator::apply: size mismatch");
    // Row-major (q outer) flat vector viewed as an nq x np matrix.
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMat> vm(v.data(), nq, np);
    RowMat acc = RowMat::Zero(nq, np);
    for (const auto& t : terms_) acc.noalias() += t.coeff * (t.q_factor * (vm * t.p_factor.transpose()));
    return Eigen::Map<const Eigen::VectorXd>(acc.data(), nq * np);
}

KroneckerOperator discretize(const PhaseSpaceOperator& op, const WaveletBasis& basis, const Grid2D& grid) {
    grid.validate();
    KroneckerOperator out(grid);
    std::map<int, SparseMatrix> dq_cache, dp_cache;
    auto deriv = [&](std::map<int, SparseMatrix>& cache, const PeriodicGrid1D& axis, int order) -> const SparseMatrix& {
        auto it = cache.find(order);
        if (it == cache.end()) it = cache.emplace(order, assemble_1d_sparse(Derivative{order}, basis, axis)).first;
        return it->second;
    };
    auto power = [](int k) {
        std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
        c.back() = 1.0;
        return c;
    };
    const auto qa = grid.q_axis(), pa = grid.p_axis();
    for (const auto& term : op.terms()) {
        const SparseMatrix& dq = deriv(dq_cache, qa, term.dq);
        const SparseMatrix& dp = deriv(dp_cache, pa, term.dp);
        for (const auto& [e, c] : term.coeff.terms()) {
            if (c.imag() != 0.0)
                throw std::invalid_argument("discretize: coefficient symbol has an imaginary part");
            const SparseMatrix mq = assemble_1d_sparse(MultiplyByPoly{power(e.q)}, basis, qa);
            const SparseMatrix mp = assemble_1d_sparse(MultiplyByPoly{power(e.p)}, basis, pa);
            out.add({c.real(), SparseMatrix(mq * dq), SparseMatrix(mp * dp)});
        }
    }
    return out;
}

}  // namespace wigneton
