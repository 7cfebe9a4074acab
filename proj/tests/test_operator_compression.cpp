#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wigneton/operator_compression.hpp"

using namespace wigneton;

namespace {

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng);
    return v / v.norm();
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

TEST_CASE("connection_coefficients examples") {
    const auto haar = connection_coefficients(daubechies_filters(2), 0, 0);
    CHECK(haar.at(0) == 1.0);
    CHECK(haar.at(1) == 0.0);
    CHECK(haar.at(-1) == 0.0);

    for (int genus = 4; genus <= 20; genus += 2) {
        const auto t = connection_coefficients(daubechies_filters(genus), 0, 0);
        for (int l = -t.max_shift(); l <= t.max_shift(); ++l) CHECK(std::abs(t.at(l) - (l == 0 ? 1.0 : 0.0)) < 1e-12);
    }

    CHECK_THROWS_AS(connection_coefficients(daubechies_filters(2), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(connection_coefficients(daubechies_filters(8), 2, 2), std::invalid_argument);
    CHECK_NOTHROW(connection_coefficients(daubechies_filters(8), 1, 2));
}

TEST_CASE("connection tables satisfy moment sum rules for every supported order") {
    for (int genus = 4; genus <= 20; genus += 2) {
        const auto basis = daubechies_filters(genus);
        for (int d = 1; 2 * d < genus; ++d) {
            CAPTURE(genus);
            CAPTURE(d);
            const auto t = connection_coefficients(basis, 0, d);
            // sum_l l^j phi^{(d)}(x + l) is the d-th derivative of a degree-j
            // polynomial: zero for j < d and (-1)^d d! for j = d.
            for (int j = 0; j <= d; ++j) {
                double acc = 0.0, scale = 0.0;
                for (int l = -t.max_shift(); l <= t.max_shift(); ++l) {
                    acc += std::pow(l, j) * t.at(l);
                    scale += std::abs(std::pow(l, j) * t.at(l));
                }
                const double expected = j < d ? 0.0 : (d % 2 == 0 ? 1.0 : -1.0) * factorial(d);
                CHECK(std::abs(acc - expected) < 1e-10 * std::max(1.0, scale));
            }
        }
    }
    for (int genus : {4, 6, 8, 10}) {
        const auto t = connection_coefficients(daubechies_filters(genus), 0, 1);
        double acc = 0.0;
        for (int l = -t.max_shift(); l <= t.max_shift(); ++l) acc += l * t.at(l);
        CHECK(std::abs(acc + 1.0) < 1e-10);
    }
}

TEST_CASE("connection tables obey transposition and parity identities") {
    const auto basis = daubechies_filters(12);
    for (int d1 = 0; d1 < 6; ++d1)
        for (int d2 = 0; d1 + d2 < 6; ++d2) {
            const auto a = connection_coefficients(basis, d1, d2);
            const auto b = connection_coefficients(basis, d2, d1);
            const double sign = ((d1 + d2) % 2 == 0) ? 1.0 : -1.0;
            for (int l = -a.max_shift(); l <= a.max_shift(); ++l) {
                const double scale = 1e-10 * std::max(1.0, std::abs(a.at(l)));
                CHECK(std::abs(a.at(l) - b.at(-l)) < scale);
                CHECK(std::abs(a.at(-l) - sign * a.at(l)) < scale);
            }
            CHECK(a.at(a.max_shift() + 1) == 0.0);
        }
}

TEST_CASE("first-derivative table agrees with cascade quadrature") {
    // Trapezoid quadrature of independently cascaded phi and phi' at 2^-13.
    // Genus 4 is excluded: its phi is not differentiable everywhere and the
    // quadrature does not converge to this accuracy.
    const int level = 13;
    for (int genus : {6, 8, 10}) {
        CAPTURE(genus);
        const auto basis = daubechies_filters(genus);
        const auto phi = oracle::cascade(basis.lowpass(), level, 0);
        const auto dphi = oracle::cascade(basis.lowpass(), level, 1);
        const auto t = connection_coefficients(basis, 0, 1);
        const double dx = std::ldexp(1.0, -level);
        const long n = static_cast<long>(phi.size());
        double worst = 0.0;
        for (int l = -t.max_shift(); l <= t.max_shift(); ++l) {
            const long shift = static_cast<long>(l) << level;
            double acc = 0.0;
            for (long i = 0; i < n; ++i) {
                const long j = i + shift;
                if (j >= 0 && j < n) acc += phi[i] * dphi[j];
            }
            worst = std::max(worst, std::abs(acc * dx - t.at(l)));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("assemble_1d_operator examples") {
    const auto basis = daubechies_filters(8);
    const double two_pi = 2.0 * std::numbers::pi;
    const auto grid = dyadic_grid(8, 0.0, two_pi);
    Eigen::VectorXd s(256), c(256), one = Eigen::VectorXd::Ones(256);
    for (int k = 0; k < 256; ++k) {
        s(k) = std::sin(grid.node(k));
        c(k) = std::cos(grid.node(k));
    }
    const auto d1 = assemble_1d_operator(Derivative{1}, basis, grid);
    CHECK((d1 * s - c).norm() / c.norm() < 1e-4);
    CHECK((d1 * one).norm() < 1e-10);

    const auto d2 = assemble_1d_operator(Derivative{2}, basis, grid);
    CHECK((d2 * s + s).norm() / s.norm() < 1e-4);
    // Fourth derivative: composed from two second-derivative tables at genus 8.
    const auto d4 = assemble_1d_sparse(Derivative{4}, basis, grid);
    CHECK((d4 * s - s).norm() / s.norm() < 1e-3);

    // Multiplication operators are collocated: exact on node values.
    const auto x = assemble_1d_operator(MultiplyByX{}, basis, grid);
    const auto poly = assemble_1d_operator(MultiplyByPoly{{1.0, 0.0, -2.0}}, basis, grid);
    for (int k = 0; k < 256; k += 17) {
        const double xk = grid.node(k);
        CHECK(x(k, k) == xk);
        CHECK(poly(k, k) == doctest::Approx(1.0 - 2.0 * xk * xk));
    }
    CHECK(x.sum() == doctest::Approx(grid.node(0) * 256 + grid.step() * 255 * 256 / 2));

    CHECK_THROWS_AS(assemble_1d_operator(Derivative{1}, daubechies_filters(2), grid), std::invalid_argument);
    CHECK_THROWS_AS(assemble_1d_operator(Derivative{1}, basis, PeriodicGrid1D{0.0, 1.0, 100}),
                    std::invalid_argument);
}

TEST_CASE("multiply_by_x matches the Galerkin quadrature up to banded leakage") {
    // <phi_j, x phi_k> with phi_k(x) = h^{-1/2} phi((x - x0)/h - k), by
    // trapezoid quadrature of cascade samples. The collocated diagonal x_k
    // differs from it by O(h): a constant shift on the diagonal plus a band
    // of width genus - 2.
    const auto basis = daubechies_filters(8);
    const int level = 10;
    const auto phi = oracle::cascade(basis.lowpass(), level, 0);
    const double dy = std::ldexp(1.0, -level);
    const long n = static_cast<long>(phi.size());
    auto moment = [&](int m, int power) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i) {
            const long j = i - (static_cast<long>(m) << level);
            if (j >= 0 && j < n) acc += std::pow(i * dy, power) * phi[i] * phi[j];
        }
        return acc * dy;
    };
    const auto grid = dyadic_grid(6, -4.0, 8.0);
    const double h = grid.step();
    const auto x = assemble_1d_operator(MultiplyByX{}, basis, grid);
    const int k = 30;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(64);
    delta(k) = 1.0;
    const Eigen::VectorXd col = x * delta;
    double leakage = 0.0;
    for (int j = 0; j < 64; ++j) {
        // <phi_j, x phi_k> = x_k <phi_j, phi_k> + h int y phi(y) phi(y - (j - k)) dy... written
        // with y measured from node k.
        const double galerkin = grid.node(k) * moment(j - k, 0) + h * moment(j - k, 1);
        if (std::abs(j - k) > 6) CHECK(std::abs(galerkin) < 1e-12);
        leakage = std::max(leakage, std::abs(galerkin - col(j)));
    }
    CHECK(leakage < h * 7.0);
    CHECK(col(k) == grid.node(k));
}

TEST_CASE("to_nonstandard_form examples") {
    const auto basis = daubechies_filters(8);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(256, 256);
    const auto ns = to_nonstandard_form(id, basis, 4);
    REQUIRE(ns.blocks.size() == 4);
    for (const auto& b : ns.blocks) {
        CHECK(b.B.nonZeros() == 0);
        CHECK(b.Gamma.nonZeros() == 0);
        CHECK((Eigen::MatrixXd(b.A) - Eigen::MatrixXd::Identity(b.A.rows(), b.A.cols())).norm() < 1e-12);
    }
    CHECK((Eigen::MatrixXd(ns.T) - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-12);
    const auto stats = threshold_compress(ns, 0.5).stats;
    CHECK(stats.retained_fraction == doctest::Approx(1.0 / 256.0));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd dense(128, 128);
    for (auto& v : dense.reshaped()) v = nd(rng);
    const auto rns = to_nonstandard_form(dense, basis, 3);
    CHECK((reconstruct_dense(rns) - dense).norm() / dense.norm() < 1e-10);
    CHECK(threshold_compress(rns, 1e-8).stats.retained_fraction > 0.99);

    CHECK_THROWS_AS(to_nonstandard_form(Eigen::MatrixXd::Identity(96, 96), basis, 6), std::invalid_argument);
    CHECK_THROWS_AS(to_nonstandard_form(Eigen::MatrixXd::Zero(8, 4), basis, 1), std::invalid_argument);
}

TEST_CASE("derivative nonstandard form is sparse and applies exactly") {
    const auto basis = daubechies_filters(8);
    const auto grid = dyadic_grid(10, 0.0, 2.0 * std::numbers::pi);
    const auto dense = assemble_1d_operator(Derivative{1}, basis, grid);
    const auto ns = to_nonstandard_form(dense, basis, 6);
    CHECK((reconstruct_dense(ns) - dense).norm() / dense.norm() < 1e-10);

    const auto exact = threshold_compress(ns, 0.0);
    CHECK(exact.stats.max_apply_error_bound == 0.0);
    CHECK(exact.stats.retained_entries == ns.nonzeros());

    // Entry magnitude away from block diagonals: the blocks are banded.
    for (const auto& b : ns.blocks)
        for (const SparseMatrix* blk : {&b.A, &b.B, &b.Gamma}) {
            const auto rows = blk->rows();
            for (int r = 0; r < blk->outerSize(); ++r)
                for (SparseMatrix::InnerIterator it(*blk, r); it; ++it) {
                    auto off = std::abs(it.col() - it.row());
                    off = std::min<Eigen::Index>(off, rows - off);
                    CHECK(off <= 2 * basis.genus());
                }
        }

    std::mt19937_64 rng(11);
    const auto compressed = threshold_compress(ns, 1e-8);
    CHECK(compressed.stats.retained_fraction <= 0.05);
    double worst_exact = 0.0, worst_compressed = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto v = random_unit(1024, rng);
        const Eigen::VectorXd ref = dense * v;
        worst_exact = std::max(worst_exact, (apply(ns, v) - ref).norm() / ref.norm());
        worst_compressed = std::max(worst_compressed, (apply(compressed.matrix, v) - ref).norm());
    }
    CHECK(worst_exact < 1e-10);
    CHECK(worst_compressed < 1e-6);
    CHECK(worst_compressed <= compressed.stats.max_apply_error_bound + 1e-10);

    Eigen::VectorXd smooth(1024), ref(1024);
    for (int k = 0; k < 1024; ++k) smooth(k) = std::exp(std::sin(grid.node(k)));
    ref = dense * smooth;
    const auto loose = threshold_compress(ns, 1e-6);
    CHECK((apply(loose.matrix, smooth) - ref).norm() / ref.norm() < 1e-4);

    CHECK_THROWS_AS(apply(ns, Eigen::VectorXd::Zero(512)), std::invalid_argument);
    CHECK_THROWS_AS(threshold_compress(ns, -1.0), std::invalid_argument);
}

TEST_CASE("apply error stays within the reported bound for every threshold") {
    const auto basis = daubechies_filters(6);
    const auto grid = dyadic_grid(8, -4.0, 8.0);
    const Eigen::MatrixXd op = assemble_1d_operator(Derivative{2}, basis, grid) +
                               assemble_1d_operator(MultiplyByPoly{{0.0, 0.0, 0.5}}, basis, grid);
    const auto ns = to_nonstandard_form(op, basis, 5);
    std::mt19937_64 rng(3);
    for (double eps : {1e-10, 1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
        const auto c = threshold_compress(ns, eps);
        for (int trial = 0; trial < 100; ++trial) {
            const auto v = random_unit(256, rng);
            CHECK((apply(c.matrix, v) - op * v).norm() <= c.stats.max_apply_error_bound * (1 + 1e-12) + 1e-10);
        }
    }
}
