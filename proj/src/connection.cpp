#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "wigneton/operator_compression.hpp"

namespace wigneton {

ConnectionTable connection_coefficients(const WaveletBasis& basis, int d1, int d2) {
    const int d = d1 + d2;
    const int genus = basis.genus();
    if (d1 < 0 || d2 < 0) throw std::invalid_argument("connection_coefficients: negative derivative order");
    if (2 * d >= genus)
        throw std::invalid_argument("connection_coefficients: genus " + std::to_string(genus) +
                                    " supports d1 + d2 < " + std::to_string(genus / 2) + ", got " +
                                    std::to_string(d));
    ConnectionTable table{basis, d1, d2, {}};
    const int m = genus - 2;
    const int n = 2 * m + 1;
    if (m == 0) {  // Haar: only d = 0 reaches here
        table.values = {1.0};
        return table;
    }

    // Autocorrelation of the filter, a_k for |k| <= genus - 1.
    const auto& h = basis.lowpass();
    std::vector<double> a(2 * genus - 1, 0.0);
    for (int k = -(genus - 1); k <= genus - 1; ++k)
        for (int i = 0; i < genus; ++i)
            if (i + k >= 0 && i + k < genus) a[k + genus - 1] += h[i] * h[i + k];

    // Phi(l) = Lambda^{0,d}_l satisfies Phi(l) = 2^d sum_m a_{2l-m} Phi(m). The
    // null space of (A - 2^{-d} I) is one-dimensional; take it from the SVD,
    // then fix the scale with the moment sum_l l^d Phi(l) = (-1)^d d!.
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n, n);
    for (int l = -m; l <= m; ++l) {
        for (int j = -m; j <= m; ++j) {
            const int k = 2 * l - j;
            if (std::abs(k) <= genus - 1) sys(l + m, j + m) = a[k + genus - 1];
        }
        sys(l + m, l + m) -= std::ldexp(1.0, -d);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(n - 1);
    // Exact parity Phi(-l) = (-1)^d Phi(l); enforce it to remove roundoff.
    const double parity = (d % 2 == 0) ? 1.0 : -1.0;
    for (int l = 1; l <= m; ++l) {
        const double avg = 0.5 * (v(m + l) + parity * v(m - l));
        v(m + l) = avg;
        v(m - l) = parity * avg;
    }
    if (d % 2 == 1) v(m) = 0.0;
    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) factorial *= i;
    double moment = 0.0;
    for (int j = -m; j <= m; ++j) moment += std::pow(static_cast<double>(j), d) * v(j + m);
    v *= parity * factorial / moment;

    const double sign = (d1 % 2 == 0) ? 1.0 : -1.0;
    table.values.resize(n);
    for (int i = 0; i < n; ++i) table.values[i] = sign * v(i);
    return table;
}

}  // namespace wigneton
