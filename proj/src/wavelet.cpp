#include "wigneton/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wigneton {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int floor_log2(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << (l + 1)) <= n) ++l;
    return l;
}

}  // namespace

WaveletBasis::WaveletBasis(WaveletFamily family, std::vector<double> lowpass)
    : family_(family), lowpass_(std::move(lowpass)) {
    if (lowpass_.size() < 2 || lowpass_.size() % 2 != 0)
        throw std::invalid_argument("WaveletBasis: filter length must be even and >= 2");
    const int n = genus();
    highpass_.resize(lowpass_.size());
    for (int k = 0; k < n; ++k) highpass_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * lowpass_[n - 1 - k];
}

namespace {

// Root finding leaves ~1e-12 residuals at high genus. A few Newton steps on
// the defining equations (orthonormality and high-pass moments 0..n-1) bring
// them down to roundoff. The low-pass sum is not used as an equation: given
// orthonormality its gradient is dependent on the others at the solution.
// Moment rows are scaled so each has unit magnitude.
void polish_filter(std::vector<double>& h) {
    const int len = static_cast<int>(h.size());
    const int n = len / 2;
    if (n < 2) return;
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(h.data(), len);
    for (int iter = 0; iter < 4; ++iter) {
        Eigen::VectorXd f(len);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(len, len);
        int row = 0;
        for (int m = 0; m < n; ++m, ++row) {
            double acc = 0.0;
            for (int k = 0; k + 2 * m < len; ++k) {
                acc += x(k) * x(k + 2 * m);
                jac(row, k) += x(k + 2 * m);
                jac(row, k + 2 * m) += x(k);
            }
            f(row) = acc - (m == 0 ? 1.0 : 0.0);
        }
        for (int p = 0; p < n; ++p, ++row) {
            const double scale = std::pow(static_cast<double>(len - 1), p);
            double acc = 0.0;
            for (int k = 0; k < len; ++k) {
                const double w = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(static_cast<double>(k), p) / scale;
                acc += w * x(k);
                jac(row, k) = w;
            }
            f(row) = acc;
        }
        x -= jac.colPivHouseholderQr().solve(f);
    }
    for (int k = 0; k < len; ++k) h[k] = x(k);
}

}  // namespace

WaveletBasis daubechies_filters(int genus) {
    if (genus < 2 || genus > 20 || genus % 2 != 0)
        throw std::invalid_argument("daubechies_filters: unsupported genus " + std::to_string(genus) +
                                    " (even, 2..20)");
    const int n = genus / 2;
    using C = std::complex<double>;

    // Spectral factorization: |m0|^2 = cos^{2n}(w/2) P(sin^2(w/2)),
    // P(y) = sum_{k<n} C(n-1+k, k) y^k. Each root y_k of P gives a pair
    // z, 1/z of -z^2 + (2-4y) z - 1 = 0; keep the one inside the unit circle.
    std::vector<C> zeros;
    if (n > 1) {
        std::vector<double> coeffs(n);
        double c = 1.0;
        for (int k = 0; k < n; ++k) {
            coeffs[k] = c;  // C(n-1+k, k)
            c = c * (n + k) / (k + 1);
        }
        const int deg = n - 1;
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs[deg];
        Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
        for (int i = 0; i < deg; ++i) {
            const C y = es.eigenvalues()(i);
            const C b = 2.0 - 4.0 * y;
            const C disc = std::sqrt(b * b - 4.0);
            C z1 = 0.5 * (b + disc), z2 = 0.5 * (b - disc);
            zeros.push_back(std::abs(z1) < std::abs(z2) ? z1 : z2);
        }
    }

    std::vector<C> h{1.0};
    auto convolve = [&h](C a0, C a1) {
        std::vector<C> out(h.size() + 1, 0.0);
        for (std::size_t i = 0; i < h.size(); ++i) {
            out[i] += a0 * h[i];
            out[i + 1] += a1 * h[i];
        }
        h = std::move(out);
    };
    for (int k = 0; k < n; ++k) convolve(1.0, 1.0);
    for (const C& z : zeros) convolve(1.0, -z);

    std::vector<double> lowpass(h.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        lowpass[i] = h[i].real();
        sum += lowpass[i];
    }
    for (double& v : lowpass) v *= std::sqrt(2.0) / sum;
    polish_filter(lowpass);
    return WaveletBasis(WaveletFamily::daubechies, std::move(lowpass));
}

void analysis_step(const WaveletBasis& basis, std::span<const double> in, std::span<double> approx,
                   std::span<double> detail) {
    const std::size_t n = in.size();
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("analysis_step: length must be even");
    if (approx.size() != n / 2 || detail.size() != n / 2)
        throw std::invalid_argument("analysis_step: output length mismatch");
    const auto& h = basis.lowpass();
    const auto& g = basis.highpass();
    const std::size_t taps = h.size();
    for (std::size_t k = 0; k < n / 2; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t m = 0; m < taps; ++m) {
            const double x = in[(2 * k + m) % n];
            a += h[m] * x;
            d += g[m] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

void synthesis_step(const WaveletBasis& basis, std::span<const double> approx, std::span<const double> detail,
                    std::span<double> out) {
    const std::size_t half = approx.size();
    const std::size_t n = 2 * half;
    if (detail.size() != half || out.size() != n)
        throw std::invalid_argument("synthesis_step: length mismatch");
    const auto& h = basis.lowpass();
    const auto& g = basis.highpass();
    const std::size_t taps = h.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < half; ++k)
        for (std::size_t m = 0; m < taps; ++m) out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
}

std::size_t MRADecomposition::coefficient_count() const {
    std::size_t n = approx.size();
    for (const auto& d : details) n += d.size();
    return n;
}

std::vector<double> MRADecomposition::flatten() const {
    std::vector<double> out(approx);
    for (const auto& d : details) out.insert(out.end(), d.begin(), d.end());
    return out;
}

MRADecomposition dwt_forward(std::span<const double> signal, const WaveletBasis& basis, int levels) {
    const std::size_t n = signal.size();
    if (levels < 0) throw std::invalid_argument("dwt_forward: negative level count");
    if (n == 0 || levels >= 63 || n % (std::size_t{1} << levels) != 0 || (levels > 0 && n < 2))
        throw std::invalid_argument("dwt_forward: length " + std::to_string(n) + " not divisible by 2^" +
                                    std::to_string(levels));
    MRADecomposition mra{basis, 0, 0, {}, {}, Boundary::periodic};
    mra.fine_level = floor_log2(n);
    mra.coarse_level = mra.fine_level - levels;
    std::vector<double> current(signal.begin(), signal.end());
    mra.details.resize(levels);
    for (int l = 0; l < levels; ++l) {
        const std::size_t half = current.size() / 2;
        std::vector<double> approx(half), detail(half);
        analysis_step(basis, current, approx, detail);
        mra.details[levels - 1 - l] = std::move(detail);
        current = std::move(approx);
    }
    mra.approx = std::move(current);
    return mra;
}

std::vector<double> dwt_inverse(const MRADecomposition& mra) {
    std::vector<double> current = mra.approx;
    for (const auto& detail : mra.details) {
        if (detail.size() != current.size()) throw std::invalid_argument("dwt_inverse: inconsistent level sizes");
        std::vector<double> out(2 * current.size());
        synthesis_step(mra.basis, current, detail, out);
        current = std::move(out);
    }
    return current;
}

std::vector<std::vector<double>> mra_components(std::span<const double> signal, const WaveletBasis& basis,
                                                int coarse_level) {
    if (!is_power_of_two(signal.size()))
        throw std::invalid_argument("mra_components: length must be a power of two");
    const int fine = floor_log2(signal.size());
    if (coarse_level < 0 || coarse_level > fine)
        throw std::invalid_argument("mra_components: coarse level out of range");
    const MRADecomposition full = dwt_forward(signal, basis, fine - coarse_level);

    std::vector<std::vector<double>> out;
    MRADecomposition part = full;
    for (auto& d : part.details) std::fill(d.begin(), d.end(), 0.0);
    out.push_back(dwt_inverse(part));
    std::fill(part.approx.begin(), part.approx.end(), 0.0);
    for (std::size_t k = 0; k < full.details.size(); ++k) {
        part.details[k] = full.details[k];
        out.push_back(dwt_inverse(part));
        std::fill(part.details[k].begin(), part.details[k].end(), 0.0);
    }
    return out;
}

// --- 2-D -------------------------------------------------------------------

namespace {

void check_2d(std::size_t size, std::size_t rows, std::size_t cols, int levels) {
    if (size != rows * cols) throw std::invalid_argument("dwt2: size mismatch");
    if (levels < 0 || rows % (std::size_t{1} << levels) != 0 || cols % (std::size_t{1} << levels) != 0)
        throw std::invalid_argument("dwt2: dimensions not divisible by 2^levels");
}

}  // namespace

std::vector<double> dwt2_forward(std::span<const double> values, std::size_t rows, std::size_t cols,
                                 const WaveletBasis& basis, int levels) {
    check_2d(values.size(), rows, cols, levels);
    std::vector<double> c(values.begin(), values.end());
    std::size_t r = rows, k = cols;
    std::vector<double> line, a, d;
    for (int l = 0; l < levels; ++l) {
        line.resize(k);
        a.resize(k / 2);
        d.resize(k / 2);
        for (std::size_t i = 0; i < r; ++i) {
            std::copy_n(c.begin() + i * cols, k, line.begin());
            analysis_step(basis, line, a, d);
            std::copy(a.begin(), a.end(), c.begin() + i * cols);
            std::copy(d.begin(), d.end(), c.begin() + i * cols + k / 2);
        }
        line.resize(r);
        a.resize(r / 2);
        d.resize(r / 2);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < r; ++i) line[i] = c[i * cols + j];
            analysis_step(basis, line, a, d);
            for (std::size_t i = 0; i < r / 2; ++i) {
                c[i * cols + j] = a[i];
                c[(i + r / 2) * cols + j] = d[i];
            }
        }
        r /= 2;
        k /= 2;
    }
    return c;
}

std::vector<double> dwt2_inverse(std::span<const double> coeffs, std::size_t rows, std::size_t cols,
                                 const WaveletBasis& basis, int levels) {
    check_2d(coeffs.size(), rows, cols, levels);
    std::vector<double> c(coeffs.begin(), coeffs.end());
    std::vector<double> line, a, d;
    for (int l = levels - 1; l >= 0; --l) {
        const std::size_t r = rows >> l, k = cols >> l;
        line.resize(r);
        a.resize(r / 2);
        d.resize(r / 2);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < r / 2; ++i) {
                a[i] = c[i * cols + j];
                d[i] = c[(i + r / 2) * cols + j];
            }
            synthesis_step(basis, a, d, line);
            for (std::size_t i = 0; i < r; ++i) c[i * cols + j] = line[i];
        }
        line.resize(k);
        a.resize(k / 2);
        d.resize(k / 2);
        for (std::size_t i = 0; i < r; ++i) {
            std::copy_n(c.begin() + i * cols, k / 2, a.begin());
            std::copy_n(c.begin() + i * cols + k / 2, k / 2, d.begin());
            synthesis_step(basis, a, d, line);
            std::copy(line.begin(), line.end(), c.begin() + i * cols);
        }
    }
    return c;
}

// --- cascade ----------------------------------------------------------------

namespace {

// phi at the integers 0..genus-1.
std::vector<double> integer_values(const WaveletBasis& basis) {
    const int len = basis.genus();
    std::vector<double> v(len, 0.0);
    if (len == 2) {  // Haar: right-continuous indicator of [0, 1)
        v[0] = 1.0;
        return v;
    }
    // phi vanishes at 0 and genus-1; interior values solve
    // phi(i) = sqrt(2) sum_j h_{2i-j} phi(j) with sum_i phi(i) = 1.
    const int m = len - 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    const auto& h = basis.lowpass();
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            const int k = 2 * i - j;
            if (k >= 0 && k < len) a(i - 1, j - 1) = std::sqrt(2.0) * h[k];
        }
    a.topRows(m) -= Eigen::MatrixXd::Identity(m, m);
    a.row(m).setOnes();
    rhs(m) = 1.0;
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
    for (int i = 1; i <= m; ++i) v[i] = sol(i - 1);
    return v;
}

}  // namespace

CascadeSamples cascade_evaluate(const WaveletBasis& basis, int resolution_level) {
    if (resolution_level < 0 || resolution_level > 12)
        throw std::invalid_argument("cascade_evaluate: resolution level must be in [0, 12]");
    const int len = basis.genus();
    const auto& h = basis.lowpass();
    const auto& g = basis.highpass();
    std::vector<double> phi = integer_values(basis);
    for (int s = 1; s <= resolution_level; ++s) {
        const std::size_t count = static_cast<std::size_t>(len - 1) * (std::size_t{1} << s) + 1;
        const std::size_t shift = std::size_t{1} << (s - 1);
        std::vector<double> next(count, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            double acc = 0.0;
            for (int k = 0; k < len; ++k) {
                const std::size_t off = static_cast<std::size_t>(k) * shift;
                if (i >= off && i - off < phi.size()) acc += h[k] * phi[i - off];
            }
            next[i] = std::sqrt(2.0) * acc;
        }
        phi = std::move(next);
    }
    CascadeSamples out;
    out.resolution_level = resolution_level;
    out.step = std::ldexp(1.0, -resolution_level);
    const std::size_t count = phi.size();
    const std::size_t unit = std::size_t{1} << resolution_level;
    out.x.resize(count);
    out.psi.assign(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        out.x[i] = static_cast<double>(i) * out.step;
        // psi(x) = sqrt(2) sum_k g_k phi(2x - k)
        double acc = 0.0;
        for (int k = 0; k < len; ++k) {
            const std::size_t off = static_cast<std::size_t>(k) * unit;
            if (2 * i >= off && 2 * i - off < count) acc += g[k] * phi[2 * i - off];
        }
        out.psi[i] = std::sqrt(2.0) * acc;
    }
    out.phi = std::move(phi);
    return out;
}

double refinement_residual(const WaveletBasis& basis, const CascadeSamples& s) {
    const int len = basis.genus();
    const auto& h = basis.lowpass();
    const std::size_t count = s.phi.size();
    const std::size_t unit = std::size_t{1} << s.resolution_level;
    double worst = 0.0;
    // Points with 2x on the grid: every sample x_i has 2x_i = x_{2i}.
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (int k = 0; k < len; ++k) {
            const std::size_t off = static_cast<std::size_t>(k) * unit;
            if (2 * i >= off && 2 * i - off < count) acc += h[k] * s.phi[2 * i - off];
        }
        worst = std::max(worst, std::abs(s.phi[i] - std::sqrt(2.0) * acc));
    }
    return worst;
}

}  // namespace wigneton
