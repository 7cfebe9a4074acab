#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wigneton/patterns.hpp"

using namespace wigneton;
using C = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

Grid2D square(double half_width, std::size_t n) {
    Grid2D g;
    g.q0 = g.p0 = -half_width;
    g.q1 = g.p1 = half_width;
    g.nq = g.np = n;
    return g;
}

// Gaussian wave packet with width sqrt(hbar/2) in |psi|^2, centered at
// (a, k), sampled on n points from q0 with step dq.
std::vector<C> packet(std::size_t n, double q0, double dq, double a, double k, double hbar) {
    std::vector<C> psi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = q0 + static_cast<double>(i) * dq;
        psi[i] = std::pow(pi * hbar, -0.25) * std::exp(-(x - a) * (x - a) / (2.0 * hbar)) * std::polar(1.0, k * x / hbar);
    }
    return psi;
}

std::vector<C> add(const std::vector<C>& a, const std::vector<C>& b, double norm) {
    std::vector<C> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = norm * (a[i] + b[i]);
    return out;
}

}  // namespace

TEST_CASE("coherent wave packet gives the nonnegative Gaussian Wigner function") {
    const double hbar = 0.7, q0 = -8.0, dq = 1.0 / 16.0;
    const auto r = wigner_transform(packet(256, q0, dq, 1.0, 0.5, hbar), q0, dq, hbar);
    CHECK_FALSE(r.renormalized);
    const auto& w = r.field;
    CHECK(w.grid.np == 256);
    CHECK(w.grid.p0 == doctest::Approx(-pi * hbar / (2.0 * dq)));
    double worst = 0.0, lowest = 0.0;
    for (std::size_t i = 0; i < w.grid.nq; ++i)
        for (std::size_t j = 0; j < w.grid.np; ++j) {
            const double q = w.grid.q(i), p = w.grid.p(j);
            const double exact = std::exp(-((q - 1.0) * (q - 1.0) + (p - 0.5) * (p - 0.5)) / hbar) / (pi * hbar);
            worst = std::max(worst, std::abs(w.at(i, j) - exact));
            lowest = std::min(lowest, w.at(i, j));
        }
    CHECK(worst < 1e-12);
    CHECK(lowest >= -1e-10);
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(negativity_volume(w) < 1e-10);
}

TEST_CASE("two-Gaussian superposition: fringes and marginals") {
    // The zero-embedded offset range shrinks near the ends of the grid, so
    // the support is wide enough that the truncated tails are below 1e-10.
    const double hbar = 1.0, a = 2.5, q0 = -16.0, dq = 1.0 / 16.0;
    const double norm = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-a * a / hbar)));
    const auto psi = add(packet(512, q0, dq, a, 0.0, hbar), packet(512, q0, dq, -a, 0.0, hbar), norm);
    const auto w = wigner_transform(psi, q0, dq, hbar).field;
    const auto& g = w.grid;

    // Analytic cat-state Wigner function.
    double worst = 0.0;
    for (std::size_t i = 0; i < g.nq; ++i)
        for (std::size_t j = 0; j < g.np; ++j) {
            const double q = g.q(i), p = g.p(j);
            const double exact = norm * norm / (pi * hbar) *
                                 (std::exp(-((q - a) * (q - a) + p * p) / hbar) +
                                  std::exp(-((q + a) * (q + a) + p * p) / hbar) +
                                  2.0 * std::exp(-(q * q + p * p) / hbar) * std::cos(2.0 * a * p / hbar));
            worst = std::max(worst, std::abs(w.at(i, j) - exact));
        }
    CHECK(worst < 1e-10);

    // Fringes at the midpoint oscillate along p with period pi hbar / a.
    const std::size_t mid = 256;  // q = 0
    REQUIRE(g.q(mid) == doctest::Approx(0.0));
    int sign_changes = 0;
    for (std::size_t j = 1; j < g.np; ++j)
        if (std::abs(g.p(j)) < 2.0 && (w.at(mid, j) > 0) != (w.at(mid, j - 1) > 0)) ++sign_changes;
    CHECK(sign_changes == 6);  // 4 / (pi / 2.5) ~ 3.2 periods in |p| < 2

    // q marginal: sum_p W dp = |psi|^2.
    double qerr = 0.0;
    for (std::size_t i = 0; i < g.nq; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.np; ++j) s += w.at(i, j) * g.dp();
        qerr = std::max(qerr, std::abs(s - std::norm(psi[i])));
    }
    CHECK(qerr < 1e-6);
    // p marginal: |psi_hat(p)|^2 = 4 N^2 cos^2(a p / hbar) exp(-p^2 / hbar) / sqrt(pi hbar).
    double perr = 0.0;
    for (std::size_t j = 0; j < g.np; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nq; ++i) s += w.at(i, j) * g.dq();
        const double p = g.p(j);
        const double exact = 4.0 * norm * norm * std::cos(a * p / hbar) * std::cos(a * p / hbar) *
                             std::exp(-p * p / hbar) / std::sqrt(pi * hbar);
        perr = std::max(perr, std::abs(s - exact));
    }
    CHECK(perr < 1e-6);
}

TEST_CASE("pure-state bound and renormalization") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    const double hbar = 0.5, q0 = -6.0, dq = 12.0 / 128.0;
    for (int trial = 0; trial < 5; ++trial) {
        // Random smooth state: three packets with random centers and phases.
        std::vector<C> psi(128);
        for (int k = 0; k < 3; ++k) {
            const auto pk = packet(128, q0, dq, nd(rng), nd(rng), hbar);
            const C c(nd(rng), nd(rng));
            for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += c * pk[i];
        }
        const auto r = wigner_transform(psi, q0, dq, hbar);
        CHECK(r.renormalized);
        double mx = 0.0;
        for (double v : r.field.values) mx = std::max(mx, std::abs(v));
        CHECK(mx <= 1.0 / (pi * hbar) + 1e-6);
        CHECK(r.field.integral() == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK_THROWS_AS(wigner_transform(std::vector<C>(100, 1.0), 0.0, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(wigner_transform(std::vector<C>(64, 0.0), 0.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("negativity of the first excited oscillator mode") {
    // Closed form: -integral of W_1 over its negative disk = 2 / sqrt(e) - 1.
    const double exact = 2.0 / std::sqrt(std::numbers::e) - 1.0;
    auto sample = [](std::size_t n) {
        return sample_field(square(6.0, n), 1.0, [](double q, double p) { return oracle::ho_wigner(1, q, p); });
    };
    const double n64 = negativity_volume(sample(64)), n128 = negativity_volume(sample(128));
    CHECK(n64 > 0.1);
    CHECK(std::abs(n128 - n64) < 0.05 * n128);
    CHECK(n128 == doctest::Approx(exact).epsilon(1e-2));
    const auto ground = sample_field(square(6.0, 64), 1.0, [](double q, double p) { return oracle::ho_wigner(0, q, p); });
    CHECK(negativity_volume(ground) == 0.0);
}

TEST_CASE("scale energy spectrum") {
    const auto basis = daubechies_filters(8);
    const auto grid = square(8.0, 64);
    const int levels = 4;

    SUBCASE("energies sum to the squared norm") {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> nd;
        WignerField w(grid, 1.0);
        for (double& v : w.values) v = nd(rng);
        const auto e = scale_energy_spectrum(w, basis, levels);
        double total = 0.0, norm2 = 0.0;
        for (double v : e) total += v;
        for (double v : w.values) norm2 += v * v;
        CHECK(total == doctest::Approx(norm2).epsilon(1e-10));
        // White noise: energy proportional to the coefficient count.
        const double counts[] = {16, 48, 192, 768, 3072};
        for (int l = 0; l <= levels; ++l)
            CHECK(e[static_cast<std::size_t>(l)] / norm2 == doctest::Approx(counts[l] / 4096.0).epsilon(0.3 / std::sqrt(counts[l]) + 0.02));
    }
    SUBCASE("a single wavelet atom lives on one level") {
        std::vector<double> coeffs(grid.size(), 0.0);
        coeffs[grid.index(9, 3)] = 1.0;  // row level 2, column approximation
        WignerField w(grid, 1.0);
        w.values = dwt2_inverse(coeffs, grid.nq, grid.np, basis, levels);
        const auto e = scale_energy_spectrum(w, basis, levels);
        CHECK(e[2] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e[0] + e[1] + e[3] + e[4] < 1e-20);
    }
    SUBCASE("a Weierstrass-type field decays geometrically") {
        // sum_n a^n cos(2 pi 3 2^n i / 64): term n sits mid-band on level n + 1.
        const double amp = 0.6;
        WignerField w(grid, 1.0);
        for (std::size_t i = 0; i < grid.nq; ++i) {
            double v = 0.0;
            for (int n = 0; n < 4; ++n)
                v += std::pow(amp, n) * std::cos(2.0 * pi * 3.0 * std::pow(2.0, n) * static_cast<double>(i) / 64.0);
            for (std::size_t j = 0; j < grid.np; ++j) w.at(i, j) = v;
        }
        const auto e = scale_energy_spectrum(w, basis, levels);
        for (int l = 1; l < levels; ++l) {
            const double ratio = e[static_cast<std::size_t>(l) + 1] / e[static_cast<std::size_t>(l)];
            CHECK(ratio == doctest::Approx(amp * amp).epsilon(0.15));
        }
    }
}

TEST_CASE("classification of the calibrated cases") {
    const auto basis = daubechies_filters(8);
    const auto grid = square(8.0, 64);
    const int levels = 4;

    const auto gauss = analyze(coherent_state(grid, 1.0, 0.0, 0.0), basis, levels);
    CHECK(gauss.classification == PatternClass::localized_waveleton);
    CHECK(gauss.negativity_volume == 0.0);
    CHECK(gauss.localization_radius == doctest::Approx(1.0).epsilon(1e-3));  // sqrt(<q^2 + p^2>) = sqrt(hbar)
    CHECK(gauss.top2_share >= 0.8);

    const auto noise = random_field(grid, 2024);
    const auto chaos = analyze(noise, basis, levels);
    const double log_n = std::log(static_cast<double>(levels + 1));
    CHECK(chaos.scale_entropy <= log_n + 1e-12);
    CHECK(chaos.scale_entropy == doctest::Approx(log_n).epsilon(0.05));
    CHECK(chaos.classification == PatternClass::chaotic);
    CHECK(chaos.negativity_volume > 0.0);
    // The generator is deterministic and centered on [-1, 1].
    CHECK(random_field(grid, 2024).values == noise.values);
    CHECK(random_field(grid, 2025).values != noise.values);
    double lo = 1.0, hi = -1.0;
    for (double v : noise.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= -1.0);
    CHECK(hi <= 1.0);
    // Values in [0, 1] would be dominated by the mean, which is approximation
    // level energy; that field is not chaotic.
    WignerField shifted = noise;
    for (double& v : shifted.values) v = 0.5 * (v + 1.0);
    CHECK(analyze(shifted, basis, levels).classification != PatternClass::chaotic);

    // Same metrics, same class; thresholds decide the boundary.
    PatternReport r = gauss;
    CHECK(classify(r, 5) == gauss.classification);
    r.localization_radius = 0.3 * r.domain_diameter;
    CHECK(classify(r, 5) != PatternClass::localized_waveleton);

    const auto j = to_json(gauss);
    CHECK(j.at("classification") == "localized_waveleton");
    CHECK(j.at("level_energies").size() == 5);
    CHECK(j.at("time_window").is_null());
}

TEST_CASE("trajectory analysis finds the stable window") {
    const auto basis = daubechies_filters(6);
    const auto grid = square(8.0, 32);
    std::vector<WignerField> traj;
    // Eight rescaled copies of one coherent state (identical metrics), then noise.
    for (int k = 0; k < 8; ++k) {
        auto w = coherent_state(grid, 1.0, 1.0, -0.5);
        for (double& v : w.values) v *= 1.0 + 0.1 * k;
        w.time = k;
        traj.push_back(w);
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int k = 8; k < 11; ++k) {
        WignerField w(grid, 1.0, k);
        for (double& v : w.values) v = ud(rng) * (k - 6);
        traj.push_back(w);
    }
    const auto rep = analyze(traj, basis, 3);
    CHECK(rep.snapshots.size() == 11);
    CHECK(rep.window_begin == 0);
    CHECK(rep.window_end == 7);
    REQUIRE(rep.summary.time_window.has_value());
    CHECK(rep.summary.time_window->second == 7.0);
    CHECK(rep.summary.classification == PatternClass::localized_waveleton);
    CHECK(to_json(rep).at("snapshots").size() == 11);
}
