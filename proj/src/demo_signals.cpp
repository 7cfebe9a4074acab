#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wigneton/wavelet.hpp"

namespace wigneton {

namespace {

// Gaussian bump of the given width (samples) at a fractional position, with
// periodic distance so bumps near the ends wrap.
double periodic_bump(double i, double center, double width, double length) {
    double d = std::fmod(std::abs(i - center), length);
    d = std::min(d, length - d);
    return std::exp(-0.5 * (d / width) * (d / width));
}

}  // namespace

std::vector<double> demo_signal(DemoKind kind, const DemoParams& p) {
    if (p.length < 2) throw std::invalid_argument("demo_signal: length must be >= 2");
    const double n = static_cast<double>(p.length);
    std::vector<double> out(p.length, 0.0);
    switch (kind) {
    case DemoKind::kick: {
        if (!(p.width > 0.0)) throw std::invalid_argument("demo_signal: kick width must be positive");
        if (!(p.center >= 0.0 && p.center < 1.0)) throw std::invalid_argument("demo_signal: center must be in [0, 1)");
        for (std::size_t i = 0; i < p.length; ++i) out[i] = periodic_bump(static_cast<double>(i), p.center * n, p.width, n);
        break;
    }
    case DemoKind::multikick: {
        if (!(p.width > 0.0)) throw std::invalid_argument("demo_signal: kick width must be positive");
        if (p.period == 0 || p.period > p.length)
            throw std::invalid_argument("demo_signal: multikick period must be in [1, length]");
        for (std::size_t c = p.period / 2; c < p.length; c += p.period)
            for (std::size_t i = 0; i < p.length; ++i)
                out[i] += periodic_bump(static_cast<double>(i), static_cast<double>(c), p.width, n);
        break;
    }
    case DemoKind::riemann_weierstrass: {
        const double a = p.amplitude_ratio, b = p.frequency_ratio;
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("demo_signal: amplitude ratio must be in (0, 1)");
        if (!(b > 1.0)) throw std::invalid_argument("demo_signal: frequency ratio must exceed 1");
        if (p.terms < 1 || p.terms > 64) throw std::invalid_argument("demo_signal: terms must be in [1, 64]");
        for (std::size_t i = 0; i < p.length; ++i) {
            const double x = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
            double amp = 1.0, freq = 1.0, acc = 0.0;
            for (int k = 0; k < p.terms; ++k) {
                acc += amp * std::cos(freq * x);
                amp *= a;
                freq *= b;
            }
            out[i] = acc;
        }
        break;
    }
    }
    return out;
}

}  // namespace wigneton
