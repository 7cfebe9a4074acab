#include "wigneton/patterns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "wigneton/scale_separation.hpp"

namespace wigneton {

WignerTransformResult wigner_transform(const std::vector<std::complex<double>>& psi, double q0, double dq,
                                       double hbar) {
    const std::size_t n = psi.size();
    if (n < 4 || !std::has_single_bit(n)) throw std::invalid_argument("wigner_transform: length must be a power of two >= 4");
    if (!(dq > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("wigner_transform: dq and hbar must be positive");

    WignerTransformResult out;
    double norm = 0.0;
    for (const auto& v : psi) norm += std::norm(v);
    norm *= dq;
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("wigner_transform: zero or non-finite wave function");
    out.input_norm = norm;
    out.renormalized = std::abs(norm - 1.0) > 1e-10;
    const double scale = 1.0 / norm;

    const double half_band = std::numbers::pi * hbar / (2.0 * dq);
    Grid2D g;
    g.q0 = q0;
    g.q1 = q0 + static_cast<double>(n) * dq;
    g.p0 = -half_band;
    g.p1 = half_band;
    g.nq = g.np = n;
    out.field = WignerField(g, hbar);

    // Row k: r_m = conj(psi_{k+m}) psi_{k-m} at offset slot m mod n, then
    // W(p_j) = sum_m r_m exp(2 pi i j m / n). With j = jj - n/2 the
    // phase factor (-1)^m shifts the output into ascending p.
    Eigen::FFT<double> fft;
    const long nn = static_cast<long>(n);
    std::vector<std::complex<double>> row(n), spec(n);
    for (long k = 0; k < nn; ++k) {
        std::fill(row.begin(), row.end(), std::complex<double>{});
        for (long m = -nn / 2; m < nn / 2; ++m) {
            const long a = k + m, b = k - m;
            if (a < 0 || b < 0 || a >= nn || b >= nn) continue;
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            row[static_cast<std::size_t>((m + nn) % nn)] = sign * std::conj(psi[static_cast<std::size_t>(a)]) *
                                                           psi[static_cast<std::size_t>(b)];
        }
        fft.inv(spec, row);  // sum_m r_m exp(+2 pi i j m / n) / n
        for (std::size_t j = 0; j < n; ++j)
            out.field.at(static_cast<std::size_t>(k), j) =
                spec[j].real() * static_cast<double>(n) * dq * scale / (std::numbers::pi * hbar);
    }
    return out;
}

std::string to_string(PatternClass c) {
    switch (c) {
        case PatternClass::localized_waveleton: return "localized_waveleton";
        case PatternClass::chaotic: return "chaotic";
        case PatternClass::intermediate: return "intermediate";
    }
    return "intermediate";
}

std::vector<double> scale_energy_spectrum(const WignerField& field, const WaveletBasis& basis, int levels) {
    const auto& g = field.grid;
    const auto c = dwt2_forward(field.values, g.nq, g.np, basis, levels);
    std::vector<double> e(static_cast<std::size_t>(levels) + 1, 0.0);
    for (std::size_t r = 0; r < g.nq; ++r)
        for (std::size_t k = 0; k < g.np; ++k) {
            const double v = c[g.index(r, k)];
            e[static_cast<std::size_t>(spatial_level(r, k, g.nq, g.np, levels))] += v * v;
        }
    return e;
}

double negativity_volume(const WignerField& field) {
    double s = 0.0;
    for (double v : field.values) s += 0.5 * (std::abs(v) - v);
    return s * field.grid.dq() * field.grid.dp();
}

WignerField random_field(const Grid2D& grid, std::uint64_t seed, double hbar) {
    std::mt19937_64 rng(seed);
    // Map the raw 64-bit draws by hand: std::uniform_real_distribution is
    // implementation-defined, and the payload must be reproducible.
    WignerField w(grid, hbar);
    for (double& v : w.values) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return w;
}

PatternClass classify(const PatternReport& r, std::size_t n_levels, const PatternThresholds& t) {
    if (r.top2_share >= t.top2_concentration && r.localization_radius <= t.radius_fraction * r.domain_diameter)
        return PatternClass::localized_waveleton;
    if (n_levels > 1 && r.scale_entropy >= t.entropy_fraction * std::log(static_cast<double>(n_levels)))
        return PatternClass::chaotic;
    return PatternClass::intermediate;
}

namespace {

// Entropy, participation ratio and top-2 share from the level shares.
void fill_share_metrics(PatternReport& r) {
    const auto& s = r.level_shares;
    double sum = 0.0, sum2 = 0.0, h = 0.0;
    for (double v : s) {
        sum += v;
        sum2 += v * v;
        if (v > 0.0) h -= v * std::log(v);
    }
    r.scale_entropy = std::max(h, 0.0);
    r.participation_ratio = sum2 > 0.0 ? sum * sum / (static_cast<double>(s.size()) * sum2) : 0.0;
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    r.top2_share = sorted.size() >= 2 ? sorted[0] + sorted[1] : (sorted.empty() ? 0.0 : sorted[0]);
}

}  // namespace

PatternReport analyze(const WignerField& field, const WaveletBasis& basis, int levels, const PatternThresholds& t) {
    const auto& g = field.grid;
    PatternReport r;
    r.time = field.time;
    r.level_energies = scale_energy_spectrum(field, basis, levels);

    // Divide by the coefficient count of each level so that white noise
    // gives a uniform distribution over levels.
    std::vector<double> counts(r.level_energies.size(), 0.0);
    const double approx = static_cast<double>((g.nq >> levels) * (g.np >> levels));
    counts[0] = approx;
    double prev = approx;
    for (int l = 1; l <= levels; ++l) {
        const double here = static_cast<double>((g.nq >> (levels - l)) * (g.np >> (levels - l)));
        counts[static_cast<std::size_t>(l)] = here - prev;
        prev = here;
    }
    double dsum = 0.0;
    r.level_shares.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        r.level_shares[i] = r.level_energies[i] / counts[i];
        dsum += r.level_shares[i];
    }
    if (dsum > 0.0)
        for (double& v : r.level_shares) v /= dsum;
    fill_share_metrics(r);

    r.negativity_volume = negativity_volume(field);

    double m0 = 0.0, mq = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < g.nq; ++i)
        for (std::size_t j = 0; j < g.np; ++j) {
            const double w = std::abs(field.at(i, j));
            m0 += w;
            mq += w * g.q(i);
            mp += w * g.p(j);
        }
    if (m0 > 0.0) {
        mq /= m0;
        mp /= m0;
        double m2 = 0.0;
        for (std::size_t i = 0; i < g.nq; ++i)
            for (std::size_t j = 0; j < g.np; ++j) {
                const double dq = g.q(i) - mq, dp = g.p(j) - mp;
                m2 += std::abs(field.at(i, j)) * (dq * dq + dp * dp);
            }
        r.localization_radius = std::sqrt(m2 / m0);
    }
    r.domain_diameter = std::hypot(g.q1 - g.q0, g.p1 - g.p0);
    r.classification = classify(r, r.level_shares.size(), t);
    return r;
}

TrajectoryReport analyze(const std::vector<WignerField>& trajectory, const WaveletBasis& basis, int levels,
                         const PatternThresholds& t) {
    if (trajectory.empty()) throw std::invalid_argument("analyze: empty trajectory");
    TrajectoryReport out;
    for (const auto& w : trajectory) out.snapshots.push_back(analyze(w, basis, levels, t));

    auto stable = [&](std::size_t a, std::size_t b) {
        auto spread_ok = [&](auto metric) {
            double lo = metric(out.snapshots[a]), hi = lo, mag = 0.0;
            for (std::size_t k = a; k <= b; ++k) {
                const double v = metric(out.snapshots[k]);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                mag = std::max(mag, std::abs(v));
            }
            return hi - lo <= t.stability_variation * mag;
        };
        return spread_ok([](const PatternReport& r) { return r.scale_entropy; }) &&
               spread_ok([](const PatternReport& r) { return r.participation_ratio; }) &&
               spread_ok([](const PatternReport& r) { return r.localization_radius; });
    };
    // Two-pointer scan: extending a window can only increase the spread.
    std::size_t best_a = 0, best_b = 0, a = 0;
    for (std::size_t b = 0; b < out.snapshots.size(); ++b) {
        while (!stable(a, b)) ++a;
        if (b - a > best_b - best_a) {
            best_a = a;
            best_b = b;
        }
    }
    out.window_begin = best_a;
    out.window_end = best_b;

    PatternReport s;
    const double count = static_cast<double>(best_b - best_a + 1);
    s.level_energies.assign(out.snapshots[0].level_energies.size(), 0.0);
    s.level_shares.assign(out.snapshots[0].level_shares.size(), 0.0);
    for (std::size_t k = best_a; k <= best_b; ++k) {
        const auto& r = out.snapshots[k];
        for (std::size_t i = 0; i < s.level_energies.size(); ++i) {
            s.level_energies[i] += r.level_energies[i] / count;
            s.level_shares[i] += r.level_shares[i] / count;
        }
        s.negativity_volume += r.negativity_volume / count;
        s.localization_radius += r.localization_radius / count;
    }
    fill_share_metrics(s);
    s.domain_diameter = out.snapshots[0].domain_diameter;
    s.time = out.snapshots[best_b].time;
    s.time_window = std::make_pair(out.snapshots[best_a].time, out.snapshots[best_b].time);
    s.classification = classify(s, s.level_shares.size(), t);
    out.summary = s;
    return out;
}

nlohmann::json to_json(const PatternReport& r) {
    nlohmann::json j;
    j["time"] = r.time;
    j["level_energies"] = r.level_energies;
    j["level_shares"] = r.level_shares;
    j["scale_entropy"] = r.scale_entropy;
    j["participation_ratio"] = r.participation_ratio;
    j["top2_share"] = r.top2_share;
    j["negativity_volume"] = r.negativity_volume;
    j["localization_radius"] = r.localization_radius;
    j["domain_diameter"] = r.domain_diameter;
    j["classification"] = to_string(r.classification);
    j["time_window"] = r.time_window ? nlohmann::json::array({r.time_window->first, r.time_window->second})
                                     : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const TrajectoryReport& r) {
    nlohmann::json j;
    j["snapshots"] = nlohmann::json::array();
    for (const auto& s : r.snapshots) j["snapshots"].push_back(to_json(s));
    j["window"] = {r.window_begin, r.window_end};
    j["summary"] = to_json(r.summary);
    j["thresholds_version"] = PatternThresholds{}.version;
    return j;
}

}  // namespace wigneton
