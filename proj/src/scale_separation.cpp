#include "wigneton/scale_separation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace wigneton {

namespace {

int axis_level(std::size_t r, std::size_t n, int levels) {
    // Index r < n / 2^levels is approximation; [n/2^k, n/2^(k-1)) is the
    // detail of transform step k, which is spatial level levels - k + 1.
    std::size_t size = n >> levels;
    if (r < size) return 0;
    int level = 1;
    while (r >= 2 * size) {
        size *= 2;
        ++level;
    }
    return level;
}

}  // namespace

int spatial_level(std::size_t r, std::size_t c, std::size_t nq, std::size_t np, int levels) {
    return std::max(axis_level(r, nq, levels), axis_level(c, np, levels));
}

Eigen::MatrixXd ScaleSeparatedSolution::reconstruct() const {
    Eigen::MatrixXd out = slow;
    for (const auto& f : fast) out += f.trajectory;
    return out;
}

double ScaleSeparatedSolution::slow_energy() const { return slow.squaredNorm(); }

double ScaleSeparatedSolution::fast_energy() const {
    double e = 0.0;
    for (const auto& f : fast) e += f.energy;
    return e;
}

ScaleSeparatedSolution scale_separate(const std::vector<WignerField>& snapshots, const WaveletBasis& basis,
                                      int spatial_levels, int time_coarse_level) {
    if (snapshots.empty()) throw std::invalid_argument("scale_separate: empty trajectory");
    if (time_coarse_level < 0) throw std::invalid_argument("scale_separate: negative time coarse level");
    const std::size_t samples = std::bit_floor(snapshots.size());
    const std::size_t needed = std::size_t{1} << (time_coarse_level + 1);
    if (samples < needed)
        throw std::invalid_argument("scale_separate: t_end too short, " + std::to_string(snapshots.size()) +
                                    " snapshots but the coarse time level needs " + std::to_string(needed));
    const Grid2D grid = snapshots.front().grid;
    const std::size_t dim = grid.size();

    ScaleSeparatedSolution out;
    out.grid = grid;
    out.spatial_levels = spatial_levels;
    out.time_coarse_level = time_coarse_level;
    out.coefficients.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < samples; ++s) {
        const auto& w = snapshots[s];
        if (w.grid.nq != grid.nq || w.grid.np != grid.np)
            throw std::invalid_argument("scale_separate: snapshots on different grids");
        const auto c = dwt2_forward(w.values, grid.nq, grid.np, basis, spatial_levels);
        out.coefficients.row(static_cast<Eigen::Index>(s)) =
            Eigen::Map<const Eigen::RowVectorXd>(c.data(), static_cast<Eigen::Index>(dim));
        out.times.push_back(w.time);
    }

    const int top = std::bit_width(samples) - 1;  // J
    const int n_fast = top - time_coarse_level;
    out.slow.setZero(out.coefficients.rows(), out.coefficients.cols());
    out.fast.resize(static_cast<std::size_t>(n_fast));
    for (int k = 0; k < n_fast; ++k) {
        out.fast[static_cast<std::size_t>(k)].level = time_coarse_level + k;
        out.fast[static_cast<std::size_t>(k)].trajectory.setZero(out.coefficients.rows(), out.coefficients.cols());
    }

    std::vector<double> series(samples);
    for (Eigen::Index c = 0; c < out.coefficients.cols(); ++c) {
        for (std::size_t s = 0; s < samples; ++s) series[s] = out.coefficients(static_cast<Eigen::Index>(s), c);
        const auto parts = mra_components(series, basis, time_coarse_level);
        for (std::size_t s = 0; s < samples; ++s) {
            const auto row = static_cast<Eigen::Index>(s);
            out.slow(row, c) = parts[0][s];
            for (int k = 0; k < n_fast; ++k)
                out.fast[static_cast<std::size_t>(k)].trajectory(row, c) = parts[static_cast<std::size_t>(k) + 1][s];
        }
    }

    // Record length: samples are equally spaced, the record spans samples * dt.
    const double record = samples > 1
        ? (out.times.back() - out.times.front()) * static_cast<double>(samples) / static_cast<double>(samples - 1)
        : 1.0;
    Eigen::FFT<double> fft;
    auto power_spectrum = [&](const Eigen::MatrixXd& traj) {
        std::vector<double> power(samples / 2 + 1, 0.0);
        std::vector<std::complex<double>> spec;
        for (Eigen::Index c = 0; c < traj.cols(); ++c) {
            for (std::size_t s = 0; s < samples; ++s) series[s] = traj(static_cast<Eigen::Index>(s), c);
            fft.fwd(spec, series);
            for (std::size_t b = 0; b < power.size(); ++b) power[b] += std::norm(spec[b]);
        }
        return power;
    };
    auto argmax_from = [](const std::vector<double>& power, std::size_t first) {
        std::size_t best = first;
        for (std::size_t b = first; b < power.size(); ++b)
            if (power[b] > power[best]) best = b;
        return best;
    };

    for (auto& f : out.fast) {
        const auto power = power_spectrum(f.trajectory);
        f.dominant_bin = static_cast<int>(argmax_from(power, 1));
        f.omega = 2.0 * std::numbers::pi * f.dominant_bin / record;
        const int lo = f.level == 0 ? 1 : 1 << (f.level - 1);
        f.in_band = f.dominant_bin >= lo && f.dominant_bin <= (1 << f.level);
        f.energy = f.trajectory.squaredNorm();
    }
    if (samples > 2) {
        const auto power = power_spectrum(out.coefficients);
        out.dominant_omega = 2.0 * std::numbers::pi * static_cast<double>(argmax_from(power, 1)) / record;
    }

    out.amplitudes.setZero(spatial_levels + 1, n_fast + 1);
    for (std::size_t r = 0; r < grid.nq; ++r)
        for (std::size_t c = 0; c < grid.np; ++c) {
            const auto col = static_cast<Eigen::Index>(grid.index(r, c));
            const int i = spatial_level(r, c, grid.nq, grid.np, spatial_levels);
            out.amplitudes(i, 0) += out.slow.col(col).squaredNorm();
            for (int k = 0; k < n_fast; ++k)
                out.amplitudes(i, k + 1) += out.fast[static_cast<std::size_t>(k)].trajectory.col(col).squaredNorm();
        }

    out.reconstruction_error = (out.reconstruct() - out.coefficients).cwiseAbs().maxCoeff();
    return out;
}

ScaleSeparatedSolution scale_separated_solve(const Hamiltonian& h, const WaveletBasis& basis, int spatial_levels,
                                             const WignerField& w0, const PropagateOptions& options,
                                             int time_coarse_level) {
    const auto traj = propagate(w0, h, basis, options);
    return scale_separate(traj.snapshots, basis, spatial_levels, time_coarse_level);
}

}  // namespace wigneton
