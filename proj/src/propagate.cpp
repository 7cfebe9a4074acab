#include "wigneton/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/FFT>

#include "wigneton/errors.hpp"

namespace wigneton {

double spectral_radius_bound(const SparseMatrix& m) {
    double best = 0.0;
    for (int r = 0; r < m.outerSize(); ++r) {
        double row = 0.0;
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) row += std::abs(it.value());
        best = std::max(best, row);
    }
    return best;
}

namespace {

// Conjugate offsets y_m = 2 pi hbar m / (n d) in FFT order.
std::vector<double> conjugate_offsets(std::size_t n, double d, double hbar) {
    std::vector<double> y(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double k = (m < n / 2) ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
        y[m] = 2.0 * std::numbers::pi * hbar * k / (static_cast<double>(n) * d);
    }
    return y;
}

double eval_real(const PolySymbol& k, double q, double p) { return k.evaluate(q, p).real(); }

}  // namespace

WignerField apply_kick(const WignerField& w, const PolySymbol& kick) {
    if (!kick.is_real()) throw std::invalid_argument("apply_kick: kick symbol must be real");
    const bool q_only = kick.degree_p() <= 0;
    const bool p_only = kick.degree_q() <= 0;
    if (!q_only && !p_only) throw std::invalid_argument("apply_kick: kick symbol mixes q and p");
    const Grid2D& g = w.grid;
    const double hbar = w.hbar;
    WignerField out = w;
    Eigen::FFT<double> fft;
    using C = std::complex<double>;

    if (q_only) {
        // chi(q, y) = sum_p W e^{-i p y / hbar}; the kick multiplies it by
        // exp(i (K(q + y/2) - K(q - y/2)) / hbar).
        const auto y = conjugate_offsets(g.np, g.dp(), hbar);
        std::vector<double> row(g.np);
        std::vector<C> spec;
        for (std::size_t i = 0; i < g.nq; ++i) {
            for (std::size_t j = 0; j < g.np; ++j) row[j] = w.at(i, j);
            fft.fwd(spec, row);
            const double q = g.q(i);
            for (std::size_t m = 0; m < g.np; ++m) {
                const double phase = (eval_real(kick, q + 0.5 * y[m], 0.0) - eval_real(kick, q - 0.5 * y[m], 0.0)) / hbar;
                spec[m] *= std::polar(1.0, phase);
            }
            std::vector<C> back;
            fft.inv(back, spec);
            for (std::size_t j = 0; j < g.np; ++j) out.at(i, j) = back[j].real();
        }
    } else {
        // Same construction along q with the conjugate sign flipped.
        const auto x = conjugate_offsets(g.nq, g.dq(), hbar);
        std::vector<double> col(g.nq);
        std::vector<C> spec;
        for (std::size_t j = 0; j < g.np; ++j) {
            for (std::size_t i = 0; i < g.nq; ++i) col[i] = w.at(i, j);
            fft.fwd(spec, col);
            const double p = g.p(j);
            for (std::size_t m = 0; m < g.nq; ++m) {
                const double phase = (eval_real(kick, 0.0, p + 0.5 * x[m]) - eval_real(kick, 0.0, p - 0.5 * x[m])) / hbar;
                spec[m] *= std::polar(1.0, -phase);
            }
            std::vector<C> back;
            fft.inv(back, spec);
            for (std::size_t i = 0; i < g.nq; ++i) out.at(i, j) = back[i].real();
        }
    }
    return out;
}

namespace {

class Stepper {
public:
    Stepper(SparseMatrix l, Scheme scheme) : l_(std::move(l)), scheme_(scheme) {}

    void step(Eigen::VectorXd& w, double dt) {
        if (scheme_ == Scheme::rk4) {
            const Eigen::VectorXd k1 = l_ * w;
            const Eigen::VectorXd k2 = l_ * (w + 0.5 * dt * k1);
            const Eigen::VectorXd k3 = l_ * (w + 0.5 * dt * k2);
            const Eigen::VectorXd k4 = l_ * (w + dt * k3);
            w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            return;
        }
        // (I - dt/2 L) w' = (I + dt/2 L) w; one factorization per distinct dt.
        auto it = factors_.find(dt);
        if (it == factors_.end()) {
            Eigen::SparseMatrix<double> id(l_.rows(), l_.cols());
            id.setIdentity();
            auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            lu->compute(id - 0.5 * dt * Eigen::SparseMatrix<double>(l_));
            if (lu->info() != Eigen::Success) throw NumericalError("propagate: implicit midpoint factorization failed");
            it = factors_.emplace(dt, std::move(lu)).first;
        }
        const Eigen::VectorXd rhs = w + 0.5 * dt * (l_ * w);
        w = it->second->solve(rhs);
    }

private:
    SparseMatrix l_;
    Scheme scheme_;
    std::map<double, std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>>> factors_;
};

}  // namespace

Trajectory propagate(const WignerField& w0, const Hamiltonian& h, const WaveletBasis& basis,
                     const PropagateOptions& options) {
    h.validate();
    if (!(options.dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
    if (!(options.t_end >= 0.0)) throw std::invalid_argument("propagate: t_end must be nonnegative");
    if (options.stride < 1) throw std::invalid_argument("propagate: stride must be >= 1");
    if (std::abs(w0.hbar - h.hbar) > 1e-15 * std::max(1.0, h.hbar))
        throw std::invalid_argument("propagate: field and Hamiltonian disagree on hbar");
    for (const auto& k : h.kicks) {
        if (!(k.symbol.degree_p() <= 0 || k.symbol.degree_q() <= 0))
            throw std::invalid_argument("propagate: kick symbol mixes q and p");
    }

    const SparseMatrix l = discretize(evolution_operator(h.base, h.hbar), basis, w0.grid).assemble();
    Trajectory traj;
    traj.spectral_bound = spectral_radius_bound(l);
    if (options.scheme == Scheme::rk4 && options.dt * traj.spectral_bound > options.rk4_cfl_limit) {
        std::ostringstream msg;
        msg << "propagate: rk4 step dt = " << options.dt << " exceeds the stability bound "
            << options.rk4_cfl_limit / traj.spectral_bound << " (dt * rho = " << options.dt * traj.spectral_bound << ")";
        throw std::invalid_argument(msg.str());
    }

    Stepper stepper(l, options.scheme);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(w0.values.data(), static_cast<Eigen::Index>(w0.values.size()));
    const double norm0 = std::max(w.norm(), 1e-300);
    const double mass0 = w0.integral();
    const double cell = w0.grid.dq() * w0.grid.dp();
    auto snapshot = [&](double t) {
        WignerField f(w0.grid, w0.hbar, t);
        Eigen::Map<Eigen::VectorXd>(f.values.data(), w.size()) = w;
        traj.snapshots.push_back(std::move(f));
    };
    snapshot(0.0);

    const auto n_steps = static_cast<long>(std::ceil(options.t_end / options.dt - 1e-9));
    std::vector<long> next_kick(h.kicks.size(), 1);  // kick counters n >= 1
    double t = 0.0;
    for (long k = 1; k <= n_steps; ++k) {
        const double t_next = std::min(static_cast<double>(k) * options.dt, options.t_end);
        // Kicks inside (t, t_next] split the step.
        for (;;) {
            double kick_time = t_next + 1.0;
            std::size_t which = 0;
            for (std::size_t i = 0; i < h.kicks.size(); ++i) {
                const double tk = static_cast<double>(next_kick[i]) * h.kicks[i].period;
                if (tk < kick_time) {
                    kick_time = tk;
                    which = i;
                }
            }
            const double tol = 1e-9 * options.dt;
            if (kick_time > t_next + tol) break;
            if (kick_time - t > tol) stepper.step(w, kick_time - t);
            t = std::max(t, kick_time);
            WignerField f(w0.grid, w0.hbar, t);
            Eigen::Map<Eigen::VectorXd>(f.values.data(), w.size()) = w;
            f = apply_kick(f, h.kicks[which].symbol);
            w = Eigen::Map<const Eigen::VectorXd>(f.values.data(), w.size());
            ++next_kick[which];
            ++traj.kicks_applied;
        }
        if (t_next - t > 1e-12 * options.dt) stepper.step(w, t_next - t);
        t = t_next;
        ++traj.steps;

        const double nrm = w.norm();
        if (!std::isfinite(nrm) || nrm > options.growth_limit * norm0) {
            std::ostringstream msg;
            msg << "propagate: instability at step " << k << " (t = " << t << "), norm grew by " << nrm / norm0;
            throw NumericalError(msg.str());
        }
        traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(w.sum() * cell - mass0));
        if (k % options.stride == 0 || k == n_steps) snapshot(t);
    }
    return traj;
}

}  // namespace wigneton
