#pragma once

// Orthonormal compactly supported wavelets on periodic grids: Daubechies
// filters, the fast wavelet transform (1-D and separable 2-D), cascade
// evaluation of phi / psi, multiresolution components, wavelet packets.

#include <cstddef>
#include <span>
#include <vector>

namespace wigneton {

enum class WaveletFamily { daubechies };
enum class Boundary { periodic };

class WaveletBasis {
public:
    WaveletBasis(WaveletFamily family, std::vector<double> lowpass);

    WaveletFamily family() const noexcept { return family_; }
    int genus() const noexcept { return static_cast<int>(lowpass_.size()); }
    int vanishing_moments() const noexcept { return genus() / 2; }
    const std::vector<double>& lowpass() const noexcept { return lowpass_; }
    // g_k = (-1)^k h_{genus-1-k}
    const std::vector<double>& highpass() const noexcept { return highpass_; }

private:
    WaveletFamily family_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
};

// Minimal-phase Daubechies filter with `genus` taps (even, 2..20).
WaveletBasis daubechies_filters(int genus);

// One analysis step on a periodic signal of even length n:
// approx[k] = sum_m h_m x[(2k+m) mod n], detail[k] = sum_m g_m x[(2k+m) mod n].
void analysis_step(const WaveletBasis& basis, std::span<const double> in, std::span<double> approx,
                   std::span<double> detail);
// Exact inverse of analysis_step (adjoint of an orthogonal map).
void synthesis_step(const WaveletBasis& basis, std::span<const double> approx,
                    std::span<const double> detail, std::span<double> out);

struct MRADecomposition {
    WaveletBasis basis;
    int coarse_level = 0;  // i_c
    int fine_level = 0;    // J, with fine_level - coarse_level transform levels
    std::vector<double> approx;                // at coarse_level
    std::vector<std::vector<double>> details;  // details[k] lives on level coarse_level + k
    Boundary boundary = Boundary::periodic;

    int levels() const noexcept { return fine_level - coarse_level; }
    std::size_t coefficient_count() const;
    // Coefficients in pyramid order: approx, coarsest detail, ..., finest detail.
    std::vector<double> flatten() const;
};

// Throws std::invalid_argument if the length is not divisible by 2^levels.
// fine_level is floor(log2(length)).
MRADecomposition dwt_forward(std::span<const double> signal, const WaveletBasis& basis, int levels);
std::vector<double> dwt_inverse(const MRADecomposition& mra);

// Per-scale components of a power-of-two signal: element 0 is the projection
// onto V_{coarse_level}; element 1 + k is the detail component on level
// coarse_level + k. They sum to the signal.
std::vector<std::vector<double>> mra_components(std::span<const double> signal, const WaveletBasis& basis,
                                                int coarse_level);

// Separable 2-D transform of a row-major rows x cols array (both divisible by
// 2^levels). Mallat layout: after the call the top-left (rows/2^L) x (cols/2^L)
// block holds the approximation.
std::vector<double> dwt2_forward(std::span<const double> values, std::size_t rows, std::size_t cols,
                                 const WaveletBasis& basis, int levels);
std::vector<double> dwt2_inverse(std::span<const double> coeffs, std::size_t rows, std::size_t cols,
                                 const WaveletBasis& basis, int levels);

struct CascadeSamples {
    int resolution_level = 0;
    double step = 1.0;           // 2^-resolution_level
    std::vector<double> x;       // k * step on [0, genus-1]
    std::vector<double> phi;
    std::vector<double> psi;
};

// Samples of phi and psi on the dyadic grid of the given level (<= 12),
// starting from the exact integer values (eigenvector of the refinement
// matrix) and refining.
CascadeSamples cascade_evaluate(const WaveletBasis& basis, int resolution_level);

// max |phi(x) - sqrt(2) sum_k h_k phi(2x - k)| over the sample grid.
double refinement_residual(const WaveletBasis& basis, const CascadeSamples& s);

// --- wavelet packets -------------------------------------------------------

struct PacketNode {
    int level = 0;  // 0 = root
    int band = 0;   // 0 .. 2^level - 1, natural (filter-bank) order
    auto operator<=>(const PacketNode&) const = default;
};

// Full packet table: nodes[level][band] holds the coefficients of that node.
struct WaveletPacketTable {
    int depth = 0;
    std::vector<std::vector<std::vector<double>>> nodes;
    double norm2 = 0.0;  // squared l2 norm of the signal

    const std::vector<double>& at(PacketNode n) const { return nodes[n.level][n.band]; }
};

WaveletPacketTable wavelet_packet_table(std::span<const double> signal, const WaveletBasis& basis, int depth);

// Additive Shannon cost  -sum v log v,  v = c^2 / norm2.
double shannon_cost(std::span<const double> coeffs, double norm2);

struct WaveletPacketTree {
    WaveletBasis basis;
    int depth = 0;
    std::size_t length = 0;
    std::vector<PacketNode> selected_nodes;  // disjoint dyadic cover, sorted
    std::vector<std::vector<double>> coefficients;
    double cost = 0.0;
};

// Coifman-Wickerhauser best basis: bottom-up pruning of the packet table
// with the Shannon cost.
WaveletPacketTree wavelet_packet_best_basis(std::span<const double> signal, const WaveletBasis& basis,
                                            int depth);
std::vector<double> wavelet_packet_reconstruct(const WaveletPacketTree& tree);
// True iff the nodes tile [0, 1) exactly once (band / 2^level intervals).
bool is_disjoint_cover(const std::vector<PacketNode>& nodes);

// --- demo signals ----------------------------------------------------------

enum class DemoKind { kick, multikick, riemann_weierstrass };

struct DemoParams {
    std::size_t length = 512;
    double center = 0.5;       // kick: position as a fraction of the length
    double width = 4.0;        // kick / multikick: Gaussian width in samples
    std::size_t period = 64;   // multikick: samples between bumps
    double amplitude_ratio = 0.5;  // riemann_weierstrass a
    double frequency_ratio = 3.0;  // riemann_weierstrass b
    int terms = 12;                // riemann_weierstrass N
};

std::vector<double> demo_signal(DemoKind kind, const DemoParams& params);

}  // namespace wigneton
