#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "wigneton/wavelet.hpp"

namespace wigneton {

WaveletPacketTable wavelet_packet_table(std::span<const double> signal, const WaveletBasis& basis, int depth) {
    if (depth < 0 || signal.empty() || signal.size() % (std::size_t{1} << depth) != 0)
        throw std::invalid_argument("wavelet_packet_table: length not divisible by 2^depth");
    WaveletPacketTable t;
    t.depth = depth;
    t.nodes.resize(depth + 1);
    t.nodes[0].emplace_back(signal.begin(), signal.end());
    for (double v : signal) t.norm2 += v * v;
    for (int l = 0; l < depth; ++l) {
        t.nodes[l + 1].resize(std::size_t{1} << (l + 1));
        for (std::size_t b = 0; b < t.nodes[l].size(); ++b) {
            const auto& parent = t.nodes[l][b];
            std::vector<double> lo(parent.size() / 2), hi(parent.size() / 2);
            analysis_step(basis, parent, lo, hi);
            t.nodes[l + 1][2 * b] = std::move(lo);
            t.nodes[l + 1][2 * b + 1] = std::move(hi);
        }
    }
    return t;
}

double shannon_cost(std::span<const double> coeffs, double norm2) {
    if (norm2 <= 0.0) return 0.0;
    double cost = 0.0;
    for (double c : coeffs) {
        const double v = c * c / norm2;
        if (v > 0.0) cost -= v * std::log(v);
    }
    return cost;
}

WaveletPacketTree wavelet_packet_best_basis(std::span<const double> signal, const WaveletBasis& basis,
                                            int depth) {
    const WaveletPacketTable table = wavelet_packet_table(signal, basis, depth);

    // best[l][b]: minimal cost of any cover of node (l, b)'s subtree.
    std::vector<std::vector<double>> best(depth + 1);
    std::vector<std::vector<char>> keep(depth + 1);
    for (int l = depth; l >= 0; --l) {
        const std::size_t bands = table.nodes[l].size();
        best[l].resize(bands);
        keep[l].assign(bands, 1);
        for (std::size_t b = 0; b < bands; ++b) {
            const double own = shannon_cost(table.nodes[l][b], table.norm2);
            if (l == depth) {
                best[l][b] = own;
                continue;
            }
            const double split = best[l + 1][2 * b] + best[l + 1][2 * b + 1];
            // Ties keep the coarser node.
            if (split < own) {
                best[l][b] = split;
                keep[l][b] = 0;
            } else {
                best[l][b] = own;
            }
        }
    }

    WaveletPacketTree tree{basis, depth, signal.size(), {}, {}, best[0][0]};
    std::function<void(int, int)> collect = [&](int l, int b) {
        if (keep[l][b]) {
            tree.selected_nodes.push_back({l, b});
            tree.coefficients.push_back(table.nodes[l][b]);
            return;
        }
        collect(l + 1, 2 * b);
        collect(l + 1, 2 * b + 1);
    };
    collect(0, 0);
    return tree;
}

std::vector<double> wavelet_packet_reconstruct(const WaveletPacketTree& tree) {
    std::function<std::vector<double>(int, int)> build = [&](int l, int b) -> std::vector<double> {
        for (std::size_t i = 0; i < tree.selected_nodes.size(); ++i)
            if (tree.selected_nodes[i].level == l && tree.selected_nodes[i].band == b) return tree.coefficients[i];
        if (l >= tree.depth) throw std::invalid_argument("wavelet_packet_reconstruct: nodes do not cover the tree");
        const auto lo = build(l + 1, 2 * b);
        const auto hi = build(l + 1, 2 * b + 1);
        std::vector<double> out(2 * lo.size());
        synthesis_step(tree.basis, lo, hi, out);
        return out;
    };
    return build(0, 0);
}

bool is_disjoint_cover(const std::vector<PacketNode>& nodes) {
    // Work in units of the finest level present.
    int finest = 0;
    for (const auto& n : nodes) {
        if (n.level < 0 || n.band < 0 || n.band >= (1 << n.level)) return false;
        finest = std::max(finest, n.level);
    }
    std::vector<int> hits(std::size_t{1} << finest, 0);
    for (const auto& n : nodes) {
        const int width = 1 << (finest - n.level);
        for (int k = 0; k < width; ++k) ++hits[n.band * width + k];
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

}  // namespace wigneton
