#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "emir/design.hpp"
#include "emir/errors.hpp"

namespace emir {

enum class BranchKind { Wire, Via };

// Node coordinates are quantized to 1e-6 um for identity, so coincident
// crossings computed through different arithmetic always fuse.
inline constexpr double kNodeQuantum = 1e-6;

struct GridNode {
    int layer = 0; // 1..T; 0 marks a bump terminal (series-resistance mode)
    double x = 0.0;
    double y = 0.0;
};

struct GridBranch {
    int a = -1;
    int b = -1;
    double resistance = 0.0; // ohm, always > 0
    BranchKind kind = BranchKind::Wire;
    int layer = 0;                    // wire: its layer; via: lower layer of the pair
    double cross_section_area = 0.0;  // wire: width * thickness (um^2); via/bump: 0
};

struct GridGraph {
    std::vector<GridNode> nodes;
    std::vector<GridBranch> branches;
    std::vector<int> dirichlet_nodes; // pinned to vdd, sorted unique
    std::vector<int> cell_attachment; // node index per design cell
    double vdd = 1.0;
};

// Stripe centerline positions along the axis perpendicular to the stripes,
// offsets anchored at the die lower-left corner.
inline std::vector<double> stripe_positions(const BBox& die, const LayerSpec& L) {
    double lo = (L.direction == Direction::Horizontal) ? die.y0 : die.x0;
    double hi = (L.direction == Direction::Horizontal) ? die.y1 : die.x1;
    std::vector<double> out;
    if (!(L.pitch > 0.0)) return out;
    for (int k = 0;; ++k) {
        double p = lo + L.offset + k * L.pitch;
        if (p > hi + 1e-9) break;
        out.push_back(p);
    }
    return out;
}

namespace detail {

inline std::int64_t quantize(double v) {
    return static_cast<std::int64_t>(std::llround(v / kNodeQuantum));
}

struct GridBuilder {
    GridGraph g;
    std::map<std::tuple<int, std::int64_t, std::int64_t>, int> key2id;

    int get_or_create(int layer, double x, double y) {
        auto key = std::make_tuple(layer, quantize(x), quantize(y));
        auto it = key2id.find(key);
        if (it != key2id.end()) return it->second;
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back({layer, quantize(x) * kNodeQuantum, quantize(y) * kNodeQuantum});
        key2id.emplace(key, id);
        return id;
    }

    // 0-ohm via: the upper-layer key shares the lower node (weld)
    void alias(int layer, double x, double y, int id) {
        key2id.emplace(std::make_tuple(layer, quantize(x), quantize(y)), id);
    }

    int find(int layer, double x, double y) const {
        auto it = key2id.find(std::make_tuple(layer, quantize(x), quantize(y)));
        return it == key2id.end() ? -1 : it->second;
    }
};

// nearest node among `candidates` to (px, py); ties prefer lowest x then lowest y
inline int nearest_node(const std::vector<GridNode>& nodes, const std::vector<int>& candidates,
                        double px, double py) {
    int best = -1;
    double best_d = 0.0;
    for (int id : candidates) {
        double dx = nodes[id].x - px;
        double dy = nodes[id].y - py;
        double dsq = dx * dx + dy * dy;
        if (best < 0 || dsq < best_d ||
            (dsq == best_d && (nodes[id].x < nodes[best].x ||
                               (nodes[id].x == nodes[best].x && nodes[id].y < nodes[best].y)))) {
            best = id;
            best_d = dsq;
        }
    }
    return best;
}

} // namespace detail

// Materializes the resistor network: nodes at adjacent-layer stripe
// crossings, via branches between the paired nodes, wire branches between
// consecutive crossings along each stripe, cells attached to the nearest
// layer-1 node and bumps pinning the nearest top-layer node.
inline GridGraph build_grid(const Design& design) {
    const int T = static_cast<int>(design.layers.size());
    detail::GridBuilder b;
    b.g.vdd = design.c4.vdd;

    std::vector<std::vector<double>> pos(T);
    for (int i = 0; i < T; ++i) pos[i] = stripe_positions(design.die, design.layers[i]);

    // crossing nodes + vias, pair by pair bottom-up
    for (int i = 0; i + 1 < T; ++i) {
        const LayerSpec& lo = design.layers[i];
        const bool lo_horizontal = lo.direction == Direction::Horizontal;
        const std::vector<double>& ys = lo_horizontal ? pos[i] : pos[i + 1];
        const std::vector<double>& xs = lo_horizontal ? pos[i + 1] : pos[i];
        const double via_r = lo.via_resistance_to_above;
        for (double y : ys) {
            for (double x : xs) {
                int a = b.get_or_create(i + 1, x, y);
                if (via_r == 0.0) {
                    if (b.find(i + 2, x, y) < 0) b.alias(i + 2, x, y, a);
                } else {
                    int up = b.get_or_create(i + 2, x, y);
                    b.g.branches.push_back({a, up, via_r, BranchKind::Via, i + 1, 0.0});
                }
            }
        }
    }

    // wire branches between consecutive crossings along each stripe
    for (int i = 0; i < T; ++i) {
        const LayerSpec& L = design.layers[i];
        const bool horizontal = L.direction == Direction::Horizontal;
        std::vector<double> stations;
        if (i > 0) stations.insert(stations.end(), pos[i - 1].begin(), pos[i - 1].end());
        if (i + 1 < T) stations.insert(stations.end(), pos[i + 1].begin(), pos[i + 1].end());
        std::sort(stations.begin(), stations.end());
        stations.erase(std::unique(stations.begin(), stations.end(),
                                   [](double a2, double b2) {
                                       return detail::quantize(a2) == detail::quantize(b2);
                                   }),
                       stations.end());
        if (stations.size() < 2) continue;
        const double area = L.width * L.thickness;
        for (double q : pos[i]) {
            for (std::size_t s = 1; s < stations.size(); ++s) {
                double c0 = stations[s - 1];
                double c1 = stations[s];
                int a = horizontal ? b.get_or_create(i + 1, c0, q) : b.get_or_create(i + 1, q, c0);
                int c = horizontal ? b.get_or_create(i + 1, c1, q) : b.get_or_create(i + 1, q, c1);
                if (a == c) continue;
                double len = c1 - c0;
                double r = L.sheet_resistance * len / L.width;
                b.g.branches.push_back({a, c, r, BranchKind::Wire, i + 1, area});
            }
        }
    }

    // collect per-layer node lists for attachment searches
    std::vector<int> layer1_nodes, top_nodes;
    for (int id = 0; id < static_cast<int>(b.g.nodes.size()); ++id) {
        if (b.g.nodes[id].layer == 1) layer1_nodes.push_back(id);
    }
    for (int id = 0; id < static_cast<int>(b.g.nodes.size()); ++id) {
        if (b.find(T, b.g.nodes[id].x, b.g.nodes[id].y) == id) top_nodes.push_back(id);
    }

    // cells -> nearest layer-1 node
    for (const CellInstance& c : design.cells) {
        int n = detail::nearest_node(b.g.nodes, layer1_nodes, c.center_x(), c.center_y());
        if (n < 0)
            throw Error(ErrorCode::FloatingNetwork,
                        "cell " + c.id + " has no layer-1 node to attach to");
        b.g.cell_attachment.push_back(n);
    }

    // bumps within the die padded by one pitch -> nearest top-layer node
    {
        const C4Array& c4 = design.c4;
        const double P = c4.pitch;
        const double eps = 1e-9;
        auto lattice_range = [&](double origin, double lo, double hi) {
            std::int64_t m0 = static_cast<std::int64_t>(std::ceil((lo - P - origin) / P - eps));
            std::int64_t m1 = static_cast<std::int64_t>(std::floor((hi + P - origin) / P + eps));
            return std::pair<std::int64_t, std::int64_t>{m0, m1};
        };
        auto [mx0, mx1] = lattice_range(c4.origin.x, design.die.x0, design.die.x1);
        auto [my0, my1] = lattice_range(c4.origin.y, design.die.y0, design.die.y1);
        std::vector<int> pinned;
        for (std::int64_t n = my0; n <= my1; ++n) {
            for (std::int64_t m = mx0; m <= mx1; ++m) {
                double bx = c4.origin.x + static_cast<double>(m) * P;
                double by = c4.origin.y + static_cast<double>(n) * P;
                int at = detail::nearest_node(b.g.nodes, top_nodes, bx, by);
                if (at < 0) continue;
                if (c4.bump_resistance > 0.0) {
                    int src = b.get_or_create(0, bx, by);
                    b.g.branches.push_back(
                        {src, at, c4.bump_resistance, BranchKind::Via, 0, 0.0});
                    pinned.push_back(src);
                } else {
                    pinned.push_back(at);
                }
            }
        }
        std::sort(pinned.begin(), pinned.end());
        pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());
        b.g.dirichlet_nodes = std::move(pinned);
    }

    // every load must reach a pinned node
    {
        std::vector<std::vector<int>> adj(b.g.nodes.size());
        for (const GridBranch& br : b.g.branches) {
            adj[br.a].push_back(br.b);
            adj[br.b].push_back(br.a);
        }
        std::vector<char> seen(b.g.nodes.size(), 0);
        std::vector<int> stack = b.g.dirichlet_nodes;
        for (int s : stack) seen[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        for (std::size_t ci = 0; ci < b.g.cell_attachment.size(); ++ci) {
            if (!seen[b.g.cell_attachment[ci]])
                throw Error(ErrorCode::FloatingNetwork,
                            "cell " + design.cells[ci].id + " has no path to a supply bump");
        }
    }

    return b.g;
}

} // namespace emir
