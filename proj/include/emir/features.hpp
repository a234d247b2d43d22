#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emir/design.hpp"
#include "emir/errors.hpp"
#include "emir/windows.hpp"

namespace emir {

struct FeatureVector {
    std::vector<double> values;
};

// Vector layout per window class:
//   continuous:    [w_1,p_1,o_1, ..., w_T,p_T,o_T,
//                    pd(1,1)..pd(L/W, L/H)  (x-major, y-minor, from the cover
//                                            window lower-left),
//                    c,
//                    X_1,Y_1 .. X_9,Y_9     (bump displacement from the cover
//                                            center, 3x3 matrix row-major,
//                                            bottom row first)]
//   discontinuous: [X_a,Y_a,X_b,Y_b] prepended — the die corners relative to
//                   the analysis-window lower-left.
inline std::size_t feature_length(const DesignConfig& cfg, std::size_t num_layers,
                                  WindowClass window_class) {
    std::size_t nw = static_cast<std::size_t>(std::llround(cfg.cover_window / cfg.unit_inverter_width));
    std::size_t nh = static_cast<std::size_t>(std::llround(cfg.cover_window / cfg.row_height));
    std::size_t base = 3 * num_layers + nw * nh + 1 + 18;
    return is_discontinuous(window_class) ? base + 4 : base;
}

// Precomputed acceleration and lattice data shared by all windows of one
// design. Build once, extract many.
class DesignIndex {
public:
    explicit DesignIndex(const Design& design) : design_(&design) {
        bucket_ = design.config.cover_window;
        nbx_ = std::max(1, static_cast<int>(std::ceil(design.die.width() / bucket_)));
        nby_ = std::max(1, static_cast<int>(std::ceil(design.die.height() / bucket_)));
        buckets_.resize(static_cast<std::size_t>(nbx_) * nby_);
        for (std::size_t i = 0; i < design.cells.size(); ++i) {
            const CellInstance& c = design.cells[i];
            int bx0 = clamp_x(static_cast<int>((c.x - design.die.x0) / bucket_));
            int bx1 = clamp_x(static_cast<int>((c.x + c.width - design.die.x0) / bucket_));
            int by0 = clamp_y(static_cast<int>((c.y - design.die.y0) / bucket_));
            int by1 = clamp_y(static_cast<int>((c.y + c.height - design.die.y0) / bucket_));
            for (int by = by0; by <= by1; ++by)
                for (int bx = bx0; bx <= bx1; ++bx)
                    buckets_[static_cast<std::size_t>(by) * nbx_ + bx].push_back(
                        static_cast<int>(i));
        }
    }

    const Design& design() const { return *design_; }

    // indices of cells possibly intersecting `box`
    void cells_overlapping(const BBox& box, std::vector<int>& out) const {
        out.clear();
        const Design& d = *design_;
        int bx0 = clamp_x(static_cast<int>(std::floor((box.x0 - d.die.x0) / bucket_)));
        int bx1 = clamp_x(static_cast<int>(std::floor((box.x1 - d.die.x0) / bucket_)));
        int by0 = clamp_y(static_cast<int>(std::floor((box.y0 - d.die.y0) / bucket_)));
        int by1 = clamp_y(static_cast<int>(std::floor((box.y1 - d.die.y0) / bucket_)));
        for (int by = by0; by <= by1; ++by)
            for (int bx = bx0; bx <= bx1; ++bx)
                for (int i : buckets_[static_cast<std::size_t>(by) * nbx_ + bx])
                    if (out.empty() || out.back() != i) out.push_back(i);
        // a cell can sit in several visited buckets; dedupe
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

private:
    int clamp_x(int v) const { return std::min(std::max(v, 0), nbx_ - 1); }
    int clamp_y(int v) const { return std::min(std::max(v, 0), nby_ - 1); }

    const Design* design_;
    double bucket_ = 0.0;
    int nbx_ = 0, nby_ = 0;
    std::vector<std::vector<int>> buckets_;
};

inline FeatureVector extract_features(const Design& design, const AnalysisWindow& win,
                                      const DesignIndex& index) {
    const DesignConfig& cfg = design.config;
    FeatureVector fv;
    fv.values.reserve(feature_length(cfg, design.layers.size(), win.window_class));

    if (is_discontinuous(win.window_class)) {
        fv.values.push_back(design.die.x0 - win.bbox.x0);
        fv.values.push_back(design.die.y0 - win.bbox.y0);
        fv.values.push_back(design.die.x1 - win.bbox.x0);
        fv.values.push_back(design.die.y1 - win.bbox.y0);
    }

    for (const LayerSpec& L : design.layers) {
        fv.values.push_back(L.width);
        fv.values.push_back(L.pitch);
        fv.values.push_back(L.offset);
    }

    // power density over the cover window, sub-windows of W x H
    {
        const double W = cfg.unit_inverter_width;
        const double H = cfg.row_height;
        const int nw = static_cast<int>(std::llround(cfg.cover_window / W));
        const int nh = static_cast<int>(std::llround(cfg.cover_window / H));
        std::vector<double> pd(static_cast<std::size_t>(nw) * nh, 0.0);
        std::vector<int> cells;
        index.cells_overlapping(win.cover, cells);
        for (int ci : cells) {
            const CellInstance& c = design.cells[ci];
            double cell_area = c.width * c.height;
            if (cell_area <= 0.0 || c.power == 0.0) continue;
            int i0 = std::max(0, static_cast<int>(std::floor((c.x - win.cover.x0) / W)));
            int i1 = std::min(nw - 1,
                              static_cast<int>(std::floor((c.x + c.width - win.cover.x0) / W)));
            int j0 = std::max(0, static_cast<int>(std::floor((c.y - win.cover.y0) / H)));
            int j1 = std::min(nh - 1,
                              static_cast<int>(std::floor((c.y + c.height - win.cover.y0) / H)));
            for (int i = i0; i <= i1; ++i) {
                for (int j = j0; j <= j1; ++j) {
                    BBox sub{win.cover.x0 + i * W, win.cover.y0 + j * H,
                             win.cover.x0 + (i + 1) * W, win.cover.y0 + (j + 1) * H};
                    double ov = overlap_area(sub, c.bbox());
                    if (ov <= 0.0) continue;
                    pd[static_cast<std::size_t>(i) * nh + j] +=
                        c.power * (ov / cell_area) / (W * H);
                }
            }
        }
        fv.values.insert(fv.values.end(), pd.begin(), pd.end());
    }

    // total coupling capacitance over the analysis window (area-weighted)
    {
        const RoutingCapMap& m = design.cap_map;
        double c_sum = 0.0;
        if (m.tile_size > 0.0 && m.nx > 0 && m.ny > 0) {
            int ix0 = std::max(0, static_cast<int>(std::floor((win.bbox.x0 - design.die.x0) / m.tile_size)));
            int ix1 = std::min(m.nx - 1, static_cast<int>(std::floor((win.bbox.x1 - design.die.x0) / m.tile_size)));
            int iy0 = std::max(0, static_cast<int>(std::floor((win.bbox.y0 - design.die.y0) / m.tile_size)));
            int iy1 = std::min(m.ny - 1, static_cast<int>(std::floor((win.bbox.y1 - design.die.y0) / m.tile_size)));
            double tile_area = m.tile_size * m.tile_size;
            for (int iy = iy0; iy <= iy1; ++iy) {
                for (int ix = ix0; ix <= ix1; ++ix) {
                    BBox tile{design.die.x0 + ix * m.tile_size, design.die.y0 + iy * m.tile_size,
                              design.die.x0 + (ix + 1) * m.tile_size,
                              design.die.y0 + (iy + 1) * m.tile_size};
                    double ov = overlap_area(tile, win.bbox);
                    if (ov > 0.0) c_sum += m.at(ix, iy) * (ov / tile_area);
                }
            }
        }
        fv.values.push_back(c_sum);
    }

    // displacements to the nine bumps of the enclosing 3x3 matrix
    {
        const C4Array& c4 = design.c4;
        const double P = c4.pitch;
        const double cx = (win.cover.x0 + win.cover.x1) / 2.0;
        const double cy = (win.cover.y0 + win.cover.y1) / 2.0;
        // nearest lattice index, ties round up
        auto nearest = [&](double v, double origin) {
            return std::floor((v - origin) / P + 0.5);
        };
        const double mx = nearest(cx, c4.origin.x);
        const double my = nearest(cy, c4.origin.y);
        const double eps = 1e-9;
        for (int dn = -1; dn <= 1; ++dn) {
            for (int dm = -1; dm <= 1; ++dm) {
                double bx = c4.origin.x + (mx + dm) * P;
                double by = c4.origin.y + (my + dn) * P;
                if (bx < design.die.x0 - P - eps || bx > design.die.x1 + P + eps ||
                    by < design.die.y0 - P - eps || by > design.die.y1 + P + eps)
                    throw Error(ErrorCode::MissingBumpMatrix,
                                "window (" + std::to_string(win.row) + "," +
                                    std::to_string(win.col) +
                                    "): 3x3 bump matrix extends beyond the padded bump array");
                fv.values.push_back(bx - cx);
                fv.values.push_back(by - cy);
            }
        }
    }

    return fv;
}

} // namespace emir
