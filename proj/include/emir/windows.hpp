#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emir/design.hpp"

namespace emir {

enum class WindowClass { Continuous, Boundary, Corner };

inline const char* window_class_name(WindowClass c) {
    switch (c) {
        case WindowClass::Continuous: return "continuous";
        case WindowClass::Boundary: return "boundary";
        case WindowClass::Corner: return "corner";
    }
    return "?";
}

inline bool is_discontinuous(WindowClass c) { return c != WindowClass::Continuous; }

struct AnalysisWindow {
    int row = 0; // along y
    int col = 0; // along x
    BBox bbox;   // analysis tile, half-open
    BBox cover;  // cover window, centered on bbox
    WindowClass window_class = WindowClass::Continuous;
};

struct WindowGrid {
    int rows = 0;
    int cols = 0;
    std::vector<AnalysisWindow> windows; // row-major, bottom row first
};

// Non-overlapping analysis tiles covering the die. Dies whose side is not a
// multiple of the window size get clipped last-row/col tiles, always classed
// discontinuous. Class is decided by how many die edges the cover window
// crosses (0 continuous, 1 boundary, >=2 corner); touching an edge does not
// count as crossing.
inline WindowGrid tile_windows(const Design& design) {
    const double a = design.config.analysis_window;
    const double L = design.config.cover_window;
    WindowGrid out;
    out.cols = static_cast<int>(std::ceil((design.die.width() - 1e-9) / a));
    out.rows = static_cast<int>(std::ceil((design.die.height() - 1e-9) / a));
    out.windows.reserve(static_cast<std::size_t>(out.rows) * out.cols);
    for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
            AnalysisWindow w;
            w.row = r;
            w.col = c;
            w.bbox.x0 = design.die.x0 + c * a;
            w.bbox.y0 = design.die.y0 + r * a;
            w.bbox.x1 = std::min(design.die.x0 + (c + 1) * a, design.die.x1);
            w.bbox.y1 = std::min(design.die.y0 + (r + 1) * a, design.die.y1);
            bool clipped = (w.bbox.x1 - w.bbox.x0 < a) || (w.bbox.y1 - w.bbox.y0 < a);
            double cx = (w.bbox.x0 + w.bbox.x1) / 2.0;
            double cy = (w.bbox.y0 + w.bbox.y1) / 2.0;
            w.cover = {cx - L / 2.0, cy - L / 2.0, cx + L / 2.0, cy + L / 2.0};
            int crossings = (w.cover.x0 < design.die.x0) + (w.cover.x1 > design.die.x1) +
                            (w.cover.y0 < design.die.y0) + (w.cover.y1 > design.die.y1);
            if (crossings >= 2)
                w.window_class = WindowClass::Corner;
            else if (crossings == 1 || clipped)
                w.window_class = WindowClass::Boundary;
            else
                w.window_class = WindowClass::Continuous;
            out.windows.push_back(w);
        }
    }
    return out;
}

// Window owning a point under the half-open rule; points on the die's max
// edges clamp into the last row/col so every in-die point has exactly one
// owner.
inline std::pair<int, int> locate_window(const WindowGrid& grid, const Design& design, double x,
                                         double y) {
    const double a = design.config.analysis_window;
    int c = static_cast<int>(std::floor((x - design.die.x0) / a));
    int r = static_cast<int>(std::floor((y - design.die.y0) / a));
    c = std::min(std::max(c, 0), grid.cols - 1);
    r = std::min(std::max(r, 0), grid.rows - 1);
    return {r, c};
}

} // namespace emir
