#pragma once

#include <algorithm>

namespace emir {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

// Axis-aligned box, x0 <= x1 and y0 <= y1 for well-formed boxes.
struct BBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }

    bool contains(const BBox& inner) const {
        return inner.x0 >= x0 && inner.x1 <= x1 && inner.y0 >= y0 && inner.y1 <= y1;
    }
    // Half-open membership [x0,x1) x [y0,y1); shared edges belong to one box.
    bool contains_half_open(double px, double py) const {
        return px >= x0 && px < x1 && py >= y0 && py < y1;
    }
    bool operator==(const BBox&) const = default;
};

inline double overlap_1d(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double overlap_area(const BBox& a, const BBox& b) {
    return overlap_1d(a.x0, a.x1, b.x0, b.x1) * overlap_1d(a.y0, a.y1, b.y0, b.y1);
}

} // namespace emir
