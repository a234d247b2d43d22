#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "emir/geometry.hpp"

namespace emir {

enum class Direction { Horizontal, Vertical };

inline const char* direction_name(Direction d) {
    return d == Direction::Horizontal ? "horizontal" : "vertical";
}

// One metal layer of the power grid. Stripes of a horizontal layer run along
// x at y = die.y0 + offset + k*pitch (vertical layers swap axes). Offsets are
// relative to the die lower-left corner, so 0 <= offset < pitch always holds.
struct LayerSpec {
    int index = 0;                        // 1 = lowest, T = top
    Direction direction = Direction::Horizontal;
    double width = 0.0;                   // um
    double pitch = 0.0;                   // um
    double offset = 0.0;                  // um, from die lower-left
    double sheet_resistance = 0.0;        // ohm/square
    double thickness = 0.0;               // um
    double via_resistance_to_above = 0.0; // ohm per cut; ignored on top layer
    bool operator==(const LayerSpec&) const = default;
};

// C4 bump lattice: bumps at origin + (m*pitch, n*pitch), kept wherever they
// fall inside the die padded by one pitch on all sides. Bumps are ideal Vdd
// sources unless bump_resistance > 0.
struct C4Array {
    double pitch = 0.0;           // um, same in x and y
    Point origin;                 // lowest-left bump
    double vdd = 1.0;             // volts
    double bump_resistance = 0.0; // ohm in series per bump, 0 = direct pin
    bool operator==(const C4Array&) const = default;
};

struct CellInstance {
    std::string id;
    double x = 0.0; // lower-left, um
    double y = 0.0;
    double width = 0.0;
    double height = 0.0; // equals the standard row height
    double power = 0.0;  // watts
    double center_x() const { return x + width / 2.0; }
    double center_y() const { return y + height / 2.0; }
    BBox bbox() const { return {x, y, x + width, y + height}; }
    bool operator==(const CellInstance&) const = default;
};

// Coupling capacitance of signal routing, binned onto square tiles that cover
// the die exactly. values is row-major, bottom row first.
struct RoutingCapMap {
    double tile_size = 0.0; // um
    int nx = 0;
    int ny = 0;
    std::vector<double> values; // fF per tile
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
    bool operator==(const RoutingCapMap&) const = default;
};

struct DesignConfig {
    double analysis_window = 5.0;            // um
    double cover_window = 20.0;              // um (L), centered on the analysis window
    double unit_inverter_width = 1.0;        // um (W)
    double row_height = 2.0;                 // um (H)
    double ir_threshold_fraction = 0.10;     // violation when drop > fraction * vdd
    double em_current_density_limit = 1e-2;  // A/um^2, violation when |J| > limit
    bool operator==(const DesignConfig&) const = default;
};

struct Design {
    BBox die;
    std::vector<LayerSpec> layers; // sorted by index, 1..T
    C4Array c4;
    std::vector<CellInstance> cells;
    RoutingCapMap cap_map;
    DesignConfig config;
    bool operator==(const Design&) const = default;
};

// Validation violations are data, not errors.
struct DesignViolation {
    std::string code;
    std::string message;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline bool is_integer_multiple(double value, double unit, double tol = 1e-9) {
    if (unit <= 0.0) return false;
    double q = value / unit;
    return std::fabs(q - std::round(q)) <= tol;
}

} // namespace detail

inline std::vector<DesignViolation> validate_design(const Design& d) {
    using detail::fmt_num;
    std::vector<DesignViolation> out;
    auto add = [&](const char* code, std::string msg) { out.push_back({code, std::move(msg)}); };

    const DesignConfig& cfg = d.config;

    if (!(d.die.x1 > d.die.x0) || !(d.die.y1 > d.die.y0))
        add("DEGENERATE_DIE", "die bbox must be non-degenerate and axis-aligned");

    // config
    if (!(cfg.analysis_window > 0.0) || !(cfg.cover_window > cfg.analysis_window))
        add("COVER_WINDOW_SIZE",
            "cover window (" + fmt_num(cfg.cover_window) + ") must exceed the analysis window (" +
                fmt_num(cfg.analysis_window) + ")");
    if (!(cfg.unit_inverter_width > 0.0) || !(cfg.row_height > 0.0))
        add("NONPOSITIVE_CELL_UNITS", "unit inverter width and row height must be > 0");
    else {
        if (!detail::is_integer_multiple(cfg.cover_window, cfg.unit_inverter_width) ||
            !detail::is_integer_multiple(cfg.cover_window, cfg.row_height) ||
            cfg.cover_window < cfg.unit_inverter_width || cfg.cover_window < cfg.row_height)
            add("PD_GRID_NOT_INTEGRAL",
                "cover window / unit width and cover window / row height must be positive integers");
    }
    if (!(cfg.ir_threshold_fraction > 0.0 && cfg.ir_threshold_fraction < 1.0))
        add("THRESHOLD_RANGE",
            "ir_threshold_fraction must lie in (0,1), got " + fmt_num(cfg.ir_threshold_fraction));
    if (!(cfg.em_current_density_limit > 0.0))
        add("NONPOSITIVE_CURRENT_DENSITY_LIMIT", "em_current_density_limit must be > 0");

    // layers
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
        const LayerSpec& L = d.layers[i];
        std::string tag = "layer " + std::to_string(L.index);
        if (L.index != static_cast<int>(i) + 1)
            add("LAYER_INDEX_GAP",
                "layer indices must be contiguous 1..T in order; position " + std::to_string(i + 1) +
                    " holds index " + std::to_string(L.index));
        if (!(L.pitch > 0.0))
            add("NONPOSITIVE_PITCH", tag + ": pitch must be > 0");
        if (!(L.width > 0.0))
            add("NONPOSITIVE_WIDTH", tag + ": width must be > 0");
        else if (!(L.width < L.pitch))
            add("STRIPE_OVERLAP", tag + ": stripe width " + fmt_num(L.width) +
                                      " must be less than pitch " + fmt_num(L.pitch));
        if (!(L.offset >= 0.0 && L.offset < L.pitch))
            add("OFFSET_RANGE", tag + ": offset must satisfy 0 <= offset < pitch");
        if (i > 0 && d.layers[i - 1].direction == L.direction)
            add("DIRECTION_ALTERNATION",
                tag + ": adjacent layers must alternate direction, both are " +
                    direction_name(L.direction));
        if (!(L.sheet_resistance > 0.0))
            add("NONPOSITIVE_SHEET_RESISTANCE", tag + ": sheet resistance must be > 0");
        if (!(L.thickness > 0.0))
            add("NONPOSITIVE_THICKNESS", tag + ": thickness must be > 0");
        if (L.via_resistance_to_above < 0.0)
            add("NEGATIVE_VIA_RESISTANCE", tag + ": via resistance must be >= 0");
    }

    // c4
    if (!(d.c4.pitch > 0.0))
        add("NONPOSITIVE_BUMP_PITCH", "c4 pitch must be > 0");
    else if (d.c4.pitch < cfg.cover_window)
        add("NINE_BUMP_CONTAINMENT",
            "c4 pitch " + fmt_num(d.c4.pitch) + " must be >= cover window " +
                fmt_num(cfg.cover_window) + " so every cover window fits a 3x3 bump matrix");
    if (!(d.c4.vdd > 0.0))
        add("NONPOSITIVE_VDD", "supply voltage must be > 0");
    if (d.c4.bump_resistance < 0.0)
        add("NEGATIVE_BUMP_RESISTANCE", "bump series resistance must be >= 0");

    // cells
    std::map<double, std::vector<std::size_t>> rows; // y -> indices, for overlap check
    for (std::size_t i = 0; i < d.cells.size(); ++i) {
        const CellInstance& c = d.cells[i];
        std::string tag = "cell " + c.id;
        if (c.power < 0.0) add("NEGATIVE_POWER", tag + ": power must be >= 0");
        if (!(c.width > 0.0) || !(c.height > 0.0))
            add("DEGENERATE_CELL", tag + ": width and height must be > 0");
        if (c.x < d.die.x0 || c.y < d.die.y0 || c.x + c.width > d.die.x1 ||
            c.y + c.height > d.die.y1)
            add("CELL_OUTSIDE_DIE", tag + ": cell extends outside the die");
        if (cfg.row_height > 0.0) {
            if (std::fabs(c.height - cfg.row_height) > 1e-9)
                add("CELL_OFF_ROW", tag + ": height " + fmt_num(c.height) +
                                        " must equal the row height " + fmt_num(cfg.row_height));
            if (!detail::is_integer_multiple(c.y - d.die.y0, cfg.row_height))
                add("CELL_OFF_ROW", tag + ": y must be an integer multiple of the row height");
        }
        rows[c.y].push_back(i);
    }
    for (auto& [y, idx] : rows) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return d.cells[a].x < d.cells[b].x;
        });
        for (std::size_t k = 1; k < idx.size(); ++k) {
            const CellInstance& prev = d.cells[idx[k - 1]];
            const CellInstance& cur = d.cells[idx[k]];
            if (prev.x + prev.width > cur.x + 1e-12)
                add("CELL_OVERLAP", "cells " + prev.id + " and " + cur.id + " overlap on row y=" +
                                        fmt_num(y));
        }
    }

    // cap map
    {
        const RoutingCapMap& m = d.cap_map;
        if (!(m.tile_size > 0.0) || m.nx <= 0 || m.ny <= 0 ||
            m.values.size() != static_cast<std::size_t>(m.nx) * static_cast<std::size_t>(m.ny))
            add("CAP_MAP_COVERAGE", "cap map must have tile_size > 0 and nx*ny values");
        else {
            if (std::fabs(m.nx * m.tile_size - d.die.width()) > 1e-9 ||
                std::fabs(m.ny * m.tile_size - d.die.height()) > 1e-9)
                add("CAP_MAP_COVERAGE", "cap map tiles must cover the die exactly");
        }
        for (double v : m.values)
            if (v < 0.0) {
                add("NEGATIVE_CAPACITANCE", "cap map values must be >= 0");
                break;
            }
    }

    return out;
}

inline bool has_violation(const std::vector<DesignViolation>& v, const std::string& code) {
    for (const auto& x : v)
        if (x.code == code) return true;
    return false;
}

} // namespace emir
