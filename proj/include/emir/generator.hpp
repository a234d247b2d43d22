#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "emir/design.hpp"
#include "emir/design_io.hpp"
#include "emir/errors.hpp"
#include "emir/rng.hpp"

namespace emir {

// All generated geometry snaps to this grid. Coordinates that are exact
// multiples of 1/16 um stay exact under IEEE addition of lattice-aligned
// shifts, which keeps window features bit-stable under die translation.
inline constexpr double kCoordGrid = 0.0625;

inline double snap_coord(double v) { return std::round(v / kCoordGrid) * kCoordGrid; }

struct GeneratorLayer {
    Direction direction = Direction::Horizontal;
    double width = 0.0;
    double pitch = 0.0;
    double offset = 0.0;
    double sheet_resistance = 0.0;
    double thickness = 0.0;
    double via_resistance_to_above = 0.0;
    bool operator==(const GeneratorLayer&) const = default;
};

struct GeneratorConfig {
    double die_width = 200.0;
    double die_height = 200.0;
    int num_layers = 4;
    std::vector<GeneratorLayer> layers; // optional; empty = per-layer defaults below
    double c4_pitch = 40.0;
    double vdd = 1.0;
    double bump_resistance = 0.0;
    double utilization = 0.6;
    int max_cell_width_units = 4;       // cell widths are 1..N unit inverter widths
    double base_power_density = 2.5e-6; // W/um^2 of placed cell area
    int hot_clusters = 3;
    double hot_cold_ratio = 8.0;        // peak multiplier on cell power inside a cluster
    double cluster_sigma_min = 9.0;     // um
    double cluster_sigma_max = 16.0;
    double cluster_margin = 30.0;       // keep cluster centers this far from die edges
    double cap_tile_size = 5.0;
    double cap_base = 50.0;             // fF per tile before jitter
    double cap_jitter = 0.5;            // uniform +- fraction
    double cap_cluster_gain = 0.3;      // caps scale mildly with the power multiplier
    DesignConfig design; // analysis/cover window, W, H, thresholds
    bool operator==(const GeneratorConfig&) const = default;
};

inline std::vector<GeneratorLayer> default_layer_stack(int num_layers) {
    std::vector<GeneratorLayer> out;
    double pitch = 2.0;
    for (int i = 1; i <= num_layers; ++i) {
        GeneratorLayer L;
        L.direction = (i % 2 == 1) ? Direction::Horizontal : Direction::Vertical;
        L.pitch = pitch;
        L.width = 0.25 * pitch;
        L.offset = 0.0;
        L.sheet_resistance = 0.05 / i; // upper layers are thicker metal
        L.thickness = 0.1 * i;
        L.via_resistance_to_above = 1.0;
        out.push_back(L);
        pitch *= 2.0;
    }
    return out;
}

inline Json generator_config_to_json(const GeneratorConfig& g) {
    Json j;
    Json gen;
    gen["die_width"] = g.die_width;
    gen["die_height"] = g.die_height;
    gen["num_layers"] = g.num_layers;
    if (!g.layers.empty()) {
        gen["layers"] = Json::array();
        for (const GeneratorLayer& L : g.layers)
            gen["layers"].push_back({{"direction", direction_name(L.direction)},
                                     {"width", L.width},
                                     {"pitch", L.pitch},
                                     {"offset", L.offset},
                                     {"sheet_resistance", L.sheet_resistance},
                                     {"thickness", L.thickness},
                                     {"via_resistance_to_above", L.via_resistance_to_above}});
    }
    gen["c4_pitch"] = g.c4_pitch;
    gen["vdd"] = g.vdd;
    gen["bump_resistance"] = g.bump_resistance;
    gen["utilization"] = g.utilization;
    gen["max_cell_width_units"] = g.max_cell_width_units;
    gen["base_power_density"] = g.base_power_density;
    gen["hot_clusters"] = g.hot_clusters;
    gen["hot_cold_ratio"] = g.hot_cold_ratio;
    gen["cluster_sigma_min"] = g.cluster_sigma_min;
    gen["cluster_sigma_max"] = g.cluster_sigma_max;
    gen["cluster_margin"] = g.cluster_margin;
    gen["cap_tile_size"] = g.cap_tile_size;
    gen["cap_base"] = g.cap_base;
    gen["cap_jitter"] = g.cap_jitter;
    gen["cap_cluster_gain"] = g.cap_cluster_gain;
    gen["analysis_window"] = g.design.analysis_window;
    gen["cover_window"] = g.design.cover_window;
    gen["unit_inverter_width"] = g.design.unit_inverter_width;
    gen["row_height"] = g.design.row_height;
    gen["ir_threshold_fraction"] = g.design.ir_threshold_fraction;
    gen["em_current_density_limit"] = g.design.em_current_density_limit;
    j["generator"] = std::move(gen);
    return j;
}

inline std::string serialize_generator_config(const GeneratorConfig& g) {
    return generator_config_to_json(g).dump(2) + "\n";
}

inline GeneratorConfig generator_config_from_json(const Json& top) {
    using namespace jsonio;
    if (!top.is_object())
        throw Error(ErrorCode::ParseError, "generator config: top level must be an object");
    reject_unknown(top, {"generator"}, "generator config");
    const Json& j = field(top, "generator", "generator config");
    reject_unknown(j,
                   {"die_width", "die_height", "num_layers", "layers", "c4_pitch", "vdd",
                    "bump_resistance", "utilization", "max_cell_width_units",
                    "base_power_density", "hot_clusters", "hot_cold_ratio", "cluster_sigma_min",
                    "cluster_sigma_max", "cluster_margin", "cap_tile_size", "cap_base",
                    "cap_jitter", "cap_cluster_gain", "analysis_window", "cover_window",
                    "unit_inverter_width", "row_height", "ir_threshold_fraction",
                    "em_current_density_limit"},
                   "generator");

    GeneratorConfig g;
    auto opt_num = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = num(j, key, "generator");
    };
    auto opt_int = [&](const char* key, int& dst) {
        if (j.contains(key)) dst = integer(j, key, "generator");
    };
    opt_num("die_width", g.die_width);
    opt_num("die_height", g.die_height);
    opt_int("num_layers", g.num_layers);
    opt_num("c4_pitch", g.c4_pitch);
    opt_num("vdd", g.vdd);
    opt_num("bump_resistance", g.bump_resistance);
    opt_num("utilization", g.utilization);
    opt_int("max_cell_width_units", g.max_cell_width_units);
    opt_num("base_power_density", g.base_power_density);
    opt_int("hot_clusters", g.hot_clusters);
    opt_num("hot_cold_ratio", g.hot_cold_ratio);
    opt_num("cluster_sigma_min", g.cluster_sigma_min);
    opt_num("cluster_sigma_max", g.cluster_sigma_max);
    opt_num("cluster_margin", g.cluster_margin);
    opt_num("cap_tile_size", g.cap_tile_size);
    opt_num("cap_base", g.cap_base);
    opt_num("cap_jitter", g.cap_jitter);
    opt_num("cap_cluster_gain", g.cap_cluster_gain);
    opt_num("analysis_window", g.design.analysis_window);
    opt_num("cover_window", g.design.cover_window);
    opt_num("unit_inverter_width", g.design.unit_inverter_width);
    opt_num("row_height", g.design.row_height);
    opt_num("ir_threshold_fraction", g.design.ir_threshold_fraction);
    opt_num("em_current_density_limit", g.design.em_current_density_limit);
    if (j.contains("layers")) {
        const Json& layers = j["layers"];
        if (!layers.is_array())
            throw Error(ErrorCode::ParseError, "generator: field 'layers' must be an array");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            std::string where = "generator.layers[" + std::to_string(i) + "]";
            const Json& L = layers[i];
            reject_unknown(L,
                           {"direction", "width", "pitch", "offset", "sheet_resistance",
                            "thickness", "via_resistance_to_above"},
                           where);
            GeneratorLayer s;
            std::string dir = str(L, "direction", where);
            if (dir == "horizontal") s.direction = Direction::Horizontal;
            else if (dir == "vertical") s.direction = Direction::Vertical;
            else
                throw Error(ErrorCode::ParseError,
                            where + ": direction must be 'horizontal' or 'vertical'");
            s.width = num(L, "width", where);
            s.pitch = num(L, "pitch", where);
            s.offset = num(L, "offset", where);
            s.sheet_resistance = num(L, "sheet_resistance", where);
            s.thickness = num(L, "thickness", where);
            s.via_resistance_to_above = num(L, "via_resistance_to_above", where);
            g.layers.push_back(s);
        }
    }

    if (g.num_layers < 2)
        throw Error(ErrorCode::ParseError, "generator: num_layers must be >= 2");
    if (!g.layers.empty() && static_cast<int>(g.layers.size()) != g.num_layers)
        throw Error(ErrorCode::ParseError, "generator: layers list must have num_layers entries");
    if (g.max_cell_width_units < 1)
        throw Error(ErrorCode::ParseError, "generator: max_cell_width_units must be >= 1");
    if (g.hot_clusters < 0)
        throw Error(ErrorCode::ParseError, "generator: hot_clusters must be >= 0");
    if (!(g.hot_cold_ratio > 0.0))
        throw Error(ErrorCode::ParseError, "generator: hot_cold_ratio must be > 0");
    if (!(g.base_power_density >= 0.0))
        throw Error(ErrorCode::ParseError, "generator: base_power_density must be >= 0");
    if (!(g.cap_jitter >= 0.0 && g.cap_jitter < 1.0))
        throw Error(ErrorCode::ParseError, "generator: cap_jitter must lie in [0,1)");
    if (!(g.cap_tile_size > 0.0) ||
        !detail::is_integer_multiple(g.die_width, g.cap_tile_size) ||
        !detail::is_integer_multiple(g.die_height, g.cap_tile_size))
        throw Error(ErrorCode::ParseError,
                    "generator: die dimensions must be integer multiples of cap_tile_size");
    return g;
}

inline GeneratorConfig parse_generator_config(const std::string& text) {
    return generator_config_from_json(jsonio::parse_text(text, "generator config"));
}

namespace detail {

struct PowerCluster {
    double x = 0.0;
    double y = 0.0;
    double sigma = 1.0;
};

inline double cluster_multiplier(double x, double y, double ratio,
                                 const std::vector<PowerCluster>& clusters) {
    if (clusters.empty() || ratio == 1.0) return 1.0;
    double s = 0.0;
    for (const PowerCluster& c : clusters) {
        double dx = x - c.x;
        double dy = y - c.y;
        s += std::exp(-(dx * dx + dy * dy) / (2.0 * c.sigma * c.sigma));
    }
    return 1.0 + (ratio - 1.0) * s;
}

} // namespace detail

// Deterministic function of (config, seed). Cell power is the flat baseline
// (area * base_power_density) scaled by Gaussian hot clusters; cap tiles get
// seeded jitter plus a mild cluster term so capacitance stays only weakly
// informative of the labels.
inline Design generate_design(const GeneratorConfig& g, std::uint64_t seed) {
    Design d;
    d.config = g.design;
    d.die = {0.0, 0.0, snap_coord(g.die_width), snap_coord(g.die_height)};

    const std::vector<GeneratorLayer> stack =
        g.layers.empty() ? default_layer_stack(g.num_layers) : g.layers;
    for (int i = 0; i < g.num_layers; ++i) {
        const GeneratorLayer& L = stack[i];
        LayerSpec s;
        s.index = i + 1;
        s.direction = L.direction;
        s.width = L.width;
        s.pitch = snap_coord(L.pitch);
        s.offset = snap_coord(L.offset);
        s.sheet_resistance = L.sheet_resistance;
        s.thickness = L.thickness;
        s.via_resistance_to_above = L.via_resistance_to_above;
        d.layers.push_back(s);
    }

    d.c4.pitch = snap_coord(g.c4_pitch);
    d.c4.origin = {d.die.x0, d.die.y0};
    d.c4.vdd = g.vdd;
    d.c4.bump_resistance = g.bump_resistance;

    // hot clusters
    std::vector<detail::PowerCluster> clusters;
    {
        Rng rng(mix_seed(seed, "clusters"));
        double mx = std::min(g.cluster_margin, d.die.width() / 2.0);
        double my = std::min(g.cluster_margin, d.die.height() / 2.0);
        for (int k = 0; k < g.hot_clusters; ++k) {
            detail::PowerCluster c;
            c.x = snap_coord(rng.uniform(d.die.x0 + mx, d.die.x1 - mx));
            c.y = snap_coord(rng.uniform(d.die.y0 + my, d.die.y1 - my));
            c.sigma = rng.uniform(g.cluster_sigma_min, g.cluster_sigma_max);
            clusters.push_back(c);
        }
    }

    // placement: rows bottom-up, cells left to right with seeded gaps; the
    // gap scale tracks the utilization target, a top-up pass closes any
    // remaining deficit to within one cell area
    {
        if (!(g.utilization > 0.0) || g.utilization > 1.0)
            throw Error(ErrorCode::InfeasibleUtilization,
                        "utilization must lie in (0, 1], got " + detail::fmt_num(g.utilization));
        Rng rng(mix_seed(seed, "placement"));
        const double W = d.config.unit_inverter_width;
        const double H = d.config.row_height;
        const double target_area = g.utilization * d.die.area();
        const double max_cell_area = g.max_cell_width_units * W * H;
        const double gap_ratio = (1.0 - g.utilization) / g.utilization;

        int nrows = static_cast<int>(std::floor((d.die.height() + 1e-9) / H));
        std::vector<double> row_end(nrows, d.die.x0); // end of last placed cell per row
        double placed = 0.0;
        int cell_idx = 0;
        auto emit = [&](double x, double y, double w) {
            char name[16];
            std::snprintf(name, sizeof(name), "c%06d", cell_idx++);
            d.cells.push_back({name, x, y, w, H, 0.0});
            placed += w * H;
        };

        for (int r = 0; r < nrows && placed < target_area; ++r) {
            double y = d.die.y0 + r * H;
            double x = d.die.x0 + snap_coord(rng.uniform() * W * gap_ratio);
            while (placed < target_area) {
                double w = W * rng.uniform_int(1, g.max_cell_width_units);
                if (x + w > d.die.x1 + 1e-12) break;
                emit(x, y, w);
                row_end[r] = x + w;
                x = row_end[r] + snap_coord(w * gap_ratio * rng.uniform(0.5, 1.5));
            }
        }
        while (placed < target_area) {
            std::vector<int> order(nrows);
            for (int r = 0; r < nrows; ++r) order[r] = r;
            rng.shuffle(order);
            bool any = false;
            for (int r : order) {
                if (placed >= target_area) break;
                double space = d.die.x1 - row_end[r];
                if (space < W - 1e-12) continue;
                int kmax = std::min<int>(g.max_cell_width_units,
                                         static_cast<int>(std::floor(space / W + 1e-12)));
                double w = W * rng.uniform_int(1, kmax);
                emit(row_end[r], d.die.y0 + r * H, w);
                row_end[r] += w;
                any = true;
            }
            if (!any) {
                if (placed >= target_area - max_cell_area) break;
                throw Error(ErrorCode::InfeasibleUtilization,
                            "cannot reach utilization " + detail::fmt_num(g.utilization) +
                                ": placed area " + detail::fmt_num(placed) + " of " +
                                detail::fmt_num(target_area));
            }
        }
    }

    // power
    for (CellInstance& c : d.cells) {
        double base = g.base_power_density * c.width * c.height;
        c.power = base * detail::cluster_multiplier(c.center_x(), c.center_y(), g.hot_cold_ratio,
                                                    clusters);
    }

    // cap map
    {
        Rng rng(mix_seed(seed, "caps"));
        RoutingCapMap& m = d.cap_map;
        m.tile_size = g.cap_tile_size;
        m.nx = static_cast<int>(std::round(d.die.width() / m.tile_size));
        m.ny = static_cast<int>(std::round(d.die.height() / m.tile_size));
        m.values.reserve(static_cast<std::size_t>(m.nx) * m.ny);
        for (int iy = 0; iy < m.ny; ++iy) {
            for (int ix = 0; ix < m.nx; ++ix) {
                double cx = d.die.x0 + (ix + 0.5) * m.tile_size;
                double cy = d.die.y0 + (iy + 0.5) * m.tile_size;
                double mult = detail::cluster_multiplier(cx, cy, g.hot_cold_ratio, clusters);
                double v = g.cap_base * rng.uniform(1.0 - g.cap_jitter, 1.0 + g.cap_jitter) *
                           (1.0 + g.cap_cluster_gain * (mult - 1.0));
                m.values.push_back(v);
            }
        }
    }

    return d;
}

} // namespace emir
