#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "emir/design.hpp"
#include "emir/errors.hpp"
#include "emir/rng.hpp"

namespace emir {

using Json = nlohmann::ordered_json;

inline constexpr const char* kDesignSchemaVersion = "1";

namespace jsonio {

inline void check_finite(double v, const std::string& where) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::ParseError, where + ": numbers must be finite (no NaN/Inf)");
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> known,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw Error(ErrorCode::ParseError, where + ": unknown field '" + it.key() + "'");
    }
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw Error(ErrorCode::ParseError, where + ": missing field '" + key + "'");
    return *it;
}

inline double num(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_number())
        throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a number");
    double d = v.get<double>();
    check_finite(d, where + "." + key);
    return d;
}

inline int integer(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_number_integer())
        throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

inline std::string str(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_string())
        throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline Json parse_text(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::ParseError, what + ": malformed JSON");
    return j;
}

} // namespace jsonio

inline Json design_to_json(const Design& d) {
    Json j;
    j["schema_version"] = kDesignSchemaVersion;
    j["die"] = {{"x0", d.die.x0}, {"y0", d.die.y0}, {"x1", d.die.x1}, {"y1", d.die.y1}};
    j["config"] = {{"analysis_window", d.config.analysis_window},
                   {"cover_window", d.config.cover_window},
                   {"unit_inverter_width", d.config.unit_inverter_width},
                   {"row_height", d.config.row_height},
                   {"ir_threshold_fraction", d.config.ir_threshold_fraction},
                   {"em_current_density_limit", d.config.em_current_density_limit}};
    j["layers"] = Json::array();
    for (const LayerSpec& L : d.layers) {
        j["layers"].push_back({{"index", L.index},
                               {"direction", direction_name(L.direction)},
                               {"width", L.width},
                               {"pitch", L.pitch},
                               {"offset", L.offset},
                               {"sheet_resistance", L.sheet_resistance},
                               {"thickness", L.thickness},
                               {"via_resistance_to_above", L.via_resistance_to_above}});
    }
    j["c4"] = {{"pitch", d.c4.pitch},
               {"origin", {d.c4.origin.x, d.c4.origin.y}},
               {"vdd", d.c4.vdd},
               {"bump_resistance", d.c4.bump_resistance}};
    j["cells"] = Json::array();
    for (const CellInstance& c : d.cells) {
        j["cells"].push_back({{"id", c.id},
                              {"x", c.x},
                              {"y", c.y},
                              {"width", c.width},
                              {"height", c.height},
                              {"power", c.power}});
    }
    j["cap_map"] = {{"tile_size", d.cap_map.tile_size},
                    {"nx", d.cap_map.nx},
                    {"ny", d.cap_map.ny},
                    {"values", d.cap_map.values}};
    return j;
}

inline std::string serialize_design(const Design& d) {
    // Reject non-finite numbers before they reach the writer.
    auto chk = [](double v, const char* what) {
        if (!std::isfinite(v))
            throw Error(ErrorCode::IoError, std::string("cannot serialize non-finite ") + what);
    };
    chk(d.die.x0, "die"); chk(d.die.y1, "die");
    for (const auto& c : d.cells) chk(c.power, "cell power");
    for (double v : d.cap_map.values) chk(v, "cap value");
    return design_to_json(d).dump(2) + "\n";
}

inline Design design_from_json(const Json& j) {
    using namespace jsonio;
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "design: top level must be an object");
    reject_unknown(j, {"schema_version", "die", "config", "layers", "c4", "cells", "cap_map"},
                   "design");
    std::string ver = str(j, "schema_version", "design");
    if (ver != kDesignSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "design schema_version '" + ver + "' unsupported, expected '" +
                        kDesignSchemaVersion + "'");

    Design d;
    {
        const Json& die = field(j, "die", "design");
        reject_unknown(die, {"x0", "y0", "x1", "y1"}, "die");
        d.die = {num(die, "x0", "die"), num(die, "y0", "die"), num(die, "x1", "die"),
                 num(die, "y1", "die")};
    }
    {
        const Json& cfg = field(j, "config", "design");
        reject_unknown(cfg,
                       {"analysis_window", "cover_window", "unit_inverter_width", "row_height",
                        "ir_threshold_fraction", "em_current_density_limit"},
                       "config");
        d.config.analysis_window = num(cfg, "analysis_window", "config");
        d.config.cover_window = num(cfg, "cover_window", "config");
        d.config.unit_inverter_width = num(cfg, "unit_inverter_width", "config");
        d.config.row_height = num(cfg, "row_height", "config");
        d.config.ir_threshold_fraction = num(cfg, "ir_threshold_fraction", "config");
        d.config.em_current_density_limit = num(cfg, "em_current_density_limit", "config");
    }
    {
        const Json& layers = field(j, "layers", "design");
        if (!layers.is_array())
            throw Error(ErrorCode::ParseError, "design: field 'layers' must be an array");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            std::string where = "layers[" + std::to_string(i) + "]";
            const Json& L = layers[i];
            reject_unknown(L,
                           {"index", "direction", "width", "pitch", "offset", "sheet_resistance",
                            "thickness", "via_resistance_to_above"},
                           where);
            LayerSpec s;
            s.index = integer(L, "index", where);
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
            d.layers.push_back(s);
        }
    }
    {
        const Json& c4 = field(j, "c4", "design");
        reject_unknown(c4, {"pitch", "origin", "vdd", "bump_resistance"}, "c4");
        d.c4.pitch = num(c4, "pitch", "c4");
        const Json& org = field(c4, "origin", "c4");
        if (!org.is_array() || org.size() != 2 || !org[0].is_number() || !org[1].is_number())
            throw Error(ErrorCode::ParseError, "c4: origin must be [x, y]");
        d.c4.origin = {org[0].get<double>(), org[1].get<double>()};
        d.c4.vdd = num(c4, "vdd", "c4");
        d.c4.bump_resistance = num(c4, "bump_resistance", "c4");
    }
    {
        const Json& cells = field(j, "cells", "design");
        if (!cells.is_array())
            throw Error(ErrorCode::ParseError, "design: field 'cells' must be an array");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::string where = "cells[" + std::to_string(i) + "]";
            const Json& c = cells[i];
            reject_unknown(c, {"id", "x", "y", "width", "height", "power"}, where);
            CellInstance cell;
            cell.id = str(c, "id", where);
            cell.x = num(c, "x", where);
            cell.y = num(c, "y", where);
            cell.width = num(c, "width", where);
            cell.height = num(c, "height", where);
            cell.power = num(c, "power", where);
            d.cells.push_back(std::move(cell));
        }
    }
    {
        const Json& m = field(j, "cap_map", "design");
        reject_unknown(m, {"tile_size", "nx", "ny", "values"}, "cap_map");
        d.cap_map.tile_size = num(m, "tile_size", "cap_map");
        d.cap_map.nx = integer(m, "nx", "cap_map");
        d.cap_map.ny = integer(m, "ny", "cap_map");
        const Json& vals = field(m, "values", "cap_map");
        if (!vals.is_array())
            throw Error(ErrorCode::ParseError, "cap_map: field 'values' must be an array");
        for (const Json& v : vals) {
            if (!v.is_number())
                throw Error(ErrorCode::ParseError, "cap_map: values must be numbers");
            d.cap_map.values.push_back(v.get<double>());
        }
    }
    return d;
}

inline Design parse_design(const std::string& text) {
    return design_from_json(jsonio::parse_text(text, "design"));
}

// Stable content-derived identifier used to key dataset rows.
inline std::string design_id(const Design& d) {
    std::uint64_t h = fnv1a64(serialize_design(d));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "d%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace emir
