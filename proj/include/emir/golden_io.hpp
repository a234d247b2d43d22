#pragma once

#include <string>
#include <vector>

#include "emir/design_io.hpp"
#include "emir/solve.hpp"

namespace emir {

// Everything the labeling step needs from a sign-off run, in file form.
struct GoldenFile {
    struct IrEntry {
        std::string cell;
        double drop = 0.0;
    };
    struct EmEntry {
        int branch = 0;
        int layer = 0;
        double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
        double current = 0.0;
        double density = 0.0;
    };
    std::vector<IrEntry> ir;
    std::vector<EmEntry> em;
    std::vector<std::pair<std::string, double>> cell_ir_drop; // insertion order = cell order
    int nodes = 0;
    int branches = 0;
    double kirchhoff_residual = 0.0;
    double total_load_current = 0.0;
    double vdd = 1.0;
    int iterations = 0;
    std::vector<double> node_voltages; // empty unless dumped
};

inline GoldenFile make_golden(const Design& design, const GridGraph& grid,
                              const SolveResult& result, const ViolationSet& violations,
                              bool dump_voltages = false) {
    GoldenFile g;
    for (const IrViolation& v : violations.ir) g.ir.push_back({v.cell_id, v.drop});
    for (const EmViolation& v : violations.em)
        g.em.push_back({static_cast<int>(v.branch_index), v.layer, v.x0, v.y0, v.x1, v.y1,
                        v.current, v.density});
    for (std::size_t i = 0; i < design.cells.size(); ++i)
        g.cell_ir_drop.push_back({design.cells[i].id, result.cell_ir_drop[i]});
    g.nodes = static_cast<int>(grid.nodes.size());
    g.branches = static_cast<int>(grid.branches.size());
    g.kirchhoff_residual = result.kirchhoff_residual;
    g.total_load_current = result.total_load_current;
    g.vdd = grid.vdd;
    g.iterations = result.iterations;
    if (dump_voltages) g.node_voltages = result.node_voltages;
    return g;
}

inline Json golden_to_json(const GoldenFile& g) {
    Json j;
    j["schema_version"] = "1";
    j["meta"] = {{"nodes", g.nodes},
                 {"branches", g.branches},
                 {"kirchhoff_residual", g.kirchhoff_residual},
                 {"total_load_current", g.total_load_current},
                 {"vdd", g.vdd},
                 {"iterations", g.iterations}};
    j["ir"] = Json::array();
    for (const auto& v : g.ir) j["ir"].push_back({{"cell", v.cell}, {"drop", v.drop}});
    j["em"] = Json::array();
    for (const auto& v : g.em)
        j["em"].push_back({{"branch", v.branch},
                           {"layer", v.layer},
                           {"from", {v.x0, v.y0}},
                           {"to", {v.x1, v.y1}},
                           {"current", v.current},
                           {"current_density", v.density}});
    j["cell_ir_drop"] = Json::object();
    for (const auto& [id, drop] : g.cell_ir_drop) j["cell_ir_drop"][id] = drop;
    if (!g.node_voltages.empty()) j["node_voltages"] = g.node_voltages;
    return j;
}

inline std::string serialize_golden(const GoldenFile& g) { return golden_to_json(g).dump(2) + "\n"; }

inline GoldenFile parse_golden(const std::string& text) {
    using namespace jsonio;
    Json j = parse_text(text, "golden result");
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, "golden result: top level must be an object");
    reject_unknown(j, {"schema_version", "meta", "ir", "em", "cell_ir_drop", "node_voltages"},
                   "golden result");
    std::string ver = str(j, "schema_version", "golden result");
    if (ver != "1")
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "golden schema_version '" + ver + "' unsupported");
    GoldenFile g;
    {
        const Json& m = field(j, "meta", "golden result");
        reject_unknown(m,
                       {"nodes", "branches", "kirchhoff_residual", "total_load_current", "vdd",
                        "iterations"},
                       "meta");
        g.nodes = integer(m, "nodes", "meta");
        g.branches = integer(m, "branches", "meta");
        g.kirchhoff_residual = num(m, "kirchhoff_residual", "meta");
        g.total_load_current = num(m, "total_load_current", "meta");
        g.vdd = num(m, "vdd", "meta");
        g.iterations = integer(m, "iterations", "meta");
    }
    for (const Json& v : field(j, "ir", "golden result")) {
        reject_unknown(v, {"cell", "drop"}, "ir entry");
        g.ir.push_back({str(v, "cell", "ir entry"), num(v, "drop", "ir entry")});
    }
    for (const Json& v : field(j, "em", "golden result")) {
        reject_unknown(v, {"branch", "layer", "from", "to", "current", "current_density"},
                       "em entry");
        GoldenFile::EmEntry e;
        e.branch = integer(v, "branch", "em entry");
        e.layer = integer(v, "layer", "em entry");
        const Json& from = field(v, "from", "em entry");
        const Json& to = field(v, "to", "em entry");
        if (!from.is_array() || from.size() != 2 || !to.is_array() || to.size() != 2)
            throw Error(ErrorCode::ParseError, "em entry: from/to must be [x, y]");
        e.x0 = from[0].get<double>();
        e.y0 = from[1].get<double>();
        e.x1 = to[0].get<double>();
        e.y1 = to[1].get<double>();
        e.current = num(v, "current", "em entry");
        e.density = num(v, "current_density", "em entry");
        g.em.push_back(e);
    }
    for (auto it = field(j, "cell_ir_drop", "golden result").begin();
         it != j["cell_ir_drop"].end(); ++it) {
        if (!it.value().is_number())
            throw Error(ErrorCode::ParseError, "cell_ir_drop: values must be numbers");
        g.cell_ir_drop.push_back({it.key(), it.value().get<double>()});
    }
    if (j.contains("node_voltages"))
        for (const Json& v : j["node_voltages"]) g.node_voltages.push_back(v.get<double>());
    return g;
}

} // namespace emir
