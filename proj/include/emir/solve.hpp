#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "emir/errors.hpp"
#include "emir/grid.hpp"

namespace emir {

struct SolveOptions {
    // target: every node's current-balance residual <= residual_rel * total load
    double residual_rel = 1e-10;
    int max_outer = 8;
};

struct SolveResult {
    std::vector<double> node_voltages;          // volts, per node
    std::vector<double> branch_currents;        // amperes, a->b positive
    std::vector<double> branch_current_density; // A/um^2, wire branches only (0 otherwise)
    std::vector<double> cell_ir_drop;           // vdd - voltage at attachment, per cell
    std::vector<double> pin_currents;           // sourced current per dirichlet node
    double kirchhoff_residual = 0.0;            // max |node current imbalance|, amperes
    double total_load_current = 0.0;
    int iterations = 0;
};

namespace detail {

struct Csr {
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    int n = 0;

    void matvec(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

// Jacobi-preconditioned conjugate gradient on A x = rhs, starting from x.
// Stops on the recurrence residual 2-norm; the caller re-checks the true
// residual and restarts if rounding drift left it above target.
inline int pcg(const Csr& A, const std::vector<double>& diag_inv, const std::vector<double>& rhs,
               std::vector<double>& x, double target_r2, int max_iter) {
    const int n = A.n;
    std::vector<double> r(n), z(n), p(n), ap(n);
    A.matvec(x, r);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    int it = 0;
    while (it < max_iter) {
        if (std::sqrt(dot(r, r)) <= target_r2) break;
        A.matvec(p, ap);
        double pap = dot(p, ap);
        if (!(pap > 0.0))
            throw Error(ErrorCode::SingularSystem,
                        "conductance system is not positive definite (p'Ap = " +
                            std::to_string(pap) + ")");
        double alpha = rz / pap;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
    }
    return it;
}

} // namespace detail

// Solves the reduced conductance system with bumps as Dirichlet nodes and
// cell currents as loads. Deterministic: single-threaded, fixed iteration
// order.
inline SolveResult solve_dc(const GridGraph& grid, const std::vector<double>& cell_currents,
                            const SolveOptions& opt = {}) {
    const int n_nodes = static_cast<int>(grid.nodes.size());
    if (cell_currents.size() != grid.cell_attachment.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "got " + std::to_string(cell_currents.size()) + " cell currents for " +
                        std::to_string(grid.cell_attachment.size()) + " attachments");

    std::vector<double> node_load(n_nodes, 0.0);
    double total_load = 0.0;
    for (std::size_t i = 0; i < cell_currents.size(); ++i) {
        if (cell_currents[i] < 0.0)
            throw std::invalid_argument("cell currents must be nonnegative");
        node_load[grid.cell_attachment[i]] += cell_currents[i];
        total_load += cell_currents[i];
    }

    std::vector<char> dirichlet(n_nodes, 0);
    for (int d : grid.dirichlet_nodes) dirichlet[d] = 1;

    // reachability from the pinned set; unreachable unloaded nodes sit at vdd
    std::vector<char> reachable(n_nodes, 0);
    {
        std::vector<std::vector<int>> adj(n_nodes);
        for (const GridBranch& br : grid.branches) {
            adj[br.a].push_back(br.b);
            adj[br.b].push_back(br.a);
        }
        std::vector<int> stack = grid.dirichlet_nodes;
        for (int s : stack) reachable[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!reachable[v]) {
                    reachable[v] = 1;
                    stack.push_back(v);
                }
        }
        for (int i = 0; i < n_nodes; ++i)
            if (!reachable[i] && node_load[i] > 0.0)
                throw Error(ErrorCode::FloatingNetwork,
                            "loaded node " + std::to_string(i) + " has no path to a supply bump");
    }

    SolveResult res;
    res.total_load_current = total_load;
    res.node_voltages.assign(n_nodes, grid.vdd);

    // all-zero loads: the grid carries no current anywhere
    if (total_load > 0.0) {
        std::vector<int> free_id(n_nodes, -1);
        std::vector<int> free_nodes;
        for (int i = 0; i < n_nodes; ++i)
            if (reachable[i] && !dirichlet[i]) {
                free_id[i] = static_cast<int>(free_nodes.size());
                free_nodes.push_back(i);
            }
        const int n = static_cast<int>(free_nodes.size());
        if (n > 0) {
            // assemble the reduced Laplacian in CSR, diagonal entry first per row
            std::vector<std::vector<std::pair<int, double>>> rows(n);
            std::vector<double> diag(n, 0.0), rhs(n, 0.0);
            for (const GridBranch& br : grid.branches) {
                double gcd = 1.0 / br.resistance;
                int fa = free_id[br.a];
                int fb = free_id[br.b];
                if (fa >= 0) diag[fa] += gcd;
                if (fb >= 0) diag[fb] += gcd;
                if (fa >= 0 && fb >= 0) {
                    rows[fa].push_back({fb, -gcd});
                    rows[fb].push_back({fa, -gcd});
                } else if (fa >= 0 && dirichlet[br.b]) {
                    rhs[fa] += gcd * grid.vdd;
                } else if (fb >= 0 && dirichlet[br.a]) {
                    rhs[fb] += gcd * grid.vdd;
                }
            }
            for (int i = 0; i < n; ++i) rhs[i] -= node_load[free_nodes[i]];

            detail::Csr A;
            A.n = n;
            A.row_ptr.assign(n + 1, 0);
            std::vector<double> diag_inv(n);
            for (int i = 0; i < n; ++i) {
                if (!(diag[i] > 0.0))
                    throw Error(ErrorCode::SingularSystem,
                                "node " + std::to_string(free_nodes[i]) +
                                    " has no conductance to the grid");
                diag_inv[i] = 1.0 / diag[i];
                // parallel branches produce duplicate columns; merge them
                std::sort(rows[i].begin(), rows[i].end());
                std::size_t w = 0;
                for (std::size_t r = 0; r < rows[i].size(); ++r) {
                    if (w > 0 && rows[i][w - 1].first == rows[i][r].first)
                        rows[i][w - 1].second += rows[i][r].second;
                    else
                        rows[i][w++] = rows[i][r];
                }
                rows[i].resize(w);
                A.row_ptr[i + 1] = A.row_ptr[i] + 1 + static_cast<int>(w);
            }
            A.col.reserve(A.row_ptr[n]);
            A.val.reserve(A.row_ptr[n]);
            for (int i = 0; i < n; ++i) {
                A.col.push_back(i);
                A.val.push_back(diag[i]);
                for (auto& [c, v] : rows[i]) {
                    A.col.push_back(c);
                    A.val.push_back(v);
                }
            }

            std::vector<double> x(n, grid.vdd);
            const double tol_abs = opt.residual_rel * total_load;
            const int max_iter = 60 * n + 200;
            int iters = 0;
            double achieved = 0.0;
            bool done = false;
            for (int outer = 0; outer < opt.max_outer; ++outer) {
                std::vector<double> r(n);
                A.matvec(x, r);
                for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
                achieved = detail::max_abs(r);
                if (achieved <= tol_abs) {
                    done = true;
                    break;
                }
                std::vector<double> delta(n, 0.0);
                iters += detail::pcg(A, diag_inv, r, delta, 0.25 * tol_abs, max_iter);
                for (int i = 0; i < n; ++i) x[i] += delta[i];
            }
            if (!done) {
                std::vector<double> r(n);
                A.matvec(x, r);
                for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
                achieved = detail::max_abs(r);
                if (achieved > tol_abs) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf),
                                  "residual %.3e A above target %.3e A after %d iterations",
                                  achieved, tol_abs, iters);
                    throw Error(ErrorCode::NoConvergence, buf);
                }
            }
            res.iterations = iters;
            res.kirchhoff_residual = achieved;
            for (int i = 0; i < n; ++i) res.node_voltages[free_nodes[i]] = x[i];
        }
    }

    // branch currents + densities
    res.branch_currents.resize(grid.branches.size());
    res.branch_current_density.assign(grid.branches.size(), 0.0);
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        const GridBranch& br = grid.branches[k];
        double cur = (res.node_voltages[br.a] - res.node_voltages[br.b]) / br.resistance;
        res.branch_currents[k] = cur;
        if (br.kind == BranchKind::Wire && br.cross_section_area > 0.0)
            res.branch_current_density[k] = std::fabs(cur) / br.cross_section_area;
    }

    // per-cell drops; snap away solver noise below 1e-12 * vdd
    res.cell_ir_drop.reserve(grid.cell_attachment.size());
    for (int at : grid.cell_attachment) {
        double drop = grid.vdd - res.node_voltages[at];
        if (std::fabs(drop) < 1e-12 * grid.vdd) drop = 0.0;
        res.cell_ir_drop.push_back(drop);
    }

    // current sourced by each pin
    {
        std::vector<double> out(n_nodes, 0.0);
        for (std::size_t k = 0; k < grid.branches.size(); ++k) {
            const GridBranch& br = grid.branches[k];
            out[br.a] += res.branch_currents[k];
            out[br.b] -= res.branch_currents[k];
        }
        res.pin_currents.reserve(grid.dirichlet_nodes.size());
        for (int d : grid.dirichlet_nodes) res.pin_currents.push_back(out[d]);
    }

    return res;
}

struct IrViolation {
    std::size_t cell_index = 0;
    std::string cell_id;
    double drop = 0.0; // volts
};

struct EmViolation {
    std::size_t branch_index = 0;
    int layer = 0;
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0; // branch endpoints
    double current = 0.0;                          // amperes, signed
    double density = 0.0;                          // A/um^2
};

struct ViolationSet {
    std::vector<IrViolation> ir; // sorted by cell id
    std::vector<EmViolation> em; // sorted by branch index
};

// Strict thresholds: a drop exactly at the limit is not a violation. EM is
// checked on wire branches only.
inline ViolationSet compute_violations(const SolveResult& result, const GridGraph& grid,
                                       const DesignConfig& config,
                                       const std::vector<std::string>& cell_ids = {}) {
    ViolationSet out;
    const double ir_limit = config.ir_threshold_fraction * grid.vdd;
    for (std::size_t i = 0; i < result.cell_ir_drop.size(); ++i) {
        if (result.cell_ir_drop[i] > ir_limit) {
            std::string id =
                i < cell_ids.size() ? cell_ids[i] : ("#" + std::to_string(i));
            out.ir.push_back({i, std::move(id), result.cell_ir_drop[i]});
        }
    }
    std::sort(out.ir.begin(), out.ir.end(),
              [](const IrViolation& a, const IrViolation& b) { return a.cell_id < b.cell_id; });
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        const GridBranch& br = grid.branches[k];
        if (br.kind != BranchKind::Wire) continue;
        if (result.branch_current_density[k] > config.em_current_density_limit) {
            const GridNode& a = grid.nodes[br.a];
            const GridNode& b = grid.nodes[br.b];
            out.em.push_back({k, br.layer, a.x, a.y, b.x, b.y, result.branch_currents[k],
                              result.branch_current_density[k]});
        }
    }
    return out;
}

} // namespace emir
