#ifndef CSPIN_QUAD_HPP
#define CSPIN_QUAD_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "model.hpp"

// Solver for the coupled quadratic equations obeyed by the conserved-charge
// eigenvalues:  r_j^2 + (1/2) sum_{k != j} C_jk r_k - K_j = 0.
// Solutions are labeled by their g = 0 parent product state and tracked to
// finite coupling by continuation in g.

namespace cspin {

struct ParentState {
    std::vector<int> signs; // +1 / -1, index 0 = central spin

    // Expand a motif like "--+" by repetition and truncation to n spins.
    static ParentState from_motif(const std::string& motif, int n) {
        if (motif.empty()) throw InvalidParams("empty parent motif");
        for (char c : motif)
            if (c != '+' && c != '-')
                throw InvalidParams("parent motif may only contain '+' and '-'");
        ParentState ps;
        ps.signs.resize(n);
        for (int j = 0; j < n; ++j)
            ps.signs[j] = motif[j % motif.size()] == '+' ? 1 : -1;
        return ps;
    }

    static ParentState from_index(unsigned long idx, int n) {
        ParentState ps;
        ps.signs.resize(n);
        for (int j = 0; j < n; ++j)
            ps.signs[j] = (idx >> j) & 1u ? 1 : -1;
        return ps;
    }

    std::string label() const {
        std::string s;
        for (int v : signs) s += v > 0 ? '+' : '-';
        return s;
    }
};

struct ChargeSolution {
    Eigen::VectorXd r;
    double g_value = 0.0;
    double delta_value = 0.0;
    ParentState parent;
    double residual_norm = 0.0;
};

inline Eigen::VectorXd quad_residual(const CoefficientSet& cs, const Eigen::VectorXd& r) {
    return r.cwiseProduct(r) + 0.5 * (cs.c_matrix * r) - cs.constant_terms;
}

inline Eigen::MatrixXd quad_jacobian(const CoefficientSet& cs, const Eigen::VectorXd& r) {
    Eigen::MatrixXd j = 0.5 * cs.c_matrix;
    j.diagonal() = 2.0 * r;
    return j;
}

// The decoupled g = 0 solution for a given parent: r_j = sign_j |B_j| / 2.
inline ChargeSolution seed_solution(const CoefficientSet& cs, const ParentState& parent) {
    const int n = cs.params.n_spins;
    if ((int)parent.signs.size() != n) throw InvalidParams("parent length mismatch");
    ChargeSolution sol;
    sol.parent = parent;
    sol.g_value = 0.0;
    sol.delta_value = cs.params.delta;
    sol.r.resize(n);
    for (int j = 0; j < n; ++j) {
        const double bj = cs.local_fields.row(j).norm();
        if (bj == 0.0)
            throw DegenerateSeed("local field vanishes on spin " + std::to_string(j) +
                                 "; parent labeling is ill-defined");
        sol.r[j] = parent.signs[j] * bj / 2.0;
    }
    sol.residual_norm = 0.0;
    return sol;
}

namespace detail {
struct NewtonResult {
    Eigen::VectorXd r;
    double residual;
    int iterations;
};

inline NewtonResult newton_raw(const CoefficientSet& cs, const Eigen::VectorXd& guess,
                               double tol, int max_iter) {
    if (!guess.allFinite()) throw InvalidParams("newton guess must be finite");
    // the equations scale as K_j, so the reachable residual floor does too
    const double tol_eff = tol * std::max(1.0, cs.constant_terms.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd r = guess;
    double res = quad_residual(cs, r).lpNorm<Eigen::Infinity>();
    for (int it = 0; it <= max_iter; ++it) {
        Eigen::VectorXd f = quad_residual(cs, r);
        res = f.lpNorm<Eigen::Infinity>();
        if (res <= tol_eff) return {r, res, it};
        if (it == max_iter) break;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(quad_jacobian(cs, r));
        Eigen::VectorXd dx = lu.solve(-f);
        if (!dx.allFinite())
            throw SingularJacobian("singular Jacobian in Newton step");
        // near-singular Jacobians (sheet quasi-crossings) blow the raw step up;
        // cap it at the solution scale and backtrack until the residual drops
        const double cap = std::max(1.0, r.lpNorm<Eigen::Infinity>());
        const double dn = dx.lpNorm<Eigen::Infinity>();
        if (dn > cap) dx *= cap / dn;
        double lambda = 1.0;
        for (int bt = 0; bt < 24; ++bt) {
            if (quad_residual(cs, r + lambda * dx).lpNorm<Eigen::Infinity>() < res) break;
            lambda /= 2.0;
        }
        r += lambda * dx;
    }
    throw NoConvergence(max_iter, res);
}
} // namespace detail

inline ChargeSolution newton_polish(const CoefficientSet& cs, const Eigen::VectorXd& guess,
                                    const ParentState& parent, double tol = 1e-12,
                                    int max_iter = 50) {
    auto nr = detail::newton_raw(cs, guess, tol, max_iter);
    ChargeSolution sol;
    sol.r = nr.r;
    sol.g_value = cs.params.g;
    sol.delta_value = cs.params.delta;
    sol.parent = parent;
    sol.residual_norm = nr.residual;
    return sol;
}

// Track a solution branch from (g_from, r_start) to g_to with adaptive steps:
// halve on failure, grow by 1.5 on easy convergence. Each step starts Newton
// from the Euler prediction r + h dr/dg so that branches passing close to each
// other in r-space are not collapsed onto one sheet; C is linear and K
// quadratic in g, so dF/dg is available in closed form.
inline ChargeSolution continue_g(const ModelParams& params, const ParentState& parent,
                                 Eigen::VectorXd r, double g_from, double g_to,
                                 int steps_hint = 16, double tol = 1e-12) {
    if (steps_hint < 1) steps_hint = 1;
    const double span = g_to - g_from;
    if (!(span >= 0.0)) throw InvalidParams("continuation requires g_to >= g_from");
    if (span == 0.0) {
        ChargeSolution sol = newton_polish(assemble_coefficients(with_g(params, g_to)), r, parent, tol);
        return sol;
    }
    const CoefficientSet cs_unit = assemble_coefficients(with_g(params, 1.0));
    const Eigen::VectorXd k_field = assemble_coefficients(with_g(params, 0.0)).constant_terms;
    const Eigen::VectorXd k_pair = cs_unit.constant_terms - k_field; // K(g) = k_field + g^2 k_pair
    auto tangent = [&](const Eigen::VectorXd& rr, double gg) -> Eigen::VectorXd {
        Eigen::VectorXd df_dg = 0.5 * (cs_unit.c_matrix * rr) - 2.0 * gg * k_pair;
        CoefficientSet cs = assemble_coefficients(with_g(params, gg));
        Eigen::VectorXd t = Eigen::PartialPivLU<Eigen::MatrixXd>(quad_jacobian(cs, rr)).solve(-df_dg);
        if (!t.allFinite()) t.setZero();
        return t;
    };
    // cap the Euler displacement at the solution scale: near-singular tangents
    // at close approaches would otherwise throw the guess into another basin
    auto predict = [](const Eigen::VectorXd& rr, const Eigen::VectorXd& t, double h) {
        Eigen::VectorXd dp = h * t;
        const double norm = dp.lpNorm<Eigen::Infinity>();
        const double cap = std::max(1.0, rr.lpNorm<Eigen::Infinity>());
        if (norm > cap) dp *= cap / norm;
        return Eigen::VectorXd(rr + dp);
    };
    const double step_cap = std::max(span / 4.0, span / double(steps_hint));
    double g = g_from;
    double step = span / double(steps_hint);
    ChargeSolution sol;
    Eigen::VectorXd drdg = tangent(r, g);
    while (g_to - g > 1e-15 * span) {
        const double h = std::min(step, g_to - g);
        const double g_next = (g_to - g <= step) ? g_to : g + h;
        CoefficientSet cs = assemble_coefficients(with_g(params, g_next));
        try {
            const Eigen::VectorXd guess = predict(r, drdg, g_next - g);
            auto nr = detail::newton_raw(cs, guess, tol, 50);
            // a converged point far from the prediction means Newton hopped to
            // another root; reject the step instead of silently switching branch
            if ((nr.r - guess).lpNorm<Eigen::Infinity>() >
                0.25 * std::max(1.0, r.lpNorm<Eigen::Infinity>()))
                throw NoConvergence(0, nr.residual);
            g = g_next;
            r = nr.r;
            sol.residual_norm = nr.residual;
            drdg = tangent(r, g);
            if (nr.iterations < 4) step = std::min(step * 1.5, step_cap);
        } catch (const NoConvergence&) {
            step /= 2.0;
            if (step < 1e-12 * span) throw StepUnderflow(g);
        } catch (const SingularJacobian&) {
            step /= 2.0;
            if (step < 1e-12 * span) throw StepUnderflow(g);
        }
    }
    sol.r = r;
    sol.g_value = g_to;
    sol.delta_value = params.delta;
    sol.parent = parent;
    return sol;
}

// Deform the parent's g = 0 product solution to coupling g_target.
inline ChargeSolution continue_in_g(const ModelParams& params, const ParentState& parent,
                                    double g_target, int steps_hint = 16, double tol = 1e-12) {
    if (!(g_target >= 0.0)) throw InvalidParams("g_target must be >= 0");
    CoefficientSet cs0 = assemble_coefficients(with_g(params, 0.0));
    ChargeSolution seed = seed_solution(cs0, parent);
    if (g_target == 0.0) return seed;
    return continue_g(params, parent, seed.r, 0.0, g_target, steps_hint, tol);
}

struct EnumerationEntry {
    ParentState parent;
    bool ok = false;
    std::string error;
    ChargeSolution solution; // valid iff ok
};

struct EnumerationResult {
    std::vector<EnumerationEntry> entries; // in parent-index order
    std::vector<std::pair<int, int>> near_degenerate; // tuple pairs closer than 1e-8

    std::vector<ChargeSolution> solutions() const {
        std::vector<ChargeSolution> out;
        for (const auto& e : entries)
            if (e.ok) out.push_back(e.solution);
        return out;
    }
    int failures() const {
        int f = 0;
        for (const auto& e : entries)
            if (!e.ok) ++f;
        return f;
    }
};

// All 2^N branches from the 2^N product parents. Guarded: this is meant for
// oracle-scale cross validation, not production sweeps.
inline EnumerationResult enumerate_all_states(const ModelParams& params, double g_target,
                                              int max_spins = 16, int steps_hint = 16,
                                              double tol = 1e-12) {
    if (params.n_spins > max_spins)
        throw TooLarge("enumerate_all_states guarded at N <= " + std::to_string(max_spins));
    const unsigned long count = 1ul << params.n_spins;
    EnumerationResult res;
    res.entries.resize(count);
    for (unsigned long p = 0; p < count; ++p) {
        auto& e = res.entries[p];
        e.parent = ParentState::from_index(p, params.n_spins);
        try {
            e.solution = continue_in_g(params, e.parent, g_target, steps_hint, tol);
            e.ok = true;
        } catch (const Error& ex) {
            e.error = ex.what();
        }
    }
    if (count <= 4096) {
        for (unsigned long a = 0; a < count; ++a)
            for (unsigned long b = a + 1; b < count; ++b) {
                if (!res.entries[a].ok || !res.entries[b].ok) continue;
                const double d = (res.entries[a].solution.r - res.entries[b].solution.r)
                                     .lpNorm<Eigen::Infinity>();
                if (d <= 1e-8) res.near_degenerate.emplace_back(int(a), int(b));
            }
    }
    return res;
}

} // namespace cspin

#endif
