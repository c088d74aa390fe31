#ifndef CSPIN_OBSERVABLES_HPP
#define CSPIN_OBSERVABLES_HPP

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "quad.hpp"

// Per-spin expectation values through Hellmann-Feynman sensitivities of the
// charge eigenvalues, plus the purity factor, the mean-field effective field
// on the central spin, and the dark/bright label.

namespace cspin {

enum class FieldParam { Bx, By, Bz0 };

// Solve J * (dr/dp) = dK/dp at a converged solution.
inline Eigen::VectorXd sensitivity(const CoefficientSet& cs, const ChargeSolution& sol,
                                   FieldParam p) {
    const ModelParams& mp = cs.params;
    const int n = mp.n_spins;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    switch (p) {
        case FieldParam::Bx:
            for (int j = 0; j < n; ++j)
                v[j] = mp.field[0] * (mp.j_perp - mp.j_z) / (2.0 * (mp.epsilons[j] + mp.j_perp));
            break;
        case FieldParam::By:
            for (int j = 0; j < n; ++j)
                v[j] = mp.field[1] * (mp.j_perp - mp.j_z) / (2.0 * (mp.epsilons[j] + mp.j_perp));
            break;
        case FieldParam::Bz0:
            v[0] = mp.field[2] / 2.0;
            for (int j = 1; j < n; ++j)
                v[j] = mp.field[2] * mp.delta / (2.0 * (mp.epsilons[j] + mp.j_z));
            break;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(quad_jacobian(cs, sol.r));
    if (!lu.isInvertible())
        throw SingularJacobian("charge Jacobian singular at the solution; "
                               "per-state derivatives are ill-defined");
    return lu.solve(v);
}

constexpr double kExpectationUnset = std::numeric_limits<double>::quiet_NaN();

struct ObservableRecord {
    Eigen::MatrixXd expectations; // N x 3; bath z entries NaN until filled
    double gamma0 = 0.0;
    std::array<double, 3> effective_field{};
    double g_tilde = 0.0;
    bool dark = false;
    ParentState parent;
    double g_value = 0.0;
};

// <S^{x,y}_j> for every spin and <S^z_0>, valid at delta = 0.
inline ObservableRecord inplane_and_central_expectations(const ModelParams& params,
                                                         const CoefficientSet& cs,
                                                         const ChargeSolution& sol) {
    if (params.delta != 0.0)
        throw InvalidParams("in-plane expectations use the delta = 0 closed forms");
    const int n = params.n_spins;
    const double fscale = std::sqrt(params.j_perp - params.j_z);
    Eigen::VectorXd dx = sensitivity(cs, sol, FieldParam::Bx);
    Eigen::VectorXd dy = sensitivity(cs, sol, FieldParam::By);
    Eigen::VectorXd dz = sensitivity(cs, sol, FieldParam::Bz0);

    ObservableRecord rec;
    rec.parent = sol.parent;
    rec.g_value = sol.g_value;
    rec.expectations = Eigen::MatrixXd::Constant(n, 3, kExpectationUnset);
    for (int j = 0; j < n; ++j) {
        const double w = std::sqrt(params.epsilons[j] + params.j_perp) / fscale;
        rec.expectations(j, 0) = w * dx[j];
        rec.expectations(j, 1) = w * dy[j];
    }
    rec.expectations(0, 2) = dz[0];
    return rec;
}

// <S^z_j> for the bath spins: evaluate sqrt(eps_j + j_z) * (dr_j/dB0z)/sqrt(D)
// at two small regulators D and eliminate the first order in sqrt(D).
inline Eigen::VectorXd bath_sz(const ModelParams& params, const ParentState& parent,
                               double g_value,
                               const std::array<double, 2>& deltas = {1e-4, 2.5e-5},
                               int steps_hint = 16, double tol = 1e-12) {
    const int n = params.n_spins;
    std::array<Eigen::VectorXd, 2> f;
    for (int i = 0; i < 2; ++i) {
        const double d = deltas[i];
        if (!(d > 0.0)) throw InvalidParams("extrapolation deltas must be > 0");
        ModelParams pd = with_delta(params, d);
        ChargeSolution sol = continue_in_g(pd, parent, g_value, steps_hint, tol);
        CoefficientSet cs = assemble_coefficients(with_g(pd, g_value));
        Eigen::VectorXd w = sensitivity(cs, sol, FieldParam::Bz0);
        f[i].resize(n - 1);
        for (int j = 1; j < n; ++j)
            f[i][j - 1] = std::sqrt(pd.epsilons[j] + pd.j_z) * w[j] / std::sqrt(d);
    }
    if ((f[0] - f[1]).lpNorm<Eigen::Infinity>() > 0.05)
        throw ExtrapolationUnstable("bath <S^z> extrapolation pair disagrees by more than "
                                    "10% of the spin bound");
    const double h0 = std::sqrt(deltas[0]), h1 = std::sqrt(deltas[1]);
    return (h0 * f[1] - h1 * f[0]) / (h0 - h1);
}

inline double purity_factor(const Eigen::MatrixXd& expectations) {
    return expectations.row(0).squaredNorm();
}

// Mean-field Overhauser contribution of the bath added to the applied field.
inline std::array<double, 3> effective_field(const ModelParams& params,
                                             const Eigen::MatrixXd& expectations) {
    std::array<double, 3> b{params.field[0], params.field[1], params.field[2]};
    for (int k = 1; k < params.n_spins; ++k) {
        const double gk = params.coupling(k);
        b[0] += gk * expectations(k, 0);
        b[1] += gk * expectations(k, 1);
    }
    return b;
}

inline bool classify_dark(double gamma0, double tol_gamma = 1e-6) {
    return gamma0 >= 0.25 - tol_gamma;
}

// Full record for one state at one coupling; bath <S^z> is optional since it
// needs two extra regulated continuations.
inline ObservableRecord compute_record(const ModelParams& params, const ParentState& parent,
                                       double g_value, bool with_bath_sz = false,
                                       int steps_hint = 16, double tol = 1e-12,
                                       double tol_gamma = 1e-6) {
    ChargeSolution sol = continue_in_g(params, parent, g_value, steps_hint, tol);
    CoefficientSet cs = assemble_coefficients(with_g(params, g_value));
    ObservableRecord rec = inplane_and_central_expectations(params, cs, sol);
    if (with_bath_sz) {
        Eigen::VectorXd bz = bath_sz(params, parent, g_value, {1e-4, 2.5e-5}, steps_hint, tol);
        for (int j = 1; j < params.n_spins; ++j) rec.expectations(j, 2) = bz[j - 1];
    }
    rec.gamma0 = purity_factor(rec.expectations);
    ModelParams pg = with_g(params, g_value);
    rec.effective_field = effective_field(pg, rec.expectations);
    rec.g_tilde = rescaled_coupling(pg);
    rec.dark = classify_dark(rec.gamma0, tol_gamma);
    return rec;
}

} // namespace cspin

#endif
