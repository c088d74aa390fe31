#ifndef CSPIN_MODEL_HPP
#define CSPIN_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

// Integrable parametrization of the XX central spin model in a tilted field.
// Gauge is fixed to j_z = 0, j_perp = 1; the user-facing couplings Gamma_k and
// the applied field (B0x, B0y, B0z) fully determine the physics.

namespace cspin {

struct CouplingDistribution {
    enum class Kind { sqrt_decreasing, inverse_square, uniform, linear_decreasing, custom };

    Kind kind = Kind::custom;
    std::vector<double> values; // Gamma_k, k = 1 .. N-1

    void validate() const {
        if (values.size() < 1)
            throw InvalidParams("coupling distribution needs at least one bath spin");
        for (double v : values)
            if (!(v > 0.0))
                throw NonPositiveCoupling("coupling values must be strictly positive");
        for (std::size_t a = 0; a < values.size(); ++a)
            for (std::size_t b = a + 1; b < values.size(); ++b)
                if (values[a] == values[b])
                    throw DuplicateCouplings("coupling values must be pairwise distinct (Gamma_" +
                                             std::to_string(a + 1) + " = Gamma_" + std::to_string(b + 1) + ")");
    }

    double total() const {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }
};

inline const char* to_string(CouplingDistribution::Kind k) {
    switch (k) {
        case CouplingDistribution::Kind::sqrt_decreasing: return "sqrt_decreasing";
        case CouplingDistribution::Kind::inverse_square: return "inverse_square";
        case CouplingDistribution::Kind::uniform: return "uniform";
        case CouplingDistribution::Kind::linear_decreasing: return "linear_decreasing";
        case CouplingDistribution::Kind::custom: return "custom";
    }
    return "?";
}

// Standard coupling shapes, normalized to the requested total. The uniform
// shape is singular for the parametrization (all epsilons coincide), so it
// requires an explicit relative jitter to break the ties.
inline CouplingDistribution make_distribution(CouplingDistribution::Kind kind, int n_spins,
                                              double total, double uniform_jitter = 0.0) {
    if (n_spins < 2) throw InvalidParams("n_spins must be >= 2");
    if (!(total > 0.0)) throw InvalidParams("total coupling must be > 0");
    const int m = n_spins - 1;
    CouplingDistribution dist;
    dist.kind = kind;
    dist.values.resize(m);
    for (int k = 1; k <= m; ++k) {
        double v;
        switch (kind) {
            case CouplingDistribution::Kind::sqrt_decreasing: v = std::sqrt(double(n_spins - k)); break;
            case CouplingDistribution::Kind::inverse_square: v = 1.0 / (double(k) * double(k)); break;
            case CouplingDistribution::Kind::linear_decreasing: v = double(n_spins - k); break;
            case CouplingDistribution::Kind::uniform:
                if (uniform_jitter <= 0.0)
                    throw DuplicateCouplings("uniform couplings need an explicit jitter > 0 "
                                             "to keep the epsilons distinct");
                v = 1.0 + uniform_jitter * double(k - 1);
                break;
            default:
                throw UnsupportedShape("unsupported distribution kind");
        }
        dist.values[k - 1] = v;
    }
    double s = 0;
    for (double v : dist.values) s += v;
    for (double& v : dist.values) v *= total / s;
    dist.validate();
    return dist;
}

struct ModelParams {
    int n_spins = 0;
    double j_perp = 1.0;
    double j_z = 0.0;
    std::vector<double> epsilons; // eps[0] = -j_z + delta
    double g = 0.0;               // overall coupling scale
    std::array<double, 3> field{}; // (B0x, B0y, B0z) on the central spin
    double delta = 0.0;

    // Physical coupling Gamma_k of spin k >= 1 to the central spin.
    double coupling(int k) const {
        const double e = epsilons[k];
        return g * std::sqrt((j_perp - j_z) * (e + j_perp) * (e + j_z)) / (e + j_z);
    }

    double field_norm() const {
        return std::sqrt(field[0] * field[0] + field[1] * field[1] + field[2] * field[2]);
    }

    double total_coupling() const {
        double s = 0;
        for (int k = 1; k < n_spins; ++k) s += coupling(k);
        return s;
    }

    void validate() const {
        if (n_spins < 2) throw InvalidParams("n_spins must be >= 2");
        if ((int)epsilons.size() != n_spins) throw InvalidParams("epsilons size mismatch");
        if (!(g >= 0.0)) throw InvalidParams("g must be >= 0");
        if (!(delta >= 0.0)) throw InvalidParams("delta must be >= 0");
        if (!(j_perp > j_z)) throw InvalidParams("j_perp must exceed j_z");
        if (epsilons[0] != -j_z + delta) throw InvalidParams("epsilon_0 must equal -j_z + delta");
        for (int k = 1; k < n_spins; ++k) {
            if (!(epsilons[k] + j_perp > 0.0) || !(epsilons[k] + j_z > 0.0))
                throw InvalidParams("epsilon_" + std::to_string(k) + " out of range");
        }
        for (int a = 0; a < n_spins; ++a)
            for (int b = a + 1; b < n_spins; ++b)
                if (epsilons[a] == epsilons[b])
                    throw InvalidParams("epsilons must be pairwise distinct");
    }
};

// Gauge-fix and invert the coupling parametrization. The requested physical
// couplings are g * dist.values; the shape is rescaled internally so that
// min_k Gamma~_k = sqrt(2), which places every bath epsilon in (0, 1].
inline ModelParams build_model(const CouplingDistribution& dist, double g,
                               const std::array<double, 3>& field, double delta = 0.0) {
    dist.validate();
    if (!(g >= 0.0)) throw InvalidParams("g must be >= 0");
    if (!(delta >= 0.0)) throw InvalidParams("delta must be >= 0");

    ModelParams p;
    p.n_spins = int(dist.values.size()) + 1;
    p.j_perp = 1.0;
    p.j_z = 0.0;
    p.field = field;
    p.delta = delta;

    const double shape_scale = *std::min_element(dist.values.begin(), dist.values.end()) / std::sqrt(2.0);
    p.g = g * shape_scale;

    p.epsilons.resize(p.n_spins);
    p.epsilons[0] = -p.j_z + delta;
    for (int k = 1; k < p.n_spins; ++k) {
        const double gt = dist.values[k - 1] / shape_scale; // Gamma~_k >= sqrt(2)
        p.epsilons[k] = 1.0 / (gt * gt - 1.0);
    }
    p.validate();
    return p;
}

inline ModelParams with_g(const ModelParams& p, double g) {
    ModelParams q = p;
    q.g = g;
    return q;
}

inline ModelParams with_delta(const ModelParams& p, double delta) {
    ModelParams q = p;
    q.delta = delta;
    q.epsilons[0] = -q.j_z + delta;
    return q;
}

// Rescaled coupling g~ = (sum_k Gamma_k) / |B|.
inline double rescaled_coupling(const ModelParams& p) {
    const double bn = p.field_norm();
    if (bn == 0.0) throw ZeroField("rescaled coupling undefined for zero applied field");
    return p.total_coupling() / bn;
}

// Coupling matrices Gamma^alpha_jk of the elliptic parametrization, for
// arbitrary axis constants. Zero diagonal.
inline std::array<Eigen::MatrixXd, 3> elliptic_couplings(const std::array<double, 3>& j_axes,
                                                         const std::vector<double>& eps, double g) {
    const int n = int(eps.size());
    std::array<Eigen::MatrixXd, 3> gm;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        gm[a] = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                const double arg = (eps[j] + j_axes[a]) * (eps[k] + j_axes[b]) * (eps[k] + j_axes[c]);
                gm[a](j, k) = g * std::sqrt(arg) / (eps[k] - eps[j]);
            }
    }
    return gm;
}

// Local field components B^alpha_j = B^alpha / sqrt(eps_j + j_alpha) for bare
// field components B^alpha. Rows are spins, columns are x, y, z.
inline Eigen::MatrixXd elliptic_fields(const std::array<double, 3>& j_axes,
                                       const std::vector<double>& eps,
                                       const std::array<double, 3>& b_bare) {
    const int n = int(eps.size());
    Eigen::MatrixXd f(n, 3);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < 3; ++a)
            f(j, a) = b_bare[a] / std::sqrt(eps[j] + j_axes[a]);
    return f;
}

struct CoefficientSet {
    ModelParams params;
    std::array<Eigen::MatrixXd, 3> gamma; // Gamma^alpha_jk, zero diagonal
    Eigen::MatrixXd c_matrix;             // C_jk, zero diagonal
    Eigen::MatrixXd local_fields;         // N x 3
    Eigen::VectorXd constant_terms;       // K_j
};

// Assemble every coefficient entering the quadratic charge equations at the
// params' delta. At delta = 0 the exact limiting values are produced: column 0
// of C vanishes, Gamma^{x,y}_j0 and Gamma^z_0k vanish, and the bath spins see
// no z field.
inline CoefficientSet assemble_coefficients(const ModelParams& p) {
    p.validate();
    const int n = p.n_spins;
    CoefficientSet cs;
    cs.params = p;

    const std::array<double, 3> axes{p.j_perp, p.j_perp, p.j_z};
    cs.gamma = elliptic_couplings(axes, p.epsilons, p.g);

    const double fscale = std::sqrt(p.j_perp - p.j_z);
    const std::array<double, 3> b_bare{p.field[0] * fscale, p.field[1] * fscale,
                                       p.field[2] * std::sqrt(p.delta)};
    cs.local_fields = elliptic_fields(axes, p.epsilons, b_bare);
    // eps_0 + j_z = delta exactly, so B^z_0 = B0z for every delta >= 0.
    cs.local_fields(0, 2) = p.field[2];

    cs.c_matrix = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double ek = p.epsilons[k];
            cs.c_matrix(j, k) = -p.g * (ek + p.j_perp) * std::sqrt(ek + p.j_z) / (ek - p.epsilons[j]);
        }

    cs.constant_terms = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        double kj = 0;
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < n; ++k) {
                const double q = cs.gamma[a](j, k) / 4.0;
                kj += q * q;
            }
            const double h = cs.local_fields(j, a) / 2.0;
            kj += h * h;
        }
        cs.constant_terms[j] = kj;
    }
    return cs;
}

} // namespace cspin

#endif
