#ifndef CSPIN_ED_HPP
#define CSPIN_ED_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "quad.hpp"

// Brute-force exact-diagonalization reference. Dense complex operators built
// by Kronecker products; spin index 0 is the leftmost tensor factor.

namespace cspin {

using Op = Eigen::MatrixXcd;

constexpr int kEdMaxSpins = 14;

inline void check_ed_size(int n) {
    if (n < 1 || n > kEdMaxSpins)
        throw TooLarge("dense ED guarded at N <= " + std::to_string(kEdMaxSpins));
}

inline Op pauli_half(int axis) {
    const std::complex<double> i(0.0, 1.0);
    Op m(2, 2);
    switch (axis) {
        case 0: m << 0.0, 0.5, 0.5, 0.0; break;
        case 1: m << 0.0, -0.5 * i, 0.5 * i, 0.0; break;
        default: m << 0.5, 0.0, 0.0, -0.5; break;
    }
    return m;
}

inline Op spin_operator(int n_spins, int site, int axis) {
    check_ed_size(n_spins);
    if (site < 0 || site >= n_spins) throw InvalidParams("site out of range");
    Op op = Op::Identity(1, 1);
    for (int j = 0; j < n_spins; ++j) {
        const Op f = (j == site) ? pauli_half(axis) : Op::Identity(2, 2);
        op = Eigen::kroneckerProduct(op, f).eval();
    }
    return op;
}

// H = B0 . S_0 + sum_k Gamma_k (Sx_0 Sx_k + Sy_0 Sy_k), built directly from
// the physical couplings rather than from the charge coefficients.
inline Op build_hamiltonian(const ModelParams& p) {
    check_ed_size(p.n_spins);
    const long dim = 1l << p.n_spins;
    Op h = Op::Zero(dim, dim);
    for (int a = 0; a < 3; ++a)
        h += p.field[a] * spin_operator(p.n_spins, 0, a);
    for (int k = 1; k < p.n_spins; ++k) {
        const double gk = p.coupling(k);
        h += gk * (spin_operator(p.n_spins, 0, 0) * spin_operator(p.n_spins, k, 0) +
                   spin_operator(p.n_spins, 0, 1) * spin_operator(p.n_spins, k, 1));
    }
    return h;
}

// R_j assembled from an explicit coefficient set (any delta).
inline Op build_charge_from(const CoefficientSet& cs, int j) {
    const int n = cs.params.n_spins;
    check_ed_size(n);
    const long dim = 1l << n;
    Op r = Op::Zero(dim, dim);
    for (int a = 0; a < 3; ++a) {
        r += cs.local_fields(j, a) * spin_operator(n, j, a);
        for (int k = 0; k < n; ++k) {
            if (k == j || cs.gamma[a](j, k) == 0.0) continue;
            r += cs.gamma[a](j, k) * spin_operator(n, j, a) * spin_operator(n, k, a);
        }
    }
    return r;
}

enum class ChargeForm { generic_rg, xx_limit };

inline Op build_charge(const ModelParams& p, int j, ChargeForm form) {
    check_ed_size(p.n_spins);
    if (j < 0 || j >= p.n_spins) throw InvalidParams("charge index out of range");
    if (form == ChargeForm::generic_rg && p.delta == 0.0)
        throw InvalidDelta("generic_rg form requires delta > 0");
    if (form == ChargeForm::xx_limit && p.delta != 0.0)
        throw InvalidDelta("xx_limit form requires delta = 0");
    return build_charge_from(assemble_coefficients(p), j);
}

// Oracle-side elliptic parametrization with independent axis constants, used
// to verify the construction beyond the solver's j_y = j_x gauge.
struct EllipticParams {
    int n_spins = 0;
    std::array<double, 3> j_axes{};
    std::vector<double> epsilons;
    double g = 0.0;
    std::array<double, 3> b_bare{};
};

inline Op build_charge_elliptic(const EllipticParams& ep, int j) {
    check_ed_size(ep.n_spins);
    const auto gm = elliptic_couplings(ep.j_axes, ep.epsilons, ep.g);
    const auto bf = elliptic_fields(ep.j_axes, ep.epsilons, ep.b_bare);
    const long dim = 1l << ep.n_spins;
    Op r = Op::Zero(dim, dim);
    for (int a = 0; a < 3; ++a) {
        r += bf(j, a) * spin_operator(ep.n_spins, j, a);
        for (int k = 0; k < ep.n_spins; ++k) {
            if (k == j) continue;
            r += gm[a](j, k) * spin_operator(ep.n_spins, j, a) * spin_operator(ep.n_spins, k, a);
        }
    }
    return r;
}

struct EdState {
    double energy = 0.0;
    Eigen::VectorXd charge_tuple; // <R_j>, with R_0 = H
    Eigen::MatrixXd expectations; // N x 3
    int vector_index = 0;
};

namespace detail {

// Rotate a degenerate block so that each column is an eigenvector of the whole
// commuting family, splitting recursively on the remaining charges.
inline void refine_block(Eigen::MatrixXcd& vecs, long col0, long cols,
                         const std::vector<Op>& charges, std::size_t charge_idx,
                         double gap_tol) {
    if (cols <= 1 || charge_idx >= charges.size()) return;
    Eigen::MatrixXcd block = vecs.middleCols(col0, cols);
    Eigen::MatrixXcd m = block.adjoint() * charges[charge_idx] * block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    vecs.middleCols(col0, cols) = block * es.eigenvectors();
    const Eigen::VectorXd& ev = es.eigenvalues();
    long start = 0;
    for (long i = 1; i <= cols; ++i) {
        if (i == cols || ev[i] - ev[start] > gap_tol) {
            refine_block(vecs, col0 + start, i - start, charges, charge_idx + 1, gap_tol);
            start = i;
        }
    }
}

} // namespace detail

// Full spectrum of H with per-eigenstate charge tuples and spin expectation
// values. Degenerate blocks are resolved by simultaneous diagonalization of
// the commuting charge family restricted to the block.
inline std::vector<EdState> ed_analysis(const ModelParams& p, double degeneracy_gap = 1e-10) {
    check_ed_size(p.n_spins);
    const int n = p.n_spins;
    Op h = build_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::MatrixXcd vecs = es.eigenvectors();
    const Eigen::VectorXd& energies = es.eigenvalues();
    const long dim = energies.size();
    const double gap_tol = degeneracy_gap * std::max(1.0, energies.cwiseAbs().maxCoeff());

    std::vector<Op> charges(n);
    charges[0] = h;
    CoefficientSet cs = assemble_coefficients(p);
    for (int j = 1; j < n; ++j) charges[j] = build_charge_from(cs, j);

    long start = 0;
    for (long i = 1; i <= dim; ++i) {
        if (i == dim || energies[i] - energies[start] > gap_tol) {
            detail::refine_block(vecs, start, i - start, charges, 1, gap_tol);
            start = i;
        }
    }

    std::vector<Op> sops(3 * n);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < 3; ++a) sops[3 * j + a] = spin_operator(n, j, a);

    std::vector<EdState> out(dim);
    for (long i = 0; i < dim; ++i) {
        EdState& st = out[i];
        st.vector_index = int(i);
        st.energy = energies[i];
        const Eigen::VectorXcd v = vecs.col(i);
        st.charge_tuple.resize(n);
        for (int j = 0; j < n; ++j)
            st.charge_tuple[j] = std::real(v.dot(charges[j] * v));
        st.expectations.resize(n, 3);
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < 3; ++a)
                st.expectations(j, a) = std::real(v.dot(sops[3 * j + a] * v));
    }
    return out;
}

struct MatchReport {
    std::vector<int> solved_index; // per ED state
    std::vector<double> distance;
    double max_distance = 0.0;
};

// Greedy nearest-tuple bijection between ED charge tuples and solver output.
inline MatchReport match_solutions(const std::vector<EdState>& ed,
                                   const std::vector<ChargeSolution>& solved, double tol) {
    if (ed.size() != solved.size())
        throw MatchFailure("state counts differ: " + std::to_string(ed.size()) + " vs " +
                           std::to_string(solved.size()));
    MatchReport rep;
    rep.solved_index.resize(ed.size());
    rep.distance.resize(ed.size());
    std::vector<bool> used(solved.size(), false);
    for (std::size_t i = 0; i < ed.size(); ++i) {
        double best = -1;
        int best_j = -1;
        for (std::size_t j = 0; j < solved.size(); ++j) {
            if (used[j]) continue;
            const double d = (ed[i].charge_tuple - solved[j].r).lpNorm<Eigen::Infinity>();
            if (best_j < 0 || d < best) {
                best = d;
                best_j = int(j);
            }
        }
        if (best > tol)
            throw MatchFailure("ED state " + std::to_string(i) + " has no solver tuple within " +
                               std::to_string(tol) + " (nearest " + std::to_string(best) + ")");
        used[best_j] = true;
        rep.solved_index[i] = best_j;
        rep.distance[i] = best;
        rep.max_distance = std::max(rep.max_distance, best);
    }
    return rep;
}

} // namespace cspin

#endif
