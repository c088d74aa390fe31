#include <doctest.h>

#include <random>

#include "cspin/ed.hpp"
#include "cspin/quad.hpp"

using namespace cspin;

namespace {

const std::array<double, 3> kTiltedField{2.23, 2.23, 3.162};

ModelParams fig1_style_params(int n, double g = 1.0) {
    CouplingDistribution d;
    for (int j = 1; j < n; ++j) d.values.push_back(7.254 * std::sqrt(double(n - j)));
    return build_model(d, g, kTiltedField);
}

CoefficientSet random_coeffs(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ModelParams p;
    p.n_spins = n;
    p.g = 1.0;
    p.epsilons.resize(n);
    p.epsilons[0] = 0.0;
    for (int k = 1; k < n; ++k) p.epsilons[k] = 0.1 + 0.9 * k / double(n) + 0.03 * u(rng);
    p.field = {1.0 + u(rng), 0.5 + u(rng), 2.0 + u(rng)};
    return assemble_coefficients(p);
}

} // namespace

TEST_CASE("parent motifs repeat and truncate") {
    ParentState p = ParentState::from_motif("--+", 7);
    CHECK(p.label() == "--+--+-");
    CHECK_THROWS_AS(ParentState::from_motif("-x+", 3), InvalidParams);
}

TEST_CASE("seed solution at g = 0") {
    CouplingDistribution d;
    d.values = {7.254};
    ModelParams p = build_model(d, 1.0, kTiltedField);
    CoefficientSet cs = assemble_coefficients(with_g(p, 0.0));

    ParentState parent = ParentState::from_motif("-+", 2);
    ChargeSolution sol = seed_solution(cs, parent);
    const double b0 = std::sqrt(2.0 * 2.23 * 2.23 + 3.162 * 3.162);
    CHECK(sol.r[0] == doctest::Approx(-0.5 * b0).epsilon(1e-14));
    const double b1 = std::sqrt(2.23 * 2.23 + 2.23 * 2.23) / std::sqrt(p.epsilons[1] + 1.0);
    CHECK(sol.r[1] == doctest::Approx(0.5 * b1).epsilon(1e-14));
    CHECK(quad_residual(cs, sol.r).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-14));

    ParentState all_plus = ParentState::from_motif("+", 2);
    ChargeSolution sp = seed_solution(cs, all_plus);
    for (int j = 0; j < 2; ++j) CHECK(sp.r[j] > 0.0);

    // pure z field: bath local fields vanish, labeling ill-defined
    ModelParams pz = build_model(d, 1.0, {0.0, 0.0, 3.0});
    CHECK_THROWS_AS(seed_solution(assemble_coefficients(with_g(pz, 0.0)), parent), DegenerateSeed);
}

TEST_CASE("residual closed forms") {
    std::mt19937 rng(11);
    CoefficientSet cs = random_coeffs(4, rng);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
    CHECK((quad_residual(cs, zero) + cs.constant_terms).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("analytic Jacobian matches central finite differences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        CoefficientSet cs = random_coeffs(3 + trial % 3, rng);
        const int n = cs.params.n_spins;
        Eigen::VectorXd r(n);
        for (int j = 0; j < n; ++j) r[j] = u(rng);
        Eigen::MatrixXd j_an = quad_jacobian(cs, r);
        const double h = 1e-6;
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd rp = r, rm = r;
            rp[k] += h;
            rm[k] -= h;
            Eigen::VectorXd col = (quad_residual(cs, rp) - quad_residual(cs, rm)) / (2.0 * h);
            CHECK((col - j_an.col(k)).norm() <= 1e-6 * (1.0 + j_an.col(k).norm()));
        }
    }
}

TEST_CASE("newton fixed point and error contract") {
    ModelParams p = fig1_style_params(4, 0.3);
    CoefficientSet cs = assemble_coefficients(p);
    ParentState parent = ParentState::from_motif("--+", 4);
    ChargeSolution sol = continue_in_g(p, parent, p.g);
    // already converged: at most one extra iteration, same point
    ChargeSolution again = newton_polish(cs, sol.r, parent);
    CHECK((again.r - sol.r).lpNorm<Eigen::Infinity>() < 1e-10);

    // hopeless guess surfaces NoConvergence instead of silently returning
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(4, 1e6);
    CHECK_THROWS_AS(newton_polish(cs, bad, parent, 1e-12, 3), NoConvergence);
}

TEST_CASE("newton recovers a perturbed ED charge tuple") {
    ModelParams p = fig1_style_params(4, 0.4);
    CoefficientSet cs = assemble_coefficients(p);
    auto ed = ed_analysis(p);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (int pick : {0, 5, 11}) {
        Eigen::VectorXd guess = ed[pick].charge_tuple;
        for (int j = 0; j < 4; ++j) guess[j] += u(rng);
        ChargeSolution sol = newton_polish(cs, guess, ParentState::from_motif("+", 4));
        CHECK((sol.r - ed[pick].charge_tuple).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("continuation: target zero returns the seed") {
    ModelParams p = fig1_style_params(3);
    ParentState parent = ParentState::from_motif("-+", 3);
    ChargeSolution sol = continue_in_g(p, parent, 0.0);
    ChargeSolution seed = seed_solution(assemble_coefficients(with_g(p, 0.0)), parent);
    CHECK((sol.r - seed.r).norm() == 0.0);
}

TEST_CASE("continuation matches ED eigenenergy at N = 6") {
    ModelParams p = fig1_style_params(6, 0.05);
    ParentState parent = ParentState::from_motif("--+--+", 6);
    ChargeSolution sol = continue_in_g(p, parent, p.g);
    auto ed = ed_analysis(p);
    double best = 1e30;
    for (const auto& st : ed) best = std::min(best, std::abs(st.energy - sol.r[0]));
    CHECK(best < 1e-9);
}

TEST_CASE("continuation is path independent on a smooth branch") {
    ModelParams p = fig1_style_params(5);
    ParentState parent = ParentState::from_motif("--+", 5);
    const double g1 = 0.07, g2 = 0.15;
    ChargeSolution direct = continue_in_g(p, parent, g2);
    ChargeSolution stop = continue_in_g(p, parent, g1);
    ChargeSolution resumed = continue_g(p, parent, stop.r, g1, g2);
    CHECK((direct.r - resumed.r).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("continuation is deterministic") {
    ModelParams p = fig1_style_params(5);
    ParentState parent = ParentState::from_motif("--+", 5);
    ChargeSolution a = continue_in_g(p, parent, 0.2);
    ChargeSolution b = continue_in_g(p, parent, 0.2);
    CHECK((a.r - b.r).norm() == 0.0); // bitwise identical
}

TEST_CASE("enumerate_all_states N = 2 matches the analytic XX block spectrum") {
    CouplingDistribution d;
    d.values = {1.0 / std::sqrt(2.0)};
    ModelParams p = build_model(d, std::sqrt(2.0), {0.0, 1e-8, 1.0}); // tiny y field to seed
    // H = Bz Sz0 + Gamma (Sx0 Sx1 + Sy0 Sy1), Bz = 1, Gamma = 1:
    // spectrum {1/2, -1/2, +sqrt(2)/2 * ... } from the 2x2 flip-flop block
    CHECK(p.coupling(1) == doctest::Approx(1.0).epsilon(1e-12));
    auto en = enumerate_all_states(p, p.g);
    REQUIRE(en.failures() == 0);
    std::vector<double> energies;
    for (const auto& e : en.entries) energies.push_back(e.solution.r[0]);
    std::sort(energies.begin(), energies.end());
    const double s2 = std::sqrt(2.0) / 2.0;
    std::vector<double> expect{-s2, -0.5, 0.5, s2};
    for (int i = 0; i < 4; ++i) CHECK(energies[i] == doctest::Approx(expect[i]).epsilon(1e-7));
}

TEST_CASE("enumerate_all_states: completeness and trace identity") {
    ModelParams p = fig1_style_params(4, 0.21);
    auto en = enumerate_all_states(p, p.g);
    REQUIRE(en.failures() == 0);
    REQUIRE(en.entries.size() == 16);
    CHECK(en.near_degenerate.empty());
    // sum over all solutions of r_j vanishes: R_j is traceless
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    for (const auto& e : en.entries) sum += e.solution.r;
    CHECK(sum.lpNorm<Eigen::Infinity>() < 1e-8);
    // every tuple satisfies the quadratic system
    CoefficientSet cs = assemble_coefficients(p);
    for (const auto& e : en.entries)
        CHECK(quad_residual(cs, e.solution.r).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("enumeration guard") {
    ModelParams p = fig1_style_params(5);
    CHECK_THROWS_AS(enumerate_all_states(p, 0.1, 4), TooLarge);
}
