// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the oracle equivalence checks and the dark-state
// phenomenology markers at pinned tolerances.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "cspin/cspin.hpp"

using namespace cspin;
using run_detail::Variant;
using run_detail::march_task;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!pass) ++g_failures;
}

template <typename F>
void guarded(int id, const char* name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::array<double, 3> kFig1Field{2.23, 2.23, 3.162};
constexpr double kFieldNorm = 4.466; // |B| used for the polar configurations

std::array<double, 3> polar_field(double theta, double b = kFieldNorm) {
    return {b / std::sqrt(2.0) * std::sin(theta), b / std::sqrt(2.0) * std::sin(theta),
            b * std::cos(theta)};
}

ModelParams sqrt_shape_model(int n, const std::array<double, 3>& field) {
    return build_model(make_distribution(CouplingDistribution::Kind::sqrt_decreasing, n, 1.0), 1.0,
                       field);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / double(n - 1);
    return v;
}

std::vector<SweepRow> purity_march(const ModelParams& base, const std::string& motif,
                                   const std::vector<double>& gt_grid, bool with_bath = false) {
    ScenarioConfig cfg;
    cfg.bath_sz = with_bath;
    std::vector<SweepRow> rows;
    march_task(cfg, Variant{"", base}, motif, gt_grid, rows);
    return rows;
}

double dip_depth(const std::vector<SweepRow>& rows) {
    double mn = 0.25;
    for (const auto& r : rows)
        if (r.status == "ok") mn = std::min(mn, r.gamma0);
    return 0.25 - mn;
}

// rows gathered across criteria for the universal-invariant sweep (11)
std::vector<SweepRow> g_all_rows;

void collect(const std::vector<SweepRow>& rows) {
    g_all_rows.insert(g_all_rows.end(), rows.begin(), rows.end());
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double worst = 0.0;
    for (double delta : {0.1, 1.0}) {
        for (int draw = 0; draw < 3; ++draw) {
            ModelParams p = with_delta(sqrt_shape_model(4, {u(rng), u(rng), u(rng)}), delta);
            p.g = 0.3 + u(rng);
            std::vector<Op> r;
            for (int j = 0; j < 4; ++j) r.push_back(build_charge(p, j, ChargeForm::generic_rg));
            for (int j = 0; j < 4; ++j)
                for (int k = j + 1; k < 4; ++k) {
                    const double c = (r[j] * r[k] - r[k] * r[j]).norm() / (r[j].norm() * r[k].norm());
                    worst = std::max(worst, c);
                }
        }
    }
    const double el = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel commutator %.2e, %.2fs", worst, el);
    report(1, "charge commutation", worst <= 1e-10 && el < 5.0, buf);
}

void criterion_2() {
    ModelParams p = sqrt_shape_model(4, kFig1Field);
    p.g = 0.6 * p.g;
    Op h = build_hamiltonian(p);
    double worst = 0.0;
    for (int j = 0; j < 4; ++j) {
        Op r = build_charge(p, j, ChargeForm::xx_limit);
        worst = std::max(worst, (h * r - r * h).norm() / (h.norm() * std::max(r.norm(), 1.0)));
    }
    auto dev = [&](double d) {
        return (build_charge(with_delta(p, d), 0, ChargeForm::generic_rg) - h).norm() / h.norm();
    };
    const double d2 = dev(1e-2), d4 = dev(1e-4);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel [H,R] %.2e, limit ratio %.1f", worst, d2 / d4);
    report(2, "xx-limit charges", worst <= 1e-10 && d4 <= d2 / 5.0, buf);
}

void criterion_3() {
    ModelParams p = sqrt_shape_model(5, kFig1Field);
    p.g = 0.15; // generic tilted-field point, moderate coupling
    CoefficientSet cs = assemble_coefficients(p);
    double worst = 0.0;
    for (const auto& st : ed_analysis(p))
        worst = std::max(worst, quad_residual(cs, st.charge_tuple).lpNorm<Eigen::Infinity>());
    char buf[128];
    std::snprintf(buf, sizeof buf, "max Eq-residual %.2e", worst);
    report(3, "quadratic relations (ED)", worst <= 1e-8, buf);
}

void criterion_4() {
    bool ok = true;
    std::string detail;
    for (int n : {4, 5}) {
        ModelParams p = sqrt_shape_model(n, kFig1Field);
        p.g = 0.12;
        auto en = enumerate_all_states(p, p.g);
        auto ed = ed_analysis(p);
        if (en.failures() != 0) {
            ok = false;
            detail += "continuation failures at N=" + std::to_string(n) + "; ";
            continue;
        }
        double max_dist = 0.0;
        try {
            max_dist = match_solutions(ed, en.solutions(), 1e-7).max_distance;
        } catch (const MatchFailure& e) {
            ok = false;
            detail += e.what();
            continue;
        }
        std::vector<double> es, rs;
        for (const auto& st : ed) es.push_back(st.energy);
        for (const auto& e : en.entries) rs.push_back(e.solution.r[0]);
        std::sort(es.begin(), es.end());
        std::sort(rs.begin(), rs.end());
        double spec_dist = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i)
            spec_dist = std::max(spec_dist, std::abs(es[i] - rs[i]));
        char buf[96];
        std::snprintf(buf, sizeof buf, "N=%d tuple %.1e spectrum %.1e; ", n, max_dist, spec_dist);
        detail += buf;
        ok = ok && max_dist <= 1e-7 && spec_dist <= 1e-9;
    }
    report(4, "solver/ED equivalence", ok, detail);
}

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    ModelParams p = sqrt_shape_model(6, polar_field(M_PI / 4));
    const double unit = with_g(p, 1.0).total_coupling();
    double worst_xy = 0.0, worst_bz = 0.0;
    for (double gt : linspace(0.4, 8.0, 10)) {
        const double g = gt * p.field_norm() / unit;
        ModelParams pg = with_g(p, g);
        auto states = ed_analysis(pg);
        ParentState parent = ParentState::from_motif("--+", 6);
        ChargeSolution sol = continue_in_g(p, parent, g);
        double best = 1e30;
        std::size_t bi = 0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double dd = (states[i].charge_tuple - sol.r).lpNorm<Eigen::Infinity>();
            if (dd < best) {
                best = dd;
                bi = i;
            }
        }
        ObservableRecord rec = compute_record(p, parent, g, true);
        collect({[&] {
            SweepRow row;
            row.n_spins = 6;
            row.g_tilde = gt;
            row.expectations = rec.expectations;
            row.gamma0 = rec.gamma0;
            return row;
        }()});
        for (int j = 0; j < 6; ++j) {
            worst_xy = std::max(worst_xy, std::abs(rec.expectations(j, 0) -
                                                   states[bi].expectations(j, 0)));
            worst_xy = std::max(worst_xy, std::abs(rec.expectations(j, 1) -
                                                   states[bi].expectations(j, 1)));
            if (j == 0)
                worst_xy = std::max(worst_xy, std::abs(rec.expectations(0, 2) -
                                                       states[bi].expectations(0, 2)));
            else
                worst_bz = std::max(worst_bz, std::abs(rec.expectations(j, 2) -
                                                       states[bi].expectations(j, 2)));
        }
    }
    const double el = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "in-plane/central %.1e bath-z %.1e, %.1fs", worst_xy, worst_bz,
                  el);
    report(5, "observable equivalence", worst_xy <= 1e-6 && worst_bz <= 1e-4 && el < 60.0, buf);
}

std::vector<double> dip_and_tail_grid() {
    std::vector<double> g = linspace(0.0, 10.0, 41); // dip region, step 0.25
    for (double v = 12.0; v <= 100.0; v += 2.0) g.push_back(v);
    return g;
}

void criterion_6() {
    ModelParams p = sqrt_shape_model(12, kFig1Field);
    auto rows = purity_march(p, "--+", dip_and_tail_grid());
    collect(rows);
    bool ok = true;
    std::string detail;
    for (const auto& r : rows)
        if (r.status != "ok") {
            ok = false;
            detail += "row failure; ";
        }
    const double g0 = rows.front().gamma0;
    const double mn = 0.25 - dip_depth(rows);
    const double tail = rows.back().gamma0;
    ok = ok && std::abs(g0 - 0.25) <= 1e-9 && mn < 0.25 - 1e-3 && tail >= 0.25 - 1e-4;
    // dark recovery correlates with in-plane cancellation
    int checked = 0;
    double worst_b = 0.0;
    for (const auto& r : rows) {
        if (r.status != "ok" || r.g_tilde <= 1.0 || r.gamma0 < 0.25 - 1e-6) continue;
        ++checked;
        worst_b = std::max(worst_b, std::hypot(r.bx_eff, r.by_eff) / p.field_norm());
    }
    ok = ok && checked > 0 && worst_b <= 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gamma0(0)=%.10f min=%.5f tail=%.7f, %d dark pts, max |B~_perp|/|B| %.1e", g0, mn,
                  tail, checked, worst_b);
    report(6, "dark-state reemergence", ok, detail + buf);
}

void criterion_7() {
    ModelParams p = sqrt_shape_model(8, polar_field(M_PI / 4));
    auto rows = purity_march(p, "--+", linspace(0.0, 4.0, 41));
    collect(rows);
    const double bound = 2.0 * std::sin(M_PI / 4);
    bool ok = true;
    int below = 0;
    for (const auto& r : rows) {
        if (r.status != "ok") ok = false;
        if (r.g_tilde >= bound) continue;
        ++below;
        if (std::hypot(r.bx_eff, r.by_eff) / p.field_norm() <= 1e-3) ok = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d grid points below g~ = %.3f, none cancelled", below, bound);
    report(7, "cancellation threshold", ok && below > 0, buf);
}

void criterion_8() {
    std::vector<double> dips;
    std::string detail = "dips:";
    for (double th : {M_PI / 8, M_PI / 4, 3 * M_PI / 8}) {
        auto rows = purity_march(sqrt_shape_model(12, polar_field(th)), "--+",
                                 linspace(0.0, 30.0, 61));
        collect(rows);
        dips.push_back(dip_depth(rows));
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.5f", dips.back());
        detail += buf;
    }
    report(8, "angle monotonicity", dips[0] < dips[1] && dips[1] < dips[2], detail);
}

void criterion_9() {
    std::vector<double> dips;
    std::string detail = "dips:";
    for (int n : {8, 12, 16, 20}) {
        auto rows =
            purity_march(sqrt_shape_model(n, polar_field(M_PI / 4)), "--+", linspace(0.0, 30.0, 61));
        collect(rows);
        dips.push_back(dip_depth(rows));
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.5f", dips.back());
        detail += buf;
    }
    bool ok = true;
    for (std::size_t i = 1; i < dips.size(); ++i) ok = ok && dips[i] < dips[i - 1];
    report(9, "size scaling", ok, detail);
}

void criterion_10() {
    const auto grid = linspace(0.0, 30.0, 61);
    std::array<std::vector<SweepRow>, 2> curves;
    int idx = 0;
    for (int n : {14, 20}) {
        ModelParams p = build_model(
            make_distribution(CouplingDistribution::Kind::inverse_square, n, 1.0), 1.0,
            polar_field(M_PI / 4));
        curves[idx++] = purity_march(p, "--+", grid);
    }
    collect(curves[0]);
    collect(curves[1]);
    double sup = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curves[0][i].status != "ok" || curves[1][i].status != "ok") ok = false;
        sup = std::max(sup, std::abs(curves[0][i].gamma0 - curves[1][i].gamma0));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "sup-norm difference %.5f", sup);
    report(10, "distribution saturation", ok && sup < 0.01, buf);
}

void criterion_11() {
    double max_gamma = 0.0, min_gamma = 1.0, max_norm = 0.0, max_asym = 0.0;
    long checked = 0;
    for (const auto& r : g_all_rows) {
        if (r.status != "ok" || r.expectations.size() == 0) continue;
        ++checked;
        if (!std::isnan(r.gamma0)) {
            max_gamma = std::max(max_gamma, r.gamma0);
            min_gamma = std::min(min_gamma, r.gamma0);
        }
        for (int j = 0; j < r.expectations.rows(); ++j) {
            Eigen::Vector3d v = r.expectations.row(j);
            for (int a = 0; a < 3; ++a)
                if (std::isnan(v[a])) v[a] = 0.0;
            max_norm = std::max(max_norm, v.norm());
            // every configuration here has B0x = B0y
            max_asym = std::max(max_asym, std::abs(r.expectations(j, 0) - r.expectations(j, 1)));
        }
    }
    const bool ok = checked > 0 && min_gamma >= 0.0 && max_gamma <= 0.25 + 1e-9 &&
                    max_norm <= 0.5 + 1e-9 && max_asym <= 1e-9;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%ld rows: gamma0 in [%.2e, 0.25%+.1e], max |<S>| %.12f, max x/y asym %.1e",
                  checked, min_gamma, max_gamma - 0.25, max_norm, max_asym);
    report(11, "universal invariants", ok, buf);
}

void criterion_12() {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg = parse_config(R"({
      "scenario": "state_profile",
      "n_spins": 42,
      "distribution": {"kind": "sqrt_decreasing", "total": 1.0},
      "field": {"bx": 2.23, "by": 2.23, "bz": 3.162},
      "parents": ["--+"],
      "g_grid": {"min": 0, "max": 12, "points": 100},
      "bath_sz": true
    })");
    const fs::path dir = fs::temp_directory_path() / "cspin_acceptance_fig1";
    fs::remove_all(dir);
    RunResult rr = run_scenario(cfg, dir.string());
    collect(rr.rows);
    const double el = seconds_since(t0);
    fs::remove_all(dir);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu rows, %d failed, %.1fs", rr.rows.size(), rr.failed_rows,
                  el);
    report(12, "fig-1 scale performance", rr.failed_rows == 0 && rr.rows.size() == 100 && el < 60.0,
           buf);
}

} // namespace

int main() {
    guarded(1, "charge commutation", criterion_1);
    guarded(2, "xx-limit charges", criterion_2);
    guarded(3, "quadratic relations (ED)", criterion_3);
    guarded(4, "solver/ED equivalence", criterion_4);
    guarded(5, "observable equivalence", criterion_5);
    guarded(6, "dark-state reemergence", criterion_6);
    guarded(7, "cancellation threshold", criterion_7);
    guarded(8, "angle monotonicity", criterion_8);
    guarded(9, "size scaling", criterion_9);
    guarded(10, "distribution saturation", criterion_10);
    guarded(11, "universal invariants", criterion_11);
    guarded(12, "fig-1 scale performance", criterion_12);
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
