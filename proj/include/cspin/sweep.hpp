#ifndef CSPIN_SWEEP_HPP
#define CSPIN_SWEEP_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ed.hpp"
#include "io.hpp"
#include "observables.hpp"
#include "svg.hpp"

// Configuration-driven scenario runner: g-sweeps, field-angle sweeps, size
// scalings and coupling-distribution comparisons, with CSV/SVG/manifest
// artifacts. Configs are strict JSON: unknown keys are rejected.

namespace cspin {

using nlohmann::json;

enum class Scenario { state_profile, purity_vs_g, angle_sweep, size_sweep, distribution_sweep, ed_check };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::state_profile: return "state_profile";
        case Scenario::purity_vs_g: return "purity_vs_g";
        case Scenario::angle_sweep: return "angle_sweep";
        case Scenario::size_sweep: return "size_sweep";
        case Scenario::distribution_sweep: return "distribution_sweep";
        case Scenario::ed_check: return "ed_check";
    }
    return "?";
}

struct GridSpec {
    double min = 0.0, max = 1.0;
    int points = 2;
    bool log_scale = false;

    std::vector<double> values() const {
        std::vector<double> v(points);
        if (log_scale) {
            const double l0 = std::log(min), l1 = std::log(max);
            for (int i = 0; i < points; ++i)
                v[i] = std::exp(l0 + (l1 - l0) * i / double(points - 1));
        } else {
            for (int i = 0; i < points; ++i)
                v[i] = min + (max - min) * i / double(points - 1);
        }
        return v;
    }
};

struct FieldSpec {
    bool polar = false;
    double magnitude = 0.0, theta = 0.0; // polar form
    std::array<double, 3> components{};  // explicit form

    std::array<double, 3> vec() const { return vec_at(theta); }

    std::array<double, 3> vec_at(double th) const {
        if (!polar && th != theta)
            throw ConfigValueError("angle sweeps need the polar field form");
        if (!polar) return components;
        return {magnitude / std::sqrt(2.0) * std::sin(th),
                magnitude / std::sqrt(2.0) * std::sin(th), magnitude * std::cos(th)};
    }
};

struct DistributionSpec {
    CouplingDistribution::Kind kind = CouplingDistribution::Kind::sqrt_decreasing;
    double total = 1.0;
    std::vector<double> custom_values;
    double jitter = 0.0;

    CouplingDistribution make(int n_spins) const {
        if (kind == CouplingDistribution::Kind::custom) {
            if ((int)custom_values.size() != n_spins - 1)
                throw ConfigValueError("custom distribution needs n_spins - 1 values");
            CouplingDistribution d;
            d.kind = kind;
            d.values = custom_values;
            d.validate();
            return d;
        }
        return make_distribution(kind, n_spins, total, jitter);
    }
};

struct ScenarioConfig {
    Scenario scenario = Scenario::purity_vs_g;
    int n_spins = 0;
    DistributionSpec distribution;
    FieldSpec field;
    std::vector<std::string> parents{"--+"};
    GridSpec g_grid; // in rescaled-coupling (g~) units
    std::vector<double> thetas;
    std::vector<int> sizes;
    std::vector<CouplingDistribution::Kind> dist_kinds;
    bool bath_sz = false;
    double newton_tol = 1e-12;
    double tol_gamma = 1e-6;
    double ed_match_tol = 1e-7;
    json echo; // original document, for the manifest
};

namespace cfg_detail {

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok) throw SchemaError("unknown key '" + path + "/" + it.key() + "'");
    }
}

inline double req_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw SchemaError("missing key '" + path + "/" + key + "'");
    if (!obj[key].is_number()) throw SchemaError("'" + path + "/" + key + "' must be a number");
    return obj[key].get<double>();
}

inline CouplingDistribution::Kind parse_kind(const std::string& s) {
    using K = CouplingDistribution::Kind;
    if (s == "sqrt_decreasing") return K::sqrt_decreasing;
    if (s == "inverse_square") return K::inverse_square;
    if (s == "uniform") return K::uniform;
    if (s == "linear_decreasing") return K::linear_decreasing;
    if (s == "custom") return K::custom;
    throw ConfigValueError("unknown distribution kind '" + s + "'");
}

} // namespace cfg_detail

inline ScenarioConfig parse_config(const std::string& text) {
    using namespace cfg_detail;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("config root must be an object");
    check_keys(doc, "", {"scenario", "n_spins", "distribution", "field", "parents", "g_grid",
                         "thetas", "sizes", "distributions", "bath_sz", "tolerances"});

    ScenarioConfig c;
    c.echo = doc;

    if (!doc.contains("scenario")) throw SchemaError("missing key '/scenario'");
    const std::string sc = doc["scenario"].get<std::string>();
    if (sc == "state_profile") c.scenario = Scenario::state_profile;
    else if (sc == "purity_vs_g") c.scenario = Scenario::purity_vs_g;
    else if (sc == "angle_sweep") c.scenario = Scenario::angle_sweep;
    else if (sc == "size_sweep") c.scenario = Scenario::size_sweep;
    else if (sc == "distribution_sweep") c.scenario = Scenario::distribution_sweep;
    else if (sc == "ed_check") c.scenario = Scenario::ed_check;
    else throw ConfigValueError("unknown scenario '" + sc + "'");

    if (c.scenario == Scenario::size_sweep) {
        if (!doc.contains("sizes")) throw SchemaError("size_sweep requires '/sizes'");
        for (const auto& v : doc["sizes"]) {
            const int n = v.get<int>();
            if (n < 2) throw ConfigValueError("sizes entries must be >= 2");
            c.sizes.push_back(n);
        }
        if (c.sizes.empty()) throw ConfigValueError("'/sizes' must be non-empty");
    } else {
        if (!doc.contains("n_spins")) throw SchemaError("missing key '/n_spins'");
        c.n_spins = doc["n_spins"].get<int>();
        if (c.n_spins < 2) throw ConfigValueError("n_spins must be >= 2");
        if (c.scenario == Scenario::ed_check && c.n_spins > 8)
            throw ConfigValueError("ed_check is limited to n_spins <= 8");
        if (doc.contains("sizes")) throw SchemaError("'/sizes' is only valid for size_sweep");
    }

    if (doc.contains("thetas") != (c.scenario == Scenario::angle_sweep))
        throw SchemaError("'/thetas' is required by and only valid for angle_sweep");
    if (c.scenario == Scenario::angle_sweep) {
        for (const auto& v : doc["thetas"]) {
            const double th = v.get<double>();
            if (!(th >= 0.0 && th <= M_PI / 2))
                throw ConfigValueError("thetas entries must lie in [0, pi/2]");
            c.thetas.push_back(th);
        }
        if (c.thetas.empty()) throw ConfigValueError("'/thetas' must be non-empty");
    }

    if (doc.contains("distributions") != (c.scenario == Scenario::distribution_sweep))
        throw SchemaError("'/distributions' is required by and only valid for distribution_sweep");
    if (c.scenario == Scenario::distribution_sweep) {
        for (const auto& v : doc["distributions"])
            c.dist_kinds.push_back(parse_kind(v.get<std::string>()));
        if (c.dist_kinds.empty()) throw ConfigValueError("'/distributions' must be non-empty");
    }

    if (doc.contains("distribution")) {
        const json& d = doc["distribution"];
        check_keys(d, "/distribution", {"kind", "total", "values", "jitter"});
        if (d.contains("kind")) c.distribution.kind = parse_kind(d["kind"].get<std::string>());
        if (d.contains("total")) {
            c.distribution.total = d["total"].get<double>();
            if (!(c.distribution.total > 0)) throw ConfigValueError("distribution total must be > 0");
        }
        if (d.contains("values"))
            for (const auto& v : d["values"]) c.distribution.custom_values.push_back(v.get<double>());
        if (d.contains("jitter")) {
            c.distribution.jitter = d["jitter"].get<double>();
            if (!(c.distribution.jitter >= 0)) throw ConfigValueError("jitter must be >= 0");
        }
    }

    if (!doc.contains("field")) throw SchemaError("missing key '/field'");
    {
        const json& f = doc["field"];
        if (f.contains("magnitude") || f.contains("theta")) {
            check_keys(f, "/field", {"magnitude", "theta"});
            c.field.polar = true;
            c.field.magnitude = req_number(f, "/field", "magnitude");
            if (!(c.field.magnitude > 0)) throw ConfigValueError("field magnitude must be > 0");
            c.field.theta = c.scenario == Scenario::angle_sweep
                                ? 0.0
                                : req_number(f, "/field", "theta");
            if (!(c.field.theta >= 0.0 && c.field.theta <= M_PI / 2))
                throw ConfigValueError("field theta must lie in [0, pi/2]");
        } else {
            check_keys(f, "/field", {"bx", "by", "bz"});
            c.field.polar = false;
            c.field.components = {req_number(f, "/field", "bx"), req_number(f, "/field", "by"),
                                  req_number(f, "/field", "bz")};
        }
        if (c.scenario == Scenario::angle_sweep && !c.field.polar)
            throw ConfigValueError("angle_sweep requires the polar field form");
    }

    if (doc.contains("parents")) {
        c.parents.clear();
        for (const auto& v : doc["parents"]) {
            const std::string m = v.get<std::string>();
            if (m.empty()) throw ConfigValueError("parent motifs must be non-empty");
            for (char ch : m)
                if (ch != '+' && ch != '-')
                    throw ConfigValueError("parent motifs may only contain '+' and '-'");
            c.parents.push_back(m);
        }
        if (c.parents.empty()) throw ConfigValueError("'/parents' must be non-empty");
    }

    if (!doc.contains("g_grid")) throw SchemaError("missing key '/g_grid'");
    {
        const json& g = doc["g_grid"];
        check_keys(g, "/g_grid", {"min", "max", "points", "scale"});
        c.g_grid.min = req_number(g, "/g_grid", "min");
        c.g_grid.max = req_number(g, "/g_grid", "max");
        c.g_grid.points = g.contains("points") ? g["points"].get<int>() : 2;
        if (g.contains("scale")) {
            const std::string s = g["scale"].get<std::string>();
            if (s == "log") c.g_grid.log_scale = true;
            else if (s != "linear") throw ConfigValueError("g_grid scale must be linear or log");
        }
        if (!(c.g_grid.min >= 0)) throw ConfigValueError("g_grid min must be >= 0");
        if (!(c.g_grid.max > c.g_grid.min)) throw ConfigValueError("g_grid max must exceed min");
        if (c.g_grid.points < 2) throw ConfigValueError("g_grid points must be >= 2");
        if (c.g_grid.log_scale && !(c.g_grid.min > 0))
            throw ConfigValueError("log g_grid requires min > 0");
    }

    c.bath_sz = c.scenario == Scenario::state_profile;
    if (doc.contains("bath_sz")) c.bath_sz = doc["bath_sz"].get<bool>();

    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        check_keys(t, "/tolerances", {"newton", "gamma_dark", "ed_match"});
        if (t.contains("newton")) c.newton_tol = t["newton"].get<double>();
        if (t.contains("gamma_dark")) c.tol_gamma = t["gamma_dark"].get<double>();
        if (t.contains("ed_match")) c.ed_match_tol = t["ed_match"].get<double>();
        if (!(c.newton_tol > 0) || !(c.tol_gamma > 0) || !(c.ed_match_tol > 0))
            throw ConfigValueError("tolerances must be > 0");
    }
    return c;
}

struct SweepRow {
    std::string variant, parent;
    double g = 0.0, g_tilde = 0.0;
    int n_spins = 0;
    Eigen::MatrixXd expectations; // may carry NaN where not computed
    double gamma0 = std::numeric_limits<double>::quiet_NaN();
    double bx_eff = std::numeric_limits<double>::quiet_NaN();
    double by_eff = std::numeric_limits<double>::quiet_NaN();
    int dark = -1; // 1 dark, 0 bright, -1 unclassified
    std::string status = "ok";
};

struct RunResult {
    std::vector<SweepRow> rows;
    json manifest;
    int failed_rows = 0;
};

namespace run_detail {

struct Variant {
    std::string label;
    ModelParams base; // g is overridden per grid point
};

// March one (variant, parent) branch across the g~ grid, warm-starting each
// grid point from the previous one.
inline void march_task(const ScenarioConfig& cfg, const Variant& var, const std::string& motif,
                       const std::vector<double>& gt_grid, std::vector<SweepRow>& out) {
    const ModelParams& base = var.base;
    const int n = base.n_spins;
    const ParentState parent = ParentState::from_motif(motif, n);
    const double bnorm = base.field_norm();
    const double unit_total = with_g(base, 1.0).total_coupling();

    // physical g realizing each requested g~
    std::vector<double> g_phys(gt_grid.size());
    for (std::size_t i = 0; i < gt_grid.size(); ++i)
        g_phys[i] = gt_grid[i] * bnorm / unit_total;

    const std::array<double, 2> bath_deltas{1e-4, 2.5e-5};
    struct Branch {
        ModelParams params;
        Eigen::VectorXd r;
        double g = 0.0;
        bool ok = true;
        std::string error;
    };
    std::vector<Branch> branches;
    branches.push_back({base, {}, 0.0});
    if (cfg.bath_sz)
        for (double d : bath_deltas) branches.push_back({with_delta(base, d), {}, 0.0});
    for (auto& b : branches) {
        try {
            b.r = seed_solution(assemble_coefficients(with_g(b.params, 0.0)), parent).r;
        } catch (const Error& e) {
            b.ok = false;
            b.error = e.what();
        }
    }

    out.resize(gt_grid.size());
    for (std::size_t i = 0; i < gt_grid.size(); ++i) {
        SweepRow& row = out[i];
        row.variant = var.label;
        row.parent = parent.label();
        row.g = g_phys[i];
        row.g_tilde = gt_grid[i];
        row.n_spins = n;
        row.expectations = Eigen::MatrixXd::Constant(n, 3, kExpectationUnset);

        for (auto& b : branches) {
            if (!b.ok) continue;
            try {
                ChargeSolution sol =
                    continue_g(b.params, parent, b.r, b.g, g_phys[i], 16, cfg.newton_tol);
                b.r = sol.r;
                b.g = g_phys[i];
            } catch (const Error& e) {
                b.ok = false;
                b.error = e.what();
            }
        }
        if (!branches[0].ok) {
            row.status = branches[0].error;
            continue;
        }
        try {
            const ModelParams pg = with_g(base, g_phys[i]);
            CoefficientSet cs = assemble_coefficients(pg);
            ChargeSolution sol;
            sol.r = branches[0].r;
            sol.g_value = g_phys[i];
            sol.parent = parent;
            ObservableRecord rec = inplane_and_central_expectations(base, cs, sol);
            row.expectations = rec.expectations;

            if (cfg.bath_sz && branches[1].ok && branches[2].ok) {
                std::array<Eigen::VectorXd, 2> f;
                for (int bi = 0; bi < 2; ++bi) {
                    Branch& b = branches[1 + bi];
                    const double d = bath_deltas[bi];
                    CoefficientSet csd = assemble_coefficients(with_g(b.params, g_phys[i]));
                    ChargeSolution sd;
                    sd.r = b.r;
                    sd.g_value = g_phys[i];
                    sd.parent = parent;
                    Eigen::VectorXd w = sensitivity(csd, sd, FieldParam::Bz0);
                    f[bi].resize(n - 1);
                    for (int j = 1; j < n; ++j)
                        f[bi][j - 1] =
                            std::sqrt(b.params.epsilons[j] + b.params.j_z) * w[j] / std::sqrt(d);
                }
                if ((f[0] - f[1]).lpNorm<Eigen::Infinity>() > 0.05)
                    throw ExtrapolationUnstable("bath <S^z> extrapolation pair disagrees");
                const double h0 = std::sqrt(bath_deltas[0]), h1 = std::sqrt(bath_deltas[1]);
                Eigen::VectorXd bz = (h0 * f[1] - h1 * f[0]) / (h0 - h1);
                for (int j = 1; j < n; ++j) row.expectations(j, 2) = bz[j - 1];
            } else if (cfg.bath_sz) {
                row.status = branches[1].ok ? branches[2].error : branches[1].error;
            }

            row.gamma0 = purity_factor(row.expectations);
            auto eff = effective_field(pg, row.expectations);
            row.bx_eff = eff[0];
            row.by_eff = eff[1];
            row.dark = classify_dark(row.gamma0, cfg.tol_gamma) ? 1 : 0;
        } catch (const Error& e) {
            row.status = e.what();
        }
    }
}

inline std::vector<Variant> build_variants(const ScenarioConfig& cfg) {
    std::vector<Variant> vars;
    switch (cfg.scenario) {
        case Scenario::state_profile:
        case Scenario::purity_vs_g:
        case Scenario::ed_check:
            vars.push_back({"", build_model(cfg.distribution.make(cfg.n_spins), 1.0,
                                            cfg.field.vec())});
            break;
        case Scenario::angle_sweep:
            for (double th : cfg.thetas) {
                char lbl[32];
                std::snprintf(lbl, sizeof lbl, "theta=%.6g", th);
                vars.push_back({lbl, build_model(cfg.distribution.make(cfg.n_spins), 1.0,
                                                 cfg.field.vec_at(th))});
            }
            break;
        case Scenario::size_sweep:
            for (int n : cfg.sizes)
                vars.push_back({"N=" + std::to_string(n),
                                build_model(cfg.distribution.make(n), 1.0, cfg.field.vec())});
            break;
        case Scenario::distribution_sweep:
            for (auto kind : cfg.dist_kinds) {
                DistributionSpec ds = cfg.distribution;
                ds.kind = kind;
                if (kind == CouplingDistribution::Kind::uniform && ds.jitter == 0.0)
                    ds.jitter = 1e-6;
                vars.push_back({to_string(kind),
                                build_model(ds.make(cfg.n_spins), 1.0, cfg.field.vec())});
            }
            break;
    }
    return vars;
}

inline CsvTable rows_to_csv(const std::vector<SweepRow>& rows) {
    int max_n = 0;
    for (const auto& r : rows) max_n = std::max(max_n, r.n_spins);
    CsvTable t;
    t.header = {"variant", "parent", "g", "g_tilde", "gamma0", "b_eff_x", "b_eff_y",
                "classification", "status"};
    for (int j = 0; j < max_n; ++j)
        for (const char* a : {"sx", "sy", "sz"})
            t.header.push_back(std::string(a) + "_" + std::to_string(j));
    auto cell = [](double x) { return std::isnan(x) ? std::string() : format_double(x); };
    for (const auto& r : rows) {
        std::vector<std::string> c{r.variant,
                                   r.parent,
                                   format_double(r.g),
                                   format_double(r.g_tilde),
                                   cell(r.gamma0),
                                   cell(r.bx_eff),
                                   cell(r.by_eff),
                                   r.dark < 0 ? "" : (r.dark ? "dark" : "bright"),
                                   r.status};
        for (int j = 0; j < max_n; ++j)
            for (int a = 0; a < 3; ++a)
                c.push_back(j < r.n_spins ? cell(r.expectations(j, a)) : std::string());
        t.rows.push_back(std::move(c));
    }
    return t;
}

inline void write_plots(const ScenarioConfig& cfg, const std::vector<SweepRow>& rows,
                        const std::string& out_dir) {
    namespace fs = std::filesystem;
    auto series_keys = [&rows]() {
        std::vector<std::string> keys;
        for (const auto& r : rows) {
            const std::string k = r.variant.empty() ? r.parent : r.variant;
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
        return keys;
    };

    if (cfg.scenario == Scenario::state_profile) {
        LinePlot pz, pxy;
        pz.title = "per-spin <Sz> vs rescaled coupling";
        pz.xlabel = "g~";
        pz.ylabel = "<Sz_j>";
        pxy.title = "per-spin <Sx> vs rescaled coupling";
        pxy.xlabel = "g~";
        pxy.ylabel = "<Sx_j>";
        const int n = rows.empty() ? 0 : rows.front().n_spins;
        for (int j = 0; j < n; ++j) {
            std::vector<double> x, yz, yx;
            for (const auto& r : rows) {
                if (r.status != "ok" || r.parent != rows.front().parent) continue;
                x.push_back(r.g_tilde);
                yz.push_back(r.expectations(j, 2));
                yx.push_back(r.expectations(j, 0));
            }
            pz.add(j == 0 ? "central spin" : "", x, yz);
            pxy.add(j == 0 ? "central spin" : "", x, yx);
        }
        write_plot((fs::path(out_dir) / "sz_profile.svg").string(), pz);
        write_plot((fs::path(out_dir) / "sx_profile.svg").string(), pxy);
        return;
    }
    if (cfg.scenario == Scenario::ed_check) return;

    LinePlot pp, pf;
    pp.title = "central spin purity factor";
    pp.xlabel = "g~";
    pp.ylabel = "gamma0";
    pf.title = "effective in-plane field";
    pf.xlabel = "g~";
    pf.ylabel = "|B~_perp|";
    for (const auto& key : series_keys()) {
        std::vector<double> x, yp, yf;
        for (const auto& r : rows) {
            const std::string k = r.variant.empty() ? r.parent : r.variant;
            if (k != key || r.status != "ok") continue;
            x.push_back(r.g_tilde);
            yp.push_back(r.gamma0);
            yf.push_back(std::hypot(r.bx_eff, r.by_eff));
        }
        pp.add(key, x, yp);
        pf.add(key, x, yf);
    }
    write_plot((fs::path(out_dir) / "purity.svg").string(), pp);
    write_plot((fs::path(out_dir) / "effective_field.svg").string(), pf);
}

inline RunResult run_ed_check(const ScenarioConfig& cfg, const Variant& var,
                              const std::vector<double>& gt_grid) {
    RunResult res;
    json checks = json::array();
    const double bnorm = var.base.field_norm();
    const double unit_total = with_g(var.base, 1.0).total_coupling();
    for (double gt : gt_grid) {
        const double g = gt * bnorm / unit_total;
        json entry{{"g_tilde", gt}, {"g", g}};
        try {
            ModelParams pg = with_g(var.base, g);
            auto ed = ed_analysis(pg);
            auto en = enumerate_all_states(pg, g);
            if (en.failures() > 0) throw Error("continuation failures during enumeration");
            auto rep = match_solutions(ed, en.solutions(), cfg.ed_match_tol);
            entry["max_distance"] = rep.max_distance;
            entry["status"] = "ok";
            for (const auto& e : en.entries) {
                SweepRow row;
                row.variant = var.label;
                row.parent = e.parent.label();
                row.g = g;
                row.g_tilde = gt;
                row.n_spins = var.base.n_spins;
                row.expectations =
                    Eigen::MatrixXd::Constant(var.base.n_spins, 3, kExpectationUnset);
                row.status = "ok";
                res.rows.push_back(std::move(row));
            }
        } catch (const Error& e) {
            entry["status"] = e.what();
            SweepRow row;
            row.variant = var.label;
            row.g = g;
            row.g_tilde = gt;
            row.n_spins = var.base.n_spins;
            row.expectations = Eigen::MatrixXd::Constant(var.base.n_spins, 3, kExpectationUnset);
            row.status = e.what();
            res.rows.push_back(std::move(row));
            ++res.failed_rows;
        }
        checks.push_back(std::move(entry));
    }
    res.manifest["ed_checks"] = std::move(checks);
    return res;
}

} // namespace run_detail

inline RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                              int threads = 1, bool verbose = false) {
    namespace fs = std::filesystem;
    using namespace run_detail;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);

    const std::vector<double> gt_grid = cfg.g_grid.values();
    const std::vector<Variant> vars = build_variants(cfg);

    RunResult res;
    if (cfg.scenario == Scenario::ed_check) {
        res = run_ed_check(cfg, vars.front(), gt_grid);
    } else {
        struct Task {
            const Variant* var;
            std::string motif;
            std::vector<SweepRow> rows;
        };
        std::vector<Task> tasks;
        for (const auto& v : vars)
            for (const auto& m : cfg.parents) tasks.push_back({&v, m, {}});

        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) break;
                march_task(cfg, *tasks[i].var, tasks[i].motif, gt_grid, tasks[i].rows);
            }
        };
        if (threads <= 1 || tasks.size() <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int nt = std::min<std::size_t>(threads, tasks.size());
            for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        for (auto& t : tasks)
            for (auto& r : t.rows) {
                if (r.status != "ok") ++res.failed_rows;
                res.rows.push_back(std::move(r));
            }
    }

    CsvTable csv = rows_to_csv(res.rows);
    write_file((fs::path(out_dir) / "data.csv").string(), csv.serialize());
    write_plots(cfg, res.rows, out_dir);

    json statuses = json::array();
    for (const auto& r : res.rows)
        statuses.push_back({{"variant", r.variant},
                            {"parent", r.parent},
                            {"g_tilde", r.g_tilde},
                            {"status", r.status}});
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.manifest["config"] = cfg.echo;
    res.manifest["scenario"] = to_string(cfg.scenario);
    res.manifest["rows"] = std::move(statuses);
    res.manifest["stats"] = {{"row_count", res.rows.size()},
                             {"failed_rows", res.failed_rows},
                             {"elapsed_seconds", elapsed}};
    write_file((fs::path(out_dir) / "manifest.json").string(), res.manifest.dump(2) + "\n");
    if (verbose)
        std::fprintf(stderr, "[cspin] %s: %zu rows, %d failed, %.2fs\n", to_string(cfg.scenario),
                     res.rows.size(), res.failed_rows, elapsed);
    return res;
}

// Bundled desk-scale configurations for the three figure families.
inline std::vector<std::pair<std::string, std::string>> bundled_figure_configs() {
    return {
        {"fig1.json", R"({
  "scenario": "state_profile",
  "n_spins": 42,
  "distribution": {"kind": "sqrt_decreasing", "total": 1.0},
  "field": {"bx": 2.23, "by": 2.23, "bz": 3.162},
  "parents": ["--+"],
  "g_grid": {"min": 0, "max": 12, "points": 100},
  "bath_sz": true
})"},
        {"fig2.json", R"({
  "scenario": "purity_vs_g",
  "n_spins": 12,
  "distribution": {"kind": "sqrt_decreasing", "total": 1.0},
  "field": {"bx": 2.23, "by": 2.23, "bz": 3.162},
  "parents": ["--+", "---++", "----+++", "+-"],
  "g_grid": {"min": 0, "max": 24, "points": 120}
})"},
        {"fig3a.json", R"({
  "scenario": "angle_sweep",
  "n_spins": 12,
  "distribution": {"kind": "sqrt_decreasing", "total": 1.0},
  "field": {"magnitude": 4.466},
  "thetas": [0.3926990816987241, 0.7853981633974483, 1.1780972450961724],
  "parents": ["--+"],
  "g_grid": {"min": 0, "max": 24, "points": 120}
})"},
        {"fig3b.json", R"({
  "scenario": "size_sweep",
  "sizes": [8, 12, 16, 20],
  "distribution": {"kind": "sqrt_decreasing", "total": 1.0},
  "field": {"magnitude": 4.466, "theta": 0.7853981633974483},
  "parents": ["--+"],
  "g_grid": {"min": 0, "max": 24, "points": 120}
})"},
        {"fig3c.json", R"({
  "scenario": "distribution_sweep",
  "n_spins": 42,
  "distribution": {"total": 1.0},
  "field": {"magnitude": 4.466, "theta": 0.7853981633974483},
  "distributions": ["sqrt_decreasing", "linear_decreasing", "inverse_square"],
  "parents": ["--+"],
  "g_grid": {"min": 0, "max": 24, "points": 120}
})"}};
}

inline int reproduce_figures(const std::string& out_root, int threads = 1,
                                   bool verbose = false) {
    namespace fs = std::filesystem;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const long stamp = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    const fs::path root = fs::path(out_root) / ("figures-" + std::to_string(stamp));
    fs::create_directories(root);
    int failures = 0;
    for (const auto& [name, text] : bundled_figure_configs()) {
        const fs::path dir = root / fs::path(name).stem();
        fs::create_directories(dir);
        write_file((dir / name).string(), text);
        ScenarioConfig cfg = parse_config(text);
        RunResult rr = run_scenario(cfg, dir.string(), threads, verbose);
        failures += rr.failed_rows;
    }
    return failures;
}

} // namespace cspin

#endif
