// weylgeo: scenario-driven checks for Weyl structures on charted 4-manifolds.
//
//   weylgeo <verify|surface|twistor|flow> --scenario <path>
//           [--out <dir>] [--resolution N] [--seed S]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 numerical domain error, 4 flow divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "weylgeo/flow.hpp"
#include "weylgeo/scenario.hpp"
#include "weylgeo/twistor.hpp"

using namespace weylgeo;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

struct CheckRow {
    std::string name;
    double max_residual = 0;
    double tolerance = 0;
    bool pass = true;
};

json rows_to_json(const std::vector<CheckRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"name", r.name},
                       {"max_residual", r.max_residual},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
    return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void emit_report(const Scenario& sc, const std::string& name, const json& report) {
    std::filesystem::create_directories(sc.out_dir);
    std::string text = report.dump(2);
    text += "\n";
    write_text(std::filesystem::path(sc.out_dir) / name, text);
    std::cout << text;
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_verify(const Scenario& sc) {
    WeylStructure W = sc.weyl();
    const ChartedManifold4& M = *sc.chart;
    std::mt19937_64 rng(sc.seed);
    std::vector<Vec4<double>> points;
    for (int t = 0; t < 100; ++t) points.push_back(M.sample_point(rng));

    std::vector<CheckRow> rows;
    auto add = [&rows](const std::string& name, double resid, double tol) {
        rows.push_back({name, resid, tol, resid <= tol});
    };

    {
        double worst = 0;
        for (const auto& p : points) worst = std::max(worst, metricity_defect(W, p));
        add("metricity", worst, sc.tol("metricity", 1e-8));
    }
    {
        // the connection must not see the gauge
        double worst = 0;
        VarTable vars = M.vars();
        std::uniform_real_distribution<double> coef(-0.3, 0.3);
        for (int t = 0; t < 5; ++t) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "(%g + %g*%s + %g*%s*%s)*exp(-(%s*%s + %s*%s))", coef(rng),
                          coef(rng), vars.names[0].c_str(), coef(rng), vars.names[1].c_str(),
                          vars.names[2].c_str(), vars.names[0].c_str(), vars.names[0].c_str(),
                          vars.names[3].c_str(), vars.names[3].c_str());
            WeylStructure W2 = gauge_transform(W, parse(buf, vars));
            for (int q = 0; q < 20; ++q) {
                const Vec4<double>& p = points[static_cast<std::size_t>(q * 5 + t)];
                Christoffels<double> A = christoffels_weyl(W, p);
                Christoffels<double> B = christoffels_weyl(W2, p);
                for (int k = 0; k < 4; ++k)
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            worst = std::max(worst, std::abs(A.G[k][i][j] - B.G[k][i][j]));
            }
        }
        add("gauge_invariance", worst, sc.tol("gauge_invariance", 1e-8));
    }
    if (M.has_J) {
        double jc = 0, lee = 0, ddw = 0, idw = 0, iwj = 0;
        WeylStructure Wc = WeylStructure::canonical(sc.chart);
        std::normal_distribution<double> nd(0, 1);
        for (const auto& p : points) {
            MetricAt<double> m = metric_at(M, p);
            jc = std::max(jc, J_compatibility_defect(m.g, J_at(M, p)));
            Vec4<double> th = lee_form_at(M, p);
            FieldJet<double> wj = field_jet([&M](const auto& x) { return omega_at(M, x); }, p);
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    for (int k = j + 1; k < 4; ++k) {
                        Vec4<double> X = vzero4<double>(), Y = vzero4<double>(),
                                     Z = vzero4<double>();
                        X[i] = 1; Y[j] = 1; Z[k] = 1;
                        lee = std::max(lee, std::abs(wedge12(th, wj.value, X, Y, Z) -
                                                     dform3(wj, X, Y, Z)));
                    }
            ddw = std::max(ddw, ddw_residual(W, p));
            Vec4<double> X{nd(rng), nd(rng), nd(rng), nd(rng)};
            Vec4<double> Y{nd(rng), nd(rng), nd(rng), nd(rng)};
            Vec4<double> Z{nd(rng), nd(rng), nd(rng), nd(rng)};
            idw = std::max(idw, std::abs(identity_dwJN_residual(M, p, X, Y, Z)));
            iwj = std::max(iwj, std::abs(identity_weylJN_residual(Wc, p, X, Y, Z)));
        }
        add("J_compatibility", jc, sc.tol("J_compatibility", 1e-10));
        add("lee_defining_identity", lee, sc.tol("lee_identity", 1e-8));
        add("ddw_residual", ddw, sc.tol("ddw", 1e-8));
        add("identity_dwJN", idw, sc.tol("identity", 1e-7));
        add("identity_weylJN", iwj, sc.tol("identity", 1e-7));
    }

    bool pass = true;
    for (const auto& r : rows) pass = pass && r.pass;
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "verify"},
                   {"manifold", sc.manifold_name.empty() ? "inline" : sc.manifold_name},
                   {"seed", sc.seed},
                   {"checks", rows_to_json(rows)},
                   {"pass", pass}};
    emit_report(sc, "verify_report.json", report);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_surface(const Scenario& sc) {
    if (!sc.has_surface) throw ConfigError("surface command needs a surface");
    WeylStructure W = sc.weyl();
    GridImmersion f = sc.build_surface();
    const DomainSpec& dom = f.dom;

    std::string csv = "u_index,v_index,conf_defect_re,conf_defect_im,tau_norm,HD_norm,Hg_norm\n";
    double max_defect = 0, max_tau = 0, max_HD = 0, max_Hg = 0;
    int rank_deficient = 0;
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            std::complex<double> defect = conformality_defect(jet, tp.g);
            Vec4<double> tau = tension_real(jet, tp, f.lambda_at(i, j));
            double tn = norm_g(tp.g, tau);
            MeanCurvature mc = weyl_mean_curvature(jet, tp);
            if (!mc.rank2) ++rank_deficient;
            csv += std::to_string(i) + "," + std::to_string(j) + "," +
                   csv_num(defect.real()) + "," + csv_num(defect.imag()) + "," + csv_num(tn) +
                   "," + csv_num(mc.HD_norm) + "," + csv_num(mc.Hg_norm) + "\n";
            max_defect = std::max(max_defect, std::abs(defect));
            max_tau = std::max(max_tau, tn);
            max_HD = std::max(max_HD, mc.HD_norm);
            max_Hg = std::max(max_Hg, mc.Hg_norm);
        }
    std::filesystem::create_directories(sc.out_dir);
    write_text(std::filesystem::path(sc.out_dir) / "surface_nodes.csv", csv);

    std::vector<CheckRow> rows;
    const SurfaceAnnotations& ann = sc.surface_def.ann;
    if (ann.conformal)
        rows.push_back({"conformality", max_defect, sc.tol("conformality", 1e-8),
                        max_defect <= sc.tol("conformality", 1e-8)});
    if (ann.weyl_minimal)
        rows.push_back({"weyl_minimal", max_HD, sc.tol("weyl_minimal", 1e-8),
                        max_HD <= sc.tol("weyl_minimal", 1e-8)});
    if (ann.minimal)
        rows.push_back({"minimal", max_Hg, sc.tol("minimal", 1e-6),
                        max_Hg <= sc.tol("minimal", 1e-6)});
    bool pass = true;
    for (const auto& r : rows) pass = pass && r.pass;

    json report = {{"schema_version", kSchemaVersion},
                   {"command", "surface"},
                   {"surface", sc.surface_def.name},
                   {"resolution", sc.resolution},
                   {"seed", sc.seed},
                   {"max_conf_defect", max_defect},
                   {"max_tau_norm", max_tau},
                   {"max_HD_norm", max_HD},
                   {"max_Hg_norm", max_Hg},
                   {"rank_deficient_nodes", rank_deficient},
                   {"checks", rows_to_json(rows)},
                   {"pass", pass}};
    emit_report(sc, "surface_report.json", report);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_twistor(const Scenario& sc) {
    if (!sc.has_surface) throw ConfigError("twistor command needs a surface");
    WeylStructure W = sc.weyl();
    GridImmersion f = sc.build_surface();

    HolomorphicityField hp = holomorphicity_residual(f, W, +1.0);
    HolomorphicityField hm = holomorphicity_residual(f, W, -1.0);

    json report = {{"schema_version", kSchemaVersion},
                   {"command", "twistor"},
                   {"surface", sc.surface_def.name},
                   {"resolution", sc.resolution},
                   {"seed", sc.seed},
                   {"holomorphicity_residual_plus", hp.max_residual},
                   {"holomorphicity_residual_minus", hm.max_residual}};

    std::vector<CheckRow> rows;
    if (sc.surface_def.ann.weyl_minimal && sc.surface_def.ann.conformal) {
        double tol = sc.tol("holomorphicity", 1e-7);
        rows.push_back({"lift_plus_holomorphic", hp.max_residual, tol, hp.max_residual <= tol});
        rows.push_back({"lift_minus_holomorphic", hm.max_residual, tol, hm.max_residual <= tol});
    }

    // index bookkeeping needs an ambient J and a closed domain
    if (sc.chart->has_J && f.dom.periodic_u && f.dom.periodic_v) {
        WebsterReport wr = webster_report(f, W);
        json jw = {{"degenerate", wr.degenerate}};
        if (wr.degenerate) {
            jw["label"] = "holomorphic-degenerate";
            jw["reason"] = wr.degenerate_reason;
            jw["c1_ambient"] = {{"value", wr.c1_ambient.value},
                                {"raw", wr.c1_ambient.raw},
                                {"defect", wr.c1_ambient.defect}};
        } else {
            json zeros = json::array();
            for (const auto& z : wr.indices.zeros)
                zeros.push_back({{"section", z.section},
                                 {"u_index", z.i},
                                 {"v_index", z.j},
                                 {"order", z.order},
                                 {"order_ok", z.order_ok}});
            jw["P"] = wr.indices.P;
            jw["Q"] = wr.indices.Q;
            jw["R"] = wr.indices.R;
            jw["chiT"] = wr.chiT;
            jw["chiN"] = wr.chiN;
            jw["c1_ambient"] = {{"value", wr.c1_ambient.value},
                                {"raw", wr.c1_ambient.raw},
                                {"defect", wr.c1_ambient.defect}};
            jw["c1_minus"] = {{"value", wr.c1_minus.value},
                              {"raw", wr.c1_minus.raw},
                              {"defect", wr.c1_minus.defect}};
            jw["web1_lhs"] = wr.web1_lhs;
            jw["web1_rhs"] = wr.web1_rhs;
            jw["web1_holds"] = wr.web1_holds;
            jw["web2_sign_support"] = wr.web2_sign;
            jw["adjunction_slack_plus"] = wr.adjunction_slack_plus;
            jw["adjunction_slack_minus"] = wr.adjunction_slack_minus;
            jw["zeros"] = zeros;
            rows.push_back({"webster_identity_1",
                            static_cast<double>(std::abs(wr.web1_lhs - wr.web1_rhs)), 0.0,
                            wr.web1_holds});
        }
        report["webster"] = jw;
    }

    bool pass = true;
    for (const auto& r : rows) pass = pass && r.pass;
    report["checks"] = rows_to_json(rows);
    report["pass"] = pass;
    emit_report(sc, "twistor_report.json", report);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_flow(const Scenario& sc) {
    if (!sc.has_surface) throw ConfigError("flow command needs a surface");
    WeylStructure W = sc.weyl();
    GridImmersion f = sc.build_surface();
    FlowResult res = run_flow(std::move(f), W, sc.flow);

    std::string traj = "time,tau_inf,tau_l2,energy\n";
    for (const auto& t : res.trajectory)
        traj += csv_num(t.time) + "," + csv_num(t.tau_inf) + "," + csv_num(t.tau_l2) + "," +
                csv_num(t.energy) + "\n";
    std::filesystem::create_directories(sc.out_dir);
    write_text(std::filesystem::path(sc.out_dir) / "flow_trajectory.csv", traj);

    const GridImmersion& g = res.state.f;
    std::string fin = "u_index,v_index";
    for (int k = 0; k < 4; ++k) fin += "," + g.chart->coords[k].name;
    fin += "\n";
    for (int i = 0; i < g.dom.nu; ++i)
        for (int j = 0; j < g.dom.nv; ++j) {
            fin += std::to_string(i) + "," + std::to_string(j);
            for (int k = 0; k < 4; ++k) fin += "," + csv_num(g.samples[k][g.idx(i, j)]);
            fin += "\n";
        }
    write_text(std::filesystem::path(sc.out_dir) / "flow_final.csv", fin);

    bool target_requested = sc.flow.residual_target > 0;
    bool pass = !target_requested || res.converged;
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "flow"},
                   {"surface", sc.surface_def.name},
                   {"resolution", sc.resolution},
                   {"seed", sc.seed},
                   {"steps", res.state.steps_taken},
                   {"time", res.state.time},
                   {"dt", res.state.dt},
                   {"tau_inf", res.state.tau_inf},
                   {"tau_l2", res.state.tau_l2},
                   {"energy", res.state.energy},
                   {"converged", res.converged},
                   {"pass", pass}};
    emit_report(sc, "flow_report.json", report);
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical checks for Weyl structures, twistor lifts and the tension flow"};
    app.require_subcommand(1);

    std::string scenario_path, out_override;
    int resolution_override = 0;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_override, "output directory override");
        cmd->add_option("--resolution", resolution_override, "grid resolution override");
        cmd->add_option("--seed", seed_override, "seed override");
    };
    CLI::App* verify = app.add_subcommand("verify", "connection and structure identities");
    CLI::App* surface = app.add_subcommand("surface", "surface operators over the grid");
    CLI::App* twistor = app.add_subcommand("twistor", "twistor lifts and index bookkeeping");
    CLI::App* flow = app.add_subcommand("flow", "tension flow");
    for (CLI::App* c : {verify, surface, twistor, flow}) add_common(c);

    CLI11_PARSE(app, argc, argv);

    try {
        Scenario sc = load_scenario_file(scenario_path);
        if (!out_override.empty()) sc.out_dir = out_override;
        if (resolution_override > 0) {
            if (resolution_override < 16) throw ConfigError("resolution must be at least 16");
            sc.resolution = resolution_override;
        }
        if (seed_override >= 0) sc.seed = static_cast<std::uint64_t>(seed_override);

        if (app.got_subcommand(verify)) return cmd_verify(sc);
        if (app.got_subcommand(surface)) return cmd_surface(sc);
        if (app.got_subcommand(twistor)) return cmd_twistor(sc);
        return cmd_flow(sc);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const FlowDivergence& e) {
        std::cerr << "flow aborted: " << e.what() << "\n";
        return 4;
    } catch (const EvalDomainError& e) {
        std::cerr << "numerical domain error: " << e.what() << "\n";
        return 3;
    } catch (const GeometryError& e) {
        std::cerr << "numerical domain error: " << e.what() << "\n";
        return 3;
    }
}
