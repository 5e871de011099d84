// Acceptance suite: one pass/fail line per criterion, fixed tolerances,
// wall-clock budgets enforced. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "weylgeo/flow.hpp"
#include "weylgeo/twistor.hpp"

using namespace weylgeo;

namespace {

constexpr double kPi = 3.14159265358979323846;
const VarTable kUV{{"u", "v"}};

struct Criterion {
    int id;
    std::string label;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

Vec4<double> random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> d(0, 1);
    Vec4<double> v{d(rng), d(rng), d(rng), d(rng)};
    double n = norm(v);
    for (auto& c : v) c /= n;
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridImmersion perturbed_clifford(double amp, int res, ChartPtr chart) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "0.78539816339744831 + %.17g*sin(2*u)*cos(v)", amp);
    std::array<Expr, 4> comps = {parse("2*u", kUV), parse(buf, kUV), parse("v", kUV),
                                 parse("-v", kUV)};
    DomainSpec dom{res, res, 0, 0, kPi, 2 * kPi, true, true};
    return GridImmersion::from_exprs(std::move(chart), dom, comps);
}

// --- criterion bodies --------------------------------------------------------

bool crit_metricity(std::string& detail) {
    std::mt19937_64 rng(1);
    double worst = 0;
    for (const auto& e : all_entries()) {
        WeylStructure W = e.natural_weyl();
        for (int t = 0; t < 100; ++t)
            worst = std::max(worst, metricity_defect(W, e.chart->sample_point(rng)));
    }
    detail = "max defect " + fmt(worst);
    return worst <= 1e-8;
}

bool crit_gauge_invariance(std::string& detail) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> coef(-0.3, 0.3);
    double worst = 0;
    for (const auto& e : all_entries()) {
        WeylStructure W = e.natural_weyl();
        VarTable vars = e.chart->vars();
        for (int t = 0; t < 20; ++t) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "(%g + %g*%s + %g*%s*%s)*exp(-(%s*%s + %s*%s))",
                          coef(rng), coef(rng), vars.names[0].c_str(), coef(rng),
                          vars.names[1].c_str(), vars.names[2].c_str(), vars.names[0].c_str(),
                          vars.names[0].c_str(), vars.names[3].c_str(), vars.names[3].c_str());
            WeylStructure W2 = gauge_transform(W, parse(buf, vars));
            for (int q = 0; q < 10; ++q) {
                Vec4<double> p = e.chart->sample_point(rng);
                Christoffels<double> A = christoffels_weyl(W, p);
                Christoffels<double> B = christoffels_weyl(W2, p);
                for (int k = 0; k < 4; ++k)
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            worst = std::max(worst, std::abs(A.G[k][i][j] - B.G[k][i][j]));
            }
        }
    }
    detail = "max Christoffel gap " + fmt(worst);
    return worst <= 1e-8;
}

bool crit_lee_forms(std::string& detail) {
    std::mt19937_64 rng(3);
    double worst = 0;
    CatalogEntry hopf = hopf_surface();
    for (int t = 0; t < 100; ++t) {
        Vec4<double> th = lee_form_at(*hopf.chart, hopf.chart->sample_point(rng));
        worst = std::max(worst, std::abs(th[0] - 1.0));
        for (int i = 1; i < 4; ++i) worst = std::max(worst, std::abs(th[i]));
    }
    double F1 = 1.0, F2 = 2.0;
    CatalogEntry pb = principal_bundle(F1, F2);
    for (int t = 0; t < 100; ++t) {
        Vec4<double> th = lee_form_at(*pb.chart, pb.chart->sample_point(rng));
        worst = std::max(worst, std::abs(th[0] + F2));
        worst = std::max(worst, std::abs(th[1] - F1));
        worst = std::max(worst, std::abs(th[2]));
        worst = std::max(worst, std::abs(th[3]));
    }
    detail = "max componentwise gap " + fmt(worst);
    return worst <= 1e-8;
}

bool crit_identity_suite(std::string& detail) {
    std::mt19937_64 rng(4);
    double worst = 0;
    for (const auto& e : all_entries()) {
        if (!e.hermitian) continue;
        WeylStructure W = WeylStructure::canonical(e.chart);
        for (int t = 0; t < 100; ++t) {
            Vec4<double> p = e.chart->sample_point(rng);
            Vec4<double> X = random_unit(rng), Y = random_unit(rng), Z = random_unit(rng);
            worst = std::max(worst, std::abs(identity_dwJN_residual(*e.chart, p, X, Y, Z)));
            worst = std::max(worst, std::abs(identity_weylJN_residual(W, p, X, Y, Z)));
        }
    }
    detail = "max residual " + fmt(worst);
    return worst <= 1e-7;
}

bool crit_weyl_minimality(std::string& detail) {
    CatalogEntry hopf = hopf_surface();
    CatalogEntry pb = principal_bundle(1.0, 2.0);
    WeylStructure Wh = WeylStructure::canonical(hopf.chart);
    WeylStructure Wp = WeylStructure::canonical(pb.chart);
    auto max_HD = [](const CatalogEntry& e, const WeylStructure& W, const char* name,
                     double* max_Hg = nullptr) {
        GridImmersion f = e.build_surface(*e.find_surface(name), 64);
        double worst = 0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                if (!f.dom.interior(i, j)) continue;
                SurfaceJet jet = f.jet_fd(i, j);
                TargetPoint tp = target_point(W, jet.f);
                MeanCurvature mc = weyl_mean_curvature(jet, tp);
                worst = std::max(worst, mc.HD_norm);
                if (max_Hg) *max_Hg = std::max(*max_Hg, mc.Hg_norm);
            }
        return worst;
    };
    double fiber = max_HD(hopf, Wh, "fiber_torus");
    double cliff = max_HD(hopf, Wh, "clifford_torus");
    double swept = max_HD(pb, Wp, "swept_torus");
    // discriminating control: minimal but not Weyl-minimal
    double sphere_Hg = 0;
    GridImmersion sph = hopf.build_surface(*hopf.find_surface("great_sphere"), 64);
    double sphere_HD_dev = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            if (!sph.dom.interior(i, j)) continue;
            SurfaceJet jet = sph.jet_fd(i, j);
            TargetPoint tp = target_point(Wh, jet.f);
            MeanCurvature mc = weyl_mean_curvature(jet, tp);
            sphere_Hg = std::max(sphere_Hg, mc.Hg_norm);
            sphere_HD_dev = std::max(sphere_HD_dev, std::abs(mc.HD_norm - 0.5));
        }
    detail = "fiber " + fmt(fiber) + ", clifford " + fmt(cliff) + ", swept " + fmt(swept) +
             ", control Hg " + fmt(sphere_Hg) + ", |HD - 0.5| " + fmt(sphere_HD_dev);
    return fiber <= 1e-8 && cliff <= 1e-8 && swept <= 1e-7 && sphere_Hg <= 1e-6 &&
           sphere_HD_dev <= 1e-3;
}

bool crit_flat_cover(std::string& detail) {
    std::mt19937_64 rng(6);
    CatalogEntry cover = hopf_cover();
    double worst = 0;
    for (int t = 0; t < 100; ++t)
        worst = std::max(worst,
                         max_abs_riemann(riemann_lc(*cover.chart, cover.chart->sample_point(rng))));
    detail = "max curvature component " + fmt(worst);
    return worst <= 1e-8;
}

bool crit_tension(std::string& detail) {
    double worst_gap = 0, worst_cov = 0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> du(-0.7, 0.7);
    for (const auto& e : all_entries()) {
        WeylStructure W = e.natural_weyl();
        for (const auto& sdef : e.surfaces) {
            GridImmersion f = e.build_surface(sdef, 32);
            for (int i = 0; i < 32; i += 3)
                for (int j = 0; j < 32; j += 3) {
                    if (!f.dom.interior(i, j)) continue;
                    SurfaceJet jet = f.jet_ad(i, j);
                    TargetPoint tp = target_point(W, jet.f);
                    double lam = f.lambda_at(i, j);
                    Vec4<double> tr = tension_real(jet, tp, lam);
                    CVec4 tc = tension_complex(jet, tp, lam);
                    for (int k = 0; k < 4; ++k) {
                        worst_gap = std::max(worst_gap, std::abs(tc[k].real() - tr[k]));
                        worst_gap = std::max(worst_gap, std::abs(tc[k].imag()));
                    }
                    double u = du(rng);
                    Vec4<double> tu = tension_real(jet, tp, lam + u);
                    for (int k = 0; k < 4; ++k)
                        worst_cov =
                            std::max(worst_cov, std::abs(tu[k] - std::exp(-2 * u) * tr[k]));
                }
        }
    }
    detail = "route gap " + fmt(worst_gap) + ", covariance gap " + fmt(worst_cov);
    return worst_gap <= 1e-9 && worst_cov <= 1e-12;
}

bool crit_twistor_correspondence(std::string& detail) {
    double worst_harmonic = 0;
    double control_min = 1e300;
    for (const auto& e : all_entries()) {
        WeylStructure W = e.natural_weyl();
        for (const auto& sdef : e.surfaces) {
            if (!sdef.ann.conformal) continue;
            GridImmersion f = e.build_surface(sdef, 64);
            for (double sign : {+1.0, -1.0}) {
                HolomorphicityField res = holomorphicity_residual(f, W, sign);
                if (sdef.ann.weyl_minimal)
                    worst_harmonic = std::max(worst_harmonic, res.max_residual);
                else
                    control_min = std::min(control_min, res.max_residual);
            }
        }
    }
    detail = "harmonic max " + fmt(worst_harmonic) + ", control min " + fmt(control_min);
    return worst_harmonic <= 1e-7 && control_min >= 1e-2;
}

bool crit_webster(std::string& detail) {
    CatalogEntry flat = flat_kahler();
    WeylStructure W = WeylStructure::canonical(flat.chart);
    bool ok = true;
    std::string sign_record;
    int c1_prev = 0, c1m_prev = 0;
    for (int res : {64, 128}) {
        for (const char* name : {"lagrangian_torus", "complex_points_graph"}) {
            GridImmersion f = flat.build_surface(*flat.find_surface(name), res);
            WebsterReport rep = webster_report(f, W);
            if (rep.degenerate) { ok = false; continue; }
            ok = ok && rep.web1_holds;
            // winding-count route vs curvature route for both bundles
            int c1_windings = rep.indices.Q - rep.indices.P;
            int c1m_windings = rep.indices.P + rep.indices.Q + 2 * rep.indices.R;
            ok = ok && (std::abs(rep.c1_ambient.value - c1_windings) == 0 ||
                        std::abs(rep.c1_ambient.value + c1_windings) == 0);
            ok = ok && rep.c1_minus.value == c1m_windings;
            ok = ok && rep.c1_ambient.defect <= 0.05 && rep.c1_minus.defect <= 0.05;
            if (std::string(name) == "complex_points_graph") {
                if (res == 64) {
                    c1_prev = rep.c1_ambient.value;
                    c1m_prev = rep.c1_minus.value;
                    sign_record = rep.web2_sign;
                } else {
                    ok = ok && rep.c1_ambient.value == c1_prev &&
                         rep.c1_minus.value == c1m_prev;
                }
            }
        }
    }
    ok = ok && !sign_record.empty();
    detail = "web2 sign record: " + sign_record;
    return ok;
}

bool crit_flow(std::string& detail) {
    CatalogEntry hopf = hopf_surface();
    WeylStructure W = WeylStructure::canonical(hopf.chart);
    GridImmersion f = perturbed_clifford(0.05, 32, hopf.chart);
    FlowOptions opt;
    opt.method = FlowMethod::RK4;
    opt.max_steps = 10000;
    opt.residual_target = 1e-4;
    FlowResult res;
    try {
        res = run_flow(std::move(f), W, opt);
    } catch (const FlowDivergence& e) {
        detail = std::string("aborted: ") + e.what();
        return false;
    }
    if (!res.converged) {
        detail = "no convergence in 10^4 steps (tau_inf " + fmt(res.state.tau_inf) + ")";
        return false;
    }
    // distance to the reference torus after aligning domain phases
    const GridImmersion& g = res.state.f;
    auto dist_for = [&](double a, double b) {
        double worst = 0;
        for (int i = 0; i < g.dom.nu; ++i)
            for (int j = 0; j < g.dom.nv; ++j) {
                double u = g.dom.u(i), v = g.dom.v(j);
                Vec4<double> ref{2 * (u + a), kPi / 4, v + b, -(v + b)};
                Vec4<double> cur = g.node_value(i, j);
                double d2 = 0;
                for (int k = 0; k < 4; ++k) {
                    double d = cur[k] - ref[k];
                    const CoordSpec& c = g.chart->coords[k];
                    if (c.periodic) d = std::remainder(d, c.period);
                    d2 += d * d;
                }
                worst = std::max(worst, std::sqrt(d2));
            }
        return worst;
    };
    double best = 1e300, best_a = 0, best_b = 0;
    for (int ia = 0; ia < 64; ++ia)
        for (int ib = 0; ib < 64; ++ib) {
            double a = kPi * ia / 64, b = 2 * kPi * ib / 64;
            double d = dist_for(a, b);
            if (d < best) { best = d; best_a = a; best_b = b; }
        }
    double step_a = kPi / 64, step_b = 2 * kPi / 64;
    for (int it = 0; it < 24; ++it) {
        step_a /= 2;
        step_b /= 2;
        for (double da : {-step_a, 0.0, step_a})
            for (double db : {-step_b, 0.0, step_b}) {
                double d = dist_for(best_a + da, best_b + db);
                if (d < best) { best = d; best_a += da; best_b += db; }
            }
    }
    detail = "steps " + std::to_string(res.state.steps_taken) + ", tau_inf " +
             fmt(res.state.tau_inf) + ", aligned distance " + fmt(best);
    return res.state.tau_inf <= 1e-4 && best <= 1e-3;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "Weyl-connection metricity on every catalog chart", 5.0, crit_metricity},
        {2, "gauge invariance of the Weyl connection", 10.0, crit_gauge_invariance},
        {3, "Lee forms of the Hopf and principal-bundle structures", 5.0, crit_lee_forms},
        {4, "Nijenhuis / nabla J identity suite", 10.0, crit_identity_suite},
        {5, "Weyl-minimality of the reference surfaces", 30.0, crit_weyl_minimality},
        {6, "flatness of the cover metric", 5.0, crit_flat_cover},
        {7, "tension consistency and conformal covariance", 10.0, crit_tension},
        {8, "twistor correspondence at numerical precision", 30.0, crit_twistor_correspondence},
        {9, "Webster identities and Chern-number cross-check", 60.0, crit_webster},
        {10, "tension flow convergence to the Clifford torus", 120.0, crit_flow},
    };

    int failures = 0;
    for (auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_budget = secs < c.budget_seconds;
        bool pass = ok && in_budget;
        std::printf("[%s] %2d. %s (%s; %.2f s of %.0f s budget)\n", pass ? "PASS" : "FAIL",
                    c.id, c.label.c_str(), detail.c_str(), secs, c.budget_seconds);
        if (!pass) ++failures;
    }
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
