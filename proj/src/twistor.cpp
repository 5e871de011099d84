#include "weylgeo/twistor.hpp"

#include <algorithm>
#include <cmath>

namespace weylgeo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};

Vec4<double> normalize_g(const Mat4<double>& g, Vec4<double> v) {
    double n = norm_g(g, v);
    if (n == 0) throw GeometryError("cannot normalize a zero vector");
    for (auto& c : v) c /= n;
    return v;
}

double frame_orientation(const Mat4<double>& cols, double chart_orientation) {
    double d = det4(cols);
    return (d >= 0 ? 1.0 : -1.0) * chart_orientation;
}

CVec4 complex_matvec(const Mat4<double>& m, const CVec4& x) { return matvec(m, x); }

CVec4 cproject10(const Mat4<double>& J, const CVec4& v) {
    // (v - i J v)/2
    CVec4 Jv = complex_matvec(J, v);
    CVec4 r;
    for (int k = 0; k < 4; ++k) r[k] = 0.5 * (v[k] - kI * Jv[k]);
    return r;
}

} // namespace

TangentJPair surface_J(const SurfaceJet& jet, const Mat4<double>& g, double orientation) {
    TangentJPair out;
    Projectors pr = tangent_normal_projectors(jet, g);
    if (!pr.rank2) { out.rank2 = false; return out; }
    Vec4<double> t1 = normalize_g(g, jet.fu);
    Vec4<double> t2 = jet.fv;
    double c = inner(g, t2, t1);
    for (int k = 0; k < 4; ++k) t2[k] -= c * t1[k];
    t2 = normalize_g(g, t2);
    // deterministic normal frame from the coordinate directions
    Vec4<double> n1{}, n2{};
    bool have_n1 = false, have_n2 = false;
    for (int k = 0; k < 4 && !(have_n1 && have_n2); ++k) {
        Vec4<double> e = vzero4<double>();
        e[k] = 1.0;
        Vec4<double> w = matvec(pr.normal, e);
        if (have_n1) {
            double pn = inner(g, w, n1);
            for (int m = 0; m < 4; ++m) w[m] -= pn * n1[m];
        }
        double n = norm_g(g, w);
        if (n < 0.3) continue;
        for (auto& cmp : w) cmp /= n;
        if (!have_n1) { n1 = w; have_n1 = true; }
        else { n2 = w; have_n2 = true; }
    }
    if (!have_n2) throw GeometryError("degenerate normal frame");
    Mat4<double> cols;
    for (int i = 0; i < 4; ++i) {
        cols[i][0] = t1[i];
        cols[i][1] = t2[i];
        cols[i][2] = n1[i];
        cols[i][3] = n2[i];
    }
    double s = frame_orientation(cols, orientation);
    // J: t1 -> t2 on the tangent plane; normal rotation sign s gives the
    // orientation-compatible structure, -s the reversing one.
    auto build = [&](double ns) {
        // endomorphism from frame images: J(frame_k) = img_k
        Vec4<double> img[4];
        img[0] = t2;
        for (int k = 0; k < 4; ++k) img[1][k] = -t1[k];
        for (int k = 0; k < 4; ++k) img[2][k] = ns * n2[k];
        for (int k = 0; k < 4; ++k) img[3][k] = -ns * n1[k];
        // J = img * cols^{-1}
        Mat4<double> ci = inverse4(cols);
        Mat4<double> J = mzero4<double>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) J[i][j] += img[k][i] * ci[k][j];
        return J;
    };
    out.Jp = build(s);
    out.Jm = build(-s);
    return out;
}

TwistorLiftValue twistor_lift(const SurfaceJet& jet, const TargetPoint& tp,
                              double orientation, double sign, double conf_tolerance) {
    Projectors pr = tangent_normal_projectors(jet, tp.g);
    if (!pr.rank2) throw GeometryError("twistor lift at a rank-deficient point");
    std::complex<double> defect = conformality_defect(jet, tp.g);
    double scale = std::real(inner_c(tp.g, jet.fz, jet.fzb));
    if (std::abs(defect) > conf_tolerance * std::max(scale, 1e-30))
        throw GeometryError("twistor lift at a non-conformal point (defect " +
                            std::to_string(std::abs(defect)) + ")");
    // flat(f_u) ^ flat(f_v)
    Vec4<double> au = matvec(tp.g, jet.fu), av = matvec(tp.g, jet.fv);
    TwoForm w;
    for (int I = 0; I < 6; ++I) {
        auto [i, j] = kPairBasis[static_cast<std::size_t>(I)];
        w[I] = au[i] * av[j] - au[j] * av[i];
    }
    TwoForm sw = hodge_star2(tp.g, tp.ginv, tp.sqrt_det, orientation, w);
    TwoForm s = (w + sw * sign) * (1.0 / (2.0 * scale));
    TwistorLiftValue out;
    out.sigma = s;
    out.sign = sign;
    out.norm2 = form_inner(tp.ginv, s, s);
    return out;
}

HolomorphicityField holomorphicity_residual(const GridImmersion& f, const WeylStructure& W,
                                            double sign) {
    HolomorphicityField out;
    const DomainSpec& dom = f.dom;
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            TangentJPair js = surface_J(jet, tp.g, W.chart->orientation);
            if (!js.rank2) continue;
            const Mat4<double>& J = sign > 0 ? js.Jp : js.Jm;
            CVec4 tau = tension_complex(jet, tp, f.lambda_at(i, j));
            CVec4 proj = cproject10(J, tau);
            double r = 0;
            // g-norm of a complex vector: sum over real/imag parts
            Vec4<double> re, im;
            for (int k = 0; k < 4; ++k) { re[k] = proj[k].real(); im[k] = proj[k].imag(); }
            r = std::sqrt(std::max(0.0, inner(tp.g, re, re) + inner(tp.g, im, im)));
            out.residual.push_back(r);
            out.max_residual = std::max(out.max_residual, r);
        }
    return out;
}

HolomorphicityField lift_vertical_defect(const GridImmersion& f, const WeylStructure& W,
                                         double sign) {
    HolomorphicityField out;
    const DomainSpec& dom = f.dom;
    // lift field over the grid (6 components), plus cached target data
    std::vector<TwoForm> sig(static_cast<std::size_t>(dom.nu) * dom.nv);
    std::vector<char> ok(sig.size(), 0);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            sig[f.idx(i, j)] = twistor_lift(jet, tp, W.chart->orientation, sign).sigma;
            ok[f.idx(i, j)] = 1;
        }
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            bool deep = dom.periodic_u || (i >= 4 && i <= dom.nu - 5);
            deep = deep && (dom.periodic_v || (j >= 4 && j <= dom.nv - 5));
            if (!deep) continue; // stencil of the lift field needs its own margin
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            TangentJPair js = surface_J(jet, tp.g, W.chart->orientation);
            if (!js.rank2) continue;
            const Mat4<double>& J = sign > 0 ? js.Jp : js.Jm;
            // covariant z-bar derivative of sigma as a 2-form along f, with
            // the weight-2 gauge term.
            std::array<std::array<std::complex<double>, 4>, 4> dsig{};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    if (a == b) continue;
                    auto field = [&](int ii, int jj) {
                        return std::complex<double>(sig[f.idx(ii, jj)].full()[a][b], 0.0);
                    };
                    dsig[a][b] = f.dbar_field(field, i, j);
                }
            Mat4<double> sg = sig[f.idx(i, j)].full();
            std::complex<double> afzb = 0;
            for (int k = 0; k < 4; ++k) afzb += tp.alpha[k] * jet.fzb[k];
            std::array<std::array<std::complex<double>, 4>, 4> cov{};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    std::complex<double> s = dsig[a][b] + 2.0 * afzb * sg[a][b];
                    for (int m = 0; m < 4; ++m)
                        for (int l = 0; l < 4; ++l)
                            s -= tp.G_weyl.G[m][l][a] * jet.fzb[l] * sg[m][b] +
                                 tp.G_weyl.G[m][l][b] * jet.fzb[l] * sg[a][m];
                    cov[a][b] = s;
                }
            // (2,0)-part: (beta - i J beta)/2 with (J beta)(X, Y) = beta(JX, Y)
            std::array<std::array<std::complex<double>, 4>, 4> jb{};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    std::complex<double> s = 0;
                    for (int m = 0; m < 4; ++m) s += cov[m][b] * J[m][a];
                    jb[a][b] = s;
                }
            double r2 = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    std::complex<double> v = 0.5 * (cov[a][b] - kI * jb[a][b]);
                    r2 += std::norm(v);
                }
            double r = std::sqrt(0.5 * r2); // pairwise antisymmetric double count
            out.residual.push_back(r);
            out.max_residual = std::max(out.max_residual, r);
        }
    return out;
}

SplitPair alpha_beta_split(const SurfaceJet& jet, const Mat4<double>& g,
                           const Mat4<double>& J) {
    SplitPair out;
    CVec4 Jfz = complex_matvec(J, jet.fz);
    for (int k = 0; k < 4; ++k) {
        out.alpha[k] = 0.5 * (jet.fz[k] - kI * Jfz[k]);
        out.betabar[k] = 0.5 * (jet.fz[k] + kI * Jfz[k]);
    }
    auto gnorm = [&g](const CVec4& v) {
        Vec4<double> re, im;
        for (int k = 0; k < 4; ++k) { re[k] = v[k].real(); im[k] = v[k].imag(); }
        return std::sqrt(std::max(0.0, inner(g, re, re) + inner(g, im, im)));
    };
    out.alpha_norm = gnorm(out.alpha);
    out.betabar_norm = gnorm(out.betabar);
    return out;
}

SplitEquationField split_equation_residual(const GridImmersion& f, const WeylStructure& W) {
    SplitEquationField out;
    const DomainSpec& dom = f.dom;
    const ChartedManifold4& M = *W.chart;
    std::vector<CVec4> alpha_field(static_cast<std::size_t>(dom.nu) * dom.nv);
    std::vector<CVec4> beta_field(alpha_field.size());
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            SurfaceJet jet = f.jet(i, j);
            Vec4<double> x = M.wrap(jet.f);
            Mat4<double> g = metric_components(M, x);
            Mat4<double> J = J_at(M, x);
            SplitPair sp = alpha_beta_split(jet, g, J);
            alpha_field[f.idx(i, j)] = sp.alpha;
            beta_field[f.idx(i, j)] = sp.betabar;
        }
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            bool deep = dom.periodic_u || (i >= 4 && i <= dom.nu - 5);
            deep = deep && (dom.periodic_v || (j >= 4 && j <= dom.nv - 5));
            if (!deep) continue;
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            Mat4<double> J = J_at(M, tp.x);
            Christoffels<double> GDJ = christoffels_DJ(W, tp.x);
            // nabla^D J as a 3-tensor, contracted with f_zbar
            FieldJet<double> Jj = field_jet([&M](const auto& x2) { return J_at(M, x2); }, tp.x);
            Mat4<std::complex<double>> nJ{};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    std::complex<double> s = 0;
                    for (int k = 0; k < 4; ++k) {
                        std::complex<double> zk = jet.fzb[k];
                        double t = Jj.d[k][a][b];
                        double gsum = 0;
                        for (int m = 0; m < 4; ++m)
                            gsum += tp.G_weyl.G[a][k][m] * Jj.value[m][b] -
                                    tp.G_weyl.G[m][k][b] * Jj.value[a][m];
                        s += zk * (t + gsum);
                    }
                    nJ[a][b] = s;
                }
            auto cov_dj = [&](const std::vector<CVec4>& field, int ii, int jj) {
                CVec4 d{};
                for (int k = 0; k < 4; ++k) {
                    auto comp = [&](int a, int b) { return field[f.idx(a, b)][k]; };
                    d[k] = f.dbar_field(comp, ii, jj);
                }
                CVec4 r = d;
                const CVec4& v = field[f.idx(ii, jj)];
                for (int k = 0; k < 4; ++k)
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            r[k] += GDJ.G[k][a][b] * jet.fzb[a] * v[b];
                return r;
            };
            CVec4 da = cov_dj(alpha_field, i, j);
            CVec4 db = cov_dj(beta_field, i, j);
            const CVec4& al = alpha_field[f.idx(i, j)];
            const CVec4& bb = beta_field[f.idx(i, j)];
            double ra = 0, rb = 0;
            for (int k = 0; k < 4; ++k) {
                std::complex<double> nb = 0, na = 0;
                for (int m = 0; m < 4; ++m) {
                    nb += nJ[k][m] * bb[m];
                    na += nJ[k][m] * al[m];
                }
                ra += std::norm(da[k] + 0.5 * kI * nb);
                rb += std::norm(db[k] - 0.5 * kI * na);
            }
            out.res_alpha.push_back(std::sqrt(ra));
            out.res_beta.push_back(std::sqrt(rb));
            out.max_alpha = std::max(out.max_alpha, std::sqrt(ra));
            out.max_beta = std::max(out.max_beta, std::sqrt(rb));
        }
    return out;
}

namespace {

// Unitary frame of the ambient (1,0) subspace from the coordinate directions,
// Gram-Schmidt under the Hermitian pairing, deterministic pivot order.
std::array<CVec4, 2> frame10(const Mat4<double>& g, const Mat4<double>& J) {
    std::array<CVec4, 2> fr{};
    int have = 0;
    for (int k = 0; k < 4 && have < 2; ++k) {
        Vec4<double> e = vzero4<double>();
        e[k] = 1.0;
        CVec4 ec;
        for (int m = 0; m < 4; ++m) ec[m] = e[m];
        CVec4 w = cproject10(J, ec);
        for (int q = 0; q < have; ++q) {
            std::complex<double> pr = inner_h(g, w, fr[q]);
            for (int m = 0; m < 4; ++m) w[m] -= pr * fr[q][m];
        }
        double n = std::sqrt(std::abs(inner_h(g, w, w).real()));
        if (n < 0.25) continue;
        for (auto& c : w) c /= n;
        fr[have++] = w;
    }
    if (have < 2) throw GeometryError("degenerate (1,0) frame");
    return fr;
}

struct SectionField {
    std::vector<std::array<std::complex<double>, 4>> coeffs; // frame coefficients
    std::vector<double> norms;
    int ncoef = 2;
};

// Zero clusters + winding orders for one section field.
std::vector<ZeroRecord> section_zero_orders(const GridImmersion& f, const SectionField& sf,
                                            const char* name, double rel_threshold,
                                            bool& degenerate) {
    const DomainSpec& dom = f.dom;
    std::vector<double> sorted;
    for (double n : sf.norms)
        if (n >= 0) sorted.push_back(n);
    std::sort(sorted.begin(), sorted.end());
    double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    degenerate = median < 1e-10;
    if (degenerate) return {};
    double threshold = rel_threshold * median;
    std::vector<std::pair<int, int>> flagged;
    std::vector<double> fnorms;
    std::vector<int> rowc(dom.nu, 0), colc(dom.nv, 0);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            double n = sf.norms[f.idx(i, j)];
            if (n >= 0 && n < threshold) {
                flagged.emplace_back(i, j);
                fnorms.push_back(n);
                rowc[i]++;
                colc[j]++;
            }
        }
    for (int i = 0; i < dom.nu; ++i)
        if (rowc[i] >= dom.nv - 4)
            throw DegenerateZeroLocus(std::string(name) + " vanishes along a full grid line");
    for (int j = 0; j < dom.nv; ++j)
        if (colc[j] >= dom.nu - 4)
            throw DegenerateZeroLocus(std::string(name) + " vanishes along a full grid line");
    auto reps = cluster_flags(dom, flagged, fnorms);
    std::vector<ZeroRecord> out;
    for (const auto& rep : reps) {
        ZeroRecord z;
        z.section = name;
        z.i = rep.i;
        z.j = rep.j;
        for (int r = 1; r <= 3; ++r) {
            auto ring = grid_ring(dom, rep.i, rep.j, r);
            if (ring.empty()) break;
            int dominant = -1;
            double best = -1;
            for (int k = 0; k < sf.ncoef; ++k) {
                double mn = 1e300;
                for (auto [a, b] : ring)
                    mn = std::min(mn, std::abs(sf.coeffs[f.idx(a, b)][k]));
                if (mn > best) { best = mn; dominant = k; }
            }
            if (best < 10.0 * threshold && r < 3) continue;
            std::vector<std::complex<double>> loop;
            for (auto [a, b] : ring) loop.push_back(sf.coeffs[f.idx(a, b)][dominant]);
            if (auto w = loop_winding(loop)) {
                z.order = *w;
                z.order_ok = true;
                break;
            }
        }
        out.push_back(z);
    }
    return out;
}

} // namespace

IndexReport count_indices(const GridImmersion& f, double rel_threshold) {
    const DomainSpec& dom = f.dom;
    if (!dom.periodic_u || !dom.periodic_v)
        throw GeometryError("index counting needs a closed torus domain");
    const ChartedManifold4& M = *f.chart;
    std::size_t n = static_cast<std::size_t>(dom.nu) * dom.nv;
    SectionField fz{std::vector<std::array<std::complex<double>, 4>>(n),
                    std::vector<double>(n, -1.0), 4};
    SectionField al{std::vector<std::array<std::complex<double>, 4>>(n),
                    std::vector<double>(n, -1.0), 2};
    SectionField bb{std::vector<std::array<std::complex<double>, 4>>(n),
                    std::vector<double>(n, -1.0), 2};
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            SurfaceJet jet = f.jet(i, j);
            Vec4<double> x = M.wrap(jet.f);
            Mat4<double> g = metric_components(M, x);
            Mat4<double> J = J_at(M, x);
            Mat4<double> C = orthonormal_coframe(g, 1.0); // rows: orthonormal coframe
            // real orthonormal frame coefficients of f_z
            std::array<std::complex<double>, 4> cf{};
            for (int a = 0; a < 4; ++a)
                for (int m = 0; m < 4; ++m) cf[a] += C[a][m] * jet.fz[m];
            fz.coeffs[f.idx(i, j)] = cf;
            fz.norms[f.idx(i, j)] = norm_c(CVec4{cf[0], cf[1], cf[2], cf[3]});
            SplitPair sp = alpha_beta_split(jet, g, J);
            auto fr = frame10(g, J);
            std::array<std::complex<double>, 4> ca{}, cb{};
            for (int q = 0; q < 2; ++q) {
                ca[q] = inner_h(g, sp.alpha, fr[q]);
                // conjugate frame spans the (0,1) space
                CVec4 frc;
                for (int m = 0; m < 4; ++m) frc[m] = std::conj(fr[q][m]);
                cb[q] = inner_h(g, sp.betabar, frc);
            }
            al.coeffs[f.idx(i, j)] = ca;
            al.norms[f.idx(i, j)] = std::sqrt(std::norm(ca[0]) + std::norm(ca[1]));
            bb.coeffs[f.idx(i, j)] = cb;
            bb.norms[f.idx(i, j)] = std::sqrt(std::norm(cb[0]) + std::norm(cb[1]));
        }
    IndexReport rep;
    bool deg_fz = false;
    auto zf = section_zero_orders(f, fz, "fz", rel_threshold, deg_fz);
    if (deg_fz) throw DegenerateZeroLocus("f_z is identically zero on the grid");
    auto za = section_zero_orders(f, al, "alpha", rel_threshold, rep.alpha_degenerate);
    auto zb = section_zero_orders(f, bb, "betabar", rel_threshold, rep.betabar_degenerate);
    int sum_fz = 0, sum_a = 0, sum_b = 0;
    for (const auto& z : zf) sum_fz += z.order;
    for (const auto& z : za) sum_a += z.order;
    for (const auto& z : zb) sum_b += z.order;
    rep.R = sum_fz;
    rep.Q = rep.alpha_degenerate ? 0 : sum_a - rep.R;
    rep.P = rep.betabar_degenerate ? 0 : sum_b - rep.R;
    rep.zeros = zf;
    rep.zeros.insert(rep.zeros.end(), za.begin(), za.end());
    rep.zeros.insert(rep.zeros.end(), zb.begin(), zb.end());
    return rep;
}

namespace {

ChernResult finish_c1(double sum_re, double sum_im) {
    ChernResult out;
    out.raw = sum_re / (4.0 * kPi);
    out.imag_residual = std::abs(sum_im / (4.0 * kPi));
    out.value = static_cast<int>(std::lround(out.raw));
    out.defect = std::abs(out.raw - out.value);
    if (out.defect > 0.05)
        throw GeometryError("Chern integrality defect " + std::to_string(out.defect) +
                            " exceeds 0.05 (grid too coarse)");
    return out;
}

// Curvature of the J-compatible pullback connection by grid differentiation
// of the connection matrices: A carries the plain pullback of the Weyl
// connection, J the complex structure field on f*TM.
ChernResult c1_grid_route(const GridImmersion& f, const std::vector<Mat4<double>>& Au,
                          const std::vector<Mat4<double>>& Av,
                          const std::vector<Mat4<double>>& Jf) {
    const DomainSpec& dom = f.dom;
    std::size_t n = Au.size();
    auto d4 = [&](const std::vector<Mat4<double>>& field, int i, int j, bool udir) {
        const double c1[4] = {1.0, -8.0, 8.0, -1.0};
        const int off[4] = {-2, -1, 1, 2};
        Mat4<double> r = mzero4<double>();
        for (int t = 0; t < 4; ++t) {
            int ii = udir ? ((i + off[t]) % dom.nu + dom.nu) % dom.nu : i;
            int jj = udir ? j : ((j + off[t]) % dom.nv + dom.nv) % dom.nv;
            const Mat4<double>& m = field[f.idx(ii, jj)];
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) r[a][b] += c1[t] * m[a][b];
        }
        double h = udir ? dom.du() : dom.dv();
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r[a][b] /= 12.0 * h;
        return r;
    };
    // A_a -> A_a - 1/2 J (d_a J + [A_a, J]) makes the connection preserve J
    std::vector<Mat4<double>> Cu(n), Cv(n);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            Mat4<double> dJu = d4(Jf, i, j, true);
            Mat4<double> dJv = d4(Jf, i, j, false);
            const Mat4<double>& J = Jf[f.idx(i, j)];
            auto corr = [&](const Mat4<double>& A, const Mat4<double>& dJ) {
                Mat4<double> nj = dJ;
                Mat4<double> aj = matmul(A, J), ja = matmul(J, A);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) nj[a][b] += aj[a][b] - ja[a][b];
                Mat4<double> r = matmul(J, nj);
                Mat4<double> outm = A;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) outm[a][b] -= 0.5 * r[a][b];
                return outm;
            };
            Cu[f.idx(i, j)] = corr(Au[f.idx(i, j)], dJu);
            Cv[f.idx(i, j)] = corr(Av[f.idx(i, j)], dJv);
        }
    double sum_re = 0, sum_im = 0;
    double dudv = dom.du() * dom.dv();
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            Mat4<double> dAv = d4(Cv, i, j, true);  // d_u A_v
            Mat4<double> dAu = d4(Cu, i, j, false); // d_v A_u
            Mat4<double> comm = matmul(Cu[f.idx(i, j)], Cv[f.idx(i, j)]);
            Mat4<double> comm2 = matmul(Cv[f.idx(i, j)], Cu[f.idx(i, j)]);
            Mat4<double> F;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    F[a][b] = dAv[a][b] - dAu[a][b] + comm[a][b] - comm2[a][b];
            const Mat4<double>& J = Jf[f.idx(i, j)];
            double trJF = 0, trF = 0;
            for (int a = 0; a < 4; ++a) {
                trF += F[a][a];
                for (int m = 0; m < 4; ++m) trJF += J[a][m] * F[m][a];
            }
            sum_re += trJF * dudv;
            sum_im += trF * dudv;
        }
    return finish_c1(sum_re, sum_im);
}

void pullback_connection(const GridImmersion& f, const WeylStructure& W,
                         std::vector<Mat4<double>>& Au, std::vector<Mat4<double>>& Av) {
    const DomainSpec& dom = f.dom;
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            SurfaceJet jet = f.jet(i, j);
            TargetPoint tp = target_point(W, jet.f);
            Mat4<double> Bu = mzero4<double>(), Bv = mzero4<double>();
            for (int k = 0; k < 4; ++k)
                for (int m = 0; m < 4; ++m)
                    for (int l = 0; l < 4; ++l) {
                        Bu[k][m] += tp.G_weyl.G[k][l][m] * jet.fu[l];
                        Bv[k][m] += tp.G_weyl.G[k][l][m] * jet.fv[l];
                    }
            Au[f.idx(i, j)] = Bu;
            Av[f.idx(i, j)] = Bv;
        }
}

} // namespace

ChernResult chern_number(const GridImmersion& f, const WeylStructure& W,
                         BundleSelector bundle) {
    const DomainSpec& dom = f.dom;
    if (!dom.periodic_u || !dom.periodic_v)
        throw GeometryError("Chern integration needs a closed torus domain");
    const ChartedManifold4& M = *W.chart;

    if (bundle == BundleSelector::AmbientJ) {
        double sum_re = 0, sum_im = 0;
        double dudv = dom.du() * dom.dv();
        for (int i = 0; i < dom.nu; ++i)
            for (int j = 0; j < dom.nv; ++j) {
                SurfaceJet jet = f.jet(i, j);
                Vec4<double> x = M.wrap(jet.f);
                Mat4<double> J = J_at(M, x);
                Riemann<double> R = riemann_of(
                    [&W](const auto& p) { return christoffels_DJ(W, p); }, x);
                Mat4<double> F = curvature_endo(R, jet.fu, jet.fv);
                double trJF = 0, trF = 0;
                for (int a = 0; a < 4; ++a) {
                    trF += F[a][a];
                    for (int m = 0; m < 4; ++m) trJF += J[a][m] * F[m][a];
                }
                sum_re += trJF * dudv;
                sum_im += trF * dudv;
            }
        return finish_c1(sum_re, sum_im);
    }

    std::size_t n = static_cast<std::size_t>(dom.nu) * dom.nv;
    std::vector<Mat4<double>> Au(n), Av(n), Jm(n);
    pullback_connection(f, W, Au, Av);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            SurfaceJet jet = f.jet(i, j);
            Vec4<double> x = M.wrap(jet.f);
            Mat4<double> g = metric_components(M, x);
            TangentJPair js = surface_J(jet, g, M.orientation);
            if (!js.rank2) throw GeometryError("rank-deficient point in Chern integration");
            Jm[f.idx(i, j)] = js.Jm;
        }
    return c1_grid_route(f, Au, Av, Jm);
}

ChernResult chern_number_ambient_grid(const GridImmersion& f, const WeylStructure& W) {
    const DomainSpec& dom = f.dom;
    if (!dom.periodic_u || !dom.periodic_v)
        throw GeometryError("Chern integration needs a closed torus domain");
    const ChartedManifold4& M = *W.chart;
    std::size_t n = static_cast<std::size_t>(dom.nu) * dom.nv;
    std::vector<Mat4<double>> Au(n), Av(n), Jf(n);
    pullback_connection(f, W, Au, Av);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            SurfaceJet jet = f.jet(i, j);
            Jf[f.idx(i, j)] = J_at(M, M.wrap(jet.f));
        }
    return c1_grid_route(f, Au, Av, Jf);
}

WebsterReport webster_report(const GridImmersion& f, const WeylStructure& W,
                             double rel_threshold) {
    WebsterReport rep;
    rep.c1_ambient = chern_number(f, W, BundleSelector::AmbientJ);
    rep.c1_minus = chern_number(f, W, BundleSelector::SurfaceJMinus);
    try {
        rep.indices = count_indices(f, rel_threshold);
    } catch (const DegenerateZeroLocus& e) {
        rep.degenerate = true;
        rep.degenerate_reason = e.what();
        return rep;
    }
    if (rep.indices.alpha_degenerate || rep.indices.betabar_degenerate) {
        rep.degenerate = true;
        rep.degenerate_reason = rep.indices.alpha_degenerate
                                    ? "alpha identically zero (anti-holomorphic curve)"
                                    : "betabar identically zero (holomorphic curve)";
        return rep;
    }
    const int chi_torus = 0;
    rep.chiT = chi_torus + rep.indices.R;
    rep.chiN = rep.chiT - rep.c1_minus.value;
    rep.web1_lhs = rep.chiT + rep.chiN;
    rep.web1_rhs = -rep.indices.P - rep.indices.Q;
    rep.web1_holds = rep.web1_lhs == rep.web1_rhs;
    int pq = rep.indices.P - rep.indices.Q;
    if (pq == 0)
        rep.web2_sign = rep.c1_ambient.value == 0 ? "both (P=Q)" : "neither";
    else if (rep.c1_ambient.value == pq)
        rep.web2_sign = "P-Q";
    else if (rep.c1_ambient.value == -pq)
        rep.web2_sign = "Q-P";
    else
        rep.web2_sign = "neither";
    rep.adjunction_slack_plus = rep.web1_lhs + rep.c1_ambient.value;
    rep.adjunction_slack_minus = rep.web1_lhs - rep.c1_ambient.value;
    return rep;
}

} // namespace weylgeo
