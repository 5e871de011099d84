#include "weylgeo/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace weylgeo {

GridImmersion GridImmersion::from_exprs(ChartPtr chart, DomainSpec dom,
                                        std::array<Expr, 4> comps, Expr lambda) {
    GridImmersion g;
    g.chart = std::move(chart);
    g.dom = dom;
    g.components = std::move(comps);
    g.lambda = std::move(lambda);
    g.expression_backed = true;
    g.resample();
    return g;
}

GridImmersion GridImmersion::from_samples(ChartPtr chart, DomainSpec dom,
                                          std::array<std::vector<double>, 4> samples,
                                          Expr lambda) {
    GridImmersion g;
    g.chart = std::move(chart);
    g.dom = dom;
    g.samples = std::move(samples);
    g.lambda = std::move(lambda);
    g.expression_backed = false;
    for (const auto& s : g.samples)
        if (s.size() != static_cast<std::size_t>(dom.nu) * dom.nv)
            throw GeometryError("sample array size does not match the grid");
    return g;
}

void GridImmersion::resample() {
    for (auto& s : samples) s.assign(static_cast<std::size_t>(dom.nu) * dom.nv, 0.0);
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            std::array<double, 2> p{dom.u(i), dom.v(j)};
            std::span<const double> sp(p.data(), 2);
            for (int k = 0; k < 4; ++k)
                samples[k][idx(i, j)] = components[k].empty() ? 0.0 : components[k].eval(sp);
        }
}

namespace {
int wrap_index(int a, int n, bool periodic, const char* what) {
    if (periodic) return ((a % n) + n) % n;
    if (a < 0 || a >= n)
        throw GeometryError(std::string("stencil leaves the rectangle margin (") + what + ")");
    return a;
}
} // namespace

SurfaceJet GridImmersion::jet_fd(int i, int j) const {
    if (!dom.interior(i, j))
        throw GeometryError("jet requested outside the 2-node rectangle margin");
    const double c1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};   // /12h
    const double c2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0}; // /12h^2
    const int off[5] = {-2, -1, 0, 1, 2};
    double hu = dom.du(), hv = dom.dv();

    SurfaceJet out{};
    for (int k = 0; k < 4; ++k) {
        const std::vector<double>& s = samples[k];
        double center = s[idx(i, j)];
        out.f[k] = center;
        // maps may wind periodic target coordinates: lift stencil samples to
        // the branch nearest the center value
        double period = chart->coords[k].periodic ? chart->coords[k].period : 0.0;
        auto lift = [&](double v) {
            if (period <= 0) return v;
            double d = std::remainder(v - center, period);
            return center + d;
        };
        double fu = 0, fv = 0, fuu = 0, fvv = 0;
        for (int t = 0; t < 5; ++t) {
            int ii = wrap_index(i + off[t], dom.nu, dom.periodic_u, "u");
            int jj = wrap_index(j + off[t], dom.nv, dom.periodic_v, "v");
            double su = lift(s[idx(ii, j)]);
            double sv = lift(s[idx(i, jj)]);
            fu += c1[t] * su;
            fuu += c2[t] * su;
            fv += c1[t] * sv;
            fvv += c2[t] * sv;
        }
        out.fu[k] = fu / (12 * hu);
        out.fv[k] = fv / (12 * hv);
        out.fuu[k] = fuu / (12 * hu * hu);
        out.fvv[k] = fvv / (12 * hv * hv);
        // cross derivative: 4th-order u-stencil applied to 4th-order v-derivatives
        double fuv = 0;
        for (int t = 0; t < 5; ++t) {
            if (off[t] == 0) continue;
            int ii = wrap_index(i + off[t], dom.nu, dom.periodic_u, "u");
            double dv = 0;
            for (int r = 0; r < 5; ++r) {
                int jj = wrap_index(j + off[r], dom.nv, dom.periodic_v, "v");
                dv += c1[r] * lift(s[idx(ii, jj)]);
            }
            fuv += c1[t] * dv / (12 * hv);
        }
        out.fuv[k] = fuv / (12 * hu);
    }
    out.complexify();
    return out;
}

SurfaceJet GridImmersion::jet_ad(int i, int j) const { return jet_ad_at(dom.u(i), dom.v(j)); }

SurfaceJet GridImmersion::jet_ad_at(double u, double v) const {
    if (!expression_backed)
        throw GeometryError("AD jet requested on a sampled-only surface");
    SurfaceJet out{};
    using HD = HyperDual<double>;
    for (int k = 0; k < 4; ++k) {
        if (components[k].empty()) continue;
        std::array<HD, 2> puv{HD(u, 1, 0, 0), HD(v, 0, 1, 0)};
        HD mixed = components[k].eval(std::span<const HD>(puv.data(), 2));
        std::array<HD, 2> puu{HD(u, 1, 1, 0), HD(v, 0, 0, 0)};
        HD uu = components[k].eval(std::span<const HD>(puu.data(), 2));
        std::array<HD, 2> pvv{HD(u, 0, 0, 0), HD(v, 1, 1, 0)};
        HD vv = components[k].eval(std::span<const HD>(pvv.data(), 2));
        out.f[k] = mixed.v;
        out.fu[k] = mixed.d1;
        out.fv[k] = mixed.d2;
        out.fuv[k] = mixed.d12;
        out.fuu[k] = uu.d12;
        out.fvv[k] = vv.d12;
    }
    out.complexify();
    return out;
}

double GridImmersion::lambda_at(int i, int j) const {
    if (lambda.empty()) return 0.0;
    std::array<double, 2> p{dom.u(i), dom.v(j)};
    return lambda.eval(std::span<const double>(p.data(), 2));
}

TargetPoint target_point(const WeylStructure& W, const Vec4<double>& x) {
    TargetPoint tp;
    tp.x = W.chart->wrap(x);
    MetricAt<double> m = metric_at(*W.chart, tp.x);
    tp.g = m.g;
    tp.ginv = m.ginv;
    tp.sqrt_det = m.sqrt_det;
    tp.G_lc = christoffels_lc(*W.chart, tp.x);
    tp.G_weyl = christoffels_weyl(W, tp.x);
    tp.alpha = alpha_at(W, tp.x);
    tp.alpha_sharp = matvec(tp.ginv, tp.alpha);
    return tp;
}

std::complex<double> conformality_defect(const SurfaceJet& jet, const Mat4<double>& g) {
    return inner_c(g, jet.fz, jet.fz);
}

Projectors tangent_normal_projectors(const SurfaceJet& jet, const Mat4<double>& g) {
    Projectors pr;
    // Gram-Schmidt on (f_u, f_v) under g
    Vec4<double> t1 = jet.fu;
    double n1 = norm_g(g, t1);
    double scale = std::max({std::abs(jet.fu[0]), std::abs(jet.fu[1]), std::abs(jet.fu[2]),
                             std::abs(jet.fu[3]), std::abs(jet.fv[0]), std::abs(jet.fv[1]),
                             std::abs(jet.fv[2]), std::abs(jet.fv[3]), 1e-300});
    if (n1 < 1e-9 * scale) { pr.rank2 = false; return pr; }
    for (auto& c : t1) c /= n1;
    Vec4<double> t2 = jet.fv;
    double pr12 = inner(g, t2, t1);
    for (int k = 0; k < 4; ++k) t2[k] -= pr12 * t1[k];
    double n2 = norm_g(g, t2);
    if (n2 < 1e-9 * norm_g(g, jet.fv) || n2 == 0.0) { pr.rank2 = false; return pr; }
    for (auto& c : t2) c /= n2;
    // P^i_j = t1^i (g t1)_j + t2^i (g t2)_j
    Vec4<double> gt1 = matvec(g, t1), gt2 = matvec(g, t2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            pr.tangent[i][j] = t1[i] * gt1[j] + t2[i] * gt2[j];
            pr.normal[i][j] = (i == j ? 1.0 : 0.0) - pr.tangent[i][j];
        }
    return pr;
}

namespace {
Vec4<double> second_deriv_cov(const SurfaceJet& jet, const Christoffels<double>& G, int a,
                              int b) {
    // nabla_{d_a} f_b with the given connection
    const Vec4<double>& X = a == 0 ? jet.fu : jet.fv;
    const Vec4<double>& Y = b == 0 ? jet.fu : jet.fv;
    const Vec4<double>& dd = (a == 0 && b == 0)   ? jet.fuu
                             : (a == 1 && b == 1) ? jet.fvv
                                                  : jet.fuv;
    Vec4<double> r = dd;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r[k] += G.G[k][i][j] * X[i] * Y[j];
    return r;
}
} // namespace

SecondFundamental second_fundamental(const SurfaceJet& jet, const TargetPoint& tp) {
    SecondFundamental sf;
    sf.proj = tangent_normal_projectors(jet, tp.g);
    sf.rank2 = sf.proj.rank2;
    if (!sf.rank2) return sf;
    Vec4<double> a_perp = matvec(sf.proj.normal, tp.alpha_sharp);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Vec4<double> cov = second_deriv_cov(jet, tp.G_lc, a, b);
            sf.A[a][b] = matvec(sf.proj.normal, cov);
            const Vec4<double>& X = a == 0 ? jet.fu : jet.fv;
            const Vec4<double>& Y = b == 0 ? jet.fu : jet.fv;
            double gxy = inner(tp.g, X, Y);
            for (int k = 0; k < 4; ++k) sf.BD[a][b][k] = sf.A[a][b][k] - gxy * a_perp[k];
        }
    return sf;
}

MeanCurvature weyl_mean_curvature(const SurfaceJet& jet, const TargetPoint& tp) {
    MeanCurvature mc;
    SecondFundamental sf = second_fundamental(jet, tp);
    mc.rank2 = sf.rank2;
    if (!mc.rank2) return mc;
    // trace over the induced metric h_ab = g(f_a, f_b)
    double h00 = inner(tp.g, jet.fu, jet.fu);
    double h01 = inner(tp.g, jet.fu, jet.fv);
    double h11 = inner(tp.g, jet.fv, jet.fv);
    double det = h00 * h11 - h01 * h01;
    double hi[2][2] = {{h11 / det, -h01 / det}, {-h01 / det, h00 / det}};
    mc.Hg = vzero4<double>();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 4; ++k) mc.Hg[k] += 0.5 * hi[a][b] * sf.A[a][b][k];
    Vec4<double> a_perp = matvec(sf.proj.normal, tp.alpha_sharp);
    for (int k = 0; k < 4; ++k) mc.HD[k] = mc.Hg[k] - a_perp[k];
    mc.Hg_norm = norm_g(tp.g, mc.Hg);
    mc.HD_norm = norm_g(tp.g, mc.HD);
    return mc;
}

Vec4<double> tension_real(const SurfaceJet& jet, const TargetPoint& tp, double lambda) {
    // e^{-2l} ( nabla^g_u f_u + nabla^g_v f_v
    //           + 2 a(f_u) f_u + 2 a(f_v) f_v - (|f_u|^2 + |f_v|^2) a# )
    Vec4<double> s = vzero4<double>();
    Vec4<double> cu = second_deriv_cov(jet, tp.G_lc, 0, 0);
    Vec4<double> cv = second_deriv_cov(jet, tp.G_lc, 1, 1);
    double au = 0, av = 0;
    for (int i = 0; i < 4; ++i) {
        au += tp.alpha[i] * jet.fu[i];
        av += tp.alpha[i] * jet.fv[i];
    }
    double e2 = inner(tp.g, jet.fu, jet.fu) + inner(tp.g, jet.fv, jet.fv);
    double w = std::exp(-2.0 * lambda);
    for (int k = 0; k < 4; ++k)
        s[k] = w * (cu[k] + cv[k] + 2.0 * au * jet.fu[k] + 2.0 * av * jet.fv[k] -
                    e2 * tp.alpha_sharp[k]);
    return s;
}

CVec4 tension_complex(const SurfaceJet& jet, const TargetPoint& tp, double lambda) {
    // 4 e^{-2l} nabla^D_{zbar} f_z = 4 e^{-2l} ( d_zbar f_z + G^D(f_zbar, f_z) )
    CVec4 r{};
    double w = 4.0 * std::exp(-2.0 * lambda);
    for (int k = 0; k < 4; ++k) {
        std::complex<double> s(0.25 * (jet.fuu[k] + jet.fvv[k]), 0.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                s += tp.G_weyl.G[k][i][j] * jet.fzb[i] * jet.fz[j];
        r[k] = w * s;
    }
    return r;
}

std::optional<int> loop_winding(const std::vector<std::complex<double>>& loop) {
    double total = 0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        std::complex<double> a = loop[k];
        std::complex<double> b = loop[(k + 1) % loop.size()];
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0) return std::nullopt;
        double d = std::arg(b / a);
        if (std::abs(d) > 2.2) return std::nullopt; // step too coarse to trust
        total += d;
    }
    double w = total / (2.0 * 3.14159265358979323846);
    int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.2) return std::nullopt;
    return wi;
}

std::vector<std::pair<int, int>> grid_ring(const DomainSpec& dom, int i, int j, int r) {
    std::vector<std::pair<int, int>> ring;
    auto push = [&](int a, int b) {
        if (!dom.periodic_u) {
            if (a < 0 || a >= dom.nu) { ring.clear(); return false; }
        } else a = ((a % dom.nu) + dom.nu) % dom.nu;
        if (!dom.periodic_v) {
            if (b < 0 || b >= dom.nv) { ring.clear(); return false; }
        } else b = ((b % dom.nv) + dom.nv) % dom.nv;
        ring.emplace_back(a, b);
        return true;
    };
    for (int a = i - r; a < i + r; ++a) if (!push(a, j - r)) return ring;
    for (int b = j - r; b < j + r; ++b) if (!push(i + r, b)) return ring;
    for (int a = i + r; a > i - r; --a) if (!push(a, j + r)) return ring;
    for (int b = j + r; b > j - r; --b) if (!push(i - r, b)) return ring;
    return ring;
}

std::vector<BranchFlag> cluster_flags(const DomainSpec& dom,
                                      const std::vector<std::pair<int, int>>& flagged,
                                      const std::vector<double>& norms) {
    std::vector<int> parent(flagged.size());
    for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = static_cast<int>(k);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) { parent[a] = parent[parent[a]]; a = parent[a]; }
        return a;
    };
    auto near = [&](std::pair<int, int> a, std::pair<int, int> b) {
        auto d = [&](int x, int y, int n, bool per) {
            int dd = std::abs(x - y);
            if (per) dd = std::min(dd, n - dd);
            return dd;
        };
        return d(a.first, b.first, dom.nu, dom.periodic_u) <= 1 &&
               d(a.second, b.second, dom.nv, dom.periodic_v) <= 1;
    };
    for (std::size_t a = 0; a < flagged.size(); ++a)
        for (std::size_t b = a + 1; b < flagged.size(); ++b)
            if (near(flagged[a], flagged[b])) parent[find(static_cast<int>(a))] = find(static_cast<int>(b));
    std::vector<BranchFlag> reps;
    for (std::size_t a = 0; a < flagged.size(); ++a) {
        int root = find(static_cast<int>(a));
        BranchFlag* rep = nullptr;
        for (auto& r : reps)
            if (r.order == root) rep = &r; // order field reused as root id pre-winding
        if (!rep) {
            BranchFlag nf;
            nf.order = root;
            nf.i = flagged[a].first;
            nf.j = flagged[a].second;
            nf.min_norm = norms[a];
            reps.push_back(nf);
        } else if (norms[a] < rep->min_norm) {
            rep->min_norm = norms[a];
            rep->i = flagged[a].first;
            rep->j = flagged[a].second;
        }
    }
    for (auto& r : reps) r.order = 0;
    return reps;
}

BranchScan branch_scan(const GridImmersion& f, double rel_threshold) {
    BranchScan out;
    const DomainSpec& dom = f.dom;
    std::vector<double> nz(static_cast<std::size_t>(dom.nu) * dom.nv, -1.0);
    std::vector<double> sorted;
    std::vector<CVec4> fzs(nz.size());
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            if (!dom.interior(i, j)) continue;
            SurfaceJet jet = f.jet(i, j);
            fzs[f.idx(i, j)] = jet.fz;
            double n = norm_c(jet.fz);
            nz[f.idx(i, j)] = n;
            sorted.push_back(n);
        }
    std::sort(sorted.begin(), sorted.end());
    out.median_norm = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    out.threshold = rel_threshold * out.median_norm;
    std::vector<std::pair<int, int>> flagged;
    std::vector<double> fnorms;
    for (int i = 0; i < dom.nu; ++i)
        for (int j = 0; j < dom.nv; ++j) {
            double n = nz[f.idx(i, j)];
            if (n >= 0 && n < out.threshold) {
                flagged.emplace_back(i, j);
                fnorms.push_back(n);
            }
        }
    out.flags = cluster_flags(dom, flagged, fnorms);
    for (auto& flag : out.flags) {
        for (int r = 1; r <= 3; ++r) {
            auto ring = grid_ring(dom, flag.i, flag.j, r);
            if (ring.empty()) break;
            // dominant component: the one with the largest minimum modulus
            int dominant = -1;
            double best = -1;
            for (int k = 0; k < 4; ++k) {
                double mn = 1e300;
                for (auto [a, b] : ring) mn = std::min(mn, std::abs(fzs[f.idx(a, b)][k]));
                if (mn > best) { best = mn; dominant = k; }
            }
            if (best < 10.0 * out.threshold && r < 3) continue; // escalate
            std::vector<std::complex<double>> loop;
            loop.reserve(ring.size());
            for (auto [a, b] : ring) loop.push_back(fzs[f.idx(a, b)][dominant]);
            if (auto w = loop_winding(loop)) {
                flag.order = *w;
                flag.order_ok = true;
                break;
            }
        }
    }
    return out;
}

} // namespace weylgeo
