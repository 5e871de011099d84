#pragma once

// Immersed-surface analysis: discretized maps from a torus grid or an open
// rectangle into a chart, pointwise jets (AD for expression-backed surfaces,
// 4th-order central differences for sampled grids), conformality,
// fundamental forms, Weyl mean curvature and the tension field.

#include <complex>
#include <optional>
#include <vector>

#include "weylgeo/weyl.hpp"

namespace weylgeo {

struct DomainSpec {
    int nu = 64, nv = 64;
    double u0 = 0.0, v0 = 0.0;
    double Lu = 1.0, Lv = 1.0;
    bool periodic_u = true, periodic_v = true;

    double du() const { return periodic_u ? Lu / nu : Lu / (nu - 1); }
    double dv() const { return periodic_v ? Lv / nv : Lv / (nv - 1); }
    double u(int i) const { return u0 + du() * i; }
    double v(int j) const { return v0 + dv() * j; }
    // margin needed by the 4th-order stencils on open directions
    bool interior(int i, int j) const {
        bool ui = periodic_u || (i >= 2 && i <= nu - 3);
        bool vj = periodic_v || (j >= 2 && j <= nv - 3);
        return ui && vj;
    }
};

struct SurfaceJet {
    Vec4<double> f, fu, fv, fuu, fuv, fvv;
    CVec4 fz, fzb; // fz = (fu - i fv)/2, fzb = (fu + i fv)/2

    void complexify() {
        for (int k = 0; k < 4; ++k) {
            fz[k] = std::complex<double>(0.5 * fu[k], -0.5 * fv[k]);
            fzb[k] = std::complex<double>(0.5 * fu[k], 0.5 * fv[k]);
        }
    }
};

class GridImmersion {
  public:
    ChartPtr chart;
    DomainSpec dom;
    std::array<Expr, 4> components; // expression backing (may be empty)
    Expr lambda;                    // domain conformal factor, empty = 0
    bool expression_backed = false;
    std::array<std::vector<double>, 4> samples; // nu*nv row-major (i*nv + j)

    static GridImmersion from_exprs(ChartPtr chart, DomainSpec dom,
                                    std::array<Expr, 4> comps, Expr lambda = {});
    static GridImmersion from_samples(ChartPtr chart, DomainSpec dom,
                                      std::array<std::vector<double>, 4> samples,
                                      Expr lambda = {});

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * dom.nv + j; }
    Vec4<double> node_value(int i, int j) const {
        return {samples[0][idx(i, j)], samples[1][idx(i, j)], samples[2][idx(i, j)],
                samples[3][idx(i, j)]};
    }

    void resample(); // refresh samples from expressions

    SurfaceJet jet_fd(int i, int j) const; // 4th-order stencils on the samples
    SurfaceJet jet_ad(int i, int j) const; // exact jets of the expressions
    SurfaceJet jet_ad_at(double u, double v) const;
    SurfaceJet jet(int i, int j) const {
        return expression_backed ? jet_ad(i, j) : jet_fd(i, j);
    }

    double lambda_at(int i, int j) const;

    // 4th-order directional derivative field for grid sampled quantities
    // (used by the twistor operators to differentiate derived fields).
    template <class F>
    std::complex<double> dbar_field(F&& field, int i, int j) const;
};

// Geometry of the target chart at a surface point under a Weyl structure.
struct TargetPoint {
    Vec4<double> x;
    Mat4<double> g, ginv;
    double sqrt_det = 0;
    Christoffels<double> G_lc;
    Christoffels<double> G_weyl;
    Vec4<double> alpha, alpha_sharp;
};

TargetPoint target_point(const WeylStructure& W, const Vec4<double>& x);

// c(f_z, f_z): zero exactly at weakly conformal points.
std::complex<double> conformality_defect(const SurfaceJet& jet, const Mat4<double>& g);

struct Projectors {
    Mat4<double> tangent = mzero4<double>();
    Mat4<double> normal = mzero4<double>();
    bool rank2 = true;
};

Projectors tangent_normal_projectors(const SurfaceJet& jet, const Mat4<double>& g);

struct SecondFundamental {
    // index pairs over (u, v): A[0][0] = A(f_u, f_u) etc.
    Vec4<double> A[2][2];  // classical second fundamental form values
    Vec4<double> BD[2][2]; // Weyl second fundamental form values
    Projectors proj;
    bool rank2 = true;
};

SecondFundamental second_fundamental(const SurfaceJet& jet, const TargetPoint& tp);

struct MeanCurvature {
    Vec4<double> HD;
    Vec4<double> Hg;
    double HD_norm = 0, Hg_norm = 0;
    bool rank2 = true;
};

MeanCurvature weyl_mean_curvature(const SurfaceJet& jet, const TargetPoint& tp);

// Tension of the map for domain metric e^{2 lambda}(du^2 + dv^2), spelled as
// the real-coordinate formula with explicit gauge terms.
Vec4<double> tension_real(const SurfaceJet& jet, const TargetPoint& tp, double lambda);

// Same quantity through the complex form 4 e^{-2 lambda} nabla^D_{zbar} f_z.
CVec4 tension_complex(const SurfaceJet& jet, const TargetPoint& tp, double lambda);

// Winding number of a complex sequence around a closed loop; returns nullopt
// when a step turns by more than ~pi/2 (loop too coarse for the zero).
std::optional<int> loop_winding(const std::vector<std::complex<double>>& loop);

// Ring of grid nodes at Chebyshev radius r around (i, j), counterclockwise.
// Empty when the ring leaves an open domain.
std::vector<std::pair<int, int>> grid_ring(const DomainSpec& dom, int i, int j, int r);

struct BranchFlag {
    int i = 0, j = 0;          // representative node of the flagged cluster
    double min_norm = 0;       // smallest |f_z| in the cluster
    int order = 0;             // winding of the dominant component around it
    bool order_ok = false;
};

struct BranchScan {
    std::vector<BranchFlag> flags;
    double median_norm = 0;
    double threshold = 0;
};

// Flags nodes with |f_z| below rel_threshold * median(|f_z|) and computes the
// local winding order of the dominant f_z component around each cluster.
BranchScan branch_scan(const GridImmersion& f, double rel_threshold = 1e-5);

// Cluster flagged nodes (8-connectivity, periodic wrap) and return one
// representative (minimum-norm node) per cluster.
std::vector<BranchFlag> cluster_flags(const DomainSpec& dom,
                                      const std::vector<std::pair<int, int>>& flagged,
                                      const std::vector<double>& norms);

template <class F>
std::complex<double> GridImmersion::dbar_field(F&& field, int i, int j) const {
    auto wrap = [this](int a, int n, bool per) {
        if (per) return ((a % n) + n) % n;
        return a;
    };
    const double cu[4] = {1.0, -8.0, 8.0, -1.0};
    const int off[4] = {-2, -1, 1, 2};
    std::complex<double> du_part = 0, dv_part = 0;
    for (int s = 0; s < 4; ++s) {
        int ii = wrap(i + off[s], dom.nu, dom.periodic_u);
        int jj = wrap(j + off[s], dom.nv, dom.periodic_v);
        du_part += cu[s] * field(ii, j);
        dv_part += cu[s] * field(i, jj);
    }
    du_part /= 12.0 * dom.du();
    dv_part /= 12.0 * dom.dv();
    return 0.5 * (du_part + std::complex<double>(0, 1) * dv_part);
}

} // namespace weylgeo
