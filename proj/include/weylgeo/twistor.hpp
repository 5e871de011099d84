#pragma once

// Twistor lifts of conformal surfaces, holomorphicity residuals, the
// holomorphic/antiholomorphic splitting of f_z, index counting by winding
// numbers, Chern numbers by curvature integration, and the combined report.

#include "weylgeo/catalog.hpp"
#include "weylgeo/forms.hpp"
#include "weylgeo/surface.hpp"

namespace weylgeo {

struct TangentJPair {
    Mat4<double> Jp; // orientation-preserving
    Mat4<double> Jm; // orientation-reversing
    bool rank2 = true;
};

// The two orthogonal complex structures rotating f_u to f_v on the tangent
// plane; the normal rotation sign distinguishes them.
TangentJPair surface_J(const SurfaceJet& jet, const Mat4<double>& g, double orientation);

struct TwistorLiftValue {
    TwoForm sigma;
    double sign = +1; // +1 self-dual, -1 anti-self-dual
    double norm2 = 0; // |sigma|^2 in the induced 2-form metric (should be 2)
};

// sigma_pm = (1 pm star)(flat f_u ^ flat f_v) / (2 c(f_z, f_zbar)).
TwistorLiftValue twistor_lift(const SurfaceJet& jet, const TargetPoint& tp,
                              double orientation, double sign,
                              double conf_tolerance = 1e-6);

// Norm of the (1,0)-projection with respect to J_pm of the tension vector.
struct HolomorphicityField {
    std::vector<double> residual; // per interior node
    double max_residual = 0;
};
HolomorphicityField holomorphicity_residual(const GridImmersion& f, const WeylStructure& W,
                                            double sign);

// Vertical route: (2,0)-part of the covariant z-bar derivative of the lift
// two-form field (with the gauge weight term). Used to cross-check the
// projection route.
HolomorphicityField lift_vertical_defect(const GridImmersion& f, const WeylStructure& W,
                                         double sign);

struct SplitPair {
    CVec4 alpha;   // (f_z - i J f_z)/2, holomorphic part
    CVec4 betabar; // (f_z + i J f_z)/2, antiholomorphic part
    double alpha_norm = 0;
    double betabar_norm = 0;
};
SplitPair alpha_beta_split(const SurfaceJet& jet, const Mat4<double>& g,
                           const Mat4<double>& J);

struct SplitEquationField {
    std::vector<double> res_alpha, res_beta;
    double max_alpha = 0, max_beta = 0;
};
// Residuals of nabla^{D,J}_zbar alpha = -(i/2)(nabla^D_zbar J) betabar and
// nabla^{D,J}_zbar betabar = (i/2)(nabla^D_zbar J) alpha.
SplitEquationField split_equation_residual(const GridImmersion& f, const WeylStructure& W);

struct ZeroRecord {
    std::string section; // "fz", "alpha", "betabar"
    int i = 0, j = 0;
    int order = 0;
    bool order_ok = false;
};

struct IndexReport {
    int R = 0, Q = 0, P = 0;
    std::vector<ZeroRecord> zeros;
    bool alpha_degenerate = false;   // alpha identically ~ 0
    bool betabar_degenerate = false; // betabar identically ~ 0
};

// R, Q, P with per-zero locations and winding orders. Throws
// DegenerateZeroLocus when a section vanishes on a non-isolated set.
IndexReport count_indices(const GridImmersion& f, double rel_threshold = 1e-5);

enum class BundleSelector { AmbientJ, SurfaceJMinus };

struct ChernResult {
    double raw = 0;          // curvature integral before rounding
    int value = 0;           // nearest integer
    double defect = 0;       // |raw - value|
    double imag_residual = 0; // imaginary part of the integral (diagnostic)
};

// First Chern number of the selected complex bundle along f by integrating
// the curvature of the J-compatible connection. Throws GeometryError when
// the integrality defect exceeds 0.05.
ChernResult chern_number(const GridImmersion& f, const WeylStructure& W,
                         BundleSelector bundle);

// Independent route for the ambient bundle: pull the connection back to the
// grid and differentiate there instead of contracting the ambient curvature
// tensor. Used to cross-check the two computations against each other.
ChernResult chern_number_ambient_grid(const GridImmersion& f, const WeylStructure& W);

struct WebsterReport {
    IndexReport indices;
    int chiT = 0; // Euler number of the ramified tangent bundle
    int chiN = 0; // Euler number of the normal bundle
    ChernResult c1_ambient;
    ChernResult c1_minus;
    int web1_lhs = 0, web1_rhs = 0;
    bool web1_holds = false;
    std::string web2_sign; // "P-Q", "Q-P", "both (P=Q)", "neither"
    int adjunction_slack_plus = 0;  // web1_lhs + c1
    int adjunction_slack_minus = 0; // web1_lhs - c1
    bool degenerate = false;
    std::string degenerate_reason;
};

WebsterReport webster_report(const GridImmersion& f, const WeylStructure& W,
                             double rel_threshold = 1e-5);

// J-compatible connection coefficients: Gamma^D corrected by -1/2 J (nabla^D J).
template <class T>
Christoffels<T> christoffels_DJ(const WeylStructure& W, const Vec4<T>& p) {
    const ChartedManifold4& M = *W.chart;
    Christoffels<T> G = christoffels_weyl(W, p);
    FieldJet<T> Jj = field_jet([&M](const auto& x) { return J_at(M, x); }, p);
    // (nabla_i J)^k_j
    T DJ[4][4][4];
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) {
                T s = Jj.d[i][k][j];
                for (int m = 0; m < 4; ++m)
                    s = s + G.G[k][i][m] * Jj.value[m][j] - G.G[m][i][j] * Jj.value[k][m];
                DJ[i][k][j] = s;
            }
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) {
                T b(0);
                for (int m = 0; m < 4; ++m) b = b + Jj.value[k][m] * DJ[i][m][j];
                G.G[k][i][j] = G.G[k][i][j] - T(0.5) * b;
            }
    return G;
}

} // namespace weylgeo
