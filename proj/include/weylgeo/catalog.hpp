#pragma once

// Built-in example manifolds, Hermitian structures and reference surfaces.
// Coordinate conventions are documented in the README; every annotation is
// exercised by the acceptance suite.

#include "weylgeo/surface.hpp"

namespace weylgeo {

struct SurfaceAnnotations {
    bool weyl_minimal = false;
    bool minimal = false;
    bool j_holomorphic = false;
    bool lagrangian = false;
    bool conformal = true; // weakly conformal parametrization expected
};

struct CatalogSurface {
    std::string name;
    std::array<Expr, 4> components; // functions of (u, v)
    Expr lambda;
    DomainSpec domain; // node counts here are the 64x64 baseline
    SurfaceAnnotations ann;
};

struct CatalogEntry {
    std::string name;
    ChartPtr chart;
    ChartPtr second_chart; // alternate presentation when applicable
    bool hermitian = false;
    std::vector<CatalogSurface> surfaces;

    WeylStructure natural_weyl() const {
        return hermitian ? WeylStructure::canonical(chart) : WeylStructure::levi_civita(chart);
    }
    const CatalogSurface* find_surface(const std::string& sname) const {
        for (const auto& s : surfaces)
            if (s.name == sname) return &s;
        return nullptr;
    }
    GridImmersion build_surface(const CatalogSurface& s, int resolution) const {
        DomainSpec d = s.domain;
        d.nu = resolution;
        d.nv = resolution;
        return GridImmersion::from_exprs(chart, d, s.components, s.lambda);
    }
};

CatalogEntry flat_kahler();
CatalogEntry hopf_surface();
CatalogEntry hopf_cover();
CatalogEntry principal_bundle(double F1, double F2);
CatalogEntry perturbed_hermitian();

// The product chart with a unit 3-sphere factor (used by chart-level tests;
// the hopf_surface entry itself carries the radius-2 sphere that normalizes
// its Lee form to d phi).
ChartPtr hopf_unit_product_chart();

std::vector<CatalogEntry> all_entries();
CatalogEntry find_entry(const std::string& name);

} // namespace weylgeo
