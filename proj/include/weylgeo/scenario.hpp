#pragma once

// Scenario files: JSON configuration naming a manifold (catalog entry or
// inline chart), a Weyl structure, a surface, grid resolution, tolerances
// and output paths. Unknown keys are rejected.

#include <map>
#include <optional>
#include <string>

#include "weylgeo/catalog.hpp"
#include "weylgeo/flow.hpp"

namespace weylgeo {

struct Scenario {
    int schema = 1;
    std::uint64_t seed = 0;
    int resolution = 64;

    std::string manifold_name; // empty for inline charts
    ChartPtr chart;
    std::optional<CatalogEntry> entry;

    std::string weyl_mode = "auto"; // auto | canonical | levi_civita | alpha
    std::array<Expr, 4> alpha_exprs;

    bool has_surface = false;
    CatalogSurface surface_def;

    std::map<std::string, double> tolerances;
    FlowOptions flow;
    std::string out_dir = ".";

    WeylStructure weyl() const;
    GridImmersion build_surface() const;
    double tol(const std::string& key, double fallback) const {
        auto it = tolerances.find(key);
        return it == tolerances.end() ? fallback : it->second;
    }
};

Scenario load_scenario_file(const std::string& path);
Scenario load_scenario_text(const std::string& text);

} // namespace weylgeo
