#include "weylgeo/scenario.hpp"

#include <fstream>

#include <json.hpp>

namespace weylgeo {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok)
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
}

ChartPtr parse_inline_chart(const json& j) {
    check_keys(j, "manifold",
               {"coordinates", "periods", "ranges", "metric", "alpha", "J", "orientation"});
    auto chart = std::make_shared<ChartedManifold4>();
    auto names = j.at("coordinates").get<std::vector<std::string>>();
    if (names.size() != 4) throw ConfigError("manifold.coordinates must list 4 names");
    auto periods = j.at("periods").get<std::vector<double>>();
    if (periods.size() != 4) throw ConfigError("manifold.periods must list 4 values (0 = open)");
    std::vector<std::vector<double>> ranges(4, {-1.0, 1.0});
    if (j.contains("ranges")) {
        ranges = j.at("ranges").get<std::vector<std::vector<double>>>();
        if (ranges.size() != 4) throw ConfigError("manifold.ranges must list 4 intervals");
    }
    for (int i = 0; i < 4; ++i) {
        CoordSpec c;
        c.name = names[static_cast<std::size_t>(i)];
        c.periodic = periods[static_cast<std::size_t>(i)] > 0;
        c.period = c.periodic ? periods[static_cast<std::size_t>(i)] : 0.0;
        if (ranges[static_cast<std::size_t>(i)].size() != 2)
            throw ConfigError("manifold.ranges entries must be [lo, hi]");
        c.lo = ranges[static_cast<std::size_t>(i)][0];
        c.hi = ranges[static_cast<std::size_t>(i)][1];
        if (c.periodic) { c.lo = 0; c.hi = c.period; }
        chart->coords[static_cast<std::size_t>(i)] = c;
    }
    VarTable vars = chart->vars();
    auto metric = j.at("metric").get<std::vector<std::vector<std::string>>>();
    if (metric.size() != 4) throw ConfigError("manifold.metric must be a 4x4 array");
    for (int i = 0; i < 4; ++i) {
        if (metric[static_cast<std::size_t>(i)].size() != 4)
            throw ConfigError("manifold.metric rows must have 4 entries");
        for (int k = 0; k < 4; ++k) {
            const std::string& src = metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (!src.empty() && src != "0")
                chart->metric[i][k] = parse(src, vars);
        }
    }
    if (j.contains("alpha")) {
        auto a = j.at("alpha").get<std::vector<std::string>>();
        if (a.size() != 4) throw ConfigError("manifold.alpha must list 4 expressions");
        chart->has_alpha = true;
        for (int i = 0; i < 4; ++i)
            if (!a[static_cast<std::size_t>(i)].empty() && a[static_cast<std::size_t>(i)] != "0")
                chart->alpha[i] = parse(a[static_cast<std::size_t>(i)], vars);
    }
    if (j.contains("J")) {
        auto JJ = j.at("J").get<std::vector<std::vector<std::string>>>();
        if (JJ.size() != 4) throw ConfigError("manifold.J must be a 4x4 array");
        chart->has_J = true;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                const std::string& src = JJ[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                if (!src.empty() && src != "0") chart->J[i][k] = parse(src, vars);
            }
    }
    chart->orientation = j.value("orientation", 1.0);
    if (chart->orientation != 1.0 && chart->orientation != -1.0)
        throw ConfigError("manifold.orientation must be +1 or -1");
    return chart;
}

CatalogSurface parse_inline_surface(const json& j, const VarTable& vars) {
    check_keys(j, "surface", {"components", "domain", "lambda", "name"});
    CatalogSurface s;
    s.name = j.value("name", std::string("inline"));
    auto comps = j.at("components").get<std::vector<std::string>>();
    if (comps.size() != 4) throw ConfigError("surface.components must list 4 expressions");
    VarTable uv{{"u", "v"}};
    for (int k = 0; k < 4; ++k)
        if (!comps[static_cast<std::size_t>(k)].empty())
            s.components[k] = parse(comps[static_cast<std::size_t>(k)], uv);
    if (j.contains("lambda")) {
        std::string lam = j.at("lambda").get<std::string>();
        if (!lam.empty() && lam != "0") s.lambda = parse(lam, uv);
    }
    const json& d = j.at("domain");
    check_keys(d, "surface.domain", {"type", "origin", "size", "periodic"});
    std::string type = d.value("type", std::string("torus"));
    auto origin = d.value("origin", std::vector<double>{0.0, 0.0});
    auto size = d.at("size").get<std::vector<double>>();
    if (origin.size() != 2 || size.size() != 2)
        throw ConfigError("surface.domain origin/size must have 2 entries");
    s.domain.u0 = origin[0];
    s.domain.v0 = origin[1];
    s.domain.Lu = size[0];
    s.domain.Lv = size[1];
    if (type == "torus") {
        s.domain.periodic_u = s.domain.periodic_v = true;
    } else if (type == "rectangle") {
        s.domain.periodic_u = s.domain.periodic_v = false;
    } else {
        throw ConfigError("surface.domain.type must be torus or rectangle");
    }
    if (d.contains("periodic")) {
        auto per = d.at("periodic").get<std::vector<bool>>();
        if (per.size() != 2) throw ConfigError("surface.domain.periodic must have 2 entries");
        s.domain.periodic_u = per[0];
        s.domain.periodic_v = per[1];
    }
    (void)vars;
    s.ann = SurfaceAnnotations{};
    s.ann.conformal = false;
    return s;
}

} // namespace

WeylStructure Scenario::weyl() const {
    if (weyl_mode == "levi_civita") return WeylStructure::levi_civita(chart);
    if (weyl_mode == "canonical") {
        if (!chart->has_J)
            throw ConfigError("weyl: canonical requires a chart with J");
        return WeylStructure::canonical(chart);
    }
    if (weyl_mode == "alpha") {
        auto w = WeylStructure::from_exprs(chart, alpha_exprs);
        return w;
    }
    // auto: canonical when J is available, the chart alpha when present,
    // Levi-Civita otherwise
    if (chart->has_J) return WeylStructure::canonical(chart);
    if (chart->has_alpha) {
        std::array<Expr, 4> a = chart->alpha;
        return WeylStructure::from_exprs(chart, a);
    }
    return WeylStructure::levi_civita(chart);
}

GridImmersion Scenario::build_surface() const {
    if (!has_surface) throw ConfigError("scenario has no surface");
    DomainSpec d = surface_def.domain;
    d.nu = resolution;
    d.nv = resolution;
    return GridImmersion::from_exprs(chart, d, surface_def.components, surface_def.lambda);
}

Scenario load_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
    }
    try {
        check_keys(j, "scenario",
                   {"schema", "seed", "resolution", "manifold", "weyl", "surface",
                    "tolerances", "flow", "out"});
        Scenario s;
        s.schema = j.value("schema", 1);
        if (s.schema != 1) throw ConfigError("unsupported scenario schema version");
        s.seed = j.value("seed", 0ull);
        s.resolution = j.value("resolution", 64);
        if (s.resolution < 16) throw ConfigError("resolution must be at least 16");

        const json& m = j.at("manifold");
        if (m.is_string()) {
            s.manifold_name = m.get<std::string>();
            s.entry = find_entry(s.manifold_name);
            s.chart = s.entry->chart;
        } else {
            s.chart = parse_inline_chart(m);
        }

        if (j.contains("weyl")) {
            const json& w = j.at("weyl");
            if (w.is_string()) {
                s.weyl_mode = w.get<std::string>();
                if (s.weyl_mode != "canonical" && s.weyl_mode != "levi_civita")
                    throw ConfigError("weyl must be canonical, levi_civita or {alpha:[...]}");
            } else {
                check_keys(w, "weyl", {"alpha"});
                auto a = w.at("alpha").get<std::vector<std::string>>();
                if (a.size() != 4) throw ConfigError("weyl.alpha must list 4 expressions");
                VarTable vars = s.chart->vars();
                for (int i = 0; i < 4; ++i)
                    if (!a[static_cast<std::size_t>(i)].empty() && a[static_cast<std::size_t>(i)] != "0")
                        s.alpha_exprs[i] = parse(a[static_cast<std::size_t>(i)], vars);
                s.weyl_mode = "alpha";
            }
        }

        if (j.contains("surface")) {
            const json& sf = j.at("surface");
            if (sf.is_string()) {
                if (!s.entry)
                    throw ConfigError("named surfaces need a catalog manifold");
                const CatalogSurface* cs = s.entry->find_surface(sf.get<std::string>());
                if (!cs)
                    throw ConfigError("unknown surface '" + sf.get<std::string>() + "' in '" +
                                      s.manifold_name + "'");
                s.surface_def = *cs;
            } else {
                s.surface_def = parse_inline_surface(sf, s.chart->vars());
            }
            s.has_surface = true;
        }

        if (j.contains("tolerances")) {
            for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it) {
                double v = it.value().get<double>();
                if (v <= 0) throw ConfigError("tolerance '" + it.key() + "' must be positive");
                s.tolerances[it.key()] = v;
            }
        }

        if (j.contains("flow")) {
            const json& fl = j.at("flow");
            check_keys(fl, "flow",
                       {"method", "kappa", "dt", "max_steps", "residual_target", "log_every"});
            std::string method = fl.value("method", std::string("rk4"));
            if (method == "euler") s.flow.method = FlowMethod::Euler;
            else if (method == "rk4") s.flow.method = FlowMethod::RK4;
            else throw ConfigError("flow.method must be euler or rk4");
            s.flow.kappa = fl.value("kappa", 0.2);
            s.flow.dt_override = fl.value("dt", 0.0);
            s.flow.max_steps = fl.value("max_steps", 10000);
            s.flow.residual_target = fl.value("residual_target", 0.0);
            s.flow.log_every = fl.value("log_every", 1);
            if (s.flow.kappa <= 0) throw ConfigError("flow.kappa must be positive");
        }

        s.out_dir = j.value("out", std::string("."));
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario error: ") + e.what());
    }
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_scenario_text(text);
}

} // namespace weylgeo
