#include "weylgeo/flow.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace weylgeo {

namespace {

void parallel_rows(int nu, const std::function<void(int)>& body) {
    unsigned hc = std::thread::hardware_concurrency();
    if (hc < 2 || nu < 8) {
        for (int i = 0; i < nu; ++i) body(i);
        return;
    }
    unsigned nthreads = std::min(hc, 4u);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= nu) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace

TensionField tension_field(const GridImmersion& f, const WeylStructure& W) {
    const DomainSpec& dom = f.dom;
    TensionField out;
    std::size_t n = static_cast<std::size_t>(dom.nu) * dom.nv;
    for (auto& a : out.tau) a.assign(n, 0.0);
    std::vector<double> inf_row(dom.nu, 0.0), l2_row(dom.nu, 0.0), e_row(dom.nu, 0.0);
    double dudv = dom.du() * dom.dv();
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex err_mutex;
    parallel_rows(dom.nu, [&](int i) {
        if (failed.load()) return;
        try {
            for (int j = 0; j < dom.nv; ++j) {
                if (!dom.interior(i, j)) continue;
                SurfaceJet jet = f.jet_fd(i, j);
                for (int k = 0; k < 4; ++k)
                    if (!std::isfinite(jet.f[k]))
                        throw FlowDivergence("non-finite sample during flow");
                if (!f.chart->in_domain(f.chart->wrap(jet.f)))
                    throw FlowDivergence("flow sample escaped the chart domain");
                TargetPoint tp = target_point(W, jet.f);
                double lam = f.lambda_at(i, j);
                Vec4<double> tau = tension_real(jet, tp, lam);
                double tn = norm_g(tp.g, tau);
                for (int k = 0; k < 4; ++k) out.tau[k][f.idx(i, j)] = tau[k];
                inf_row[i] = std::max(inf_row[i], tn);
                l2_row[i] += tn * tn * dudv;
                double e2 = inner(tp.g, jet.fu, jet.fu) + inner(tp.g, jet.fv, jet.fv);
                e_row[i] += std::exp(2.0 * lam) * e2 * dudv;
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            failed = true;
            error_msg = e.what();
        }
    });
    if (failed) throw FlowDivergence(error_msg);
    for (int i = 0; i < dom.nu; ++i) {
        out.tau_inf = std::max(out.tau_inf, inf_row[i]);
        out.tau_l2 += l2_row[i];
        out.energy += e_row[i];
    }
    out.tau_l2 = std::sqrt(out.tau_l2);
    return out;
}

namespace {

GridImmersion advanced(const GridImmersion& base, const TensionField& tf, double dt) {
    GridImmersion g = base;
    g.expression_backed = false; // samples are authoritative once flowing
    std::size_t n = g.samples[0].size();
    for (int k = 0; k < 4; ++k)
        for (std::size_t s = 0; s < n; ++s) g.samples[k][s] += dt * tf.tau[k][s];
    return g;
}

void wrap_target(GridImmersion& g) {
    for (int k = 0; k < 4; ++k) {
        const CoordSpec& c = g.chart->coords[k];
        if (!c.periodic) continue;
        for (auto& v : g.samples[k]) {
            v = std::fmod(v, c.period);
            if (v < 0) v += c.period;
        }
    }
}

} // namespace

FlowState flow_step(const FlowState& s, const WeylStructure& W, FlowMethod method,
                    double dt) {
    FlowState out = s;
    if (method == FlowMethod::Euler) {
        TensionField k1 = tension_field(s.f, W);
        out.f = advanced(s.f, k1, dt);
        out.tau_inf = k1.tau_inf;
        out.tau_l2 = k1.tau_l2;
        out.energy = k1.energy;
    } else {
        TensionField k1 = tension_field(s.f, W);
        GridImmersion f2 = advanced(s.f, k1, dt / 2);
        TensionField k2 = tension_field(f2, W);
        GridImmersion f3 = advanced(s.f, k2, dt / 2);
        TensionField k3 = tension_field(f3, W);
        GridImmersion f4 = advanced(s.f, k3, dt);
        TensionField k4 = tension_field(f4, W);
        out.f = s.f;
        out.f.expression_backed = false;
        std::size_t n = out.f.samples[0].size();
        for (int k = 0; k < 4; ++k)
            for (std::size_t t = 0; t < n; ++t)
                out.f.samples[k][t] += dt / 6.0 *
                                       (k1.tau[k][t] + 2 * k2.tau[k][t] + 2 * k3.tau[k][t] +
                                        k4.tau[k][t]);
        out.tau_inf = k1.tau_inf;
        out.tau_l2 = k1.tau_l2;
        out.energy = k1.energy;
    }
    wrap_target(out.f);
    out.time = s.time + dt;
    out.dt = dt;
    out.steps_taken = s.steps_taken + 1;
    return out;
}

FlowResult run_flow(GridImmersion initial, const WeylStructure& W, const FlowOptions& opt) {
    FlowResult res;
    const DomainSpec& dom = initial.dom;
    double h = std::min(dom.du(), dom.dv());
    double dt = opt.dt_override > 0 ? opt.dt_override : opt.kappa * h * h;

    FlowState s;
    s.f = std::move(initial);
    s.dt = dt;

    TensionField t0 = tension_field(s.f, W);
    s.tau_inf = t0.tau_inf;
    s.tau_l2 = t0.tau_l2;
    s.energy = t0.energy;
    res.trajectory.push_back({0.0, s.tau_inf, s.tau_l2, s.energy});

    double initial_inf = s.tau_inf;
    double prev_l2 = s.tau_l2;
    for (int step = 0; step < opt.max_steps; ++step) {
        if (opt.residual_target > 0 && s.tau_inf <= opt.residual_target) {
            res.converged = true;
            break;
        }
        s = flow_step(s, W, opt.method, dt);
        if (s.tau_inf > 10.0 * std::max(initial_inf, 1e-14))
            throw FlowDivergence("residual grew 10x from its initial value");
        if (opt.monotonicity_abort &&
            s.tau_l2 > prev_l2 * (1.0 + 1e-9) + 1e-13)
            throw FlowDivergence("||tau||_2 increased during the flow (unstable step size?)");
        prev_l2 = s.tau_l2;
        if (step % opt.log_every == 0 || step == opt.max_steps - 1)
            res.trajectory.push_back({s.time, s.tau_inf, s.tau_l2, s.energy});
    }
    if (opt.residual_target > 0 && s.tau_inf <= opt.residual_target) res.converged = true;
    if (res.trajectory.back().time != s.time)
        res.trajectory.push_back({s.time, s.tau_inf, s.tau_l2, s.energy});
    res.state = std::move(s);
    return res;
}

} // namespace weylgeo
