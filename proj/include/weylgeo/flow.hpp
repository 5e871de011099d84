#pragma once

// Tension flow df/dt = tau on a sampled grid immersion: explicit Euler or
// RK4 stepping, residual and energy monitors, divergence guards.

#include <functional>

#include "weylgeo/surface.hpp"

namespace weylgeo {

enum class FlowMethod { Euler, RK4 };

struct FlowState {
    GridImmersion f;
    double time = 0;
    double dt = 0;
    int steps_taken = 0;
    double tau_inf = 0;
    double tau_l2 = 0;
    double energy = 0;
};

struct FlowOptions {
    FlowMethod method = FlowMethod::RK4;
    double kappa = 0.2;          // dt = kappa * h_min^2
    double dt_override = 0;      // > 0 forces the step size
    int max_steps = 10000;
    double residual_target = 0;  // stop when ||tau||_inf falls below (0 = off)
    bool monotonicity_abort = true;
    int log_every = 1;
};

struct FlowTrajectoryPoint {
    double time;
    double tau_inf;
    double tau_l2;
    double energy;
};

struct FlowResult {
    FlowState state;
    std::vector<FlowTrajectoryPoint> trajectory;
    bool converged = false;
};

// Tension field over all interior nodes plus the residual/energy monitors.
struct TensionField {
    std::array<std::vector<double>, 4> tau; // zero on margin nodes
    double tau_inf = 0;
    double tau_l2 = 0;
    double energy = 0;
};

TensionField tension_field(const GridImmersion& f, const WeylStructure& W);

FlowState flow_step(const FlowState& s, const WeylStructure& W, FlowMethod method,
                    double dt);

FlowResult run_flow(GridImmersion initial, const WeylStructure& W, const FlowOptions& opt);

} // namespace weylgeo
