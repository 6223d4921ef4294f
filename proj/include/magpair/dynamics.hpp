// Forward integration of the coupled velocity equations
//   rdot   = (Omega_t / r^4) (1 - 3 cos^2 alpha cos^2 psi)
//   phidot = (Omega_r / r^3) cos^2 alpha sin 2 psi
// under a commanded field angle, explicit Euler with a fixed step and a hard
// floor on the inter-agent distance.
#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "magpair/magnetics.hpp"

namespace magpair {

/// Time-stamped relative polar state of the pair. phi accumulates without
/// wrapping so that opposite-polarity runs cancel exactly.
struct SimState {
    double t = 0.0;            ///< [s]
    double r = 0.0;            ///< center-to-center distance [m]
    double phi = 0.0;          ///< in-plane bearing angle [deg], accumulated
    double psi_applied = 0.0;  ///< field angle applied at the last step [deg]
    bool clamped = false;      ///< last step hit the distance floor
};

struct IntegratorConfig {
    double dt = 1e-4;              ///< fixed step [s]
    double epsilon_floor = 100e-6; ///< minimum radius, singularity guard [m]
    double alpha = 0.0;            ///< out-of-plane field angle [deg]

    void validate() const {
        if (!(dt > 0.0)) throw std::domain_error("dt must be strictly positive");
        if (!(epsilon_floor > 0.0)) throw std::domain_error("epsilon_floor must be strictly positive");
    }
};

/// Closed-form velocities at (r, psi, alpha). Returns (rdot [m/s],
/// phidot [rad/s]); callers needing degrees convert.
inline std::pair<double, double> velocities(double r, double psi_deg, double alpha_deg,
                                            const DerivedConstants& consts) {
    if (!(r > 0.0)) {
        throw std::domain_error("velocities: r must be strictly positive");
    }
    const double psi = deg_to_rad(psi_deg);
    const double alpha = deg_to_rad(alpha_deg);
    const double cp = std::cos(psi);
    const double ca = std::cos(alpha);
    const double r3 = r * r * r;
    const double r_dot = consts.omega_t / (r3 * r) * (1.0 - 3.0 * ca * ca * cp * cp);
    const double phi_dot = consts.omega_r / r3 * (ca * ca * std::sin(2.0 * psi));
    return {r_dot, phi_dot};
}

/// One explicit-Euler step under a commanded field angle. r is clamped to
/// epsilon_floor afterwards; clamping is silent but flagged on the returned
/// state.
inline SimState step(const SimState& state, double psi_command, const IntegratorConfig& cfg,
                     const DerivedConstants& consts) {
    const auto [r_dot, phi_dot] = velocities(state.r, psi_command, cfg.alpha, consts);
    SimState next;
    next.t = state.t + cfg.dt;
    next.r = state.r + r_dot * cfg.dt;
    next.clamped = next.r < cfg.epsilon_floor;
    if (next.clamped) next.r = cfg.epsilon_floor;
    next.phi = state.phi + rad_to_deg(phi_dot) * cfg.dt;
    next.psi_applied = psi_command;
    return next;
}

/// Integrates one commanded angle per step. The returned trajectory includes
/// the initial state, so its length is schedule size + 1.
inline std::vector<SimState> integrate(const SimState& initial, std::span<const double> psi_schedule,
                                       const IntegratorConfig& cfg, const DerivedConstants& consts) {
    if (psi_schedule.empty()) {
        throw std::invalid_argument("integrate: empty schedule");
    }
    cfg.validate();
    std::vector<SimState> trajectory;
    trajectory.reserve(psi_schedule.size() + 1);
    trajectory.push_back(initial);
    for (double psi : psi_schedule) {
        trajectory.push_back(step(trajectory.back(), psi, cfg, consts));
    }
    return trajectory;
}

}  // namespace magpair
