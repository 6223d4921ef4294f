// Closed-loop scenario execution: a target schedule, a controller stack, and
// the Euler plant, producing a full time-series trace.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "magpair/control.hpp"
#include "magpair/dynamics.hpp"

namespace magpair {

struct TargetPoint {
    double start_time = 0.0;  ///< [s]
    double r_des = 0.0;       ///< [m]
};

struct ScenarioSpec {
    double initial_r = 0.0;    ///< [m]
    double initial_phi = 0.0;  ///< [deg]
    std::vector<TargetPoint> target_schedule;
    ControllerConfig controller;
    EnvelopeConfig envelope;
    IntegratorConfig integrator;
    double duration = 0.0;        ///< [s]
    double control_period = 1e-4; ///< controller update interval [s]; the
                                  ///< command is held between updates, so
                                  ///< refining dt does not change the
                                  ///< controller's discrete behaviour

    void validate() const {
        if (!(initial_r > 0.0)) throw std::domain_error("initial_r must be strictly positive");
        if (target_schedule.empty()) throw std::domain_error("target_schedule must not be empty");
        if (target_schedule.front().start_time != 0.0) {
            throw std::domain_error("target_schedule must start at t = 0");
        }
        for (std::size_t i = 0; i < target_schedule.size(); ++i) {
            if (!(target_schedule[i].r_des > 0.0)) {
                throw std::domain_error("target r_des must be strictly positive");
            }
            if (i > 0 && !(target_schedule[i].start_time > target_schedule[i - 1].start_time)) {
                throw std::domain_error("target_schedule times must be strictly increasing");
            }
        }
        if (!(duration >= target_schedule.back().start_time) || !(duration > 0.0)) {
            throw std::domain_error("duration must cover the target schedule");
        }
        if (!(control_period > 0.0)) throw std::domain_error("control_period must be strictly positive");
        controller.validate();
        envelope.validate();
        integrator.validate();
    }
};

struct TraceRecord {
    double t = 0.0;
    double r = 0.0;
    double r_des = 0.0;
    double psi_cmd = 0.0;      ///< controller + envelope command [deg]
    double psi_applied = 0.0;  ///< angle actually applied [deg]
    double phi = 0.0;          ///< accumulated bearing angle [deg]
    bool clamped = false;      ///< the step arriving at this sample hit the floor
    EnvelopeBranch branch = EnvelopeBranch::Inner;
};

/// Uniform-grid time series of one scenario run. `segments` mirrors the
/// spec's target schedule so metrics can be computed from the trace alone.
struct Trace {
    std::vector<TraceRecord> records;
    std::vector<TargetPoint> segments;
    double duration = 0.0;
    double dt = 0.0;      ///< plant step of the run [s]
    int stride = 1;       ///< records are every stride-th plant step
    bool aborted = false;
    std::string abort_reason;
};

inline const char* branch_name(EnvelopeBranch b) {
    switch (b) {
        case EnvelopeBranch::Repulsion: return "repulsion";
        case EnvelopeBranch::Attraction: return "attraction";
        case EnvelopeBranch::Inner: return "inner";
    }
    return "inner";
}

/// Runs the closed loop: at each control update the active target is looked
/// up and the pipeline produces the applied angle; the plant advances at
/// integrator.dt with the angle held between updates. Records every
/// record_stride-th plant sample (plus the final one). If the model becomes
/// inapplicable (r at or below the envelope epsilon) the partial trace is
/// returned with an abort tag instead of throwing.
inline Trace run_scenario(const ScenarioSpec& spec, const DerivedConstants& consts,
                          int record_stride = 1) {
    spec.validate();
    if (record_stride < 1) throw std::domain_error("record_stride must be >= 1");

    const auto steps_total = static_cast<std::int64_t>(std::llround(spec.duration / spec.integrator.dt));
    const auto ctrl_every = std::max<std::int64_t>(
        1, std::llround(spec.control_period / spec.integrator.dt));

    Trace trace;
    trace.segments = spec.target_schedule;
    trace.duration = spec.duration;
    trace.dt = spec.integrator.dt;
    trace.stride = record_stride;
    trace.records.reserve(static_cast<std::size_t>(steps_total / record_stride) + 2);

    ControllerStack stack(spec.controller, spec.envelope);
    SimState state;
    state.r = spec.initial_r;
    state.phi = spec.initial_phi;

    std::size_t segment = 0;
    ControllerOutput out;
    for (std::int64_t k = 0; k <= steps_total; ++k) {
        state.t = static_cast<double>(k) * spec.integrator.dt;
        while (segment + 1 < spec.target_schedule.size() &&
               state.t >= spec.target_schedule[segment + 1].start_time - 0.5 * spec.integrator.dt) {
            ++segment;
        }
        const double r_des = spec.target_schedule[segment].r_des;

        if (k % ctrl_every == 0) {
            try {
                out = stack.update(state.r, r_des);
            } catch (const model_error& e) {
                trace.aborted = true;
                trace.abort_reason = e.what();
                trace.records.push_back({state.t, state.r, r_des, out.commanded, out.applied,
                                         state.phi, state.clamped, out.branch});
                return trace;
            }
        }
        if (k % record_stride == 0 || k == steps_total) {
            trace.records.push_back({state.t, state.r, r_des, out.commanded, out.applied,
                                     state.phi, state.clamped, out.branch});
        }
        if (k < steps_total) {
            state = step(state, out.applied, spec.integrator, consts);
        }
    }
    return trace;
}

}  // namespace magpair
