// Controller stack for radial-distance regulation through the field angle:
// saturator, piecewise envelope, P / PID inner laws, cascade PD smoother, and
// the bang-bang phase regulator. The inner laws command an offset from the
// zero-force angle psi_star, so r = r_des maps to psi = psi_star for every
// controller.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "magpair/magnetics.hpp"

namespace magpair {

/// Hard clamp of a commanded angle to [0, 90] degrees, the range over which
/// the radial-force regimes are defined.
inline double saturate(double psi_raw) {
    if (!std::isfinite(psi_raw)) {
        throw std::domain_error("saturate: non-finite command");
    }
    if (psi_raw < 0.0) return 0.0;
    if (psi_raw > 90.0) return 90.0;
    return psi_raw;
}

/// Operating band of the inner controller. Below r_min the envelope forces
/// full repulsion, above r_max full attraction; epsilon is the distance below
/// which the aligned-dipole model itself is invalid.
struct EnvelopeConfig {
    double r_min = 300e-6;
    double r_max = 700e-6;
    double epsilon = 100e-6;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < r_min && r_min < r_max)) {
            throw std::domain_error("envelope requires 0 < epsilon < r_min < r_max");
        }
    }
};

enum class EnvelopeBranch { Repulsion, Inner, Attraction };

inline EnvelopeBranch envelope_branch(double r, const EnvelopeConfig& cfg) {
    if (r <= cfg.epsilon) {
        throw model_error("envelope: r at or below epsilon, model inapplicable");
    }
    if (r < cfg.r_min) return EnvelopeBranch::Repulsion;
    if (r > cfg.r_max) return EnvelopeBranch::Attraction;
    return EnvelopeBranch::Inner;
}

/// Piecewise outer law: 90 deg below r_min, 0 deg above r_max, inner command
/// passed through in between.
inline double envelope(double r, double inner, const EnvelopeConfig& cfg) {
    switch (envelope_branch(r, cfg)) {
        case EnvelopeBranch::Repulsion: return 90.0;
        case EnvelopeBranch::Attraction: return 0.0;
        case EnvelopeBranch::Inner: return inner;
    }
    return inner;
}

/// Proportional law in its literal one-sided form,
/// psi = psi_star - k_p |r - r_des| / scale. The error magnitude only ever
/// lowers the angle, i.e. commands attraction; regulation from below relies
/// on the envelope (or on the signed variant, see ControllerStack).
inline double p_command(double r, double r_des, double k_p, double scale) {
    const double error = std::abs(r - r_des) / scale;
    return saturate(zero_force_angle_deg() - k_p * error);
}

/// PID gains. Errors are expressed in units of error_unit_scale metres
/// (micrometres by default); integral and derivative terms are per-step sums
/// and differences, so gains absorb the control period.
struct PidConfig {
    double k_p = 1.0;    ///< deg per error unit
    double k_i = 1e-4;   ///< deg per error unit per step
    double k_d = 0.5;    ///< deg per error-unit step difference
    double error_unit_scale = 1e-6;  ///< metres per error unit

    void validate() const {
        if (!std::isfinite(k_p) || !std::isfinite(k_i) || !std::isfinite(k_d) || k_p < 0.0) {
            throw std::domain_error("pid gains must be finite with k_p >= 0");
        }
        if (!(error_unit_scale > 0.0)) {
            throw std::domain_error("error_unit_scale must be strictly positive");
        }
    }
};

struct PidState {
    double integral = 0.0;    ///< accumulated k_i * error [deg]
    double prev_error = 0.0;  ///< error units
    bool initialized = false;
};

/// One PID update with signed error e = (r - r_des) / scale:
///   psi_i += k_i e   (conditional, see below)
///   psi   = saturate(psi_star - (k_p e + psi_i + k_d (e - e_prev)))
/// The first call takes e_prev = e, so there is no derivative kick.
/// Anti-windup is conditional integration: the accumulator is frozen whenever
/// the pre-saturation command lies outside [0, 90] and integrating the
/// current error would push it further out.
inline std::pair<double, PidState> pid_command(double r, double r_des, const PidConfig& cfg,
                                               PidState state) {
    const double error = (r - r_des) / cfg.error_unit_scale;
    if (!state.initialized) {
        state.prev_error = error;
        state.initialized = true;
    }
    const double derivative = cfg.k_d * (error - state.prev_error);
    const double candidate_integral = state.integral + cfg.k_i * error;

    const double psi_star = zero_force_angle_deg();
    double raw = psi_star - (cfg.k_p * error + candidate_integral + derivative);
    const bool windup = (raw < 0.0 && error > 0.0) || (raw > 90.0 && error < 0.0);
    if (windup) {
        raw = psi_star - (cfg.k_p * error + state.integral + derivative);
    } else {
        state.integral = candidate_integral;
    }
    state.prev_error = error;
    return {saturate(raw), state};
}

/// Cascade PD stage smoothing the angle actually applied to the field. Gains
/// are dimensionless (degrees per degree of angle error); k_p2 in (0, 1] is
/// the per-step fraction of the remaining gap that is closed.
struct SmootherConfig {
    double k_p2 = 0.02;
    double k_d2 = 0.01;

    void validate() const {
        if (!(k_p2 > 0.0 && k_p2 <= 1.0) || !std::isfinite(k_d2)) {
            throw std::domain_error("smoother requires k_p2 in (0, 1] and finite k_d2");
        }
    }
};

struct SmootherState {
    double prev_applied = 0.0;      ///< [deg]
    double prev_angle_error = 0.0;  ///< [deg]
    bool initialized = false;
};

/// psi_out = saturate(prev + k_p2 e + k_d2 (e - e_prev)), e = cmd - prev.
/// First call adopts the command directly, so there is no startup transient.
inline std::pair<double, SmootherState> smooth(double psi_cmd, const SmootherConfig& cfg,
                                               SmootherState state) {
    double out;
    if (!state.initialized) {
        out = psi_cmd;
        state.prev_angle_error = 0.0;
        state.initialized = true;
    } else {
        const double angle_error = psi_cmd - state.prev_applied;
        out = saturate(state.prev_applied + cfg.k_p2 * angle_error +
                       cfg.k_d2 * (angle_error - state.prev_angle_error));
        state.prev_angle_error = angle_error;
    }
    state.prev_applied = out;
    return {out, state};
}

/// Phase regulator: once the radius is held, alternate the sign of psi_star
/// to steer the bearing angle without disturbing r (r depends on cos^2 psi,
/// even; phi on sin 2 psi, odd). Positive psi yields positive phidot. Inside
/// the deadband the positive hold angle is kept, accepting residual drift.
inline double bang_bang_phi(double phi_deg, double phi_des_deg, double deadband_deg,
                            const DerivedConstants& consts) {
    const double error = phi_des_deg - phi_deg;
    if (error < -deadband_deg) return -consts.psi_star;
    return consts.psi_star;
}

enum class ControllerType { P, Pid, PidPd };

/// Error convention for the P law. Eq-form "absolute" is the literal
/// one-sided law of p_command; "signed" extends it to command repulsion when
/// r < r_des, which single-target runs started below the desired radius need.
enum class PErrorMode { Signed, Absolute };

struct ControllerConfig {
    ControllerType type = ControllerType::Pid;
    PidConfig gains;  ///< k_i = k_d = 0 for type P
    PErrorMode p_error_mode = PErrorMode::Signed;
    SmootherConfig smoother;  ///< used only for type PidPd

    void validate() const {
        gains.validate();
        if (type == ControllerType::PidPd) smoother.validate();
    }
};

struct ControllerOutput {
    double inner = 0.0;      ///< inner-law command [deg]
    double commanded = 0.0;  ///< after the envelope [deg]
    double applied = 0.0;    ///< after smoothing and saturation [deg]
    EnvelopeBranch branch = EnvelopeBranch::Inner;
};

/// Fixed pipeline: inner law -> envelope -> smoother -> saturate. Carries the
/// mutable controller memory; one instance per scenario execution.
class ControllerStack {
  public:
    ControllerStack(ControllerConfig config, EnvelopeConfig envelope)
        : config_(config), envelope_(envelope) {
        config_.validate();
        envelope_.validate();
    }

    ControllerOutput update(double r, double r_des) {
        ControllerOutput out;
        switch (config_.type) {
            case ControllerType::P:
                if (config_.p_error_mode == PErrorMode::Absolute) {
                    out.inner = p_command(r, r_des, config_.gains.k_p, config_.gains.error_unit_scale);
                } else {
                    const double error = (r - r_des) / config_.gains.error_unit_scale;
                    out.inner = saturate(zero_force_angle_deg() - config_.gains.k_p * error);
                }
                break;
            case ControllerType::Pid:
            case ControllerType::PidPd: {
                auto [psi, next] = pid_command(r, r_des, config_.gains, pid_state_);
                pid_state_ = next;
                out.inner = psi;
                break;
            }
        }
        out.branch = envelope_branch(r, envelope_);
        out.commanded = envelope(r, out.inner, envelope_);
        if (config_.type == ControllerType::PidPd) {
            auto [psi, next] = smooth(out.commanded, config_.smoother, smoother_state_);
            smoother_state_ = next;
            out.applied = psi;
        } else {
            out.applied = saturate(out.commanded);
        }
        return out;
    }

    void reset() {
        pid_state_ = {};
        smoother_state_ = {};
    }

    const ControllerConfig& config() const { return config_; }

  private:
    ControllerConfig config_;
    EnvelopeConfig envelope_;
    PidState pid_state_;
    SmootherState smoother_state_;
};

}  // namespace magpair
