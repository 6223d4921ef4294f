// Summary statistics over scenario traces: per-segment convergence into a
// +-2% band with permanence, steady-state error, applied-angle fluctuation,
// and trace-wide maximum angle step. Also the paired controller-vs-controller
// comparison built on top of them.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "magpair/scenario.hpp"

namespace magpair {

/// Configuration or scenario-compatibility failure (distinct from model_error).
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kConvergenceBandFraction = 0.02;  ///< +-2% of r_des
inline constexpr double kFluctuationWindowFraction = 0.30;
inline constexpr double kSteadyWindowFraction = 0.10;

struct SegmentMetrics {
    int index = 0;
    double start_time = 0.0;
    double end_time = 0.0;
    double r_des = 0.0;
    bool reached = false;
    /// First entry into the band with permanence until segment end, relative
    /// to segment start [s]; NaN when never reached.
    double convergence_time = std::numeric_limits<double>::quiet_NaN();
    double steady_state_error = 0.0;   ///< |mean(r - r_des)| over final 10% [m]
    double fluctuation_band = 0.0;     ///< max |psi - mean| over final 30% [deg]
    double mean_psi_final10 = 0.0;     ///< mean applied angle over final 10% [deg]
    double min_r = 0.0;                ///< [m]
    double max_r = 0.0;                ///< [m]
};

struct Metrics {
    std::vector<SegmentMetrics> segments;
    double max_angle_step = 0.0;  ///< max |delta psi_applied| between samples [deg]
};

inline Metrics compute_metrics(const Trace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("compute_metrics: empty trace");
    if (trace.aborted) throw std::invalid_argument("compute_metrics: aborted trace");
    if (trace.segments.empty()) throw std::invalid_argument("compute_metrics: trace has no segments");

    Metrics metrics;
    const auto& rec = trace.records;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        metrics.max_angle_step =
            std::max(metrics.max_angle_step, std::abs(rec[i].psi_applied - rec[i - 1].psi_applied));
    }

    for (std::size_t s = 0; s < trace.segments.size(); ++s) {
        SegmentMetrics seg;
        seg.index = static_cast<int>(s);
        seg.start_time = trace.segments[s].start_time;
        seg.end_time =
            s + 1 < trace.segments.size() ? trace.segments[s + 1].start_time : trace.duration;
        seg.r_des = trace.segments[s].r_des;
        const bool last = s + 1 == trace.segments.size();

        // Samples in [start, end); the sample at a target switch belongs to
        // the incoming segment. The final segment is closed at duration.
        std::size_t lo = rec.size(), hi = rec.size();
        const double grid = trace.dt * trace.stride;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (lo == rec.size() && rec[i].t >= seg.start_time - 0.5 * grid) lo = i;
            if (rec[i].t < seg.end_time - 0.5 * grid || (last && rec[i].t <= seg.end_time + 0.5 * grid)) {
                hi = i + 1;
            }
        }
        if (lo >= hi || hi - lo < 10) {
            throw std::invalid_argument("compute_metrics: segment " + std::to_string(s) +
                                        " shorter than 10 samples, metrics undefined");
        }
        const std::size_t n = hi - lo;

        const double band = kConvergenceBandFraction * seg.r_des;
        std::size_t last_outside = hi;  // sentinel: none outside
        seg.min_r = rec[lo].r;
        seg.max_r = rec[lo].r;
        for (std::size_t i = lo; i < hi; ++i) {
            seg.min_r = std::min(seg.min_r, rec[i].r);
            seg.max_r = std::max(seg.max_r, rec[i].r);
            if (std::abs(rec[i].r - seg.r_des) > band) last_outside = i;
        }
        if (last_outside == hi) {
            seg.reached = true;
            seg.convergence_time = 0.0;
        } else if (last_outside + 1 < hi) {
            seg.reached = true;
            seg.convergence_time = rec[last_outside + 1].t - seg.start_time;
        }

        const std::size_t fluct_lo = lo + static_cast<std::size_t>(
            std::ceil(static_cast<double>(n) * (1.0 - kFluctuationWindowFraction)));
        double psi_mean = 0.0;
        for (std::size_t i = fluct_lo; i < hi; ++i) psi_mean += rec[i].psi_applied;
        psi_mean /= static_cast<double>(hi - fluct_lo);
        for (std::size_t i = fluct_lo; i < hi; ++i) {
            seg.fluctuation_band =
                std::max(seg.fluctuation_band, std::abs(rec[i].psi_applied - psi_mean));
        }

        const std::size_t steady_lo = lo + static_cast<std::size_t>(
            std::ceil(static_cast<double>(n) * (1.0 - kSteadyWindowFraction)));
        double r_err = 0.0, psi10 = 0.0;
        for (std::size_t i = steady_lo; i < hi; ++i) {
            r_err += rec[i].r - seg.r_des;
            psi10 += rec[i].psi_applied;
        }
        const auto n10 = static_cast<double>(hi - steady_lo);
        seg.steady_state_error = std::abs(r_err / n10);
        seg.mean_psi_final10 = psi10 / n10;

        metrics.segments.push_back(seg);
    }
    return metrics;
}

struct SegmentRatio {
    int index = 0;
    double convergence_ratio = std::numeric_limits<double>::quiet_NaN();  ///< B / A
    bool both_reached = false;
};

struct ComparisonReport {
    Metrics a;
    Metrics b;
    std::vector<SegmentRatio> segments;
    /// Ratio of summed convergence times over segments reached by both.
    double convergence_time_ratio = std::numeric_limits<double>::quiet_NaN();
    double fluctuation_ratio = std::numeric_limits<double>::quiet_NaN();
    double max_angle_step_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// The two specs must differ only in their controller stack.
inline void require_comparable(const ScenarioSpec& a, const ScenarioSpec& b) {
    const bool schedule_ok =
        a.target_schedule.size() == b.target_schedule.size() &&
        std::equal(a.target_schedule.begin(), a.target_schedule.end(), b.target_schedule.begin(),
                   [](const TargetPoint& x, const TargetPoint& y) {
                       return x.start_time == y.start_time && x.r_des == y.r_des;
                   });
    if (!schedule_ok) throw config_error("compare: target schedules differ");
    if (a.initial_r != b.initial_r || a.initial_phi != b.initial_phi ||
        a.duration != b.duration || a.control_period != b.control_period) {
        throw config_error("compare: initial state or timing differs");
    }
    if (a.envelope.r_min != b.envelope.r_min || a.envelope.r_max != b.envelope.r_max ||
        a.envelope.epsilon != b.envelope.epsilon) {
        throw config_error("compare: envelope configs differ");
    }
    if (a.integrator.dt != b.integrator.dt || a.integrator.epsilon_floor != b.integrator.epsilon_floor ||
        a.integrator.alpha != b.integrator.alpha) {
        throw config_error("compare: integrator configs differ");
    }
}

inline ComparisonReport compare(const ScenarioSpec& spec_a, const ScenarioSpec& spec_b,
                                const DerivedConstants& consts) {
    require_comparable(spec_a, spec_b);
    ComparisonReport report;
    report.a = compute_metrics(run_scenario(spec_a, consts));
    report.b = compute_metrics(run_scenario(spec_b, consts));

    double sum_a = 0.0, sum_b = 0.0;
    double fluct_a = 0.0, fluct_b = 0.0;
    for (std::size_t i = 0; i < report.a.segments.size(); ++i) {
        const auto& sa = report.a.segments[i];
        const auto& sb = report.b.segments[i];
        SegmentRatio ratio;
        ratio.index = static_cast<int>(i);
        ratio.both_reached = sa.reached && sb.reached;
        if (ratio.both_reached) {
            sum_a += sa.convergence_time;
            sum_b += sb.convergence_time;
            ratio.convergence_ratio =
                sa.convergence_time > 0.0
                    ? sb.convergence_time / sa.convergence_time
                    : (sb.convergence_time == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        }
        fluct_a = std::max(fluct_a, sa.fluctuation_band);
        fluct_b = std::max(fluct_b, sb.fluctuation_band);
        report.segments.push_back(ratio);
    }
    if (sum_a > 0.0) {
        report.convergence_time_ratio = sum_b / sum_a;
    } else if (sum_b == 0.0 && !report.segments.empty()) {
        report.convergence_time_ratio = 1.0;  // both converge instantly everywhere
    }
    if (fluct_a > 0.0) {
        report.fluctuation_ratio = fluct_b / fluct_a;
    } else if (fluct_b == 0.0) {
        report.fluctuation_ratio = 1.0;
    }
    if (report.a.max_angle_step > 0.0) {
        report.max_angle_step_ratio = report.b.max_angle_step / report.a.max_angle_step;
    } else if (report.b.max_angle_step == 0.0) {
        report.max_angle_step_ratio = 1.0;
    }
    return report;
}

inline std::string render_metrics(const Metrics& metrics) {
    std::ostringstream os;
    os.precision(9);
    for (const auto& seg : metrics.segments) {
        os << "segment " << seg.index << ":\n"
           << "  start_time: " << seg.start_time << "\n"
           << "  end_time: " << seg.end_time << "\n"
           << "  r_des: " << seg.r_des << "\n"
           << "  reached_target: " << (seg.reached ? "yes" : "no") << "\n";
        if (seg.reached) os << "  convergence_time: " << seg.convergence_time << "\n";
        os << "  steady_state_error: " << seg.steady_state_error << "\n"
           << "  fluctuation_band: " << seg.fluctuation_band << "\n"
           << "  mean_psi_final10: " << seg.mean_psi_final10 << "\n";
    }
    os << "max_angle_step: " << metrics.max_angle_step << "\n";
    return os.str();
}

inline std::string render_comparison(const ComparisonReport& report) {
    std::ostringstream os;
    os.precision(9);
    os << "=== run A ===\n" << render_metrics(report.a);
    os << "=== run B ===\n" << render_metrics(report.b);
    os << "=== ratios (B / A) ===\n";
    for (const auto& ratio : report.segments) {
        os << "segment " << ratio.index << ": ";
        if (ratio.both_reached) {
            os << "convergence_ratio: " << ratio.convergence_ratio << "\n";
        } else {
            const bool a_missed = !report.a.segments[ratio.index].reached;
            const bool b_missed = !report.b.segments[ratio.index].reached;
            os << "unreached by" << (a_missed ? " A" : "") << (b_missed ? " B" : "") << "\n";
        }
    }
    os << "convergence_time_ratio: " << report.convergence_time_ratio << "\n"
       << "fluctuation_ratio: " << report.fluctuation_ratio << "\n"
       << "max_angle_step_ratio: " << report.max_angle_step_ratio << "\n";
    return os.str();
}

}  // namespace magpair
