// Acceptance suite: each check corresponds to one shipped guarantee of the
// library and prints a single PASS/FAIL line. The process exit code is the
// number of failed checks, so the suite doubles as a ctest entry.
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magpair/cli.hpp"
#include "magpair/config.hpp"
#include "magpair/metrics.hpp"
#include "magpair/trace_io.hpp"

using namespace magpair;

namespace {

namespace fs = std::filesystem;

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

RunConfig shipped(const std::string& name) {
    return load_run_config((fs::path(MAGPAIR_CONFIG_DIR) / (name + ".json")).string());
}

const std::vector<std::string> kSingleP = {
    "single_target_above_range", "single_target_in_range_above",
    "single_target_in_range_below", "single_target_below_range"};
const std::vector<std::string> kSinglePid = {
    "single_target_above_range_pid", "single_target_in_range_above_pid",
    "single_target_in_range_below_pid", "single_target_below_range_pid"};
const std::vector<std::string> kAllShipped = {
    "single_target_above_range", "single_target_in_range_above",
    "single_target_in_range_below", "single_target_below_range",
    "single_target_above_range_pid", "single_target_in_range_above_pid",
    "single_target_in_range_below_pid", "single_target_below_range_pid",
    "multi_target_p", "multi_target_pid", "multi_target_pid_pd"};

DerivedConstants shipped_consts() { return derive_constants(shipped("multi_target_pid").physical); }

// 1. Analytic force components match the finite-difference energy gradient to
//    relative error < 1e-4 over 1000 random states in the operating envelope.
Outcome check_force_oracle() {
    const auto c = shipped_consts();
    std::mt19937_64 rng(911);
    std::uniform_real_distribution<double> r_dist(300e-6, 900e-6);
    std::uniform_real_distribution<double> ang(-90.0, 90.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = r_dist(rng);
        const FieldOrientation o{.psi = ang(rng), .alpha = ang(rng)};
        const auto analytic = force_components(r, o, c);
        const auto numeric = numeric_force_gradient(r, o, c, r * 1e-5);
        const double tiny = 1e-12 * c.omega / (r * r * r * r);
        auto rel = [&](double a, double b) {
            const double denom = std::max(std::abs(a), std::abs(b));
            return denom > tiny ? std::abs(a - b) / denom : 0.0;
        };
        worst = std::max({worst, rel(analytic.f_r, numeric.f_r), rel(analytic.f_t, numeric.f_t),
                          rel(analytic.f_z, numeric.f_z)});
    }
    return {worst < 1e-4, "worst rel err " + fmt(worst) + " over 1000 samples (bound 1e-4)"};
}

// 2. Canonical values: f_r(0) = -2 Omega/r^4 and f_r(90) = +Omega/r^4;
//    zero residual at the exact hold angle; residual at the rounded 54.74
//    bounded by 2e-4 * Omega_t/r^4.
Outcome check_canonical_values() {
    const auto c = shipped_consts();
    const double r = 500e-6;
    const double scale = c.omega / (r * r * r * r);
    Outcome out;
    std::string parts;

    const auto attract = force_components(r, {.psi = 0.0, .alpha = 0.0}, c);
    if (attract.f_r != -2.0 * scale) {
        out.ok = false;
        parts += "f_r(0) != -2 Omega/r^4; ";
    }
    const auto repel = force_components(r, {.psi = 90.0, .alpha = 0.0}, c);
    if (std::abs(repel.f_r - scale) > 1e-14 * scale) {
        out.ok = false;
        parts += "f_r(90) != +Omega/r^4; ";
    }
    const auto hold = force_components(r, {.psi = c.psi_star, .alpha = 0.0}, c);
    if (!(std::abs(hold.f_r) < 1e-12 * scale)) {
        out.ok = false;
        parts += "residual at exact hold angle " + fmt(std::abs(hold.f_r) / scale) + "; ";
    }
    const auto [rdot, phidot] = velocities(r, 54.74, 0.0, c);
    const double residual = std::abs(rdot) / (c.omega_t / (r * r * r * r));
    if (!(residual <= 2e-4)) {
        out.ok = false;
        parts += "residual at rounded 54.74 deg = " + fmt(residual) +
                 " exceeds the 2e-4 bound; this is the exact value of 1-3cos^2(54.74 deg), "
                 "see README known issues; ";
    }
    out.detail = parts.empty() ? "all four canonical identities hold" : parts;
    return out;
}

// 3. Derived constants from first principles match the reference values to 4
//    significant figures: Omega_t * mu_m = 2.7271e-17, Omega_r * mu_m = 3.2725e-10.
Outcome check_constants_regression() {
    const auto config = shipped("multi_target_pid");
    const auto c = derive_constants(config.physical);
    const double mu_m = config.physical.medium_viscosity;
    auto to4 = [](double v) {
        std::ostringstream os;
        os.precision(4);
        os << v;
        return os.str();
    };
    const std::string got_t = to4(c.omega_t * mu_m);
    const std::string got_r = to4(c.omega_r * mu_m);
    const bool ok = got_t == to4(2.7271e-17) && got_r == to4(3.2725e-10);
    return {ok, "Omega_t*mu_m = " + got_t + " (want 2.727e-17), Omega_r*mu_m = " + got_r +
                    " (want 3.272e-10 to 3.273e-10)"};
}

// 4. Proportional regulation for all four shipped initial radii: the radius
//    enters the +-2% band and stays, the applied angle settles within 1 deg
//    of the hold angle, each run completes in under a second.
Outcome check_single_target_p() {
    Outcome out;
    std::string parts;
    for (const auto& name : kSingleP) {
        const auto config = shipped(name);
        const auto consts = derive_constants(config.physical);
        const auto start = std::chrono::steady_clock::now();
        const auto trace = run_scenario(config.scenario, consts);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto metrics = compute_metrics(trace);
        const auto& seg = metrics.segments.at(0);
        const bool settled = std::abs(seg.mean_psi_final10 - consts.psi_star) <= 1.0;
        if (!seg.reached || !settled || secs >= 1.0) {
            out.ok = false;
            parts += name + (seg.reached ? "" : " unreached") + (settled ? "" : " psi unsettled") +
                     (secs >= 1.0 ? " slow" : "") + "; ";
        } else {
            parts += name + " conv " + fmt(seg.convergence_time) + "s; ";
        }
    }
    out.detail = parts;
    return out;
}

// 5. On each single-target case the shipped PID converges in at most 0.75 of
//    the shipped P controller's time.
Outcome check_pid_speedup() {
    Outcome out;
    std::string parts;
    for (std::size_t i = 0; i < kSingleP.size(); ++i) {
        const auto config_p = shipped(kSingleP[i]);
        const auto config_pid = shipped(kSinglePid[i]);
        const auto report =
            compare(config_p.scenario, config_pid.scenario, derive_constants(config_p.physical));
        if (!report.segments.at(0).both_reached) {
            out.ok = false;
            parts += kSingleP[i] + ": unreached; ";
            continue;
        }
        const double ratio = report.segments.at(0).convergence_ratio;
        if (!(ratio <= 0.75)) out.ok = false;
        parts += kSingleP[i] + " ratio " + fmt(ratio) + "; ";
    }
    out.detail = parts + "(bound 0.75)";
    return out;
}

// 6. Multi-target schedule: the shipped PID reaches all four in-range targets
//    inside their one-second segments and is pinned at the envelope boundary
//    for the unreachable 50 um target; the literal P law misses at least one
//    in-range target.
Outcome check_multi_target() {
    Outcome out;
    std::string parts;

    const auto config_pid = shipped("multi_target_pid");
    const auto consts = derive_constants(config_pid.physical);
    const auto trace = run_scenario(config_pid.scenario, consts);
    const auto metrics = compute_metrics(trace);

    if (metrics.segments.at(0).reached) {
        out.ok = false;
        parts += "50um target unexpectedly reached; ";
    }
    const double r_min = config_pid.scenario.envelope.r_min;
    if (!(metrics.segments.at(0).min_r >= 0.99 * r_min)) {
        out.ok = false;
        parts += "radius fell below the envelope boundary (min " +
                 fmt(metrics.segments.at(0).min_r) + "); ";
    }
    bool repulsion_seen = false;
    for (const auto& rec : trace.records) {
        if (rec.t < 1.0 && rec.branch == EnvelopeBranch::Repulsion) repulsion_seen = true;
    }
    if (!repulsion_seen) {
        out.ok = false;
        parts += "full-repulsion branch never engaged on the unreachable target; ";
    }
    for (int seg = 1; seg <= 4; ++seg) {
        if (!metrics.segments.at(seg).reached) {
            out.ok = false;
            parts += "PID missed segment " + std::to_string(seg) + "; ";
        }
    }

    const auto config_p = shipped("multi_target_p");
    const auto metrics_p = compute_metrics(run_scenario(config_p.scenario, consts));
    int missed = 0;
    for (int seg = 1; seg <= 4; ++seg) {
        if (!metrics_p.segments.at(seg).reached) ++missed;
    }
    if (missed == 0) {
        out.ok = false;
        parts += "literal P law unexpectedly reached every in-range target; ";
    }
    out.detail = parts + "PID reached 4/4 in-range, P missed " + std::to_string(missed) + "/4";
    return out;
}

// 7. Cascade smoothing: every segment's applied-angle fluctuation band stays
//    within +-5 deg and the maximum angle step is strictly below the paired
//    PID-only run's.
Outcome check_smoothing() {
    Outcome out;
    const auto config_pid = shipped("multi_target_pid");
    const auto config_smooth = shipped("multi_target_pid_pd");
    const auto consts = derive_constants(config_pid.physical);
    const auto report = compare(config_pid.scenario, config_smooth.scenario, consts);

    double worst_band = 0.0;
    for (const auto& seg : report.b.segments) worst_band = std::max(worst_band, seg.fluctuation_band);
    if (!(worst_band <= 5.0)) out.ok = false;
    if (!(report.b.max_angle_step < report.a.max_angle_step)) out.ok = false;
    out.detail = "worst fluctuation band " + fmt(worst_band) + " deg (bound 5); max step " +
                 fmt(report.b.max_angle_step) + " vs PID " + fmt(report.a.max_angle_step);
    return out;
}

// 8. Every shipped scenario integrated at dt = 1e-4 matches a dt = 1e-6
//    reference within 1% relative radius at every 10 ms checkpoint. The
//    controller updates on its own period in both runs.
Outcome check_integrator_refinement() {
    Outcome out;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& name : kAllShipped) {
        const auto config = shipped(name);
        const auto consts = derive_constants(config.physical);

        const auto stride_a =
            static_cast<int>(std::llround(0.01 / config.scenario.integrator.dt));
        const auto coarse = run_scenario(config.scenario, consts, stride_a);

        ScenarioSpec fine_spec = config.scenario;
        fine_spec.integrator.dt = 1e-6;
        const auto fine = run_scenario(fine_spec, consts, static_cast<int>(std::llround(0.01 / 1e-6)));

        if (coarse.aborted || fine.aborted || coarse.records.size() != fine.records.size()) {
            out.ok = false;
            out.detail += name + ": checkpoint mismatch; ";
            continue;
        }
        for (std::size_t i = 0; i < coarse.records.size(); ++i) {
            const double rel =
                std::abs(coarse.records[i].r - fine.records[i].r) / fine.records[i].r;
            if (rel > worst) {
                worst = rel;
                worst_name = name;
            }
        }
    }
    if (!(worst < 0.01)) out.ok = false;
    out.detail += "worst rel deviation " + fmt(worst) + " (" + worst_name + ", bound 0.01)";
    return out;
}

// 9. Bang-bang polarity decoupling: holding psi = +-psi_star for 0.5 s from a
//    converged 500 um state moves the radius by less than 0.1% while the
//    bearing swings by equal and opposite amounts matching the analytic rate
//    within 1%.
Outcome check_bang_bang() {
    Outcome out;
    const auto c = shipped_consts();
    const IntegratorConfig cfg{.dt = 1e-4, .epsilon_floor = 100e-6, .alpha = 0.0};
    const double r0 = 500e-6;
    const std::vector<double> plus(5000, c.psi_star);
    const std::vector<double> minus(5000, -c.psi_star);
    const auto traj_plus = integrate({.r = r0}, plus, cfg, c);
    const auto traj_minus = integrate({.r = r0}, minus, cfg, c);

    const double dr = std::abs(traj_plus.back().r - r0) / r0;
    const double phi_plus = traj_plus.back().phi;
    const double phi_minus = traj_minus.back().phi;
    const double analytic =
        rad_to_deg(c.omega_r / (r0 * r0 * r0) * std::sin(deg_to_rad(2.0 * c.psi_star))) * 0.5;

    if (!(dr < 1e-3)) out.ok = false;
    if (phi_plus != -phi_minus) out.ok = false;
    if (!(std::abs(phi_plus - analytic) / analytic < 0.01)) out.ok = false;
    out.detail = "dr/r " + fmt(dr) + ", phi +" + fmt(phi_plus) + " / " + fmt(phi_minus) +
                 " deg, analytic " + fmt(analytic);
    return out;
}

// 10. Cross-cutting property checks: psi-parity of the force law, saturator
//     and envelope idempotence, the hold-angle fixed point of every
//     controller, smoother contraction, run determinism, CSV round-trip.
Outcome check_properties() {
    Outcome out;
    std::string parts;
    const auto c = shipped_consts();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ang(0.0, 90.0);
    std::uniform_real_distribution<double> r_dist(300e-6, 900e-6);

    for (int i = 0; i < 300; ++i) {
        const double psi = ang(rng);
        const double r = r_dist(rng);
        const auto plus = force_components(r, {.psi = psi, .alpha = 0.0}, c);
        const auto minus = force_components(r, {.psi = -psi, .alpha = 0.0}, c);
        if (plus.f_r != minus.f_r || plus.f_t != -minus.f_t) {
            out.ok = false;
            parts += "psi parity broken; ";
            break;
        }
    }

    const EnvelopeConfig env{.r_min = 300e-6, .r_max = 700e-6, .epsilon = 100e-6};
    for (int i = 0; i < 300; ++i) {
        const double x = ang(rng) * 3.0 - 60.0;
        if (saturate(saturate(x)) != saturate(x)) {
            out.ok = false;
            parts += "saturator not idempotent; ";
            break;
        }
        const double r = r_dist(rng);
        if (envelope(r, envelope(r, saturate(x), env), env) != envelope(r, saturate(x), env)) {
            out.ok = false;
            parts += "envelope not idempotent; ";
            break;
        }
    }

    for (ControllerType type : {ControllerType::P, ControllerType::Pid, ControllerType::PidPd}) {
        ControllerConfig cc;
        cc.type = type;
        cc.gains = type == ControllerType::P ? PidConfig{.k_p = 0.2, .k_i = 0.0, .k_d = 0.0}
                                             : PidConfig{.k_p = 1.0, .k_i = 1e-4, .k_d = 0.5};
        ControllerStack stack(cc, env);
        if (std::abs(stack.update(500e-6, 500e-6).applied - c.psi_star) > 1e-9) {
            out.ok = false;
            parts += "hold-angle fixed point broken; ";
        }
    }

    SmootherState sm{.prev_applied = 10.0, .prev_angle_error = 0.0, .initialized = true};
    const SmootherConfig smc{.k_p2 = 0.25, .k_d2 = 0.0};
    double gap = 80.0 - 10.0;
    for (int i = 0; i < 40; ++i) {
        auto [o, next] = smooth(80.0, smc, sm);
        sm = next;
        const double new_gap = 80.0 - o;
        if (std::abs(new_gap - gap * 0.75) > 1e-9 * std::max(1.0, gap)) {
            out.ok = false;
            parts += "smoother contraction broken; ";
            break;
        }
        gap = new_gap;
    }

    const auto config = shipped("multi_target_pid_pd");
    const auto consts = derive_constants(config.physical);
    const auto t1 = run_scenario(config.scenario, consts);
    const auto t2 = run_scenario(config.scenario, consts);
    bool identical = t1.records.size() == t2.records.size();
    for (std::size_t i = 0; identical && i < t1.records.size(); ++i) {
        const auto& x = t1.records[i];
        const auto& y = t2.records[i];
        identical = x.t == y.t && x.r == y.r && x.psi_cmd == y.psi_cmd &&
                    x.psi_applied == y.psi_applied && x.phi == y.phi && x.clamped == y.clamped &&
                    x.branch == y.branch;
    }
    if (!identical) {
        out.ok = false;
        parts += "runs not deterministic; ";
    }

    std::ostringstream csv;
    write_trace_csv(csv, t1);
    std::istringstream in(csv.str());
    const auto parsed = read_trace_csv(in);
    bool csv_ok = parsed.records.size() == t1.records.size();
    for (std::size_t i = 0; csv_ok && i < parsed.records.size(); ++i) {
        csv_ok = std::memcmp(&parsed.records[i].t, &t1.records[i].t, sizeof(double)) == 0 &&
                 std::memcmp(&parsed.records[i].r, &t1.records[i].r, sizeof(double)) == 0 &&
                 std::memcmp(&parsed.records[i].phi, &t1.records[i].phi, sizeof(double)) == 0 &&
                 parsed.records[i].clamped == t1.records[i].clamped &&
                 parsed.records[i].branch == t1.records[i].branch;
    }
    if (!csv_ok) {
        out.ok = false;
        parts += "CSV round-trip not bit-exact; ";
    }

    out.detail = parts.empty() ? "parity, idempotence, fixed point, contraction, determinism, "
                                 "CSV round-trip all hold"
                               : parts;
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"force oracle equivalence", check_force_oracle},
        {"canonical force values", check_canonical_values},
        {"derived-constant regression", check_constants_regression},
        {"single-target proportional regulation", check_single_target_p},
        {"PID convergence speedup", check_pid_speedup},
        {"multi-target schedule", check_multi_target},
        {"cascade smoothing", check_smoothing},
        {"integrator refinement agreement", check_integrator_refinement},
        {"bang-bang polarity decoupling", check_bang_bang},
        {"property suite", check_properties},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome outcome;
        try {
            outcome = checks[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.ok) ++failures;
        std::cout << "[" << (i + 1 < 10 ? " " : "") << i + 1 << "] "
                  << (outcome.ok ? "PASS" : "FAIL") << "  " << checks[i].first << ": "
                  << outcome.detail << "\n";
    }
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures;
}
