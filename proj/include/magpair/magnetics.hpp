// Dipole-dipole interaction model for a pair of magnetically actuated
// micro-agents suspended in a viscous medium. Both agents are treated as
// point dipoles whose moments stay aligned with a shared applied field; the
// field orientation (psi in-plane, alpha out-of-plane) is the only actuation
// input. All angles cross module boundaries in degrees and are converted to
// radians only inside trigonometric evaluation.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace magpair {

/// Vacuum permeability [H/m].
inline constexpr double kMu0 = 4.0 * std::numbers::pi * 1e-7;

inline constexpr double deg_to_rad(double deg) {
    return deg * std::numbers::pi / 180.0;
}

inline constexpr double rad_to_deg(double rad) {
    return rad * 180.0 / std::numbers::pi;
}

/// Angle at which the radial force vanishes: acos(sqrt(1/3)) in degrees.
/// Computed, not hard-coded; 54.74 is a rounding of this value.
inline double zero_force_angle_deg() {
    static const double value = rad_to_deg(std::acos(std::sqrt(1.0 / 3.0)));
    return value;
}

/// Raised when the physical model stops being applicable: degenerate field
/// configuration, no admissible field magnitude, or inter-agent distance at
/// or below the alignment limit.
class model_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

/// Raw physical inputs describing one agent and the medium it moves in.
struct PhysicalParams {
    double magnetization = 0.0;          ///< |M| [A/m]
    double agent_radius = 0.0;           ///< R [m]
    double medium_viscosity = 0.0;       ///< mu_m [Pa s]
    double relative_permeability = 1.0;  ///< mu_r, ~1 for organic media
    double max_error_angle = 0.0;        ///< theta_eps [deg], alignment tolerance

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::domain_error(std::string(name) + " must be strictly positive");
            }
        };
        positive(magnetization, "magnetization");
        positive(agent_radius, "agent_radius");
        positive(medium_viscosity, "medium_viscosity");
        positive(relative_permeability, "relative_permeability");
        positive(max_error_angle, "max_error_angle");
    }
};

/// Applied-field orientation. psi is the in-plane angle between the field
/// projection and the radial vector, alpha the out-of-plane angle; both in
/// degrees, both meaningful over [-90, 90] (the sign of psi drives the
/// bang-bang phase control).
struct FieldOrientation {
    double psi = 0.0;
    double alpha = 0.0;
};

/// Inter-agent force decomposed onto the local radial/tangential/normal frame [N].
struct ForceComponents {
    double f_r = 0.0;
    double f_t = 0.0;
    double f_z = 0.0;
};

/// Constants derived once from PhysicalParams.
struct DerivedConstants {
    double magnetic_moment = 0.0;  ///< m = M * (4/3) pi R^3 [A m^2]
    double omega = 0.0;            ///< Omega = 3 mu0 m^2 / (4 pi) [N m^4]
    double sigma_trans = 0.0;      ///< 6 pi mu_m R [N s/m]
    double sigma_rot = 0.0;        ///< 8 pi mu_m R^3 [N m s]
    double omega_t = 0.0;          ///< Omega / sigma_trans [m^5/s]
    double omega_r = 0.0;          ///< Omega / sigma_rot [m^3/s]
    double psi_star = 0.0;         ///< zero-radial-force angle [deg]
    double mu0 = kMu0;             ///< vacuum permeability [H/m]
};

/// Moment of a uniformly magnetized sphere, m = M * V.
inline double magnetic_moment(double magnetization, double agent_radius) {
    if (!(magnetization > 0.0) || !(agent_radius > 0.0)) {
        throw std::domain_error("magnetic_moment: inputs must be strictly positive");
    }
    const double volume =
        (4.0 / 3.0) * std::numbers::pi * agent_radius * agent_radius * agent_radius;
    return magnetization * volume;
}

inline DerivedConstants derive_constants(const PhysicalParams& params) {
    params.validate();
    DerivedConstants c;
    c.magnetic_moment = magnetic_moment(params.magnetization, params.agent_radius);
    c.omega = 3.0 * kMu0 * c.magnetic_moment * c.magnetic_moment / (4.0 * std::numbers::pi);
    c.sigma_trans = 6.0 * std::numbers::pi * params.medium_viscosity * params.agent_radius;
    c.sigma_rot = 8.0 * std::numbers::pi * params.medium_viscosity * params.agent_radius *
                  params.agent_radius * params.agent_radius;
    c.omega_t = c.omega / c.sigma_trans;
    c.omega_r = c.omega / c.sigma_rot;
    c.psi_star = zero_force_angle_deg();
    return c;
}

/// Field of a point dipole with moment `moment` evaluated at `displacement`
/// from the dipole [T]:  B = (mu0 / 4 pi r^3) [3 (m . rhat) rhat - m].
inline Vec3 dipole_field_at(Vec3 moment, Vec3 displacement) {
    const double r = norm(displacement);
    if (!(r > 0.0)) {
        throw std::domain_error("dipole_field_at: zero displacement (field singularity)");
    }
    const Vec3 rhat = (1.0 / r) * displacement;
    const double m_dot_rhat = dot(moment, rhat);
    const double scale = kMu0 / (4.0 * std::numbers::pi * r * r * r);
    return scale * (3.0 * m_dot_rhat * rhat - moment);
}

/// Closed-form force on agent 2, with both moments aligned to the applied
/// field direction:
///   f_r = (Omega/r^4) (1 - 3 cos^2 alpha cos^2 psi)
///   f_t = (Omega/r^4) cos^2 alpha sin 2 psi
///   f_z = (Omega/r^4) sin 2 alpha cos psi
inline ForceComponents force_components(double r, FieldOrientation orientation,
                                        const DerivedConstants& consts) {
    if (!(r > 0.0)) {
        throw std::domain_error("force_components: r must be strictly positive");
    }
    const double psi = deg_to_rad(orientation.psi);
    const double alpha = deg_to_rad(orientation.alpha);
    const double cp = std::cos(psi);
    const double ca = std::cos(alpha);
    const double k = consts.omega / (r * r * r * r);
    return {
        k * (1.0 - 3.0 * ca * ca * cp * cp),
        k * ca * ca * std::sin(2.0 * psi),
        k * std::sin(2.0 * alpha) * cp,
    };
}

/// Minimum applied-field magnitude that keeps both moments aligned with the
/// field against their mutual interaction, to within the error angle
/// theta_eps. Returns the root (b - sqrt(b^2 - 4 a c)) / (2 a) with
///   a  = 1/A1^2 - 1/A2^2
///   b  = mu0 m (4/A1^2 + 2/A2^2 - 3) / (2 pi r^3)
///   c  = mu0^2 m^2 (-4/A1^2 + 1/A2^2 + 6) / (16 pi r^6)
///   A1 = cos(theta_eps + acos(A2)),  A2 = cos psi cos alpha.
/// Throws model_error when the configuration is degenerate (a = 0 or A2 = 0),
/// when the discriminant is negative, or when the root comes out negative;
/// the sign convention of the root is kept as-is rather than silently
/// switching to the other root.
inline double min_field_magnitude(double r, FieldOrientation orientation,
                                  const DerivedConstants& consts, double theta_eps_deg) {
    if (!(r > 0.0)) {
        throw std::domain_error("min_field_magnitude: r must be strictly positive");
    }
    const double a2 = std::cos(deg_to_rad(orientation.psi)) * std::cos(deg_to_rad(orientation.alpha));
    if (std::abs(a2) > 1.0) {
        throw std::domain_error("min_field_magnitude: |cos psi cos alpha| > 1");
    }
    if (a2 == 0.0) {
        throw model_error("min_field_magnitude: degenerate configuration (cos psi cos alpha = 0)");
    }
    const double a1 = std::cos(deg_to_rad(theta_eps_deg) + std::acos(a2));
    if (a1 == 0.0) {
        throw model_error("min_field_magnitude: degenerate configuration (A1 = 0)");
    }
    const double inv_a1_sq = 1.0 / (a1 * a1);
    const double inv_a2_sq = 1.0 / (a2 * a2);
    const double m = consts.magnetic_moment;
    const double r3 = r * r * r;
    const double pi = std::numbers::pi;

    const double a = inv_a1_sq - inv_a2_sq;
    const double b = consts.mu0 * m * (4.0 * inv_a1_sq + 2.0 * inv_a2_sq - 3.0) / (2.0 * pi * r3);
    const double c =
        consts.mu0 * consts.mu0 * m * m * (-4.0 * inv_a1_sq + inv_a2_sq + 6.0) / (16.0 * pi * r3 * r3);
    if (a == 0.0) {
        throw model_error("min_field_magnitude: degenerate configuration (a = 0)");
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        throw model_error("min_field_magnitude: no admissible field magnitude (negative discriminant)");
    }
    const double root = (b - std::sqrt(disc)) / (2.0 * a);
    if (root < 0.0) {
        throw model_error("min_field_magnitude: negative root, model inapplicable at this orientation");
    }
    return root;
}

/// Finite-difference probe of the force on agent 2, F = grad(m2 . B_dip),
/// evaluated as central differences of the interaction energy over the
/// position of agent 2. Independent of force_components (goes through
/// dipole_field_at only); intended for validation.
///
/// Agent 1 sits at the origin, agent 2 at (r, 0, 0), so the local frame is
/// (x, y, z) = (radial, tangential, normal). Both moments point along the
/// applied-field direction and stay fixed while agent 2 is displaced.
inline ForceComponents numeric_force_gradient(double r, FieldOrientation orientation,
                                              const DerivedConstants& consts, double h) {
    if (!(h > 0.0) || !(r > 2.0 * h)) {
        throw std::invalid_argument("numeric_force_gradient: need r > 2h > 0");
    }
    const double psi = deg_to_rad(orientation.psi);
    const double alpha = deg_to_rad(orientation.alpha);
    const Vec3 field_dir{std::cos(alpha) * std::cos(psi), std::cos(alpha) * std::sin(psi),
                         std::sin(alpha)};
    const Vec3 moment = consts.magnetic_moment * field_dir;
    const Vec3 base{r, 0.0, 0.0};

    auto energy = [&](Vec3 pos) { return dot(moment, dipole_field_at(moment, pos)); };

    auto central = [&](Vec3 axis) {
        return (energy(base + h * axis) - energy(base - h * axis)) / (2.0 * h);
    };
    return {central({1, 0, 0}), central({0, 1, 0}), central({0, 0, 1})};
}

}  // namespace magpair
