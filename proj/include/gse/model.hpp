#ifndef GSE_MODEL_HPP
#define GSE_MODEL_HPP

#include <Eigen/Core>
#include <optional>

#include "gse/errors.hpp"

namespace gse::model {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Per-unit electrical and control constants of the converter-grid system.
struct SystemParams {
    double X_g = 0.5;        // grid reactance, pu
    double k_ppll = 25.0;    // PLL proportional gain
    double k_ipll = 500.0;   // PLL integral gain
    double K_ramp = 1.0;     // active-current climbing rate, pu/s
    double K_pV = 0.5;       // TVC proportional gain
    double K_iV = 50.0;      // TVC integral gain
    double U_tref = 1.0;     // terminal-voltage reference, pu
    double I_max = 1.2;      // converter current limit, pu
    double omega_0 = 100.0 * M_PI;  // nominal angular frequency, rad/s (reporting only)

    void validate() const;
};

// Coefficients of the generalized swing equation
//   M w' = P_m - U_g sin(phi) - alpha cos(phi) w
struct GseParams {
    double M;      // equivalent inertia (1 / k_ipll)
    double P_m;    // equivalent mechanical power (i_d * X_g), pu
    double U_g;    // infinite-bus voltage magnitude, pu
    double alpha;  // damping coefficient (k_ppll * U_g / k_ipll)
};

// Three-stage LVRT experiment description. U_g1/i_d1 are the pre-fault
// (and recovery) values; U_g2/i_d2/i_q2 hold during the fault.
struct Scenario {
    double U_g1 = 1.0;
    double U_g2;
    double i_d1;
    double i_d2;
    double i_q2 = 0.0;
    double t_fault = 0.1;
    std::optional<double> t_clear;

    void validate(const SystemParams& p) const;
};

struct PllState {
    double phi;    // angle mismatch, rad (unwrapped)
    double omega;  // angular-frequency deviation, rad/s
};

struct Stage3State {
    double phi;
    double omega;
    double i_d;  // ramping active current, pu
    double z_q;  // TVC integrator state, pu
};

struct Equilibria {
    double phi_s;  // stable equilibrium, in [0, pi/2]
    double phi_u;  // unstable equilibrium, pi - phi_s
};

GseParams derive_gse(const SystemParams& params, double i_d, double U_g);

// Throws NoEquilibrium when i_d * X_g > U_g.
Equilibria equilibria(double i_d, double U_g, double X_g);

Vec2 gse_rhs(const PllState& state, const GseParams& g);
inline Vec2 gse_rhs(const Vec2& state, const GseParams& g) {
    return gse_rhs(PllState{state[0], state[1]}, g);
}

// Stage-3 driving subsystem (PLL + current ramp); independent of i_q / z_q.
// State layout: (phi, omega, i_d).
Vec3 stage3_driving_rhs(const Stage3State& state, const SystemParams& params, double U_g,
                        double i_d_target);

struct ResponseOutput {
    double i_q;       // reactive current satisfying i_q = K_pV * U_t + z_q
    double U_t;       // terminal voltage magnitude
    double dz_q_dt;   // K_iV * (U_t - U_tref)
};

// Solves the scalar algebraic loop between i_q and U_t by Newton iteration.
// The converter current limit is applied as a clamp on |i_q| afterwards.
ResponseOutput stage3_response_step(const Stage3State& state, const SystemParams& params,
                                    double U_g);

// Terminal voltage with a prescribed i_q (no TVC loop), from
// u_td = -i_q X_g + U_g cos(phi), u_tq = i_d X_g - U_g sin(phi).
double terminal_voltage(double phi, double i_d, double i_q, double U_g, double X_g);

// Omega jump applied at fault inception (stage 1 -> 2).
double jump_fault_entry(const Scenario& scenario, const SystemParams& params, double phi_1);

// Omega jump applied at fault clearing (stage 2 -> 3).
double jump_fault_clear(const SystemParams& params, double U_g2, double phi_c, double omega_2);

// Grid-code reactive current for the fault stage: supports the voltage in
// proportion to the dip depth, limited by the remaining converter headroom.
double auto_iq2(double U_t_dip, double i_d2, double I_max);

}  // namespace gse::model

#endif
