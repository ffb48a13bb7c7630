#include "gse/model.hpp"

#include <cmath>
#include <sstream>

namespace gse::model {

namespace {
void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}
}  // namespace

void SystemParams::validate() const {
    require(X_g > 0.0, "SystemParams: X_g must be > 0");
    require(k_ipll > 0.0, "SystemParams: k_ipll must be > 0");
    require(k_ppll >= 0.0, "SystemParams: k_ppll must be >= 0");
    require(K_ramp > 0.0, "SystemParams: K_ramp must be > 0");
    require(I_max > 0.0, "SystemParams: I_max must be > 0");
    require(U_tref > 0.0 && U_tref <= 1.2, "SystemParams: U_tref must be in (0, 1.2]");
}

void Scenario::validate(const SystemParams& p) const {
    require(U_g2 >= 0.0 && U_g2 < U_g1, "Scenario: need 0 <= U_g2 < U_g1");
    require(i_d1 * p.X_g <= U_g1, "Scenario: pre-fault equilibrium does not exist (i_d1 X_g > U_g1)");
    require(i_d2 * p.X_g <= U_g1, "Scenario: post-fault equilibrium does not exist (i_d2 X_g > U_g1)");
    require(std::hypot(i_d2, i_q2) <= p.I_max + 1e-12, "Scenario: fault current exceeds I_max");
    if (t_clear) require(*t_clear > t_fault, "Scenario: t_clear must exceed t_fault");
}

GseParams derive_gse(const SystemParams& params, double i_d, double U_g) {
    return GseParams{1.0 / params.k_ipll, i_d * params.X_g, U_g,
                     params.k_ppll * U_g / params.k_ipll};
}

Equilibria equilibria(double i_d, double U_g, double X_g) {
    const double s = i_d * X_g / U_g;
    if (s > 1.0) {
        std::ostringstream msg;
        msg << "no equilibrium: i_d*X_g = " << i_d * X_g << " exceeds U_g = " << U_g;
        throw NoEquilibrium(msg.str());
    }
    const double phi_s = std::asin(s);
    return Equilibria{phi_s, M_PI - phi_s};
}

Vec2 gse_rhs(const PllState& state, const GseParams& g) {
    const double accel =
        (g.P_m - g.U_g * std::sin(state.phi) - g.alpha * std::cos(state.phi) * state.omega) / g.M;
    return Vec2(state.omega, accel);
}

Vec3 stage3_driving_rhs(const Stage3State& state, const SystemParams& params, double U_g,
                        double i_d_target) {
    const double ramp_dir = (state.i_d < i_d_target) ? 1.0 : (state.i_d > i_d_target ? -1.0 : 0.0);
    const double K_eff = ramp_dir * params.K_ramp;
    const double domega = params.k_ppll * (K_eff * params.X_g - U_g * std::cos(state.phi) * state.omega) +
                          params.k_ipll * (state.i_d * params.X_g - U_g * std::sin(state.phi));
    return Vec3(state.omega, domega, K_eff);
}

double terminal_voltage(double phi, double i_d, double i_q, double U_g, double X_g) {
    const double u_td = -i_q * X_g + U_g * std::cos(phi);
    const double u_tq = i_d * X_g - U_g * std::sin(phi);
    return std::hypot(u_td, u_tq);
}

ResponseOutput stage3_response_step(const Stage3State& state, const SystemParams& params,
                                    double U_g) {
    const double u_tq = state.i_d * params.X_g - U_g * std::sin(state.phi);
    const double cosphi = U_g * std::cos(state.phi);

    // g(i_q) = i_q - K_pV * U_t(i_q) - z_q = 0, scalar Newton
    double i_q = state.z_q + params.K_pV * std::hypot(cosphi, u_tq);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const double u_td = -i_q * params.X_g + cosphi;
        const double U_t = std::hypot(u_td, u_tq);
        const double g = i_q - params.K_pV * U_t - state.z_q;
        const double dg = 1.0 + (U_t > 0.0 ? params.K_pV * params.X_g * u_td / U_t : 0.0);
        const double step = g / dg;
        i_q -= step;
        if (std::abs(step) < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw AlgebraicLoopDiverged("stage3_response_step: i_q/U_t loop did not converge");

    // current limit: clamp on i_q only
    const double headroom2 = params.I_max * params.I_max - state.i_d * state.i_d;
    const double i_q_cap = headroom2 > 0.0 ? std::sqrt(headroom2) : 0.0;
    i_q = std::clamp(i_q, -i_q_cap, i_q_cap);

    const double U_t = terminal_voltage(state.phi, state.i_d, i_q, U_g, params.X_g);
    return ResponseOutput{i_q, U_t, params.K_iV * (U_t - params.U_tref)};
}

double jump_fault_entry(const Scenario& scenario, const SystemParams& params, double phi_1) {
    const double delta_utq = (scenario.i_d2 - scenario.i_d1) * params.X_g -
                             (scenario.U_g2 - 1.0) * std::sin(phi_1);
    return params.k_ppll * delta_utq;
}

double jump_fault_clear(const SystemParams& params, double U_g2, double phi_c, double omega_2) {
    return omega_2 + params.k_ppll * (U_g2 - 1.0) * std::sin(phi_c);
}

double auto_iq2(double U_t_dip, double i_d2, double I_max) {
    const double depth = std::max(1.5 * (0.9 - U_t_dip), 0.0);
    const double headroom2 = I_max * I_max - i_d2 * i_d2;
    const double cap = headroom2 > 0.0 ? std::sqrt(headroom2) : 0.0;
    return -std::min(depth, cap);
}

}  // namespace gse::model
