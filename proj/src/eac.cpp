#include "gse/eac.hpp"

#include <cmath>
#include <sstream>

#include "gse/numerics.hpp"

namespace gse::eac {

using model::Scenario;
using model::SystemParams;
using model::Vec2;

EacInputs make_inputs(const Scenario& scenario, const SystemParams& params, DampingModel damping) {
    params.validate();
    const auto eq1 = model::equilibria(scenario.i_d1, scenario.U_g1, params.X_g);
    const auto eq3 = model::equilibria(scenario.i_d2, scenario.U_g1, params.X_g);
    const double alpha_2 = params.k_ppll * scenario.U_g2 / params.k_ipll;
    const double alpha_3 = damping == DampingModel::ConstantStage2
                               ? alpha_2
                               : params.k_ppll * scenario.U_g1 / params.k_ipll;
    return EacInputs{eq1.phi_s,        eq3.phi_u, scenario.i_d2 * params.X_g, scenario.U_g2,
                     1.0 / params.k_ipll, params.k_ppll, alpha_2, alpha_3};
}

double cca_first(const EacInputs& inp) {
    const double arg = (inp.U_g2 * std::cos(inp.phi_1) - std::cos(inp.phi_3u) +
                        inp.P_m2 * (inp.phi_1 - inp.phi_3u)) /
                       (inp.U_g2 - 1.0);
    if (arg < -1.0 || arg > 1.0) {
        std::ostringstream msg;
        msg << "cca_first: arccos argument " << arg << " outside [-1, 1]";
        throw ArgOutOfRange(msg.str());
    }
    return std::acos(arg);
}

std::pair<double, double> energy_constants(const EacInputs& inp, double omega_1) {
    const double h_2 = 0.5 * inp.M * omega_1 * omega_1 - inp.P_m2 * inp.phi_1 -
                       inp.U_g2 * std::cos(inp.phi_1);
    const double h_3 = -inp.P_m2 * inp.phi_3u - std::cos(inp.phi_3u);
    return {h_2, h_3};
}

double orbit_omega_stage2(const EacInputs& inp, double phi, double h_2) {
    const double rad = 2.0 * (inp.P_m2 * phi + inp.U_g2 * std::cos(phi) + h_2) / inp.M;
    return std::sqrt(std::max(rad, 0.0));
}

double orbit_omega_stage3(const EacInputs& inp, double phi, double h_3) {
    const double rad = 2.0 * (inp.P_m2 * phi + std::cos(phi) + h_3) / inp.M;
    return std::sqrt(std::max(rad, 0.0));
}

double cca_second_residual(const EacInputs& inp, double phi, double h_2, double h_3) {
    return orbit_omega_stage3(inp, phi, h_3) - orbit_omega_stage2(inp, phi, h_2) -
           inp.k_ppll * (inp.U_g2 - 1.0) * std::sin(phi);
}

double cca_second(const EacInputs& inp, double omega_1) {
    const auto [h_2, h_3] = energy_constants(inp, omega_1);
    auto f = [&](double phi) { return cca_second_residual(inp, phi, h_2, h_3); };

    const double a = inp.phi_1 + 1e-9;
    const double b = inp.phi_3u - 1e-9;
    constexpr int kScan = 400;

    // smallest root: first sign change of the scan
    double x_prev = a, f_prev = f(a);
    for (int i = 1; i <= kScan; ++i) {
        const double x = a + (b - a) * i / kScan;
        const double fx = f(x);
        if (f_prev == 0.0) return x_prev;
        if (f_prev * fx < 0.0)
            return numerics::brent(f, x_prev, x);
        x_prev = x;
        f_prev = fx;
    }
    std::ostringstream msg;
    msg << "cca_second: no sign change on (" << a << ", " << b << "); residuals " << f(a)
        << " and " << f(b);
    throw NoRoot(msg.str(), f(a), f(b));
}

double damping_integral(const EacInputs& inp, double phi_cr_2, double h_2, double h_3) {
    const double I1 = numerics::adaptive_simpson(
        [&](double phi) { return inp.alpha_2 * std::cos(phi) * orbit_omega_stage2(inp, phi, h_2); },
        inp.phi_1, phi_cr_2, 1e-10);
    const double I2 = numerics::adaptive_simpson(
        [&](double phi) { return inp.alpha_3 * std::cos(phi) * orbit_omega_stage3(inp, phi, h_3); },
        phi_cr_2, inp.phi_3u, 1e-10);
    return I1 + I2;
}

double cca_third(const EacInputs& inp, double phi_cr_2, double S_d) {
    double arg = S_d / (inp.U_g2 - 1.0) + std::cos(phi_cr_2);
    if (arg < -1.0 - 1e-12 || arg > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "cca_third: arccos argument " << arg << " outside [-1, 1]";
        throw ArgOutOfRange(msg.str());
    }
    return std::acos(std::clamp(arg, -1.0, 1.0));
}

double cct_from_cca(double phi_cr, const Scenario& scenario, const SystemParams& params,
                    const sim::IntegratorConfig& cfg) {
    const auto eq1 = model::equilibria(scenario.i_d1, scenario.U_g1, params.X_g);
    const double phi_1 = eq1.phi_s;
    const double omega_1 = model::jump_fault_entry(scenario, params, phi_1);
    if (phi_cr <= phi_1) return 0.0;

    const auto g2 = model::derive_gse(params, scenario.i_d2, scenario.U_g2);
    auto rhs = [&g2](const Vec2& s) { return model::gse_rhs(s, g2); };

    constexpr double kMaxTime = 5.0;
    const double h = cfg.step;
    double t = 0.0;
    Vec2 y(phi_1, omega_1);
    while (t < kMaxTime) {
        const Vec2 y_next =
            numerics::rk4_step([&](double, const Vec2& s) { return rhs(s); }, t, y, h);
        if (y_next[0] >= phi_cr) {
            // cubic Hermite in phi over the bracketing step, bisected to 1e-6 s
            const double p0 = y[0], m0 = y[1], p1 = y_next[0], m1 = y_next[1];
            auto phi_at = [&](double s) {
                const double s2 = s * s, s3 = s2 * s;
                return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0 +
                       (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * h * m1;
            };
            double lo = 0.0, hi = 1.0;
            while ((hi - lo) * h > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                (phi_at(mid) < phi_cr ? lo : hi) = mid;
            }
            return t + 0.5 * (lo + hi) * h;
        }
        if (y_next[1] < 0.0 && y_next[0] < phi_cr) {
            std::ostringstream msg;
            msg << "cct_from_cca: fault trajectory peaks at phi = " << y_next[0]
                << " below phi_cr = " << phi_cr;
            throw NeverReached(msg.str());
        }
        y = y_next;
        t += h;
    }
    throw NeverReached("cct_from_cca: phi_cr not reached within 5 s");
}

std::pair<CcaReport, CctReport> analyze(const Scenario& scenario, const SystemParams& params,
                                        const sim::IntegratorConfig& cfg, bool with_oracle,
                                        DampingModel damping) {
    CcaReport cca;
    CctReport cct;

    auto note = [](std::string& slot, const std::exception& e) {
        if (slot.empty()) slot = e.what();
    };

    EacInputs inp{};
    double omega_1 = 0.0;
    try {
        inp = make_inputs(scenario, params, damping);
        omega_1 = model::jump_fault_entry(scenario, params, inp.phi_1);
        const auto [h_2, h_3] = energy_constants(inp, omega_1);
        cca.h_2 = h_2;
        cca.h_3 = h_3;
    } catch (const std::exception& e) {
        cca.error = e.what();
        return {cca, cct};
    }

    try {
        cca.phi_cr_1 = cca_first(inp);
    } catch (const std::exception& e) {
        note(cca.error, e);
    }
    try {
        cca.phi_cr_2 = cca_second(inp, omega_1);
        cca.S_d = damping_integral(inp, *cca.phi_cr_2, cca.h_2, cca.h_3);
        cca.phi_cr_3 = cca_third(inp, *cca.phi_cr_2, cca.S_d);
    } catch (const std::exception& e) {
        note(cca.error, e);
    }

    auto to_cct = [&](const std::optional<double>& phi_cr, std::optional<double>& slot) {
        if (!phi_cr) return;
        try {
            slot = cct_from_cca(*phi_cr, scenario, params, cfg);
        } catch (const std::exception& e) {
            note(cct.error, e);
        }
    };
    to_cct(cca.phi_cr_1, cct.t_cr_1);
    to_cct(cca.phi_cr_2, cct.t_cr_2);
    to_cct(cca.phi_cr_3, cct.t_cr_3);

    if (with_oracle) {
        try {
            const auto oracle = sim::oracle_cct(scenario, params, cfg);
            cca.oracle_phi_cr = oracle.phi_cr;
            cct.oracle_t_cr = oracle.t_cr;
            auto rel = [](const std::optional<double>& x, double ref) -> std::optional<double> {
                if (!x || ref == 0.0) return std::nullopt;
                return (*x - ref) / ref;
            };
            cca.err_1 = rel(cca.phi_cr_1, oracle.phi_cr);
            cca.err_2 = rel(cca.phi_cr_2, oracle.phi_cr);
            cca.err_3 = rel(cca.phi_cr_3, oracle.phi_cr);
            cct.err_1 = rel(cct.t_cr_1, oracle.t_cr);
            cct.err_2 = rel(cct.t_cr_2, oracle.t_cr);
            cct.err_3 = rel(cct.t_cr_3, oracle.t_cr);
        } catch (const std::exception& e) {
            note(cca.error, e);
            note(cct.error, e);
        }
    }
    return {cca, cct};
}

}  // namespace gse::eac
