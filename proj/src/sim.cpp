#include "gse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "gse/numerics.hpp"

namespace gse::sim {

using model::GseParams;
using model::PllState;
using model::Scenario;
using model::SystemParams;
using model::Vec2;
using Vec4 = Eigen::Vector4d;

namespace {

// Integrate f over [t0, t_end], calling on_step(t, y) after each accepted
// step. on_step returning false stops early. The final step is shortened
// to land exactly on t_end.
template <typename State, typename Rhs, typename Cb>
void integrate(const Rhs& f, double t0, double t_end, State& y, const IntegratorConfig& cfg,
               Cb&& on_step) {
    double t = t0;
    if (cfg.method == Method::RK4) {
        while (t < t_end) {
            const double h = std::min(cfg.step, t_end - t);
            y = numerics::rk4_step(f, t, y, h);
            t += h;
            if (t_end - t < 1e-15) t = t_end;
            if (!on_step(t, y)) return;
        }
    } else {
        double h = cfg.step;
        while (t < t_end) {
            h = std::min(h, t_end - t);
            auto [y_new, err] = numerics::rk45_step(f, t, y, h);
            double scale = cfg.abs_tol + cfg.rel_tol * y.template lpNorm<Eigen::Infinity>();
            if (err <= scale) {
                y = y_new;
                t += h;
                if (t_end - t < 1e-15) t = t_end;
                const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
                h *= std::clamp(grow, 0.2, 5.0);
                if (!on_step(t, y)) return;
            } else {
                h *= std::max(0.2, 0.9 * std::pow(scale / err, 0.25));
            }
            if (h < 1e-12)
                throw StepUnderflow("adaptive step fell below 1e-12 s");
        }
    }
}

// Online stability classifier for a swing-type state (phi, omega).
class Classifier {
  public:
    Classifier(double phi_target, double phi_diverge, double settle_window)
        : phi_target_(phi_target), phi_diverge_(phi_diverge), settle_window_(settle_window) {}

    // Returns true once a verdict is reached.
    bool update(double t, double phi, double omega) {
        if (phi > phi_diverge_ && omega > 0.0) {
            verdict_ = {false, Reason::PhiExceededUEP, {phi, omega}};
            return true;
        }
        if (std::abs(omega) > kOmegaDiverge) {
            verdict_ = {false, Reason::OmegaDiverged, {phi, omega}};
            return true;
        }
        const bool in_box =
            std::abs(phi - phi_target_) < kSettlePhiTol && std::abs(omega) < kSettleOmegaTol;
        if (in_box) {
            if (!settling_) {
                settling_ = true;
                settle_since_ = t;
            } else if (t - settle_since_ >= settle_window_) {
                verdict_ = {true, Reason::ConvergedToSEP, {phi, omega}};
                return true;
            }
        } else {
            settling_ = false;
        }
        return false;
    }

    StabilityVerdict timeout(double phi, double omega) const {
        return {false, Reason::Timeout, {phi, omega}};
    }

    const StabilityVerdict& verdict() const { return verdict_; }

  private:
    double phi_target_;
    double phi_diverge_;
    double settle_window_;
    bool settling_ = false;
    double settle_since_ = 0.0;
    StabilityVerdict verdict_{};
};

double stage1_iq(const Scenario& sc, const SystemParams& p, double phi_1) {
    // settled TVC: u_tq = 0 and U_t = U_tref
    return (sc.U_g1 * std::cos(phi_1) - p.U_tref) / p.X_g;
}

// 4-state recovery RHS: (phi, omega, i_d, z_q) with a constant ramp rate
// (zero in stage 4). The driving part is independent of z_q.
struct RecoveryRhs {
    const SystemParams& p;
    double U_g;
    double K_eff;

    Vec4 operator()(double /*t*/, const Vec4& y) const {
        const double phi = y[0], omega = y[1], i_d = y[2], z_q = y[3];
        const double domega =
            p.k_ppll * (K_eff * p.X_g - U_g * std::cos(phi) * omega) +
            p.k_ipll * (i_d * p.X_g - U_g * std::sin(phi));
        const auto resp = model::stage3_response_step({phi, omega, i_d, z_q}, p, U_g);
        return Vec4(omega, domega, K_eff, resp.dz_q_dt);
    }
};

}  // namespace

double gse_energy(const PllState& state, const GseParams& g) {
    return 0.5 * g.M * state.omega * state.omega - g.P_m * state.phi -
           g.U_g * std::cos(state.phi);
}

Trajectory simulate_gse(const PllState& init, const GseParams& g, double horizon,
                        const IntegratorConfig& cfg, int stage_label) {
    Trajectory traj;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Vec2 y(init.phi, init.omega);
    traj.samples.push_back({0.0, stage_label, y[0], y[1], nan, nan, nan});
    auto rhs = [&g](double, const Vec2& s) { return model::gse_rhs(s, g); };
    integrate(rhs, 0.0, horizon, y, cfg, [&](double t, const Vec2& s) {
        traj.samples.push_back({t, stage_label, s[0], s[1], nan, nan, nan});
        return true;
    });
    return traj;
}

StabilityVerdict classify_stability(const Trajectory& traj, const model::Equilibria& eq,
                                    double settle_window) {
    const double phi_diverge = eq.phi_u + kPhiDivergeMargin;
    for (const auto& s : traj.samples) {
        if (s.phi > phi_diverge && s.omega > 0.0)
            return {false, Reason::PhiExceededUEP, {s.phi, s.omega}};
        if (std::abs(s.omega) > kOmegaDiverge)
            return {false, Reason::OmegaDiverged, {s.phi, s.omega}};
    }
    const auto& back = traj.samples.back();
    const double t_end = back.t;
    bool settled = true;
    for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
        if (it->t < t_end - settle_window) break;
        if (std::abs(it->phi - eq.phi_s) >= kSettlePhiTol ||
            std::abs(it->omega) >= kSettleOmegaTol) {
            settled = false;
            break;
        }
    }
    if (settled) return {true, Reason::ConvergedToSEP, {back.phi, back.omega}};
    return {false, Reason::Timeout, {back.phi, back.omega}};
}

StabilityVerdict classify_frozen(const PllState& init, const GseParams& g,
                                 const model::Equilibria& eq, const IntegratorConfig& cfg,
                                 double horizon) {
    Classifier cls(eq.phi_s, eq.phi_u + kPhiDivergeMargin, kSettleWindow);
    Vec2 y(init.phi, init.omega);
    if (cls.update(0.0, y[0], y[1])) return cls.verdict();
    bool decided = false;
    auto rhs = [&g](double, const Vec2& s) { return model::gse_rhs(s, g); };
    integrate(rhs, 0.0, horizon, y, cfg, [&](double t, const Vec2& s) {
        decided = cls.update(t, s[0], s[1]);
        return !decided;
    });
    return decided ? cls.verdict() : cls.timeout(y[0], y[1]);
}

StabilityVerdict simulate_recovery(const PllState& entry, const Scenario& scenario,
                                   const SystemParams& params, const IntegratorConfig& cfg,
                                   double t0, double horizon, Trajectory* traj) {
    const auto eq3 = model::equilibria(scenario.i_d2, scenario.U_g1, params.X_g);
    const auto eq4 = model::equilibria(scenario.i_d1, scenario.U_g1, params.X_g);
    Classifier cls(eq4.phi_s, eq3.phi_u + kPhiDivergeMargin, kSettleWindow);

    // bumpless TVC restart: z_q chosen so i_q is continuous with i_q2
    const double U_t0 = model::terminal_voltage(entry.phi, scenario.i_d2, scenario.i_q2,
                                                scenario.U_g1, params.X_g);
    Vec4 y(entry.phi, entry.omega, scenario.i_d2, scenario.i_q2 - params.K_pV * U_t0);

    auto record = [&](double t, const Vec4& s, int stage) {
        if (!traj) return;
        const auto resp = model::stage3_response_step({s[0], s[1], s[2], s[3]}, params, scenario.U_g1);
        traj->samples.push_back({t, stage, s[0], s[1], s[2], resp.i_q, resp.U_t});
    };

    bool decided = false;
    double t = t0;
    if (cls.update(t0, y[0], y[1])) {
        if (traj) record(t0, y, 3);
        return cls.verdict();
    }

    // stage 3: linear ramp ends at an analytically known instant
    const double ramp_span = std::abs(scenario.i_d1 - scenario.i_d2);
    if (ramp_span > 0.0) {
        const double t_hit = t0 + ramp_span / params.K_ramp;
        const RecoveryRhs rhs{params, scenario.U_g1,
                              (scenario.i_d1 > scenario.i_d2 ? 1.0 : -1.0) * params.K_ramp};
        record(t, y, 3);
        integrate(rhs, t0, std::min(t_hit, horizon), y, cfg, [&](double tt, const Vec4& s) {
            t = tt;
            record(tt, s, 3);
            decided = cls.update(tt, s[0], s[1]);
            return !decided;
        });
        y[2] = scenario.i_d1;  // exact ramp saturation
        if (decided) return cls.verdict();
        if (t >= horizon) return cls.timeout(y[0], y[1]);
        t = std::min(t_hit, horizon);
    } else {
        record(t, y, 3);
    }

    // stage 4: ramp complete, GSE with restored TVC
    const RecoveryRhs rhs4{params, scenario.U_g1, 0.0};
    integrate(rhs4, t, horizon, y, cfg, [&](double tt, const Vec4& s) {
        record(tt, s, 4);
        decided = cls.update(tt, s[0], s[1]);
        return !decided;
    });
    return decided ? cls.verdict() : cls.timeout(y[0], y[1]);
}

std::pair<Trajectory, StabilityVerdict> simulate_scenario(const Scenario& scenario,
                                                          const SystemParams& params,
                                                          const IntegratorConfig& cfg,
                                                          double horizon) {
    params.validate();
    scenario.validate(params);
    if (!scenario.t_clear)
        throw std::invalid_argument("simulate_scenario: t_clear is required");
    const double t_clear = *scenario.t_clear;

    Trajectory traj;
    const auto eq1 = model::equilibria(scenario.i_d1, scenario.U_g1, params.X_g);
    const double phi_1 = eq1.phi_s;

    // stage 1: held equilibrium
    const double i_q1 = stage1_iq(scenario, params, phi_1);
    const double U_t1 =
        model::terminal_voltage(phi_1, scenario.i_d1, i_q1, scenario.U_g1, params.X_g);
    for (double t = 0.0; t < scenario.t_fault; t += cfg.step)
        traj.samples.push_back({t, 1, phi_1, 0.0, scenario.i_d1, i_q1, U_t1});

    // fault inception jump
    const double omega_1 = model::jump_fault_entry(scenario, params, phi_1);
    traj.jumps.push_back({scenario.t_fault, 0.0, omega_1});

    // stage 2: during-fault GSE
    const GseParams g2 = model::derive_gse(params, scenario.i_d2, scenario.U_g2);
    auto record2 = [&](double t, const Vec2& s) {
        const double U_t = model::terminal_voltage(s[0], scenario.i_d2, scenario.i_q2,
                                                   scenario.U_g2, params.X_g);
        traj.samples.push_back({t, 2, s[0], s[1], scenario.i_d2, scenario.i_q2, U_t});
    };
    Vec2 y2(phi_1, omega_1);
    record2(scenario.t_fault, y2);
    auto rhs2 = [&g2](double, const Vec2& s) { return model::gse_rhs(s, g2); };
    integrate(rhs2, scenario.t_fault, t_clear, y2, cfg, [&](double t, const Vec2& s) {
        record2(t, s);
        return true;
    });

    // clearing jump
    const double omega_2 = y2[1];
    const double omega_3 = model::jump_fault_clear(params, scenario.U_g2, y2[0], omega_2);
    traj.jumps.push_back({t_clear, omega_2, omega_3});

    auto verdict =
        simulate_recovery({y2[0], omega_3}, scenario, params, cfg, t_clear, horizon, &traj);
    return {std::move(traj), verdict};
}

namespace {

// Fast stage-2 integration: returns (phi, omega) after a clearing delay d.
Vec2 fault_trajectory_at(const Scenario& sc, const SystemParams& p, const IntegratorConfig& cfg,
                         double phi_1, double omega_1, double d) {
    Vec2 y(phi_1, omega_1);
    if (d <= 0.0) return y;
    const GseParams g2 = model::derive_gse(p, sc.i_d2, sc.U_g2);
    auto rhs = [&g2](double, const Vec2& s) { return model::gse_rhs(s, g2); };
    integrate(rhs, 0.0, d, y, cfg, [](double, const Vec2&) { return true; });
    return y;
}

bool probe_clearing(const Scenario& sc, const SystemParams& p, const IntegratorConfig& cfg,
                    double phi_1, double omega_1, double d) {
    const Vec2 yc = fault_trajectory_at(sc, p, cfg, phi_1, omega_1, d);
    const double omega_3 = model::jump_fault_clear(p, sc.U_g2, yc[0], yc[1]);
    const double horizon =
        std::abs(sc.i_d1 - sc.i_d2) / p.K_ramp + 6.0;
    const auto v = simulate_recovery({yc[0], omega_3}, sc, p, cfg, 0.0, horizon);
    return v.stable;
}

}  // namespace

CctOracle oracle_cct(const Scenario& scenario, const SystemParams& params,
                     const IntegratorConfig& cfg) {
    params.validate();
    Scenario sc = scenario;
    sc.t_clear.reset();
    sc.validate(params);

    const auto eq1 = model::equilibria(sc.i_d1, sc.U_g1, params.X_g);
    const double phi_1 = eq1.phi_s;
    const double omega_1 = model::jump_fault_entry(sc, params, phi_1);

    std::vector<double> stable_ds, unstable_ds;
    auto probe = [&](double d) {
        const bool ok = probe_clearing(sc, params, cfg, phi_1, omega_1, d);
        (ok ? stable_ds : unstable_ds).push_back(d);
        return ok;
    };

    if (!probe(0.0))
        throw NoBracket("oracle_cct: unstable even for immediate clearing", false);

    constexpr double kLongestProbe = 5.0;
    double lo = 0.0, hi = 0.05;
    while (probe(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kLongestProbe)
            throw NoBracket("oracle_cct: stable up to the 5 s probe limit", true);
    }

    constexpr double kTol = 5e-4;
    while (hi - lo > kTol) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }

    // single-threshold sanity over all probes
    const double max_stable = *std::max_element(stable_ds.begin(), stable_ds.end());
    const double min_unstable = *std::min_element(unstable_ds.begin(), unstable_ds.end());
    if (max_stable >= min_unstable) {
        std::ostringstream msg;
        msg << "oracle_cct: non-monotone stability in clearing time (stable at " << max_stable
            << " s but unstable at " << min_unstable << " s)";
        throw std::logic_error(msg.str());
    }

    const Vec2 yc = fault_trajectory_at(sc, params, cfg, phi_1, omega_1, lo);
    return CctOracle{lo, yc[0]};
}

BasinMap basin_map(double i_d, double U_g, const SystemParams& params, const Window& window,
                   int n_phi, int n_omega, const IntegratorConfig& cfg, int n_threads) {
    params.validate();
    const GseParams g = model::derive_gse(params, i_d, U_g);
    const auto eq = model::equilibria(i_d, U_g, params.X_g);

    BasinMap map{window.phi_min, window.phi_max, window.omega_min, window.omega_max,
                 n_phi,          n_omega,        {},              i_d,
                 U_g};
    map.grid.assign(static_cast<std::size_t>(n_phi) * n_omega, 0);

    const double dphi = (window.phi_max - window.phi_min) / n_phi;
    const double domega = (window.omega_max - window.omega_min) / n_omega;
    constexpr double kHorizon = 20.0;

    auto run_rows = [&](int row_begin, int row_end) {
        for (int j = row_begin; j < row_end; ++j) {
            const double omega = window.omega_min + (j + 0.5) * domega;
            for (int i = 0; i < n_phi; ++i) {
                const double phi = window.phi_min + (i + 0.5) * dphi;
                const auto v = classify_frozen({phi, omega}, g, eq, cfg, kHorizon);
                map.grid[static_cast<std::size_t>(j) * n_phi + i] = v.stable ? 1 : 0;
            }
        }
    };

    int workers = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n_omega);
    if (workers == 1) {
        run_rows(0, n_omega);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_omega + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int b = w * chunk, e = std::min(n_omega, b + chunk);
            if (b < e) pool.emplace_back(run_rows, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return map;
}

bool fate_at_stage3_entry(const PllState& state, const Scenario& scenario,
                          const SystemParams& params, const IntegratorConfig& cfg) {
    const GseParams g = model::derive_gse(params, scenario.i_d2, scenario.U_g1);
    const auto eq = model::equilibria(scenario.i_d2, scenario.U_g1, params.X_g);
    return classify_frozen(state, g, eq, cfg, 20.0).stable;
}

model::SystemParams aggregate_farm(const FarmSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("aggregate_farm: n must be >= 1");
    SystemParams eq = spec.device;
    // on the n-device aggregate base the shared line impedance scales by n
    eq.X_g = spec.device.X_g + spec.n * spec.X_line;
    return eq;
}

}  // namespace gse::sim
