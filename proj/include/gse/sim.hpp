#ifndef GSE_SIM_HPP
#define GSE_SIM_HPP

#include <cstdint>
#include <vector>

#include "gse/model.hpp"

namespace gse::sim {

enum class Method { RK4, RK45 };

struct IntegratorConfig {
    double step = 1e-4;       // fixed-step size, s
    Method method = Method::RK4;
    double rel_tol = 1e-9;    // adaptive only
    double abs_tol = 1e-11;   // adaptive only
    double event_tol = 1e-6;  // switch/event localization tolerance, s
};

struct Sample {
    double t;
    int stage;  // 1..4
    double phi;
    double omega;
    double i_d;
    double i_q;
    double U_t;
};

struct JumpRecord {
    double t;
    double omega_before;
    double omega_after;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<JumpRecord> jumps;
};

enum class Reason { ConvergedToSEP, PhiExceededUEP, OmegaDiverged, Timeout };

struct StabilityVerdict {
    bool stable;
    Reason reason;
    model::PllState final_state;
};

struct BasinMap {
    double phi_min, phi_max;
    double omega_min, omega_max;
    int n_phi, n_omega;
    std::vector<std::uint8_t> grid;  // row-major [i_omega][i_phi], 1 = inside basin
    double i_d, U_g;

    bool inside(int i_phi, int i_omega) const {
        return grid[static_cast<std::size_t>(i_omega) * n_phi + i_phi] != 0;
    }
};

struct FarmSpec {
    int n = 1;                   // machine count
    model::SystemParams device;  // per-device params on device base
    double X_line = 0.0;         // shared line reactance, device base
};

// Stability classification thresholds. The divergence bounds sit far
// outside any recoverable excursion for the reference gain range.
inline constexpr double kSettlePhiTol = 0.02;    // rad
inline constexpr double kSettleOmegaTol = 0.01;  // rad/s
inline constexpr double kPhiDivergeMargin = 0.5; // rad past the UEP
inline constexpr double kOmegaDiverge = 50.0;    // rad/s
inline constexpr double kSettleWindow = 0.5;     // s

// Total energy of the frozen GSE (kinetic + position + electromagnetic
// potential); conserved when alpha = 0.
double gse_energy(const model::PllState& state, const model::GseParams& g);

Trajectory simulate_gse(const model::PllState& init, const model::GseParams& g, double horizon,
                        const IntegratorConfig& cfg, int stage_label = 2);

StabilityVerdict classify_stability(const Trajectory& traj_tail, const model::Equilibria& eq,
                                    double settle_window = kSettleWindow);

std::pair<Trajectory, StabilityVerdict> simulate_scenario(const model::Scenario& scenario,
                                                          const model::SystemParams& params,
                                                          const IntegratorConfig& cfg,
                                                          double horizon);

// Stages 3 and 4 alone, started from a given post-clearing state at time t0
// with i_d = i_d2. Used by simulate_scenario and by the fate-determination
// cross-check. Appends to traj when non-null.
StabilityVerdict simulate_recovery(const model::PllState& entry, const model::Scenario& scenario,
                                   const model::SystemParams& params, const IntegratorConfig& cfg,
                                   double t0, double horizon, Trajectory* traj = nullptr);

struct CctOracle {
    double t_cr;    // largest tested stable clearing duration, s
    double phi_cr;  // during-fault angle at t_fault + t_cr, rad
};

// Bisection on the clearing duration against the full four-stage
// simulation; tolerance 5e-4 s. Throws NoBracket for always-stable or
// always-unstable scenarios.
CctOracle oracle_cct(const model::Scenario& scenario, const model::SystemParams& params,
                     const IntegratorConfig& cfg);

struct Window {
    double phi_min, phi_max;
    double omega_min, omega_max;
};

BasinMap basin_map(double i_d, double U_g, const model::SystemParams& params, const Window& window,
                   int n_phi, int n_omega, const IntegratorConfig& cfg, int n_threads = 0);

// Membership of the post-clearing state in the basin of the frozen GSE
// with (i_d = i_d2, U_g = U_g1), by forward simulation.
bool fate_at_stage3_entry(const model::PllState& state, const model::Scenario& scenario,
                          const model::SystemParams& params, const IntegratorConfig& cfg);

// Single-machine-multiplication aggregation of n identical devices behind
// a shared line: gains unchanged, X_g_eq = X_device + n * X_line.
model::SystemParams aggregate_farm(const FarmSpec& spec);

// Verdict for the frozen-parameter GSE started at `init`; basin_map and
// fate_at_stage3_entry are thin wrappers over this.
StabilityVerdict classify_frozen(const model::PllState& init, const model::GseParams& g,
                                 const model::Equilibria& eq, const IntegratorConfig& cfg,
                                 double horizon);

}  // namespace gse::sim

#endif
