#ifndef GSE_EAC_HPP
#define GSE_EAC_HPP

#include <optional>
#include <string>

#include "gse/model.hpp"
#include "gse/sim.hpp"

namespace gse::eac {

// Damping treatment for the third approximation. The damping coefficient
// is voltage-dependent, so the during-fault and recovery segments carry
// different values by default; ConstantStage2 applies the during-fault
// value on both segments.
enum class DampingModel { StageDependent, ConstantStage2 };

struct EacInputs {
    double phi_1;    // stage-1 SEP, rad
    double phi_3u;   // stage-3 UEP under (i_d2, U_g1), rad
    double P_m2;     // i_d2 * X_g, pu
    double U_g2;     // during-fault bus voltage, pu
    double M;        // equivalent inertia
    double k_ppll;
    double alpha_2;  // damping on the during-fault segment
    double alpha_3;  // damping on the recovery segment
};

EacInputs make_inputs(const model::Scenario& scenario, const model::SystemParams& params,
                      DampingModel damping = DampingModel::StageDependent);

struct CcaReport {
    std::optional<double> phi_cr_1, phi_cr_2, phi_cr_3;
    double h_2 = 0.0, h_3 = 0.0;
    double S_d = 0.0;
    std::optional<double> oracle_phi_cr;
    std::optional<double> err_1, err_2, err_3;  // signed, (approx - oracle) / oracle
    std::string error;                          // first per-stage failure, if any
};

struct CctReport {
    std::optional<double> t_cr_1, t_cr_2, t_cr_3;
    std::optional<double> oracle_t_cr;
    std::optional<double> err_1, err_2, err_3;
    std::string error;
};

// First approximation: classical equal-area criterion, closed form.
double cca_first(const EacInputs& inp);

// Conservative energy constants of the during-fault and recovery orbits.
std::pair<double, double> energy_constants(const EacInputs& inp, double omega_1);

// Second approximation: velocity jumps at both switches, bracketed root.
double cca_second(const EacInputs& inp, double omega_1);

// Residual of the second-approximation root equation (exposed for tests).
double cca_second_residual(const EacInputs& inp, double phi, double h_2, double h_3);

// Velocity along the conservative orbits, with rounding-level negative
// radicands clamped to zero.
double orbit_omega_stage2(const EacInputs& inp, double phi, double h_2);
double orbit_omega_stage3(const EacInputs& inp, double phi, double h_3);

// Damping energy along the conservative solution curves.
double damping_integral(const EacInputs& inp, double phi_cr_2, double h_2, double h_3);

// Third approximation: damping correction applied to phi_cr_2.
double cca_third(const EacInputs& inp, double phi_cr_2, double S_d);

// First crossing time of phi_cr on the during-fault trajectory, localized
// by interpolation to 1e-6 s.
double cct_from_cca(double phi_cr, const model::Scenario& scenario,
                    const model::SystemParams& params, const sim::IntegratorConfig& cfg);

std::pair<CcaReport, CctReport> analyze(const model::Scenario& scenario,
                                        const model::SystemParams& params,
                                        const sim::IntegratorConfig& cfg, bool with_oracle,
                                        DampingModel damping = DampingModel::StageDependent);

}  // namespace gse::eac

#endif
