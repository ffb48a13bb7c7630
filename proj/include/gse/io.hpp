#ifndef GSE_IO_HPP
#define GSE_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gse/eac.hpp"
#include "gse/sim.hpp"

namespace gse::io {

// 17 significant digits, '.' decimal separator.
std::string fmt(double v);

// Header t,stage,phi,omega,i_d,i_q,U_t; jump events appear as adjacent
// rows with equal t (pre-jump omega first).
void write_trajectory_csv(std::ostream& os, const sim::Trajectory& traj);

struct SweepRow {
    double U_g2, i_d2;
    eac::CcaReport cca;
    eac::CctReport cct;
    std::string reason;  // non-empty when the cell failed
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

void write_basin_csv(std::ostream& os, const sim::BasinMap& map);

// Report JSON (schema-versioned); returns the serialized document.
std::string run_report_json(const std::string& command, const std::string& scenario_echo,
                            const model::Scenario& scenario, const model::SystemParams& params,
                            const sim::IntegratorConfig& cfg, const eac::CcaReport& cca,
                            const eac::CctReport& cct, double wall_clock_s);

void svg_trajectory(std::ostream& os, const sim::Trajectory& traj);

void svg_basin(std::ostream& os, const sim::BasinMap& map, const model::Equilibria& eq,
               const sim::Trajectory* overlay = nullptr);

// Power-angle diagram with shaded acceleration/deceleration areas.
void svg_eac_areas(std::ostream& os, const eac::EacInputs& inp, double phi_cr);

}  // namespace gse::io

#endif
