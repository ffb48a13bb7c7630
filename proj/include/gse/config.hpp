#ifndef GSE_CONFIG_HPP
#define GSE_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gse/model.hpp"
#include "gse/sim.hpp"

namespace gse::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FarmSection {
    int n = 1;
    double X_line = 0.0;
};

// Parsed scenario configuration file: sectioned key-value plain text,
// all values per-unit unless suffixed _s.
struct ScenarioFile {
    model::SystemParams params;
    model::Scenario scenario;
    bool iq2_auto = false;
    sim::IntegratorConfig integrator;
    std::optional<double> horizon_s;
    std::vector<std::pair<double, double>> sweep;  // (U_g2, i_d2) cases
    bool has_sweep = false;
    std::optional<FarmSection> farm;
};

ScenarioFile parse(std::istream& in);
ScenarioFile parse_file(const std::string& path);
std::string serialize(const ScenarioFile& sf);

// Applies the grid-code rule when i_q2 = auto: support proportional to the
// dip depth seen with pre-fault currents, capped by converter headroom.
// Returns the resolved i_q2.
double resolve_auto_iq2(ScenarioFile& sf);

// Simulation horizon: explicit value, or clearing + ramp + settle margin.
double default_horizon(const ScenarioFile& sf);

}  // namespace gse::config

#endif
