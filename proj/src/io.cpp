#include "gse/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace gse::io {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {
std::string opt_fmt(const std::optional<double>& v) {
    return v ? fmt(*v) : "nan";
}

json opt_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}
}  // namespace

void write_trajectory_csv(std::ostream& os, const sim::Trajectory& traj) {
    os << "t,stage,phi,omega,i_d,i_q,U_t\n";
    std::size_t jump_idx = 0;
    const sim::Sample* prev = nullptr;
    for (const auto& s : traj.samples) {
        // emit the pre-jump row right before the matching post-jump sample
        if (jump_idx < traj.jumps.size() && s.t == traj.jumps[jump_idx].t && prev) {
            const auto& j = traj.jumps[jump_idx];
            os << fmt(j.t) << ',' << prev->stage << ',' << fmt(s.phi) << ','
               << fmt(j.omega_before) << ',' << fmt(prev->i_d) << ',' << fmt(prev->i_q) << ','
               << fmt(prev->U_t) << '\n';
            ++jump_idx;
        }
        os << fmt(s.t) << ',' << s.stage << ',' << fmt(s.phi) << ',' << fmt(s.omega) << ','
           << fmt(s.i_d) << ',' << fmt(s.i_q) << ',' << fmt(s.U_t) << '\n';
        prev = &s;
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "U_g2,i_d2,phi_cr,phi_cr_1,err_phi_1,phi_cr_2,err_phi_2,phi_cr_3,err_phi_3,"
          "t_cr,t_cr_1,err_t_1,t_cr_2,err_t_2,t_cr_3,err_t_3,reason\n";
    double m1 = 0, m2 = 0, m3 = 0, mt1 = 0, mt2 = 0, mt3 = 0;
    int n = 0;
    for (const auto& r : rows) {
        os << fmt(r.U_g2) << ',' << fmt(r.i_d2) << ',' << opt_fmt(r.cca.oracle_phi_cr) << ','
           << opt_fmt(r.cca.phi_cr_1) << ',' << opt_fmt(r.cca.err_1) << ','
           << opt_fmt(r.cca.phi_cr_2) << ',' << opt_fmt(r.cca.err_2) << ','
           << opt_fmt(r.cca.phi_cr_3) << ',' << opt_fmt(r.cca.err_3) << ','
           << opt_fmt(r.cct.oracle_t_cr) << ',' << opt_fmt(r.cct.t_cr_1) << ','
           << opt_fmt(r.cct.err_1) << ',' << opt_fmt(r.cct.t_cr_2) << ',' << opt_fmt(r.cct.err_2)
           << ',' << opt_fmt(r.cct.t_cr_3) << ',' << opt_fmt(r.cct.err_3) << ',' << r.reason
           << '\n';
        if (r.cca.err_1 && r.cca.err_2 && r.cca.err_3 && r.cct.err_1 && r.cct.err_2 &&
            r.cct.err_3) {
            m1 += std::abs(*r.cca.err_1);
            m2 += std::abs(*r.cca.err_2);
            m3 += std::abs(*r.cca.err_3);
            mt1 += std::abs(*r.cct.err_1);
            mt2 += std::abs(*r.cct.err_2);
            mt3 += std::abs(*r.cct.err_3);
            ++n;
        }
    }
    if (n > 0) {
        os << "mean_abs_error,,,," << fmt(m1 / n) << ",," << fmt(m2 / n) << ",," << fmt(m3 / n)
           << ",,," << fmt(mt1 / n) << ",," << fmt(mt2 / n) << ",," << fmt(mt3 / n) << ",\n";
    }
}

void write_basin_csv(std::ostream& os, const sim::BasinMap& map) {
    os << "# phi_min=" << fmt(map.phi_min) << " phi_max=" << fmt(map.phi_max)
       << " omega_min=" << fmt(map.omega_min) << " omega_max=" << fmt(map.omega_max)
       << " n_phi=" << map.n_phi << " n_omega=" << map.n_omega << " i_d=" << fmt(map.i_d)
       << " U_g=" << fmt(map.U_g) << "\n";
    for (int j = 0; j < map.n_omega; ++j) {
        for (int i = 0; i < map.n_phi; ++i) {
            os << (map.inside(i, j) ? '1' : '0');
            if (i + 1 < map.n_phi) os << ',';
        }
        os << '\n';
    }
}

std::string run_report_json(const std::string& command, const std::string& scenario_echo,
                            const model::Scenario& scenario, const model::SystemParams& params,
                            const sim::IntegratorConfig& cfg, const eac::CcaReport& cca,
                            const eac::CctReport& cct, double wall_clock_s) {
    json j;
    j["schema_version"] = 1;
    j["tool_version"] = "gse-cli 0.1.0";
    j["command"] = command;
    j["scenario_echo"] = scenario_echo;
    j["scenario"] = {
        {"U_g1", scenario.U_g1},   {"U_g2", scenario.U_g2},
        {"i_d1", scenario.i_d1},   {"i_d2", scenario.i_d2},
        {"i_q2", scenario.i_q2},   {"t_fault_s", scenario.t_fault},
        {"t_clear_s", scenario.t_clear ? json(*scenario.t_clear) : json(nullptr)},
    };
    j["params"] = {
        {"X_g", params.X_g},       {"k_ppll", params.k_ppll}, {"k_ipll", params.k_ipll},
        {"K_ramp", params.K_ramp}, {"K_pV", params.K_pV},     {"K_iV", params.K_iV},
        {"U_tref", params.U_tref}, {"I_max", params.I_max},   {"omega_0", params.omega_0},
    };
    j["integrator"] = {
        {"method", cfg.method == sim::Method::RK4 ? "rk4" : "rk45"},
        {"step_s", cfg.step},
        {"event_tol_s", cfg.event_tol},
        {"rel_tol", cfg.rel_tol},
        {"abs_tol", cfg.abs_tol},
    };
    j["cca"] = {
        {"phi_cr_1", opt_json(cca.phi_cr_1)},
        {"phi_cr_2", opt_json(cca.phi_cr_2)},
        {"phi_cr_3", opt_json(cca.phi_cr_3)},
        {"h_2", cca.h_2},
        {"h_3", cca.h_3},
        {"S_d", cca.S_d},
        {"oracle", opt_json(cca.oracle_phi_cr)},
        {"errors",
         {{"err_1", opt_json(cca.err_1)},
          {"err_2", opt_json(cca.err_2)},
          {"err_3", opt_json(cca.err_3)}}},
        {"error", cca.error},
    };
    j["cct"] = {
        {"t_cr_1", opt_json(cct.t_cr_1)},
        {"t_cr_2", opt_json(cct.t_cr_2)},
        {"t_cr_3", opt_json(cct.t_cr_3)},
        {"oracle", opt_json(cct.oracle_t_cr)},
        {"errors",
         {{"err_1", opt_json(cct.err_1)},
          {"err_2", opt_json(cct.err_2)},
          {"err_3", opt_json(cct.err_3)}}},
        {"error", cct.error},
    };
    j["wall_clock_s"] = wall_clock_s;
    return j.dump(2) + "\n";
}

namespace {

// Minimal plot scaffolding: maps data coordinates into a fixed viewport.
struct Axis {
    double x0, x1, y0, y1;         // data range
    double px, py, pw, ph;         // pixel box
    double X(double x) const { return px + (x - x0) / (x1 - x0) * pw; }
    double Y(double y) const { return py + ph - (y - y0) / (y1 - y0) * ph; }
};

void polyline(std::ostream& os, const Axis& ax, const std::vector<std::pair<double, double>>& pts,
              const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (const auto& [x, y] : pts) os << ax.X(x) << ',' << ax.Y(y) << ' ';
    os << "\"/>\n";
}

void frame(std::ostream& os, const Axis& ax, const std::string& label) {
    os << "<rect x=\"" << ax.px << "\" y=\"" << ax.py << "\" width=\"" << ax.pw << "\" height=\""
       << ax.ph << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << ax.px + 4 << "\" y=\"" << ax.py + 14 << "\" font-size=\"12\">" << label
       << "</text>\n";
}

}  // namespace

void svg_trajectory(std::ostream& os, const sim::Trajectory& traj) {
    std::vector<std::pair<double, double>> phi_pts, omega_pts;
    double t0 = traj.samples.front().t, t1 = traj.samples.back().t;
    double pmin = 1e300, pmax = -1e300, wmin = 1e300, wmax = -1e300;
    for (const auto& s : traj.samples) {
        phi_pts.emplace_back(s.t, s.phi);
        omega_pts.emplace_back(s.t, s.omega);
        pmin = std::min(pmin, s.phi);
        pmax = std::max(pmax, s.phi);
        wmin = std::min(wmin, s.omega);
        wmax = std::max(wmax, s.omega);
    }
    auto pad = [](double& a, double& b) {
        const double m = (b - a) * 0.05 + 1e-9;
        a -= m;
        b += m;
    };
    pad(pmin, pmax);
    pad(wmin, wmax);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n";
    Axis top{t0, t1, pmin, pmax, 50, 20, 560, 200};
    Axis bot{t0, t1, wmin, wmax, 50, 250, 560, 200};
    frame(os, top, "phi [rad]");
    frame(os, bot, "omega [rad/s]");
    polyline(os, top, phi_pts, "#c22");
    polyline(os, bot, omega_pts, "#22c");
    for (const auto& j : traj.jumps) {
        os << "<line x1=\"" << top.X(j.t) << "\" y1=\"" << top.py << "\" x2=\"" << top.X(j.t)
           << "\" y2=\"" << bot.py + bot.ph << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    }
    os << "</svg>\n";
}

void svg_basin(std::ostream& os, const sim::BasinMap& map, const model::Equilibria& eq,
               const sim::Trajectory* overlay) {
    Axis ax{map.phi_min, map.phi_max, map.omega_min, map.omega_max, 50, 20, 560, 420};
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n";
    const double cw = ax.pw / map.n_phi, ch = ax.ph / map.n_omega;
    for (int j = 0; j < map.n_omega; ++j) {
        for (int i = 0; i < map.n_phi; ++i) {
            if (!map.inside(i, j)) continue;
            const double x = ax.px + i * cw;
            const double y = ax.py + ax.ph - (j + 1) * ch;
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\""
               << ch << "\" fill=\"#7fb3ff\"/>\n";
        }
    }
    frame(os, ax, "basin (phi, omega), i_d=" + std::to_string(map.i_d));
    os << "<circle cx=\"" << ax.X(eq.phi_s) << "\" cy=\"" << ax.Y(0.0)
       << "\" r=\"4\" fill=\"black\"/>\n"
       << "<circle cx=\"" << ax.X(eq.phi_u) << "\" cy=\"" << ax.Y(0.0)
       << "\" r=\"4\" fill=\"white\" stroke=\"black\"/>\n";
    if (overlay) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : overlay->samples) pts.emplace_back(s.phi, s.omega);
        polyline(os, ax, pts, "#c22");
    }
    os << "</svg>\n";
}

void svg_eac_areas(std::ostream& os, const eac::EacInputs& inp, double phi_cr) {
    const double a = std::min(0.0, inp.phi_1 - 0.2), b = inp.phi_3u + 0.3;
    Axis ax{a, b, -0.2, 1.3, 50, 20, 560, 420};
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n";
    constexpr int N = 200;
    auto curve = [&](auto f) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i <= N; ++i) {
            const double phi = a + (b - a) * i / N;
            pts.emplace_back(phi, f(phi));
        }
        return pts;
    };
    auto shade = [&](double lo, double hi, auto f, const char* color) {
        os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
        for (int i = 0; i <= N; ++i) {
            const double phi = lo + (hi - lo) * i / N;
            os << ax.X(phi) << ',' << ax.Y(f(phi)) << ' ';
        }
        os << ax.X(hi) << ',' << ax.Y(inp.P_m2) << ' ' << ax.X(lo) << ',' << ax.Y(inp.P_m2);
        os << "\"/>\n";
    };
    auto p_fault = [&](double phi) { return inp.U_g2 * std::sin(phi); };
    auto p_rec = [&](double phi) { return std::sin(phi); };
    shade(inp.phi_1, phi_cr, p_fault, "#f4a6a6");   // acceleration area
    shade(phi_cr, inp.phi_3u, p_rec, "#a6c8f4");    // deceleration area
    frame(os, ax, "P - phi");
    polyline(os, ax, curve(p_fault), "#c22");
    polyline(os, ax, curve(p_rec), "#22c");
    polyline(os, ax,
             {{a, inp.P_m2}, {b, inp.P_m2}}, "#282");
    for (double phi : {inp.phi_1, phi_cr, inp.phi_3u}) {
        os << "<line x1=\"" << ax.X(phi) << "\" y1=\"" << ax.py << "\" x2=\"" << ax.X(phi)
           << "\" y2=\"" << ax.py + ax.ph << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace gse::io
