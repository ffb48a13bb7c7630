#include "gse/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gse::config {

namespace {

struct RawValue {
    std::string text;
    int line;
};

using Section = std::map<std::string, RawValue>;
using Document = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ": " << msg;
    throw ConfigError(os.str());
}

Document tokenize(std::istream& in) {
    Document doc;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(lineno, "empty section name");
            doc.try_emplace(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        if (section.empty()) fail(lineno, "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail(lineno, "empty key or value");
        if (!doc[section].emplace(key, RawValue{val, lineno}).second)
            fail(lineno, "duplicate key '" + key + "'");
    }
    return doc;
}

double to_double(const RawValue& rv, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(rv.text, &pos);
    } catch (const std::exception&) {
        fail(rv.line, "value of '" + key + "' is not a number");
    }
    if (pos != rv.text.size()) fail(rv.line, "trailing characters after number in '" + key + "'");
    return v;
}

std::vector<double> to_list(const RawValue& rv, const std::string& key) {
    std::istringstream is(rv.text);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail(rv.line, "list value of '" + key + "' contains non-number '" + tok + "'");
        }
    }
    if (out.empty()) fail(rv.line, "empty list for '" + key + "'");
    return out;
}

// Pulls a key out of a section, erasing it so leftovers can be rejected.
class SectionReader {
  public:
    SectionReader(Document& doc, const std::string& name) : name_(name) {
        auto it = doc.find(name);
        if (it != doc.end()) sec_ = &it->second;
    }

    bool present() const { return sec_ != nullptr; }

    std::optional<RawValue> take(const std::string& key) {
        if (!sec_) return std::nullopt;
        auto it = sec_->find(key);
        if (it == sec_->end()) return std::nullopt;
        RawValue rv = it->second;
        sec_->erase(it);
        return rv;
    }

    double required(const std::string& key) {
        auto rv = take(key);
        if (!rv) throw ConfigError("config: missing required key '" + key + "' in [" + name_ + "]");
        return to_double(*rv, key);
    }

    double number_or(const std::string& key, double fallback) {
        auto rv = take(key);
        return rv ? to_double(*rv, key) : fallback;
    }

  private:
    std::string name_;
    Section* sec_ = nullptr;
};

void reject_leftovers(const Document& doc) {
    static const char* known_sections[] = {"grid", "pll",    "lvrt",       "ramp", "tvc",
                                           "limits", "integrator", "sweep", "farm"};
    for (const auto& [sec, kv] : doc) {
        bool known = false;
        for (const char* s : known_sections) known |= sec == s;
        if (!known) throw ConfigError("config: unknown section [" + sec + "]");
        if (!kv.empty())
            fail(kv.begin()->second.line,
                 "unknown key '" + kv.begin()->first + "' in [" + sec + "]");
    }
}

}  // namespace

ScenarioFile parse(std::istream& in) {
    Document doc = tokenize(in);
    ScenarioFile sf;

    SectionReader grid(doc, "grid");
    if (!grid.present()) throw ConfigError("config: missing [grid] section");
    sf.params.X_g = grid.required("X_g");
    sf.scenario.U_g1 = grid.number_or("U_g1", 1.0);
    sf.params.omega_0 = grid.number_or("omega_0", 100.0 * M_PI);

    SectionReader pll(doc, "pll");
    if (!pll.present()) throw ConfigError("config: missing [pll] section");
    sf.params.k_ppll = pll.required("k_ppll");
    sf.params.k_ipll = pll.required("k_ipll");

    SectionReader lvrt(doc, "lvrt");
    if (!lvrt.present()) throw ConfigError("config: missing [lvrt] section");
    sf.scenario.U_g2 = lvrt.required("U_g2");
    sf.scenario.i_d1 = lvrt.required("i_d1");
    sf.scenario.i_d2 = lvrt.required("i_d2");
    if (auto rv = lvrt.take("i_q2")) {
        if (rv->text == "auto") {
            sf.iq2_auto = true;
        } else {
            sf.scenario.i_q2 = to_double(*rv, "i_q2");
        }
    } else {
        sf.iq2_auto = true;
    }
    sf.scenario.t_fault = lvrt.number_or("t_fault_s", 0.1);
    if (auto rv = lvrt.take("t_clear_s")) sf.scenario.t_clear = to_double(*rv, "t_clear_s");

    SectionReader ramp(doc, "ramp");
    if (ramp.present()) sf.params.K_ramp = ramp.number_or("K_ramp", sf.params.K_ramp);

    SectionReader tvc(doc, "tvc");
    if (tvc.present()) {
        sf.params.K_pV = tvc.number_or("K_pV", sf.params.K_pV);
        sf.params.K_iV = tvc.number_or("K_iV", sf.params.K_iV);
        sf.params.U_tref = tvc.number_or("U_tref", sf.params.U_tref);
    }

    SectionReader limits(doc, "limits");
    if (limits.present()) sf.params.I_max = limits.number_or("I_max", sf.params.I_max);

    SectionReader integ(doc, "integrator");
    if (integ.present()) {
        if (auto rv = integ.take("method")) {
            if (rv->text == "rk4")
                sf.integrator.method = sim::Method::RK4;
            else if (rv->text == "rk45")
                sf.integrator.method = sim::Method::RK45;
            else
                fail(rv->line, "method must be rk4 or rk45");
        }
        sf.integrator.step = integ.number_or("step_s", sf.integrator.step);
        sf.integrator.event_tol = integ.number_or("event_tol_s", sf.integrator.event_tol);
        sf.integrator.rel_tol = integ.number_or("rel_tol", sf.integrator.rel_tol);
        sf.integrator.abs_tol = integ.number_or("abs_tol", sf.integrator.abs_tol);
        if (auto rv = integ.take("horizon_s")) sf.horizon_s = to_double(*rv, "horizon_s");
        if (sf.integrator.step <= 0.0) throw ConfigError("config: step_s must be > 0");
        if (sf.integrator.event_tol > sf.integrator.step)
            throw ConfigError("config: event_tol_s must not exceed step_s");
    }

    SectionReader sweep(doc, "sweep");
    if (sweep.present()) {
        auto ug = sweep.take("U_g2");
        auto id = sweep.take("i_d2");
        if (!ug || !id) throw ConfigError("config: [sweep] needs both U_g2 and i_d2 lists");
        const auto ugl = to_list(*ug, "U_g2");
        const auto idl = to_list(*id, "i_d2");
        if (ugl.size() != idl.size())
            throw ConfigError("config: [sweep] U_g2 and i_d2 lists must pair up (equal length)");
        for (std::size_t i = 0; i < ugl.size(); ++i) sf.sweep.emplace_back(ugl[i], idl[i]);
        sf.has_sweep = true;
    }

    SectionReader farm(doc, "farm");
    if (farm.present()) {
        FarmSection fs;
        fs.n = static_cast<int>(farm.required("n"));
        fs.X_line = farm.required("X_line");
        if (fs.n < 1) throw ConfigError("config: farm n must be >= 1");
        sf.farm = fs;
    }

    reject_leftovers(doc);
    sf.params.validate();
    if (!sf.iq2_auto) sf.scenario.validate(sf.params);
    return sf;
}

ScenarioFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in);
}

std::string serialize(const ScenarioFile& sf) {
    std::ostringstream os;
    os.precision(17);
    os << "[grid]\n"
       << "X_g = " << sf.params.X_g << "\n"
       << "U_g1 = " << sf.scenario.U_g1 << "\n"
       << "omega_0 = " << sf.params.omega_0 << "\n\n"
       << "[pll]\n"
       << "k_ppll = " << sf.params.k_ppll << "\n"
       << "k_ipll = " << sf.params.k_ipll << "\n\n"
       << "[lvrt]\n"
       << "U_g2 = " << sf.scenario.U_g2 << "\n"
       << "i_d1 = " << sf.scenario.i_d1 << "\n"
       << "i_d2 = " << sf.scenario.i_d2 << "\n";
    if (sf.iq2_auto)
        os << "i_q2 = auto\n";
    else
        os << "i_q2 = " << sf.scenario.i_q2 << "\n";
    os << "t_fault_s = " << sf.scenario.t_fault << "\n";
    if (sf.scenario.t_clear) os << "t_clear_s = " << *sf.scenario.t_clear << "\n";
    os << "\n[ramp]\nK_ramp = " << sf.params.K_ramp << "\n\n"
       << "[tvc]\n"
       << "K_pV = " << sf.params.K_pV << "\n"
       << "K_iV = " << sf.params.K_iV << "\n"
       << "U_tref = " << sf.params.U_tref << "\n\n"
       << "[limits]\nI_max = " << sf.params.I_max << "\n\n"
       << "[integrator]\n"
       << "method = " << (sf.integrator.method == sim::Method::RK4 ? "rk4" : "rk45") << "\n"
       << "step_s = " << sf.integrator.step << "\n"
       << "event_tol_s = " << sf.integrator.event_tol << "\n"
       << "rel_tol = " << sf.integrator.rel_tol << "\n"
       << "abs_tol = " << sf.integrator.abs_tol << "\n";
    if (sf.horizon_s) os << "horizon_s = " << *sf.horizon_s << "\n";
    if (sf.has_sweep) {
        os << "\n[sweep]\nU_g2 =";
        for (const auto& c : sf.sweep) os << " " << c.first;
        os << "\ni_d2 =";
        for (const auto& c : sf.sweep) os << " " << c.second;
        os << "\n";
    }
    if (sf.farm) {
        os << "\n[farm]\nn = " << sf.farm->n << "\nX_line = " << sf.farm->X_line << "\n";
    }
    return os.str();
}

double resolve_auto_iq2(ScenarioFile& sf) {
    if (sf.iq2_auto) {
        const auto eq1 =
            model::equilibria(sf.scenario.i_d1, sf.scenario.U_g1, sf.params.X_g);
        // dip voltage seen with pre-fault currents still applied
        const double i_q1 =
            (sf.scenario.U_g1 * std::cos(eq1.phi_s) - sf.params.U_tref) / sf.params.X_g;
        const double U_t_dip = model::terminal_voltage(eq1.phi_s, sf.scenario.i_d1, i_q1,
                                                       sf.scenario.U_g2, sf.params.X_g);
        sf.scenario.i_q2 = model::auto_iq2(U_t_dip, sf.scenario.i_d2, sf.params.I_max);
        sf.iq2_auto = false;
        sf.scenario.validate(sf.params);
    }
    return sf.scenario.i_q2;
}

double default_horizon(const ScenarioFile& sf) {
    if (sf.horizon_s) return *sf.horizon_s;
    const double t_clear = sf.scenario.t_clear.value_or(sf.scenario.t_fault);
    const double ramp =
        std::abs(sf.scenario.i_d1 - sf.scenario.i_d2) / sf.params.K_ramp;
    return t_clear + ramp + 5.0;
}

}  // namespace gse::config
