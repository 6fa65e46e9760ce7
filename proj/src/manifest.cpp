#include "axilab/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "axilab/inequality.hpp"

namespace axilab {

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::istringstream iss(s);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    if (out.empty() || !iss.eof())
        throw ManifestError("manifest: bad numeric list for '" + key + "'");
    return out;
}

double parse_num(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ManifestError("manifest: bad number for '" + key + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    if (pos != s.size())
        throw ManifestError("manifest: bad number for '" + key + "'");
    return v;
}

OuterBC parse_bc(const std::string& s) {
    if (s == "noslip") return OuterBC::NoSlip;
    if (s == "fixed") return OuterBC::Fixed;
    if (s == "analytic") return OuterBC::Analytic;
    throw ManifestError("manifest: unknown bc '" + s + "'");
}

}  // namespace

QuantityParams RunManifest::quantity_params() const {
    QuantityParams prm;
    prm.p = p;
    prm.q = q;
    prm.gamma_exp = gamma_exp;
    prm.alpha = alpha;
    prm.beta = beta;
    return prm;
}

DecayParams RunManifest::decay_params() const {
    DecayParams dp;
    dp.tau = tau;
    dp.N7 = N7;
    dp.K = K;
    dp.beta = beta;
    return dp;
}

RunManifest RunManifest::parse(std::istream& in) {
    RunManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            // blank or comment-only lines are fine
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ManifestError("manifest: line " + std::to_string(lineno) +
                                    " is not 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ManifestError("manifest: empty key or value at line " +
                                std::to_string(lineno));

        if (key == "scenario") {
            m.scenario.name = val;
            m.scenario.ic = InitialCondition::parse(val);
        } else if (key == "nr") {
            m.scenario.Nr = static_cast<int>(parse_num(val, key));
        } else if (key == "nz") {
            m.scenario.Nz = static_cast<int>(parse_num(val, key));
        } else if (key == "r_max") {
            m.scenario.r_max = parse_num(val, key);
        } else if (key == "z_min") {
            m.scenario.z_min = parse_num(val, key);
        } else if (key == "z_max") {
            m.scenario.z_max = parse_num(val, key);
        } else if (key == "duration") {
            m.scenario.duration = parse_num(val, key);
        } else if (key == "snapshot_every") {
            m.scenario.snapshot_every = static_cast<int>(parse_num(val, key));
        } else if (key == "amp") {
            m.scenario.ic.amp = parse_num(val, key);
        } else if (key == "width") {
            m.scenario.ic.width = parse_num(val, key);
        } else if (key == "r0") {
            m.scenario.ic.r0 = parse_num(val, key);
        } else if (key == "z0") {
            m.scenario.ic.z0 = parse_num(val, key);
        } else if (key == "t_offset") {
            m.scenario.ic.t_offset = parse_num(val, key);
        } else if (key == "dt") {
            m.solver.dt = parse_num(val, key);
        } else if (key == "cfl") {
            m.solver.cfl_limit = parse_num(val, key);
        } else if (key == "bc") {
            m.solver.bc_outer = parse_bc(val);
        } else if (key == "sweep_x03") {
            m.sweep_x03 = parse_list(val, key);
        } else if (key == "sweep_R") {
            m.sweep_R = parse_list(val, key);
        } else if (key == "t0") {
            m.t0 = parse_num(val, key);
        } else if (key == "p") {
            m.p = parse_num(val, key);
        } else if (key == "q") {
            m.q = parse_num(val, key);
        } else if (key == "gamma") {
            m.gamma_exp = parse_num(val, key);
        } else if (key == "alpha") {
            m.alpha = parse_num(val, key);
        } else if (key == "beta") {
            m.beta = parse_num(val, key);
        } else if (key == "tau") {
            m.tau = parse_num(val, key);
        } else if (key == "G_bound") {
            m.G_bound = parse_num(val, key);
        } else if (key == "K") {
            m.K = parse_num(val, key);
        } else if (key == "N7") {
            m.N7 = parse_num(val, key);
        } else if (key == "decay_R0") {
            m.decay_R0 = parse_num(val, key);
        } else if (key == "decay_levels") {
            m.decay_levels = static_cast<int>(parse_num(val, key));
        } else if (key == "seed") {
            m.seed = std::stoull(val, nullptr, 0);
        } else if (key == "corpus_count") {
            m.corpus_count = static_cast<int>(parse_num(val, key));
        } else {
            throw ManifestError("manifest: unknown key '" + key + "'");
        }
    }

    // if gamma changed but p, q left at defaults, re-derive the symmetric pair
    if (std::abs(3.0 / m.p + 2.0 / m.q - 1.5) < 1e-12 &&
        std::abs(m.gamma_exp - 0.5) > 1e-12) {
        m.p = m.q = 5.0 / (2.0 - m.gamma_exp);
    }

    if (!(m.gamma_exp > 0.0 && m.gamma_exp < 1.0))
        throw ManifestError("manifest: gamma must lie in (0, 1)");
    if (std::abs(3.0 / m.p + 2.0 / m.q - (2.0 - m.gamma_exp)) > 1e-9)
        throw ManifestError(
            "manifest: violated relation 3/p + 2/q = 2 - gamma");
    double alpha0 = m.gamma_exp / (48.0 + 16.0 * m.gamma_exp);
    if (!(m.alpha > 0.0 && m.alpha < alpha0))
        throw ManifestError(
            "manifest: violated relation alpha < gamma/(48 + 16 gamma)");
    if (!(m.beta > 0.0 && m.beta < 0.125))
        throw ManifestError("manifest: violated relation beta in (0, 1/8)");
    if (!(m.tau > 0.0 && m.tau < 1.0))
        throw ManifestError("manifest: violated relation tau in (0, 1)");
    if (m.scenario.Nr < 4 || m.scenario.Nz < 4)
        throw ManifestError("manifest: grid too small");
    if (m.scenario.duration < 0.0)
        throw ManifestError("manifest: negative duration");
    return m;
}

RunManifest RunManifest::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("manifest: cannot open " + path);
    return parse(in);
}

}  // namespace axilab
