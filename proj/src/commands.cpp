#include "axilab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "axilab/inequality.hpp"
#include "axilab/oscillation.hpp"
#include "axilab/quadrature.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace axilab {

namespace {

SolverConfig effective_config(const RunManifest& m) {
    SolverConfig cfg = m.solver;
    if (m.scenario.ic.has_exact() && cfg.bc_outer != OuterBC::NoSlip)
        cfg.exact = m.scenario.ic;
    return cfg;
}

std::string snap_path(const std::string& dir, int k, const char* field) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "snap_%04d_%s.bin", k, field);
    return dir + "/" + buf;
}

void write_history(const FlowHistory& h, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream index(dir + "/index.csv");
    index << "k,t\n";
    char buf[64];
    for (int k = 0; k < static_cast<int>(h.snapshots.size()); ++k) {
        const FlowState& s = h.snapshots[k];
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", k, s.t);
        index << buf;
        write_field_binary(s.ur, snap_path(dir, k, "ur"));
        write_field_binary(s.utheta, snap_path(dir, k, "utheta"));
        write_field_binary(s.u3, snap_path(dir, k, "u3"));
        write_field_binary(s.pi, snap_path(dir, k, "pi"));
        write_field_binary(s.gamma, snap_path(dir, k, "gamma"));
    }
}

void write_run_log(const std::vector<RunLogLine>& log,
                   const std::string& path) {
    std::ofstream out(path);
    out << "step,t,energy,max_div,max_gamma,gamma_consistency\n";
    char buf[256];
    for (const auto& l : log) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      l.step, l.t, l.energy, l.max_div, l.max_gamma,
                      l.gamma_consistency);
        out << buf;
    }
}

double drift_metric(const FlowState& s, const InitialCondition& ic) {
    const AxiGrid& g = s.ur.grid();
    double d = 0.0;
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j) {
            double r = g.r(i), z = g.z(j);
            d = std::max(d, std::abs(s.ur(i, j) - ic.ur(r, z, s.t)));
            d = std::max(d, std::abs(s.utheta(i, j) - ic.utheta(r, z, s.t)));
            d = std::max(d, std::abs(s.u3(i, j) - ic.u3(r, z, s.t)));
        }
    return d;
}

FlowHistory obtain_history(const RunManifest& m,
                           const std::string& history_dir, bool& aborted) {
    aborted = false;
    if (!history_dir.empty()) return load_history(history_dir);
    RunResult res = run_scenario(m.scenario, effective_config(m));
    aborted = res.aborted;
    return std::move(res.history);
}

}  // namespace

int cmd_simulate(const RunManifest& m, const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunResult res;
    try {
        res = run_scenario(m.scenario, effective_config(m));
    } catch (const CflViolation& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitPrecondition;
    }
    write_history(res.history, out_dir + "/snapshots");
    write_run_log(res.log, out_dir + "/run_log.csv");

    json summary;
    summary["scenario"] = m.scenario.name;
    summary["grid"] = {{"nr", m.scenario.Nr}, {"nz", m.scenario.Nz}};
    summary["steps"] = res.log.empty() ? 0 : res.log.back().step;
    summary["aborted"] = res.aborted;
    summary["last_valid_t"] = res.last_valid_t;
    double max_div = 0.0, energy = 0.0;
    for (const auto& l : res.log) max_div = std::max(max_div, l.max_div);
    if (!res.log.empty()) energy = res.log.back().energy;
    summary["final_energy"] = energy;
    summary["max_div"] = max_div;
    if (m.scenario.ic.has_exact() && !res.history.snapshots.empty())
        summary["drift"] =
            drift_metric(res.history.snapshots.back(), m.scenario.ic);
    std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";

    return res.aborted ? kExitSolverAbort : kExitOk;
}

FlowHistory load_history(const std::string& snapshot_dir) {
    std::ifstream index(snapshot_dir + "/index.csv");
    if (!index)
        throw std::runtime_error("load_history: missing " + snapshot_dir +
                                 "/index.csv");
    std::string header, line;
    std::getline(index, header);
    FlowHistory h;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        int k;
        double t;
        if (std::sscanf(line.c_str(), "%d,%lf", &k, &t) != 2)
            throw std::runtime_error("load_history: bad index line: " + line);
        FlowState s;
        s.t = t;
        s.ur = read_field_binary_file(snap_path(snapshot_dir, k, "ur"));
        s.utheta = read_field_binary_file(snap_path(snapshot_dir, k, "utheta"));
        s.u3 = read_field_binary_file(snap_path(snapshot_dir, k, "u3"));
        s.pi = read_field_binary_file(snap_path(snapshot_dir, k, "pi"));
        s.gamma = read_field_binary_file(snap_path(snapshot_dir, k, "gamma"));
        h.snapshots.push_back(std::move(s));
    }
    if (h.snapshots.empty())
        throw std::runtime_error("load_history: no snapshots");
    if (h.snapshots.size() > 1)
        h.cadence_dt = h.snapshots[1].t - h.snapshots[0].t;
    return h;
}

int cmd_diagnose(const RunManifest& m, const std::string& out_dir,
                 const std::string& history_dir) {
    fs::create_directories(out_dir);
    bool aborted = false;
    FlowHistory h;
    try {
        h = obtain_history(m, history_dir, aborted);
    } catch (const std::exception& e) {
        std::cerr << "diagnose: " << e.what() << "\n";
        return kExitPrecondition;
    }
    if (aborted) return kExitSolverAbort;

    const double t0 = m.t0 < 0.0 ? h.t_end() : m.t0;
    QuantityParams prm = m.quantity_params();
    std::vector<SweepRow> rows;
    json flags = json::array();
    int h_checked = 0, h_violations = 0;
    double min_a = std::numeric_limits<double>::infinity();
    try {
        for (double x03 : m.sweep_x03)
            for (double R : m.sweep_R) {
                Cylinder c{x03, t0, R};
                c.validate(h);
                CylinderQuantities qn = compute_quantities(h, c, prm);
                rows.push_back({c, qn});
                if (qn.G_alpha > m.G_bound)
                    flags.push_back({{"x03", x03},
                                     {"R", R},
                                     {"kind", "G_alpha_exceeds_bound"},
                                     {"value", qn.G_alpha}});
                double a_omega =
                    qn.A * std::pow(qn.omega, m.beta);
                if (a_omega > m.K)
                    flags.push_back({{"x03", x03},
                                     {"R", R},
                                     {"kind", "A_omega_beta_exceeds_K"},
                                     {"value", a_omega}});

                OscillationRecord rec = oscillation(h, c);
                if (rec.degenerate) continue;
                if (rec.axis_constant_a < 1.0 - 1e-12) ++h_violations;
                min_a = std::min(min_a, rec.axis_constant_a);
                const AxiGrid& g = h.grid();
                Field2D hf = normalized_h(h.snapshots.back().gamma, rec);
                for (int i = 1; i <= g.Nr; ++i) {
                    if (g.r(i) > c.R) break;
                    for (int j = 0; j <= g.Nz; ++j) {
                        double dzc = g.z(j) - c.x03;
                        if (g.r(i) * g.r(i) + dzc * dzc > c.R * c.R) continue;
                        ++h_checked;
                        if (hf(i, j) < -1e-12 || hf(i, j) > 2.0 + 1e-12)
                            ++h_violations;
                    }
                }
            }
    } catch (const std::exception& e) {
        std::cerr << "diagnose: " << e.what() << "\n";
        return kExitPrecondition;
    }

    std::ofstream csv(out_dir + "/sweep.csv");
    write_sweep_csv(rows, csv);
    std::ofstream js(out_dir + "/sweep.json");
    write_sweep_json(rows, prm, js);

    json rep;
    rep["flags"] = flags;
    rep["h_sanity"] = {{"checked", h_checked},
                       {"violations", h_violations},
                       {"min_axis_constant",
                        std::isfinite(min_a) ? min_a : 0.0}};
    std::ofstream(out_dir + "/diagnose.json") << rep.dump(2) << "\n";
    return kExitOk;
}

int cmd_decay_fit(const RunManifest& m, const std::string& out_dir,
                  const std::string& history_dir) {
    fs::create_directories(out_dir);
    bool aborted = false;
    FlowHistory h;
    try {
        h = obtain_history(m, history_dir, aborted);
    } catch (const std::exception& e) {
        std::cerr << "decay-fit: " << e.what() << "\n";
        return kExitPrecondition;
    }
    if (aborted) return kExitSolverAbort;

    const double t0 = m.t0 < 0.0 ? h.t_end() : m.t0;
    DecayParams dp = m.decay_params();

    std::vector<Cylinder> probes;
    for (double x03 : m.sweep_x03)
        for (double R : m.sweep_R)
            if (R <= 0.25) probes.push_back({x03, t0, R});

    json out = json::array();
    try {
        for (std::size_t k = 0; k < m.sweep_x03.size(); ++k) {
            double x03 = m.sweep_x03[k];
            auto ladder =
                decay_ladder(h, x03, t0, m.decay_R0, m.decay_levels, dp);
            char name[64];
            std::snprintf(name, sizeof(name), "/ladder_%zu.csv", k);
            std::ofstream csv(out_dir + name);
            write_ladder_csv(ladder, csv);

            DecayParams fitted = dp;
            bool fit_ok = true;
            try {
                fitted = fit_decay_exponent(ladder, dp.tau);
                fitted.N7 = dp.N7;
                fitted.beta = dp.beta;
            } catch (const std::invalid_argument&) {
                fit_ok = false;
            }
            EnvelopeReport env = decay_envelope_check(h, fitted, probes);
            bool ladder_ok = ladder_consistent(ladder);
            out.push_back({{"x03", x03},
                           {"tau", dp.tau},
                           {"c_fit", fit_ok ? fitted.c_fit : 0.0},
                           {"fit_ok", fit_ok},
                           {"N_calibrated", env.N_calibrated},
                           {"empirical_K", env.empirical_K},
                           {"envelope_pass", env.pass},
                           {"envelope_degenerate", env.degenerate},
                           {"ladder_consistent", ladder_ok}});
        }
    } catch (const std::exception& e) {
        std::cerr << "decay-fit: " << e.what() << "\n";
        return kExitPrecondition;
    }
    std::ofstream(out_dir + "/decay.json") << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify_inequalities(const RunManifest& m, const std::string& out_dir,
                            bool rebaseline) {
    fs::create_directories(out_dir);
    const std::string baseline_path = out_dir + "/baselines.json";

    CorpusReport poincare = run_poincare_corpus(m.seed, m.corpus_count);
    CorpusReport nash = run_nash_corpus(m.seed, m.corpus_count);
    EmbeddingCorpusReport emb = run_embedding_corpus(
        m.seed, std::max(1, std::min(m.corpus_count / 10, 20)));

    {
        std::ofstream js(out_dir + "/poincare.json");
        write_corpus_json(poincare, "weighted-poincare", js);
        std::ofstream csv(out_dir + "/poincare.csv");
        write_corpus_csv(poincare, csv);
        std::ofstream njs(out_dir + "/nash.json");
        write_corpus_json(nash, "nash-log-mean", njs);
        std::ofstream ncsv(out_dir + "/nash.csv");
        write_corpus_csv(nash, ncsv);
        json ej = {{"seed", emb.seed},
                   {"count", emb.count},
                   {"max_N_emp", emb.max_N_emp},
                   {"max_rescale_gap", emb.max_rescale_gap}};
        std::ofstream(out_dir + "/embedding.json") << ej.dump(2) << "\n";
    }

    if (!poincare.failures.empty() || !nash.failures.empty()) {
        std::cerr << "verify-inequalities: hard inequality failures\n";
        return kExitInequality;
    }

    json current = {{"seed", m.seed},
                    {"poincare_max_ratio", poincare.max_ratio},
                    {"nash_max_ratio", nash.max_ratio},
                    {"embedding_max_N_emp", emb.max_N_emp}};
    if (fs::exists(baseline_path) && !rebaseline) {
        json locked;
        std::ifstream(baseline_path) >> locked;
        if (locked.value("seed", std::uint64_t(0)) != m.seed) {
            std::cerr << "verify-inequalities: seed collides with locked "
                         "baseline; pass --rebaseline to replace it\n";
            return kExitPrecondition;
        }
        if (locked != current) {
            std::cerr << "verify-inequalities: results diverge from locked "
                         "baseline\n";
            return kExitInequality;
        }
    } else {
        std::ofstream(baseline_path) << current.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace axilab
