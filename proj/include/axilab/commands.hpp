#pragma once

#include <string>

#include "axilab/manifest.hpp"

namespace axilab {

// process exit codes shared by the CLI
constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitSolverAbort = 3;
constexpr int kExitInequality = 4;

// Runs the scenario; writes snapshots/, run_log.csv and summary.json under
// out_dir.  Returns kExitSolverAbort when the run hit non-finite values.
int cmd_simulate(const RunManifest& m, const std::string& out_dir);

// Loads the snapshot set written by cmd_simulate.
FlowHistory load_history(const std::string& snapshot_dir);

// Quantity sweep + h-field sanity over the manifest's cylinders; writes
// sweep.csv, sweep.json and diagnose.json.  If history_dir is empty the
// scenario is re-run in memory first.
int cmd_diagnose(const RunManifest& m, const std::string& out_dir,
                 const std::string& history_dir = "");

// Dyadic oscillation ladders, decay-exponent fit and envelope check; writes
// ladder_<k>.csv and decay.json.
int cmd_decay_fit(const RunManifest& m, const std::string& out_dir,
                  const std::string& history_dir = "");

// Inequality corpora with baseline locking; writes per-corpus JSON/CSV and
// baselines.json.  Re-running an existing seed compares against the locked
// baseline unless rebaseline is set.
int cmd_verify_inequalities(const RunManifest& m, const std::string& out_dir,
                            bool rebaseline);

}  // namespace axilab
