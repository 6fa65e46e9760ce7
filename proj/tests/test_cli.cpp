#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "axilab/commands.hpp"
#include "axilab/manifest.hpp"

using namespace axilab;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(AXILAB_CLI_PATH) + " " + args +
                      " > /dev/null 2> /dev/null";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kQuickManifest =
    "scenario = rigid-rotation\n"
    "nr = 32\n"
    "nz = 32\n"
    "z_min = -0.5\n"
    "z_max = 0.5\n"
    "duration = 0.07\n"
    "snapshot_every = 5\n"
    "sweep_R = 0.1 0.05\n"
    "decay_R0 = 0.25\n"
    "decay_levels = 2\n"
    "corpus_count = 30\n";

std::string write_manifest(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("manifest: defaults parse and expose coupled parameters") {
    std::istringstream in("scenario = oseen-swirl\n# comment only\n\n");
    RunManifest m = RunManifest::parse(in);
    CHECK(m.scenario.name == "oseen-swirl");
    CHECK(m.p == doctest::Approx(10.0 / 3.0));
    CHECK(3.0 / m.p + 2.0 / m.q == doctest::Approx(2.0 - m.gamma_exp));
    CHECK(m.seed == 0x5EED);
    CHECK(m.quantity_params().beta == doctest::Approx(m.beta));
    CHECK(m.decay_params().tau == doctest::Approx(m.tau));
}

TEST_CASE("manifest: changing gamma re-derives the symmetric p = q pair") {
    std::istringstream in("scenario = oseen-swirl\ngamma = 0.4\n");
    RunManifest m = RunManifest::parse(in);
    CHECK(m.p == doctest::Approx(5.0 / 1.6));
    CHECK(m.q == doctest::Approx(5.0 / 1.6));
}

TEST_CASE("manifest: violated couplings name the relation") {
    auto msg_of = [](const std::string& text) {
        std::istringstream in("scenario = oseen-swirl\n" + text);
        try {
            RunManifest::parse(in);
        } catch (const ManifestError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(msg_of("p = 3\n").find("3/p + 2/q = 2 - gamma") !=
          std::string::npos);
    CHECK(msg_of("alpha = 0.1\n").find("alpha < gamma/(48 + 16 gamma)") !=
          std::string::npos);
    CHECK(msg_of("beta = 0.5\n").find("beta in (0, 1/8)") !=
          std::string::npos);
    CHECK(msg_of("tau = 1.5\n").find("tau in (0, 1)") != std::string::npos);
    CHECK(msg_of("gamma = 1.25\n").find("gamma") != std::string::npos);
    CHECK(msg_of("frobnicate = 1\n").find("unknown key") != std::string::npos);
    CHECK(msg_of("nr = 2\n").find("grid too small") != std::string::npos);
}

TEST_CASE("manifest: malformed input is rejected") {
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(RunManifest::parse(in), ManifestError);
    };
    bad("scenario\n");
    bad("nr = twelve\n");
    bad("sweep_R = 0.1 oops\n");
    bad(" = 3\n");
}

TEST_CASE("cli: simulate writes artifacts and reports steady drift") {
    std::string mf = write_manifest("axicli_quick.manifest", kQuickManifest);
    fs::path out = fs::temp_directory_path() / "axicli_sim";
    fs::remove_all(out);
    CHECK(run_cli("simulate --manifest " + mf + " --out " + out.string()) ==
          kExitOk);
    CHECK(fs::exists(out / "run_log.csv"));
    CHECK(fs::exists(out / "snapshots" / "index.csv"));
    std::string summary = slurp((out / "summary.json").string());
    CHECK(summary.find("\"drift\"") != std::string::npos);
    CHECK(summary.find("\"aborted\": false") != std::string::npos);
}

TEST_CASE("cli: diagnose and decay-fit consume a saved history") {
    std::string mf = write_manifest("axicli_quick.manifest", kQuickManifest);
    fs::path sim = fs::temp_directory_path() / "axicli_sim2";
    fs::path dg = fs::temp_directory_path() / "axicli_dg";
    fs::path df = fs::temp_directory_path() / "axicli_df";
    fs::remove_all(sim);
    fs::remove_all(dg);
    fs::remove_all(df);
    REQUIRE(run_cli("simulate --manifest " + mf + " --out " + sim.string()) ==
            kExitOk);
    std::string hist = " --history " + (sim / "snapshots").string();
    CHECK(run_cli("diagnose --manifest " + mf + " --out " + dg.string() +
                  hist) == kExitOk);
    CHECK(fs::exists(dg / "sweep.csv"));
    CHECK(fs::exists(dg / "sweep.json"));
    CHECK(slurp((dg / "diagnose.json").string()).find("h_sanity") !=
          std::string::npos);
    CHECK(run_cli("decay-fit --manifest " + mf + " --out " + df.string() +
                  hist) == kExitOk);
    CHECK(fs::exists(df / "ladder_0.csv"));
    CHECK(fs::exists(df / "decay.json"));
}

TEST_CASE("cli: invalid manifests and unusable windows exit with code 2") {
    std::string bad =
        write_manifest("axicli_bad.manifest",
                       std::string(kQuickManifest) + "beta = 0.5\n");
    CHECK(run_cli("simulate --manifest " + bad + " --out /tmp/axicli_nope") ==
          kExitPrecondition);
    CHECK(run_cli("simulate --manifest /nonexistent.manifest --out "
                  "/tmp/axicli_nope") == kExitPrecondition);
    // sweep radius whose time slab exceeds the simulated window
    std::string wide =
        write_manifest("axicli_wide.manifest",
                       std::string(kQuickManifest) + "sweep_R = 0.5\n");
    fs::path out = fs::temp_directory_path() / "axicli_wide";
    fs::remove_all(out);
    CHECK(run_cli("diagnose --manifest " + wide + " --out " + out.string()) ==
          kExitPrecondition);
}

TEST_CASE("cli: verify-inequalities locks and enforces its baseline") {
    std::string mf = write_manifest("axicli_quick.manifest", kQuickManifest);
    fs::path out = fs::temp_directory_path() / "axicli_vi";
    fs::remove_all(out);
    CHECK(run_cli("verify-inequalities --manifest " + mf + " --out " +
                  out.string()) == kExitOk);
    CHECK(fs::exists(out / "baselines.json"));
    // same seed re-validates against the locked values
    CHECK(run_cli("verify-inequalities --manifest " + mf + " --out " +
                  out.string()) == kExitOk);
    // different seed collides unless explicitly re-baselined
    CHECK(run_cli("verify-inequalities --manifest " + mf +
                  " --seed 0x9 --out " + out.string()) == kExitPrecondition);
    CHECK(run_cli("verify-inequalities --manifest " + mf +
                  " --seed 0x9 --rebaseline --out " + out.string()) ==
          kExitOk);
}

TEST_CASE("cli: identical manifest and seed give byte-identical outputs") {
    std::string mf = write_manifest("axicli_quick.manifest", kQuickManifest);
    fs::path a = fs::temp_directory_path() / "axicli_det_a";
    fs::path b = fs::temp_directory_path() / "axicli_det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run_cli("simulate --manifest " + mf + " --out " + a.string()) ==
            kExitOk);
    REQUIRE(run_cli("simulate --manifest " + mf + " --out " + b.string()) ==
            kExitOk);
    CHECK(slurp((a / "run_log.csv").string()) ==
          slurp((b / "run_log.csv").string()));
    CHECK(slurp((a / "summary.json").string()) ==
          slurp((b / "summary.json").string()));
    CHECK(slurp((a / "snapshots" / "snap_0001_utheta.bin").string()) ==
          slurp((b / "snapshots" / "snap_0001_utheta.bin").string()));

    fs::path va = fs::temp_directory_path() / "axicli_det_va";
    fs::path vb = fs::temp_directory_path() / "axicli_det_vb";
    fs::remove_all(va);
    fs::remove_all(vb);
    REQUIRE(run_cli("verify-inequalities --manifest " + mf + " --out " +
                    va.string()) == kExitOk);
    REQUIRE(run_cli("verify-inequalities --manifest " + mf + " --out " +
                    vb.string()) == kExitOk);
    for (const char* f :
         {"poincare.csv", "poincare.json", "nash.csv", "embedding.json"})
        CHECK(slurp((va / f).string()) == slurp((vb / f).string()));
}

TEST_CASE("cli: load_history round-trips the snapshot set") {
    std::string mf = write_manifest("axicli_quick.manifest", kQuickManifest);
    fs::path sim = fs::temp_directory_path() / "axicli_rt";
    fs::remove_all(sim);
    REQUIRE(run_cli("simulate --manifest " + mf + " --out " + sim.string()) ==
            kExitOk);
    FlowHistory h = load_history((sim / "snapshots").string());
    CHECK(h.snapshots.size() > 2);
    CHECK(h.cadence_dt > 0.0);
    CHECK(h.t_end() > h.t_begin());
    for (const auto& s : h.snapshots) CHECK(s.all_finite());
    CHECK_THROWS(load_history("/nonexistent/snapshots"));
}
