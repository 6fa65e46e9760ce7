#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "axilab/quadrature.hpp"

namespace axilab {

constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct GaussianBump {
    double cx = 0.0, cy = 0.0, cz = 0.0;
    double w = 1.0;
    double amp = 0.0;
};

// Sum of Gaussian bumps plus an affine part, with analytic gradients.
struct ProbeFunction {
    std::vector<GaussianBump> bumps;
    std::array<double, 3> lin{0.0, 0.0, 0.0};
    double shift = 0.0;
    double floor_val = 0.0;  // positive probes are floored here (flagged)
    double M = 0.0;          // upper bound when positivity-constrained

    double value(double x, double y, double z) const;
    std::array<double, 3> grad(double x, double y, double z) const;

    // centers in B(R/2), widths in [R/8, R/2], amplitudes in [-1, 1]
    static ProbeFunction random(std::mt19937_64& rng, double R);
    // shifted so 0 < f <= M with M in [1, 10]
    static ProbeFunction random_positive(std::mt19937_64& rng, double R);
};

// Space-time bump corpus for the mixed-norm embedding on Q(R).
struct SpaceTimeBump {
    double cx, cy, cz, ct;
    double w, wt;
    double amp;
};
struct SpaceTimeProbe {
    std::vector<SpaceTimeBump> bumps;
    double value(double x, double y, double z, double t) const;
    std::array<double, 3> grad_x(double x, double y, double z, double t) const;
    static SpaceTimeProbe random(std::mt19937_64& rng, double R);
    SpaceTimeProbe rescaled(double lambda) const;  // f(lambda x, lambda^2 t)
};

enum class WeightKind { Uniform, Smoothstep, Gaussian };

// Radial weight Lambda(|x|): non-increasing, 0 <= Lambda <= 1, unit mass on
// B(1); Lambda_R(x) = R^-3 Lambda(x/R).
struct WeightProbe {
    WeightKind kind = WeightKind::Uniform;
    double scale = 1.0;  // != 1 breaks normalization (validation test hook)
    double C1 = 1.0, C2 = 1.0;  // relaxed-admissibility constants

    double profile(double rho) const;  // normalized Lambda on B(1)
    void validate() const;             // throws on non-admissible weights
};

struct IneqResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // lhs/rhs, 0 when rhs = 0
    bool pass = false;
    bool flagged = false;  // probe floored / degenerate
};

IneqResult check_weighted_poincare(const ProbeFunction& f,
                                   const WeightProbe& w, double R, double p);

// Nash-type log-mean bound over discrete weights; exposed so closed-form
// measures can exercise the same arithmetic as the quadrature path.
IneqResult nash_statistic(const std::vector<double>& values,
                          const std::vector<double>& weights, double M);

IneqResult check_nash(const ProbeFunction& f, double R, double M);

struct EmbeddingReport {
    double lhs = 0.0;
    double bracket = 0.0;
    double N_emp = 0.0;
    bool degenerate = false;
};
EmbeddingReport check_embedding(const SpaceTimeProbe& f, double R, double p,
                                double q);

struct RatioReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool degenerate = false;
};

// (A+E)(rho) against 1 + C(2 rho) + D(2 rho), same center.
RatioReport verify_local_energy(const FlowHistory& h, const Cylinder& c);

// C(rho) against (R/rho)^2 script_E(R)^{1-gamma/6} G(R)^{1+gamma/3}.
RatioReport verify_C_interpolation(const FlowHistory& h, double x03, double t0,
                                   double rho, double R,
                                   const QuantityParams& prm);

// D(rho) against (rho/R) D(R) + (R/rho)^2 C(R).
RatioReport verify_pressure_decay(const FlowHistory& h, double x03, double t0,
                                  double rho, double R);

double coupling_alpha(double gamma_exp, double beta);  // gamma beta/(6+2gamma)

struct EpsilonLevel {
    double R = 0.0;
    double omega = 0.0;
    double script_E = 0.0;
    double E_beta = 0.0;  // script_E * omega^beta
    double G = 0.0;
    double G_alpha = 0.0;
};
struct EpsilonLadderReport {
    std::vector<EpsilonLevel> levels;
    double max_E_beta = 0.0;
    double G_bound = 0.0;
    bool condition_met = false;  // every level kept G_alpha <= G_bound
    bool bounded = false;        // no blow-up of E_beta down the ladder
};

// Dyadic R-ladder (halving) of script_E omega^beta and G omega^alpha;
// requires the configured alpha to equal the beta coupling.
EpsilonLadderReport epsilon_ladder(const FlowHistory& h, double x03, double t0,
                                   double R0, int levels,
                                   const QuantityParams& prm, double G_bound);

struct CorpusReport {
    std::uint64_t seed = 0;
    int count = 0;
    double max_ratio = 0.0;
    double tolerance = 1e-6;
    std::vector<int> failures;  // indices; must stay empty
    std::vector<IneqResult> probes;
};

CorpusReport run_poincare_corpus(std::uint64_t seed, int count,
                                 bool relaxed = false);
CorpusReport run_nash_corpus(std::uint64_t seed, int count);

struct EmbeddingCorpusReport {
    std::uint64_t seed = 0;
    int count = 0;
    double max_N_emp = 0.0;
    double max_rescale_gap = 0.0;  // relative N_emp change under lambda = 2
    std::vector<EmbeddingReport> probes;
};
EmbeddingCorpusReport run_embedding_corpus(std::uint64_t seed, int count);

void write_corpus_json(const CorpusReport& rep, const std::string& name,
                       std::ostream& out);
void write_corpus_csv(const CorpusReport& rep, std::ostream& out);

}  // namespace axilab
