#include "axilab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace axilab {

namespace {

constexpr double kTol = 1e-6;
constexpr double kAbsSlack = 1e-12;
constexpr double kProbeFloor = 1e-8;

// tensor-product midpoint rule over the bounding cube with ball masking
template <class Fn>
double ball_quad(double R, int n, Fn&& fn) {
    const double h = 2.0 * R / n;
    const double w = h * h * h;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = -R + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            double y = -R + (j + 0.5) * h;
            double xy2 = x * x + y * y;
            if (xy2 > R * R) continue;
            for (int k = 0; k < n; ++k) {
                double z = -R + (k + 0.5) * h;
                if (xy2 + z * z > R * R) continue;
                total += fn(x, y, z);
            }
        }
    }
    return total * w;
}

double smoothstep_down(double s) { return 1.0 - s * s * (3.0 - 2.0 * s); }

double raw_profile(WeightKind kind, double rho) {
    switch (kind) {
        case WeightKind::Uniform:
            return rho <= 1.0 ? 1.0 : 0.0;
        case WeightKind::Smoothstep:
            if (rho <= 0.5) return 1.0;
            if (rho >= 1.0) return 0.0;
            return smoothstep_down(2.0 * rho - 1.0);
        case WeightKind::Gaussian:
            return rho <= 1.0 ? std::exp(-rho * rho / 0.64) : 0.0;
    }
    return 0.0;
}

// 4 pi Int_0^1 phi(rho) rho^2 d rho by composite trapezoid
double profile_mass(WeightKind kind) {
    const int n = 8192;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        double rho = double(k) / n;
        double w = (k == 0 || k == n) ? 0.5 : 1.0;
        acc += w * raw_profile(kind, rho) * rho * rho;
    }
    return 4.0 * M_PI * acc / n;
}

double normalized_mass(WeightKind kind) {
    static const double masses[3] = {profile_mass(WeightKind::Uniform),
                                     profile_mass(WeightKind::Smoothstep),
                                     profile_mass(WeightKind::Gaussian)};
    return masses[static_cast<int>(kind)];
}

}  // namespace

double WeightProbe::profile(double rho) const {
    return scale * raw_profile(kind, rho) / normalized_mass(kind);
}

void WeightProbe::validate() const {
    if (profile(0.0) > 1.0 + kTol || profile(0.0) < 0.0)
        throw std::invalid_argument("weight: profile outside [0, 1]");
    double prev = profile(0.0);
    double mass_acc = 0.0;
    const int n = 2048;
    for (int k = 0; k <= n; ++k) {
        double rho = double(k) / n;
        double v = profile(rho);
        if (v > prev + 1e-12)
            throw std::invalid_argument("weight: profile not non-increasing");
        prev = v;
        double w = (k == 0 || k == n) ? 0.5 : 1.0;
        mass_acc += w * v * rho * rho;
    }
    double mass = 4.0 * M_PI * mass_acc / n;
    if (std::abs(mass - 1.0) > 1e-4)
        throw std::invalid_argument("weight: not normalized on B(1)");
    if (C1 < 1.0 || C2 < 1.0)
        throw std::invalid_argument("weight: relaxed constants below 1");
}

// ---- probes ---------------------------------------------------------------

double ProbeFunction::value(double x, double y, double z) const {
    double v = shift + lin[0] * x + lin[1] * y + lin[2] * z;
    for (const auto& b : bumps) {
        double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz;
        v += b.amp * std::exp(-(dx * dx + dy * dy + dz * dz) / (b.w * b.w));
    }
    return floor_val > 0.0 ? std::max(v, floor_val) : v;
}

std::array<double, 3> ProbeFunction::grad(double x, double y, double z) const {
    std::array<double, 3> g = lin;
    for (const auto& b : bumps) {
        double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz;
        double e = b.amp *
                   std::exp(-(dx * dx + dy * dy + dz * dz) / (b.w * b.w)) *
                   (-2.0 / (b.w * b.w));
        g[0] += e * dx;
        g[1] += e * dy;
        g[2] += e * dz;
    }
    return g;
}

ProbeFunction ProbeFunction::random(std::mt19937_64& rng, double R) {
    std::uniform_int_distribution<int> nb(1, 5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(R / 8.0, R / 2.0);
    ProbeFunction f;
    int n = nb(rng);
    for (int k = 0; k < n; ++k) {
        GaussianBump b;
        // rejection-sample a center in B(R/2)
        do {
            b.cx = 0.5 * R * unit(rng);
            b.cy = 0.5 * R * unit(rng);
            b.cz = 0.5 * R * unit(rng);
        } while (b.cx * b.cx + b.cy * b.cy + b.cz * b.cz > 0.25 * R * R);
        b.w = wdist(rng);
        b.amp = unit(rng);
        f.bumps.push_back(b);
    }
    return f;
}

ProbeFunction ProbeFunction::random_positive(std::mt19937_64& rng, double R) {
    ProbeFunction f = random(rng, R);
    double asum = 0.0;
    for (const auto& b : f.bumps) asum += std::abs(b.amp);
    std::uniform_real_distribution<double> mdist(1.0, 10.0);
    double M = mdist(rng);
    // shift M/2, oscillation at most 3M/8: keeps f within [M/8, 7M/8]
    double scale = 0.375 * M / std::max(asum, 1e-12);
    for (auto& b : f.bumps) b.amp *= scale;
    f.shift = 0.5 * M;
    f.M = M;
    f.floor_val = kProbeFloor;
    return f;
}

double SpaceTimeProbe::value(double x, double y, double z, double t) const {
    double v = 0.0;
    for (const auto& b : bumps) {
        double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz, dt = t - b.ct;
        v += b.amp * std::exp(-(dx * dx + dy * dy + dz * dz) / (b.w * b.w) -
                              dt * dt / (b.wt * b.wt));
    }
    return v;
}

std::array<double, 3> SpaceTimeProbe::grad_x(double x, double y, double z,
                                             double t) const {
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (const auto& b : bumps) {
        double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz, dt = t - b.ct;
        double e = b.amp *
                   std::exp(-(dx * dx + dy * dy + dz * dz) / (b.w * b.w) -
                            dt * dt / (b.wt * b.wt)) *
                   (-2.0 / (b.w * b.w));
        g[0] += e * dx;
        g[1] += e * dy;
        g[2] += e * dz;
    }
    return g;
}

SpaceTimeProbe SpaceTimeProbe::random(std::mt19937_64& rng, double R) {
    std::uniform_int_distribution<int> nb(1, 5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(R / 8.0, R / 2.0);
    std::uniform_real_distribution<double> tdist(-R * R, 0.0);
    std::uniform_real_distribution<double> wtdist(R * R / 8.0, R * R / 2.0);
    SpaceTimeProbe f;
    int n = nb(rng);
    for (int k = 0; k < n; ++k) {
        SpaceTimeBump b{};
        do {
            b.cx = 0.5 * R * unit(rng);
            b.cy = 0.5 * R * unit(rng);
            b.cz = 0.5 * R * unit(rng);
        } while (b.cx * b.cx + b.cy * b.cy + b.cz * b.cz > 0.25 * R * R);
        b.ct = tdist(rng);
        b.w = wdist(rng);
        b.wt = wtdist(rng);
        b.amp = unit(rng);
        f.bumps.push_back(b);
    }
    return f;
}

SpaceTimeProbe SpaceTimeProbe::rescaled(double lambda) const {
    SpaceTimeProbe out = *this;
    for (auto& b : out.bumps) {
        b.cx /= lambda;
        b.cy /= lambda;
        b.cz /= lambda;
        b.ct /= lambda * lambda;
        b.w /= lambda;
        b.wt /= lambda * lambda;
    }
    return out;
}

// ---- inequality checks ----------------------------------------------------

IneqResult check_weighted_poincare(const ProbeFunction& f,
                                   const WeightProbe& w, double R, double p) {
    if (p < 1.0 || !std::isfinite(p))
        throw std::invalid_argument("poincare: need 1 <= p < inf");
    w.validate();
    const int n = 64;
    auto lam = [&](double x, double y, double z) {
        double rho = std::sqrt(x * x + y * y + z * z) / R;
        return w.profile(rho) / (R * R * R);
    };
    double mass = ball_quad(R, n, lam);
    double mean = ball_quad(R, n, [&](double x, double y, double z) {
                      return f.value(x, y, z) * lam(x, y, z);
                  }) /
                  mass;
    IneqResult res;
    res.lhs = ball_quad(R, n, [&](double x, double y, double z) {
        return std::pow(std::abs(f.value(x, y, z) - mean), p) * lam(x, y, z);
    });
    double gint = ball_quad(R, n, [&](double x, double y, double z) {
        auto g = f.grad(x, y, z);
        double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        return std::pow(gn, p) * lam(x, y, z);
    });
    res.rhs = std::pow(2.0, p + 6.0) * std::pow(R, p) * gint * w.C1 * w.C2;
    res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
    res.pass = res.lhs <= res.rhs * (1.0 + kTol) + kAbsSlack;
    return res;
}

IneqResult nash_statistic(const std::vector<double>& values,
                          const std::vector<double>& weights, double M) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("nash: mismatched or empty samples");
    if (M < 1.0) throw std::invalid_argument("nash: need M >= 1");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    IneqResult res;
    double mean_f = 0.0, mean_ln = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double v = values[k];
        if (v <= 0.0) throw std::invalid_argument("nash: f touches zero");
        if (v > M * (1.0 + 1e-9))
            throw std::invalid_argument("nash: f exceeds its bound M");
        mean_f += weights[k] / wsum * v;
        mean_ln += weights[k] / wsum * std::log(v);
    }
    double var = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double g = std::log(values[k]) - mean_ln;
        var += weights[k] / wsum * g * g;
    }
    res.lhs = std::abs(std::log(mean_f) - mean_ln);
    res.rhs = M * std::sqrt(var) / mean_f;
    res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
    bool jensen = std::log(mean_f) >= mean_ln - kAbsSlack;
    res.pass = jensen && res.lhs <= res.rhs * (1.0 + kTol) + kAbsSlack;
    return res;
}

IneqResult check_nash(const ProbeFunction& f, double R, double M) {
    const int n = 64;
    const double h = 2.0 * R / n;
    std::vector<double> values, weights;
    bool floored = false;
    for (int i = 0; i < n; ++i) {
        double x = -R + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            double y = -R + (j + 0.5) * h;
            for (int k = 0; k < n; ++k) {
                double z = -R + (k + 0.5) * h;
                double rho2 = (x * x + y * y + z * z) / (R * R);
                if (rho2 > 1.0) continue;
                double kv = raw_profile(WeightKind::Smoothstep, std::sqrt(rho2));
                if (kv == 0.0) continue;
                double v = f.value(x, y, z);
                if (v < kProbeFloor) {
                    v = kProbeFloor;
                    floored = true;
                }
                values.push_back(v);
                weights.push_back(kv * kv);
            }
        }
    }
    IneqResult res = nash_statistic(values, weights, M);
    res.flagged = floored;
    return res;
}

EmbeddingReport check_embedding(const SpaceTimeProbe& f, double R, double p,
                                double q) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    if (p < 2.0 || p > 6.0)
        throw std::invalid_argument("embedding: need 2 <= p <= 6");
    if (std::abs(3.0 * inv_p + 2.0 * inv_q - 1.5) > 1e-9)
        throw std::invalid_argument(
            "embedding: exponents violate 3/p + 2/q = 3/2");

    const int n = 32, nt = 24;
    const double dt = R * R / nt;
    double lq_acc = 0.0, lq_max = 0.0;
    double sup_l2 = 0.0, grad_acc = 0.0;
    for (int m = 0; m < nt; ++m) {
        double t = -R * R + (m + 0.5) * dt;
        double lp = ball_quad(R, n, [&](double x, double y, double z) {
            return std::pow(std::abs(f.value(x, y, z, t)), p);
        });
        double sp = std::pow(lp, inv_p);
        if (std::isinf(q))
            lq_max = std::max(lq_max, sp);
        else
            lq_acc += std::pow(sp, q) * dt;
        double l2 = ball_quad(R, n, [&](double x, double y, double z) {
            double v = f.value(x, y, z, t);
            return v * v;
        });
        sup_l2 = std::max(sup_l2, std::sqrt(l2));
        grad_acc += dt * ball_quad(R, n, [&](double x, double y, double z) {
            auto g = f.grad_x(x, y, z, t);
            return g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        });
    }
    EmbeddingReport rep;
    rep.lhs = std::isinf(q) ? lq_max : std::pow(lq_acc, inv_q);
    rep.bracket = sup_l2 + std::sqrt(grad_acc);
    if (rep.bracket <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    rep.N_emp = rep.lhs / rep.bracket;
    return rep;
}

// ---- solver-data estimates ------------------------------------------------

RatioReport verify_local_energy(const FlowHistory& h, const Cylinder& c) {
    Cylinder twice{c.x03, c.t0, 2.0 * c.R};
    twice.validate(h);
    RatioReport rep;
    rep.lhs = quantity_A(h, c) + quantity_E(h, c);
    rep.rhs = 1.0 + quantity_C(h, twice) + quantity_D(h, twice);
    rep.ratio = rep.lhs / rep.rhs;
    rep.degenerate = rep.lhs == 0.0;
    return rep;
}

RatioReport verify_C_interpolation(const FlowHistory& h, double x03, double t0,
                                   double rho, double R,
                                   const QuantityParams& prm) {
    if (!(rho > 0.0 && rho <= R))
        throw std::invalid_argument("C-interpolation: need 0 < rho <= R");
    Cylinder small{x03, t0, rho}, big{x03, t0, R};
    big.validate(h);
    RatioReport rep;
    rep.lhs = quantity_C(h, small);
    double scriptE = quantity_A(h, big) + quantity_E(h, big) +
                     quantity_D(h, big);
    double G = quantity_G(h, big, prm.p, prm.q, prm.gamma_exp);
    rep.rhs = (R / rho) * (R / rho) *
              std::pow(scriptE, 1.0 - prm.gamma_exp / 6.0) *
              std::pow(G, 1.0 + prm.gamma_exp / 3.0);
    rep.degenerate = rep.rhs == 0.0;
    rep.ratio = rep.degenerate ? 0.0 : rep.lhs / rep.rhs;
    return rep;
}

RatioReport verify_pressure_decay(const FlowHistory& h, double x03, double t0,
                                  double rho, double R) {
    if (!(rho > 0.0 && 2.0 * rho <= R))
        throw std::invalid_argument("pressure decay: need 0 < 2 rho <= R");
    Cylinder small{x03, t0, rho}, big{x03, t0, R};
    big.validate(h);
    RatioReport rep;
    rep.lhs = quantity_D(h, small);
    rep.rhs = (rho / R) * quantity_D(h, big) +
              (R / rho) * (R / rho) * quantity_C(h, big);
    rep.degenerate = rep.rhs == 0.0;
    rep.ratio = rep.degenerate ? 0.0 : rep.lhs / rep.rhs;
    return rep;
}

double coupling_alpha(double gamma_exp, double beta) {
    return gamma_exp * beta / (6.0 + 2.0 * gamma_exp);
}

EpsilonLadderReport epsilon_ladder(const FlowHistory& h, double x03, double t0,
                                   double R0, int levels,
                                   const QuantityParams& prm, double G_bound) {
    if (!(prm.beta > 0.0 && prm.beta < 0.125))
        throw std::invalid_argument("epsilon_ladder: beta outside (0, 1/8)");
    if (std::abs(prm.alpha - coupling_alpha(prm.gamma_exp, prm.beta)) > 1e-9)
        throw std::invalid_argument(
            "epsilon_ladder: alpha != gamma beta/(6+2 gamma)");
    const AxiGrid& g = h.grid();
    EpsilonLadderReport rep;
    rep.G_bound = G_bound;
    rep.condition_met = true;
    for (int j = 0; j < levels; ++j) {
        double R = R0 * std::pow(2.0, -j);
        if (R < 2.0 * std::max(g.dr, g.dz))
            throw std::domain_error("epsilon_ladder: ladder exhausts resolution");
        Cylinder c{x03, t0, R};
        EpsilonLevel lv;
        lv.R = R;
        lv.omega = 1.0 / std::log(std::log(100.0 / R));
        lv.script_E = quantity_A(h, c) + quantity_E(h, c) + quantity_D(h, c);
        lv.E_beta = lv.script_E * std::pow(lv.omega, prm.beta);
        lv.G = quantity_G(h, c, prm.p, prm.q, prm.gamma_exp);
        lv.G_alpha = lv.G * std::pow(lv.omega, prm.alpha);
        if (lv.G_alpha > G_bound) rep.condition_met = false;
        rep.max_E_beta = std::max(rep.max_E_beta, lv.E_beta);
        rep.levels.push_back(lv);
    }
    // no-blow-up heuristic: the weighted energy may not grow past twice its
    // coarsest-level value (plus an absolute floor for tiny data)
    rep.bounded =
        rep.max_E_beta <= std::max(1.0, 2.0 * rep.levels.front().E_beta);
    return rep;
}

// ---- corpora --------------------------------------------------------------

CorpusReport run_poincare_corpus(std::uint64_t seed, int count, bool relaxed) {
    std::mt19937_64 rng(seed);
    const double radii[3] = {0.25, 0.5, 1.0};
    const double ps[4] = {1.0, 2.0, 3.0, 4.0};
    std::uniform_int_distribution<int> rpick(0, 2), ppick(0, 3), wpick(0, 2);
    std::uniform_real_distribution<double> cdist(1.0, 2.0);
    CorpusReport rep;
    rep.seed = seed;
    rep.count = count;
    for (int k = 0; k < count; ++k) {
        double R = radii[rpick(rng)];
        double p = ps[ppick(rng)];
        WeightProbe w;
        w.kind = static_cast<WeightKind>(wpick(rng));
        if (relaxed) {
            w.C1 = cdist(rng);
            w.C2 = cdist(rng);
        }
        ProbeFunction f = ProbeFunction::random(rng, R);
        IneqResult r = check_weighted_poincare(f, w, R, p);
        if (!r.pass) rep.failures.push_back(k);
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
        rep.probes.push_back(r);
    }
    return rep;
}

CorpusReport run_nash_corpus(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    const double radii[3] = {0.25, 0.5, 1.0};
    std::uniform_int_distribution<int> rpick(0, 2);
    CorpusReport rep;
    rep.seed = seed;
    rep.count = count;
    for (int k = 0; k < count; ++k) {
        double R = radii[rpick(rng)];
        ProbeFunction f = ProbeFunction::random_positive(rng, R);
        IneqResult r = check_nash(f, R, f.M);
        if (!r.pass) rep.failures.push_back(k);
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
        rep.probes.push_back(r);
    }
    return rep;
}

EmbeddingCorpusReport run_embedding_corpus(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    const double ps[4] = {2.0, 3.0, 4.0, 6.0};
    std::uniform_int_distribution<int> ppick(0, 3);
    EmbeddingCorpusReport rep;
    rep.seed = seed;
    rep.count = count;
    for (int k = 0; k < count; ++k) {
        double p = ps[ppick(rng)];
        double q = p == 2.0 ? std::numeric_limits<double>::infinity()
                            : 2.0 / (1.5 - 3.0 / p);
        double R = 1.0;
        SpaceTimeProbe f = SpaceTimeProbe::random(rng, R);
        EmbeddingReport a = check_embedding(f, R, p, q);
        EmbeddingReport b = check_embedding(f.rescaled(2.0), R / 2.0, p, q);
        rep.probes.push_back(a);
        if (!a.degenerate) {
            rep.max_N_emp = std::max(rep.max_N_emp, a.N_emp);
            rep.max_rescale_gap =
                std::max(rep.max_rescale_gap,
                         std::abs(a.N_emp - b.N_emp) / a.N_emp);
        }
    }
    return rep;
}

void write_corpus_json(const CorpusReport& rep, const std::string& name,
                       std::ostream& out) {
    nlohmann::json j;
    j["name"] = name;
    j["seed"] = rep.seed;
    j["count"] = rep.count;
    j["max_ratio"] = rep.max_ratio;
    j["tolerance"] = rep.tolerance;
    j["failures"] = rep.failures;
    out << j.dump(2) << "\n";
}

void write_corpus_csv(const CorpusReport& rep, std::ostream& out) {
    out << "probe,lhs,rhs,ratio,pass,flagged\n";
    char buf[192];
    for (std::size_t k = 0; k < rep.probes.size(); ++k) {
        const auto& r = rep.probes[k];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d,%d\n", k,
                      r.lhs, r.rhs, r.ratio, r.pass ? 1 : 0, r.flagged ? 1 : 0);
        out << buf;
    }
}

}  // namespace axilab
