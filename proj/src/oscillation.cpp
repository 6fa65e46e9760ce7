#include "axilab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace axilab {

namespace {

constexpr double kTimeEps = 1e-12;
constexpr double kDegenerateJ = 1e-12;

std::vector<int> window_snapshots(const FlowHistory& h, double ta, double tb) {
    std::vector<int> idx;
    for (int k = 0; k < static_cast<int>(h.snapshots.size()); ++k) {
        double t = h.snapshots[k].t;
        if (t >= ta - kTimeEps && t <= tb + kTimeEps) idx.push_back(k);
    }
    if (idx.empty())
        throw std::domain_error("no snapshots inside the requested time slab");
    return idx;
}

double window_time_integral(const std::vector<double>& t,
                            const std::vector<double>& v, double ta,
                            double tb) {
    double total = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k)
        total += 0.5 * (v[k] + v[k - 1]) * (t[k] - t[k - 1]);
    total += std::max(0.0, t.front() - ta) * v.front();
    total += std::max(0.0, tb - t.back()) * v.back();
    return total;
}

bool in_ball(const AxiGrid& g, int i, int j, const Cylinder& c) {
    double dzc = g.z(j) - c.x03;
    return g.r(i) * g.r(i) + dzc * dzc <= c.R * c.R + kTimeEps;
}

double lambda_of(double R, const DecayParams& dp) {
    return dp.N7 * std::pow(std::log(100.0 / R), dp.tau - 1.0);
}

// cut-off profile: 1 on [0,1/2], descending smoothstep to 0 at 1
double kappa(double rho) {
    if (rho <= 0.5) return 1.0;
    if (rho >= 1.0) return 0.0;
    double s = 2.0 * rho - 1.0;
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

// 4 pi Int_0^1 kappa^2 rho^2 d rho, the L^2(B(1)) mass of the profile
double kappa_l2_mass() {
    static const double mass = [] {
        const int n = 4096;
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            double rho = double(k) / n;
            double w = (k == 0 || k == n) ? 0.5 : 1.0;
            double kv = kappa(rho);
            acc += w * kv * kv * rho * rho;
        }
        return 4.0 * M_PI * acc / n;
    }();
    return mass;
}

}  // namespace

OscillationRecord oscillation(const FlowHistory& h, const Cylinder& c) {
    c.validate(h);
    const AxiGrid& g = h.grid();
    auto idx = window_snapshots(h, c.t0 - c.R * c.R, c.t0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    bool any = false;
    for (int k : idx) {
        const Field2D& gam = h.snapshots[k].gamma;
        for (int i = 1; i <= g.Nr; ++i) {
            if (g.r(i) > c.R) break;
            for (int j = 0; j <= g.Nz; ++j) {
                if (!in_ball(g, i, j, c)) continue;
                any = true;
                lo = std::min(lo, gam(i, j));
                hi = std::max(hi, gam(i, j));
            }
        }
    }
    if (!any)
        throw std::domain_error(
            "oscillation: cylinder below grid resolution (no off-axis nodes)");
    OscillationRecord rec;
    rec.R = c.R;
    rec.m_R = lo;
    rec.M_R = hi;
    rec.J_R = hi - lo;
    rec.degenerate = rec.J_R <= 0.0;
    rec.axis_constant_a =
        rec.degenerate ? 0.0 : 2.0 * std::max(hi, -lo) / rec.J_R;
    return rec;
}

Field2D normalized_h(const Field2D& gamma, const OscillationRecord& rec) {
    if (rec.J_R <= 0.0)
        throw std::invalid_argument("normalized_h: degenerate record (J = 0)");
    const AxiGrid& g = gamma.grid();
    Field2D h(g, Parity::Even);
    const bool upper = rec.M_R > -rec.m_R;
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j) {
            if (i == 0) {
                h(0, j) = rec.axis_constant_a;
            } else if (upper) {
                h(i, j) = 2.0 * (rec.M_R - gamma(i, j)) / rec.J_R;
            } else {
                h(i, j) = 2.0 * (gamma(i, j) - rec.m_R) / rec.J_R;
            }
        }
    return h;
}

LocalMaxReport verify_local_max(const FlowHistory& h, const Cylinder& c) {
    Cylinder half{c.x03, c.t0, 0.5 * c.R};
    half.validate(h);
    c.validate(h);
    const AxiGrid& g = h.grid();

    LocalMaxReport rep;
    rep.A = quantity_A(h, c);

    for (int k : window_snapshots(h, c.t0 - half.R * half.R, c.t0)) {
        const Field2D& gam = h.snapshots[k].gamma;
        for (int i = 1; i <= g.Nr; ++i)
            for (int j = 0; j <= g.Nz; ++j)
                if (in_ball(g, i, j, half))
                    rep.sup_half = std::max(rep.sup_half, std::abs(gam(i, j)));
    }

    auto idx = window_snapshots(h, c.t0 - c.R * c.R, c.t0);
    std::vector<double> t, v;
    for (int k : idx) {
        t.push_back(h.snapshots[k].t);
        v.push_back(ball_integral(h.snapshots[k].gamma, c.x03, c.R, 2.0));
    }
    rep.gamma_l2 =
        std::sqrt(window_time_integral(t, v, c.t0 - c.R * c.R, c.t0));
    if (rep.gamma_l2 <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    rep.N_emp = rep.sup_half /
                (std::pow((1.0 + rep.A) / c.R, 2.5) * rep.gamma_l2);
    return rep;
}

WeakHarnackReport verify_weak_harnack(const FlowHistory& h,
                                      const Cylinder& c) {
    OscillationRecord rec = oscillation(h, c);
    WeakHarnackReport rep;
    if (rec.degenerate) {
        rep.degenerate = true;
        return rep;
    }
    const AxiGrid& g = h.grid();
    rep.A = quantity_A(h, c);
    rep.bound = std::pow(1.0 + rep.A, 3.0);

    const double znorm = kappa_l2_mass();  // continuum L^2 mass of kappa
    double worst = -std::numeric_limits<double>::infinity();
    for (int k : window_snapshots(h, c.t0 - 0.25 * c.R * c.R, c.t0)) {
        Field2D hf = normalized_h(h.snapshots[k].gamma, rec);
        double integral = 0.0;
        for (int i = 1; i <= g.Nr; ++i) {
            if (g.r(i) > c.R) break;
            for (int j = 0; j <= g.Nz; ++j) {
                double dzc = g.z(j) - c.x03;
                double rho = std::hypot(g.r(i), dzc) / c.R;
                if (rho >= 1.0) continue;
                double kv = kappa(rho);
                if (kv == 0.0) continue;
                double zeta2 = kv * kv / (znorm * c.R * c.R * c.R);
                double hv = hf(i, j);
                if (hv <= 0.0) {
                    if (hv < 0.0)
                        throw std::runtime_error(
                            "weak Harnack: h < 0 off-axis (solver bug signal)");
                    hv = 1e-12;
                    rep.clamped = true;
                }
                integral +=
                    -std::log(hv) * zeta2 * 2.0 * M_PI * g.r(i) * g.dr * g.dz;
            }
        }
        worst = std::max(worst, integral);
    }
    rep.integral = worst;
    rep.ratio = worst / rep.bound;
    return rep;
}

StrongHarnackReport strong_harnack_floor(const FlowHistory& h,
                                         const Cylinder& c,
                                         const DecayParams& dp) {
    OscillationRecord rec = oscillation(h, c);
    StrongHarnackReport rep;
    rep.lambda = lambda_of(c.R, dp);
    rep.floor = 0.5 * rep.lambda;
    if (rec.degenerate) {
        rep.degenerate = true;
        return rep;
    }
    const AxiGrid& g = h.grid();
    Cylinder quarter{c.x03, c.t0, 0.25 * c.R};
    double inf_h = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k : window_snapshots(h, c.t0 - quarter.R * quarter.R, c.t0)) {
        Field2D hf = normalized_h(h.snapshots[k].gamma, rec);
        for (int i = 1; i <= g.Nr; ++i) {
            if (g.r(i) > quarter.R) break;
            for (int j = 0; j <= g.Nz; ++j)
                if (in_ball(g, i, j, quarter)) {
                    any = true;
                    inf_h = std::min(inf_h, hf(i, j));
                }
        }
    }
    if (!any)
        throw std::domain_error(
            "strong_harnack_floor: quarter cylinder below grid resolution");
    rep.inf_h = inf_h;
    rep.margin = inf_h - rep.floor;
    rep.N7_max = 2.0 * inf_h * std::pow(std::log(100.0 / c.R), 1.0 - dp.tau);
    return rep;
}

std::vector<LadderLevel> decay_ladder(const FlowHistory& h, double x03,
                                      double t0, double R0, int levels,
                                      const DecayParams& dp) {
    if (levels < 1) throw std::invalid_argument("decay_ladder: levels < 1");
    std::vector<LadderLevel> out;
    double prevJ = 0.0;
    for (int j = 0; j < levels; ++j) {
        Cylinder c{x03, t0, R0 * std::pow(4.0, -j)};
        OscillationRecord rec = oscillation(h, c);  // throws when exhausted
        LadderLevel lv;
        lv.j = j;
        lv.R = c.R;
        lv.m = rec.m_R;
        lv.M = rec.M_R;
        lv.J = rec.J_R;
        lv.degenerate = rec.J_R <= kDegenerateJ;
        lv.contraction = j == 0 ? 1.0 : (prevJ > 0.0 ? lv.J / prevJ : 0.0);
        lv.lambda_floor = 0.5 * lambda_of(c.R, dp);
        lv.inf_h = std::numeric_limits<double>::quiet_NaN();
        if (!lv.degenerate) {
            try {
                lv.inf_h = strong_harnack_floor(h, c, dp).inf_h;
            } catch (const std::domain_error&) {
                // quarter cylinder unresolved; leave NaN
            }
        }
        prevJ = lv.J;
        out.push_back(lv);
    }
    return out;
}

DecayParams fit_decay_exponent(const std::vector<LadderLevel>& ladder,
                               double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("fit_decay_exponent: tau outside (0,1)");
    std::vector<double> x, y;
    for (const auto& lv : ladder) {
        if (lv.J < kDegenerateJ) continue;
        x.push_back(-std::pow(std::log(100.0 / lv.R), tau));
        y.push_back(std::log(lv.J));
    }
    if (x.size() < 3)
        throw std::invalid_argument(
            "fit_decay_exponent: fewer than 3 usable levels");
    double xm = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        xm += x[k];
        ym += y[k];
    }
    xm /= x.size();
    ym /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - xm) * (x[k] - xm);
        sxy += (x[k] - xm) * (y[k] - ym);
    }
    DecayParams dp;
    dp.tau = tau;
    dp.c_fit = sxy / sxx;
    return dp;
}

bool ladder_consistent(const std::vector<LadderLevel>& ladder) {
    for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
        const auto& lv = ladder[k];
        if (lv.degenerate || std::isnan(lv.inf_h)) continue;
        if (lv.inf_h < lv.lambda_floor) continue;  // floor did not hold here
        double lam = 2.0 * lv.lambda_floor;
        if (ladder[k + 1].J > (1.0 - 0.25 * lam) * lv.J * (1.0 + 1e-9))
            return false;
    }
    return true;
}

EnvelopeReport decay_envelope_check(const FlowHistory& h,
                                    const DecayParams& dp,
                                    const std::vector<Cylinder>& probes) {
    const AxiGrid& g = h.grid();
    EnvelopeReport rep;
    rep.tau = dp.tau;
    rep.c_fit = dp.c_fit;

    for (const Cylinder& c : probes) {
        double A = quantity_A(h, c);
        double om = 1.0 / std::log(std::log(100.0 / c.R));
        rep.empirical_K =
            std::max(rep.empirical_K, A * std::pow(om, dp.beta));
    }

    const double r_cap = std::min(0.5 * g.r_max, 0.9);
    int kmax = 0;
    while (kmax + 1 <= g.Nr && g.r(kmax + 1) <= r_cap) ++kmax;
    if (kmax < 2)
        throw std::domain_error(
            "decay_envelope_check: no near-axis shells resolved");

    std::vector<double> sup(kmax + 1, 0.0);
    for (const FlowState& s : h.snapshots)
        for (int i = 1; i <= kmax; ++i)
            for (int j = 0; j <= g.Nz; ++j)
                sup[i] = std::max(sup[i], std::abs(s.gamma(i, j)));

    auto envelope = [&](double N, double r) {
        return N * std::exp(-dp.c_fit *
                            std::pow(std::abs(std::log(r)), dp.tau));
    };
    double outer_r = g.r(kmax);
    double outer_env = envelope(1.0, outer_r);
    if (sup[kmax] <= 0.0) {
        rep.degenerate = true;
        rep.pass = true;  // vacuous
        for (int i = 1; i <= kmax; ++i)
            rep.shells.push_back({g.r(i), sup[i], 0.0});
        return rep;
    }
    rep.N_calibrated = sup[kmax] / outer_env;

    rep.pass = true;
    for (int i = 1; i <= kmax; ++i) {
        double env = envelope(rep.N_calibrated, g.r(i));
        rep.shells.push_back({g.r(i), sup[i], env});
        if (sup[i] > env * (1.0 + 1e-9)) rep.pass = false;
    }
    return rep;
}

void write_ladder_csv(const std::vector<LadderLevel>& ladder,
                      std::ostream& out) {
    out << "j,R_j,m,M,J,contraction,lambda_floor,inf_h\n";
    char buf[320];
    for (const auto& lv : ladder) {
        std::snprintf(buf, sizeof(buf),
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", lv.j,
                      lv.R, lv.m, lv.M, lv.J, lv.contraction, lv.lambda_floor,
                      lv.inf_h);
        out << buf;
    }
}

void write_decay_json(const EnvelopeReport& rep, const DecayParams& dp,
                      bool ladder_ok, std::ostream& out) {
    nlohmann::json j;
    j["tau"] = rep.tau;
    j["c_fit"] = rep.c_fit;
    j["N_calibrated"] = rep.N_calibrated;
    j["empirical_K"] = rep.empirical_K;
    j["N7"] = dp.N7;
    j["beta"] = dp.beta;
    j["pass"] = {{"envelope", rep.pass},
                 {"ladder_consistent", ladder_ok},
                 {"degenerate", rep.degenerate}};
    j["shells"] = nlohmann::json::array();
    for (const auto& s : rep.shells)
        j["shells"].push_back(
            {{"r", s.r}, {"sup_gamma", s.sup_gamma}, {"envelope", s.envelope}});
    out << j.dump(2) << "\n";
}

}  // namespace axilab
