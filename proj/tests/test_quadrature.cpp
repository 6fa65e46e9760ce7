#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "axilab/quadrature.hpp"

using namespace axilab;

namespace {

const double kPi = std::acos(-1.0);

using ScalarFn = std::function<double(double r, double z, double t)>;

FlowHistory make_history(const AxiGrid& g, const std::vector<double>& times,
                         ScalarFn ur, ScalarFn utheta, ScalarFn u3,
                         ScalarFn pi) {
    FlowHistory h;
    for (double t : times) {
        FlowState s = FlowState::zero(g, t);
        for (int i = 0; i <= g.Nr; ++i)
            for (int j = 0; j <= g.Nz; ++j) {
                double r = g.r(i), z = g.z(j);
                if (ur) s.ur(i, j) = ur(r, z, t);
                if (utheta) s.utheta(i, j) = utheta(r, z, t);
                if (u3) s.u3(i, j) = u3(r, z, t);
                if (pi) s.pi(i, j) = pi(r, z, t);
            }
        s.ur.enforce_axis_parity();
        s.utheta.enforce_axis_parity();
        s.sync_gamma();
        h.snapshots.push_back(std::move(s));
    }
    h.cadence_dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    return h;
}

Field2D const_field(const AxiGrid& g, double v) {
    return Field2D(g, Parity::Even, v);
}

}  // namespace

TEST_CASE("disc_rect_overlap closed-form oracles") {
    // rectangle fully inside the disc
    CHECK(disc_rect_overlap(0, 0, 2.0, -0.5, 0.5, -0.5, 0.5) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // disc fully inside the rectangle
    CHECK(disc_rect_overlap(0, 0, 1.0, -3, 3, -3, 3) ==
          doctest::Approx(kPi).epsilon(1e-12));
    // quadrant
    CHECK(disc_rect_overlap(0, 0, 1.0, 0, 3, 0, 3) ==
          doctest::Approx(kPi / 4).epsilon(1e-12));
    // half
    CHECK(disc_rect_overlap(0, 0, 1.0, 0, 3, -3, 3) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));
    // shifted center, no overlap
    CHECK(disc_rect_overlap(5, 5, 1.0, -1, 1, -1, 1) == 0.0);
    // additive split
    double whole = disc_rect_overlap(0.2, -0.1, 0.8, -1, 1, -1, 1);
    double left = disc_rect_overlap(0.2, -0.1, 0.8, -1, 0.3, -1, 1);
    double right = disc_rect_overlap(0.2, -0.1, 0.8, 0.3, 1, -1, 1);
    CHECK(whole == doctest::Approx(left + right).epsilon(1e-12));
}

TEST_CASE("ball_integral analytic oracles") {
    AxiGrid g = make_grid(128, 256, 1.0, -1.0, 1.0);
    CHECK(ball_integral(const_field(g, 0.0), 0.0, 1.0, 1.0) == 0.0);
    double v1 = ball_integral(const_field(g, 1.0), 0.0, 1.0, 1.0);
    CHECK(v1 == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));

    Field2D r2(g, Parity::Even);
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j) r2(i, j) = g.r(i) * g.r(i);
    CHECK(ball_integral(r2, 0.0, 1.0, 1.0) ==
          doctest::Approx(8.0 * kPi / 15.0).epsilon(1e-3));
}

TEST_CASE("ball_integral rejects escaping balls and bad powers") {
    AxiGrid g = make_grid(32, 32, 1.0, -0.5, 0.5);
    Field2D f = const_field(g, 1.0);
    CHECK_THROWS_AS(ball_integral(f, 0.0, 0.8, 1.0), std::domain_error);
    CHECK_THROWS_AS(ball_integral(f, 0.4, 0.2, 0.5), std::invalid_argument);
}

TEST_CASE("ball_integral monotone in R and additive over disjoint bumps") {
    AxiGrid g = make_grid(96, 192, 1.0, -1.0, 1.0);
    Field2D f(g, Parity::Even);
    auto bump = [](double r, double z, double z0) {
        double d2 = (r * r + (z - z0) * (z - z0)) / 0.01;
        return d2 < 1.0 ? std::exp(-1.0 / (1.0 - d2)) : 0.0;
    };
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j)
            f(i, j) = bump(g.r(i), g.z(j), -0.5) + bump(g.r(i), g.z(j), 0.5);

    double prev = 0.0;
    for (double R : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        double v = ball_integral(f, 0.0, R, 1.0);
        CHECK(v >= prev);
        prev = v;
    }
    // supports are inside the balls B(+-0.5, 0.2); whole = sum of parts
    double whole = ball_integral(f, 0.0, 1.0, 1.0);
    double lo = ball_integral(f, -0.5, 0.2, 1.0);
    double hi = ball_integral(f, 0.5, 0.2, 1.0);
    CHECK(whole == doctest::Approx(lo + hi).epsilon(1e-6));
}

TEST_CASE("ball_integral converges at order >= 1") {
    auto err = [](int n) {
        AxiGrid g = make_grid(n, 2 * n, 1.0, -1.0, 1.0);
        return std::abs(ball_integral(const_field(g, 1.0), 0.0, 0.8, 1.0) -
                        4.0 * kPi / 3.0 * 0.8 * 0.8 * 0.8);
    };
    CHECK(std::log2(err(32) / err(64)) >= 1.0);
}

TEST_CASE("quantity_A on constant and zero flow") {
    AxiGrid g = make_grid(128, 256, 1.0, -1.0, 1.0);
    std::vector<double> times = {0.0, 0.25, 0.5, 0.75, 1.0};
    auto one = [](double, double, double) { return 1.0; };
    FlowHistory h = make_history(g, times, nullptr, nullptr, one, nullptr);
    Cylinder c{0.0, 1.0, 1.0};
    CHECK(quantity_A(h, c) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));

    FlowHistory hz = make_history(g, times, nullptr, nullptr, nullptr, nullptr);
    CHECK(quantity_A(hz, c) == 0.0);
}

TEST_CASE("quantity_E/C/D constant-field oracles") {
    AxiGrid g = make_grid(128, 256, 1.0, -1.0, 1.0);
    std::vector<double> times = {0.0, 0.25, 0.5, 0.75, 1.0};
    auto one = [](double, double, double) { return 1.0; };
    auto four = [](double, double, double) { return 4.0; };
    FlowHistory h = make_history(g, times, nullptr, nullptr, one, four);
    Cylinder c{0.0, 1.0, 1.0};
    CHECK(quantity_E(h, c) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(quantity_C(h, c) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));
    CHECK(quantity_D(h, c) ==
          doctest::Approx(8.0 * 4.0 * kPi / 3.0).epsilon(1e-3));
}

TEST_CASE("quantity_G constant-field oracle and exponent guard") {
    AxiGrid g = make_grid(128, 256, 1.0, -1.0, 1.0);
    std::vector<double> times = {0.0, 0.25, 0.5, 0.75, 1.0};
    auto one = [](double, double, double) { return 1.0; };
    FlowHistory h = make_history(g, times, nullptr, nullptr, one, nullptr);
    Cylinder c{0.0, 1.0, 1.0};
    const double p = 10.0 / 3.0;
    double v = quantity_G(h, c, p, p, 0.5);
    CHECK(v == doctest::Approx(std::pow(4.0 * kPi / 3.0, 1.0 / p)).epsilon(1e-3));
    CHECK_THROWS_AS(quantity_G(h, c, 3.0, 3.0, 0.5), std::invalid_argument);

    FlowHistory hz = make_history(g, times, nullptr, nullptr, nullptr, nullptr);
    CHECK(quantity_G(hz, c, p, p, 0.5) == 0.0);
}

TEST_CASE("weight_omega and g_alpha") {
    CHECK(weight_omega(0.25) == doctest::Approx(0.55848).epsilon(1e-4));
    double Rhalf = 100.0 * std::exp(-std::exp(2.0));
    CHECK(weight_omega(Rhalf) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(weight_omega(0.01) < weight_omega(0.1));
    CHECK_THROWS_AS(weight_omega(0.3), std::domain_error);
    CHECK_THROWS_AS(weight_omega(0.0), std::domain_error);
    CHECK(g_alpha(2.0, 0.25, 1.0) ==
          doctest::Approx(2.0 * weight_omega(0.25)).epsilon(1e-12));
}

TEST_CASE("A, E, C, G invariant under parabolic rescaling") {
    // steady analytic profile u and its rescaling lambda*u(lambda x), lambda=2
    AxiGrid g = make_grid(128, 256, 1.0, -1.0, 1.0);
    const double w = 0.35;
    auto gaussian = [w](double r, double z) {
        return std::exp(-(r * r + z * z) / (w * w));
    };
    auto mk = [&](double lam) {
        ScalarFn ur = [=](double r, double z, double) {
            return lam * (lam * r) * gaussian(lam * r, lam * z);
        };
        ScalarFn ut = [=](double r, double z, double) {
            return lam * 0.7 * (lam * r) * gaussian(lam * r, lam * z);
        };
        ScalarFn u3 = [=](double r, double z, double) {
            return lam * gaussian(lam * r, lam * z);
        };
        std::vector<double> times;
        double T = 0.3 / (lam * lam);
        for (int k = 0; k <= 8; ++k) times.push_back(k * T / 8.0);
        return make_history(g, times, ur, ut, u3, nullptr);
    };
    FlowHistory h1 = mk(1.0), h2 = mk(2.0);
    Cylinder c1{0.0, 0.25, 0.5}, c2{0.0, 0.0625, 0.25};
    CHECK(quantity_A(h2, c2) ==
          doctest::Approx(quantity_A(h1, c1)).epsilon(0.01));
    CHECK(quantity_E(h2, c2) ==
          doctest::Approx(quantity_E(h1, c1)).epsilon(0.01));
    CHECK(quantity_C(h2, c2) ==
          doctest::Approx(quantity_C(h1, c1)).epsilon(0.01));
    const double p = 10.0 / 3.0;
    CHECK(quantity_G(h2, c2, p, p, 0.5) ==
          doctest::Approx(quantity_G(h1, c1, p, p, 0.5)).epsilon(0.01));
}

TEST_CASE("besov_norm_b basics") {
    AxiGrid g = make_grid(48, 96, 1.0, -1.0, 1.0);
    FlowState z = FlowState::zero(g);
    CHECK(besov_norm_b(z, 1.0) == 0.0);
    CHECK_THROWS_AS(besov_norm_b(z, 0.0), std::invalid_argument);

    auto bump_state = [&](double z0, double amp, double w) {
        FlowState s = FlowState::zero(g);
        for (int i = 0; i <= g.Nr; ++i)
            for (int j = 0; j <= g.Nz; ++j) {
                double r = g.r(i), zz = g.z(j) - z0;
                s.u3(i, j) = amp * std::exp(-(r * r + zz * zz) / (w * w));
            }
        return s;
    };
    // Gaussian oracle: sup_s sqrt(s) (w^2/(w^2+4s))^{3/2} at s* = w^2/8
    double w = 0.25;
    double exact = (w / (2.0 * std::sqrt(2.0))) * std::pow(2.0 / 3.0, 1.5);
    double v0 = besov_norm_b(bump_state(0.0, 1.0, w), 1.0);
    CHECK(v0 == doctest::Approx(exact).epsilon(0.05));
    // axial translation invariance
    double vt = besov_norm_b(bump_state(0.3, 1.0, w), 1.0);
    CHECK(vt == doctest::Approx(v0).epsilon(0.03));
    // scale invariance: b_lam(x) = lam b(lam x), lam = 2
    double vs = besov_norm_b(bump_state(0.0, 2.0, w / 2.0), 1.0);
    CHECK(vs == doctest::Approx(v0).epsilon(0.05));
}

TEST_CASE("quantity_B identities") {
    AxiGrid g = make_grid(48, 96, 1.0, -1.0, 1.0);
    std::vector<double> times = {0.0, 0.025, 0.05, 0.075, 0.1};
    auto u3 = [](double r, double z, double) {
        return std::exp(-(r * r + z * z) / 0.0625);
    };
    auto u3x2 = [&](double r, double z, double t) { return 2.0 * u3(r, z, t); };
    FlowHistory h = make_history(g, times, nullptr, nullptr, u3, nullptr);
    FlowHistory h2 = make_history(g, times, nullptr, nullptr, u3x2, nullptr);
    Cylinder c{0.0, 0.1, 0.3};
    double v = besov_norm_b(h.snapshots[0], c.R * c.R);
    // steady b: the L^6-in-time average collapses to the per-snapshot value
    CHECK(quantity_B(h, c) == doctest::Approx(v).epsilon(1e-9));
    CHECK(quantity_B(h2, c) == doctest::Approx(2.0 * v).epsilon(1e-9));

    FlowHistory hz = make_history(g, times, nullptr, nullptr, nullptr, nullptr);
    CHECK(quantity_B(hz, c) == 0.0);
}

TEST_CASE("compute_quantities assembles the ledger identity") {
    AxiGrid g = make_grid(64, 128, 1.0, -1.0, 1.0);
    std::vector<double> times = {0.0, 0.02, 0.04, 0.06};
    auto u3 = [](double r, double z, double) {
        return std::exp(-(r * r + z * z) / 0.04);
    };
    auto pi = [](double r, double z, double) { return 0.5 * r * z; };
    FlowHistory h = make_history(g, times, nullptr, nullptr, u3, pi);
    Cylinder c{0.0, 0.05, 0.2};
    QuantityParams prm;
    CylinderQuantities q = compute_quantities(h, c, prm);
    CHECK(q.script_E == q.A + q.E + q.D);
    CHECK(q.omega == doctest::Approx(weight_omega(c.R)).epsilon(1e-12));
    CHECK(q.G_alpha == doctest::Approx(q.G * std::pow(q.omega, prm.alpha)));
    CHECK(q.A >= 0.0);
    CHECK(q.C > 0.0);

    std::vector<SweepRow> rows{{c, q}};
    std::stringstream csv, js;
    write_sweep_csv(rows, csv);
    CHECK(csv.str().find("t0,x03,R,omega,A,E,C,D,script_E,G,G_alpha,B") == 0);
    write_sweep_json(rows, prm, js);
    CHECK(js.str().find("\"gamma\"") != std::string::npos);
}

TEST_CASE("cylinder validation") {
    AxiGrid g = make_grid(32, 32, 1.0, -0.5, 0.5);
    std::vector<double> times = {0.0, 0.05, 0.1};
    FlowHistory h = make_history(g, times, nullptr, nullptr, nullptr, nullptr);
    Cylinder ok{0.0, 0.1, 0.3};
    CHECK_NOTHROW(ok.validate(h));
    Cylinder big{0.0, 0.1, 0.7};  // ball pokes out of z range
    CHECK_THROWS_AS(big.validate(h), std::domain_error);
    Cylinder early{0.0, 0.05, 0.3};  // slab starts before the history
    CHECK_THROWS_AS(early.validate(h), std::domain_error);
}
