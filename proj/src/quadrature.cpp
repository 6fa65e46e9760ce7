#include "axilab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace axilab {

namespace {

constexpr double kTimeEps = 1e-12;

// ---- circle / rectangle overlap ------------------------------------------

// antiderivative of the chord half-length c(u) = sqrt(R^2 - u^2)
double chord_primitive(double u, double R) {
    u = std::clamp(u, -R, R);
    return 0.5 * (u * std::sqrt(std::max(0.0, R * R - u * u)) +
                  R * R * std::asin(u / R));
}

// Int_a^b min(w, c(u)) du for w >= 0, [a,b] within [-R,R]
double min_chord_integral(double a, double b, double w, double R) {
    if (b <= a) return 0.0;
    if (w >= R) return chord_primitive(b, R) - chord_primitive(a, R);
    const double ustar = std::sqrt(R * R - w * w);
    double total = 0.0;
    // left piece where c < w
    double la = a, lb = std::min(b, -ustar);
    if (lb > la) total += chord_primitive(lb, R) - chord_primitive(la, R);
    // middle piece where c >= w
    double ma = std::max(a, -ustar), mb = std::min(b, ustar);
    if (mb > ma) total += w * (mb - ma);
    // right piece where c < w
    double ra = std::max(a, ustar), rb = b;
    if (rb > ra) total += chord_primitive(rb, R) - chord_primitive(ra, R);
    return total;
}

// Int_a^b clamp(y, -c(u), c(u)) du
double clamped_integral(double a, double b, double y, double R) {
    if (y >= 0.0) return min_chord_integral(a, b, y, R);
    return -min_chord_integral(a, b, -y, R);
}

}  // namespace

double disc_rect_overlap(double cx, double cy, double R, double x1, double x2,
                         double y1, double y2) {
    const double a = std::clamp(x1 - cx, -R, R);
    const double b = std::clamp(x2 - cx, -R, R);
    if (b <= a) return 0.0;
    return clamped_integral(a, b, y2 - cy, R) -
           clamped_integral(a, b, y1 - cy, R);
}

double ball_integral(const Field2D& f, double x03, double R, double power) {
    if (power < 1.0) throw std::invalid_argument("ball_integral: power < 1");
    const AxiGrid& g = f.grid();
    if (R <= 0.0 || R > g.r_max || x03 - R < g.z_min - kTimeEps ||
        x03 + R > g.z_max + kTimeEps)
        throw std::domain_error("ball_integral: ball exits the domain");

    const double R2 = R * R;
    double total = 0.0;
    for (int i = 0; i <= g.Nr; ++i) {
        const double r = g.r(i);
        const double rlo = std::max(0.0, r - 0.5 * g.dr);
        const double rhi = std::min(g.r_max, r + 0.5 * g.dr);
        // fast reject: nearest point of the cell's r-strip to the center
        const double dr_near = rlo > R ? rlo - R : 0.0;
        if (dr_near > 0.0) break;  // all further columns are outside
        for (int j = 0; j <= g.Nz; ++j) {
            const double z = g.z(j);
            const double zlo = std::max(g.z_min, z - 0.5 * g.dz);
            const double zhi = std::min(g.z_max, z + 0.5 * g.dz);
            // cell corner distances to the center (0, x03)
            const double dzn = std::max({zlo - x03, x03 - zhi, 0.0});
            const double dzf = std::max(std::abs(zlo - x03), std::abs(zhi - x03));
            const double near2 = rlo * rlo + dzn * dzn;
            const double far2 = rhi * rhi + dzf * dzf;
            if (near2 >= R2) continue;
            double area, rbar;
            if (far2 <= R2) {
                area = (rhi - rlo) * (zhi - zlo);
                rbar = 0.5 * (rlo + rhi);
            } else {
                area = disc_rect_overlap(0.0, x03, R, rlo, rhi, zlo, zhi);
                if (area <= 0.0) continue;
                rbar = 0.5 * (rlo + rhi);
            }
            const double v = std::abs(f(i, j));
            const double vp = power == 1.0   ? v
                              : power == 2.0 ? v * v
                                             : std::pow(v, power);
            total += vp * rbar * area;
        }
    }
    return 2.0 * M_PI * total;
}

// ---- cylinders and the time window ---------------------------------------

void Cylinder::validate(const AxiGrid& g) const {
    if (R <= 0.0) throw std::invalid_argument("cylinder: R <= 0");
    if (R > g.r_max || x03 - R < g.z_min - kTimeEps ||
        x03 + R > g.z_max + kTimeEps)
        throw std::domain_error("cylinder: ball exits the domain");
}

void Cylinder::validate(const FlowHistory& h) const {
    if (h.snapshots.empty())
        throw std::invalid_argument("cylinder: empty history");
    validate(h.grid());
    if (t0 - R * R < h.t_begin() - kTimeEps || t0 > h.t_end() + kTimeEps)
        throw std::domain_error("cylinder: time slab exits the history window");
}

namespace {

std::vector<int> window_snapshots(const FlowHistory& h, const Cylinder& c) {
    std::vector<int> idx;
    const double ta = c.t0 - c.R * c.R, tb = c.t0;
    for (int k = 0; k < static_cast<int>(h.snapshots.size()); ++k) {
        double t = h.snapshots[k].t;
        if (t >= ta - kTimeEps && t <= tb + kTimeEps) idx.push_back(k);
    }
    if (idx.empty())
        throw std::domain_error("cylinder: no snapshots inside the time slab");
    return idx;
}

// trapezoid over the in-window snapshots plus constant end strips out to the
// exact window bounds
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

template <class Fn>
Field2D make_scalar(const FlowState& s, Fn&& fn) {
    Field2D out(s.ur.grid(), Parity::Even);
    const AxiGrid& g = s.ur.grid();
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j) out(i, j) = fn(i, j);
    return out;
}

template <class Fn>
double window_integral_over_Q(const FlowHistory& h, const Cylinder& c,
                              double power, Fn&& field_of) {
    c.validate(h);
    auto idx = window_snapshots(h, c);
    std::vector<double> t, v;
    t.reserve(idx.size());
    v.reserve(idx.size());
    for (int k : idx) {
        t.push_back(h.snapshots[k].t);
        v.push_back(ball_integral(field_of(h.snapshots[k]), c.x03, c.R, power));
    }
    return window_time_integral(t, v, c.t0 - c.R * c.R, c.t0);
}

}  // namespace

double quantity_A(const FlowHistory& h, const Cylinder& c) {
    c.validate(h);
    double best = 0.0;
    for (int k : window_snapshots(h, c)) {
        const FlowState& s = h.snapshots[k];
        Field2D u2 = make_scalar(s, [&](int i, int j) {
            double a = s.ur(i, j), b = s.utheta(i, j), d = s.u3(i, j);
            return a * a + b * b + d * d;
        });
        best = std::max(best, ball_integral(u2, c.x03, c.R, 1.0) / c.R);
    }
    return best;
}

double quantity_E(const FlowHistory& h, const Cylinder& c) {
    double val = window_integral_over_Q(h, c, 1.0, [](const FlowState& s) {
        const AxiGrid& g = s.ur.grid();
        Field2D dur_r = d_r(s.ur), dur_z = d_z(s.ur);
        Field2D dut_r = d_r(s.utheta), dut_z = d_z(s.utheta);
        Field2D du3_r = d_r(s.u3), du3_z = d_z(s.u3);
        Field2D out(g, Parity::Even);
        for (int i = 0; i <= g.Nr; ++i)
            for (int j = 0; j <= g.Nz; ++j) {
                // metric parts u^r/r, u^theta/r; axis limit is the radial
                // derivative of the odd profile
                double mr = i == 0 ? dur_r(0, j) : s.ur(i, j) / g.r(i);
                double mt = i == 0 ? dut_r(0, j) : s.utheta(i, j) / g.r(i);
                out(i, j) = dur_r(i, j) * dur_r(i, j) +
                            dur_z(i, j) * dur_z(i, j) +
                            dut_r(i, j) * dut_r(i, j) +
                            dut_z(i, j) * dut_z(i, j) +
                            du3_r(i, j) * du3_r(i, j) +
                            du3_z(i, j) * du3_z(i, j) + mr * mr + mt * mt;
            }
        return out;
    });
    return val / c.R;
}

double quantity_C(const FlowHistory& h, const Cylinder& c) {
    double val = window_integral_over_Q(h, c, 3.0, [](const FlowState& s) {
        return make_scalar(s, [&](int i, int j) {
            double a = s.ur(i, j), b = s.utheta(i, j), d = s.u3(i, j);
            return std::sqrt(a * a + b * b + d * d);
        });
    });
    return val / (c.R * c.R);
}

double quantity_D(const FlowHistory& h, const Cylinder& c) {
    double val = window_integral_over_Q(
        h, c, 1.5, [](const FlowState& s) { return s.pi; });
    return val / (c.R * c.R);
}

double quantity_G(const FlowHistory& h, const Cylinder& c, double p, double q,
                  double gamma_exp) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    if (p <= 1.0 || q <= 1.0)
        throw std::invalid_argument("quantity_G: need p, q > 1");
    if (std::abs(3.0 * inv_p + 2.0 * inv_q - (2.0 - gamma_exp)) > 1e-9)
        throw std::invalid_argument(
            "quantity_G: exponents violate 3/p + 2/q = 2 - gamma");
    c.validate(h);
    auto idx = window_snapshots(h, c);

    auto space_norm = [&](const FlowState& s) {
        Field2D babs = make_scalar(s, [&](int i, int j) {
            return std::hypot(s.ur(i, j), s.u3(i, j));
        });
        if (std::isinf(p)) {
            const AxiGrid& g = s.ur.grid();
            double m = 0.0;
            for (int i = 0; i <= g.Nr; ++i)
                for (int j = 0; j <= g.Nz; ++j) {
                    double dzc = g.z(j) - c.x03;
                    if (g.r(i) * g.r(i) + dzc * dzc <= c.R * c.R)
                        m = std::max(m, babs(i, j));
                }
            return m;
        }
        return std::pow(ball_integral(babs, c.x03, c.R, p), inv_p);
    };

    double norm;
    if (std::isinf(q)) {
        norm = 0.0;
        for (int k : idx) norm = std::max(norm, space_norm(h.snapshots[k]));
    } else {
        std::vector<double> t, v;
        for (int k : idx) {
            t.push_back(h.snapshots[k].t);
            v.push_back(std::pow(space_norm(h.snapshots[k]), q));
        }
        norm = std::pow(window_time_integral(t, v, c.t0 - c.R * c.R, c.t0),
                        inv_q);
    }
    return std::pow(c.R, 1.0 - 3.0 * inv_p - 2.0 * inv_q) * norm;
}

double weight_omega(double R) {
    if (!(R > 0.0 && R <= 0.25))
        throw std::domain_error("weight_omega: R outside (0, 1/4]");
    return 1.0 / std::log(std::log(100.0 / R));
}

double g_alpha(double G, double R, double alpha) {
    return G * std::pow(weight_omega(R), alpha);
}

// ---- Besov-type sup-norm via the heat semigroup --------------------------

namespace {

// bilinear sample of an axisymmetric profile at arbitrary (r, z); zero
// outside the meridian domain
double sample_rz(const Field2D& f, double r, double z) {
    const AxiGrid& g = f.grid();
    if (r < 0.0 || r > g.r_max || z < g.z_min || z > g.z_max) return 0.0;
    double fi = r / g.dr, fj = (z - g.z_min) / g.dz;
    int i = std::min(static_cast<int>(fi), g.Nr - 1);
    int j = std::min(static_cast<int>(fj), g.Nz - 1);
    double a = fi - i, b = fj - j;
    return (1 - a) * (1 - b) * f(i, j) + a * (1 - b) * f(i + 1, j) +
           (1 - a) * b * f(i, j + 1) + a * b * f(i + 1, j + 1);
}

struct Box3 {
    int nx, ny, nz;
    double hx, hy, hz;
    std::vector<double> cx, cy, cz;  // one contiguous block per component
    std::size_t at(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * ny + j) * nz + k;
    }
};

// convolve each component along one axis with normalized Gaussian weights
void smooth_axis(std::vector<double>& a, const Box3& b, int axis, double s) {
    const int n[3] = {b.nx, b.ny, b.nz};
    const double h = axis == 0 ? b.hx : axis == 1 ? b.hy : b.hz;
    const double sigma = std::sqrt(2.0 * s);
    int K = static_cast<int>(std::ceil(6.0 * sigma / h));
    K = std::min(K, n[axis] - 1);
    std::vector<double> w(2 * K + 1);
    double wsum = 0.0;
    for (int k = -K; k <= K; ++k)
        wsum += w[k + K] = std::exp(-(k * h) * (k * h) / (4.0 * s));
    for (double& x : w) x /= wsum;

    const std::size_t stride = axis == 0 ? static_cast<std::size_t>(b.ny) * b.nz
                               : axis == 1 ? static_cast<std::size_t>(b.nz)
                                           : 1;
    std::vector<double> line(n[axis]), out(n[axis]);
    const int len = n[axis];
    for (int i = 0; i < b.nx; ++i)
        for (int j = 0; j < b.ny; ++j)
            for (int k = 0; k < b.nz; ++k) {
                int pos[3] = {i, j, k};
                if (pos[axis] != 0) continue;  // visit each line once
                std::size_t base = b.at(i, j, k);
                for (int m = 0; m < len; ++m) line[m] = a[base + m * stride];
                for (int m = 0; m < len; ++m) {
                    double acc = 0.0;
                    int lo = std::max(-K, -m), hi = std::min(K, len - 1 - m);
                    for (int d = lo; d <= hi; ++d)
                        acc += w[d + K] * line[m + d];
                    out[m] = acc;
                }
                for (int m = 0; m < len; ++m) a[base + m * stride] = out[m];
            }
}

}  // namespace

double besov_norm_b(const FlowState& state, double S) {
    if (S <= 0.0) throw std::invalid_argument("besov_norm_b: horizon <= 0");
    const AxiGrid& g = state.ur.grid();

    Box3 b;
    b.nx = b.ny = std::min(2 * g.Nr, 64) + 1;
    b.hx = b.hy = 2.0 * g.r_max / (b.nx - 1);
    b.nz = std::clamp(static_cast<int>(std::lround((g.z_max - g.z_min) / b.hx)),
                      16, 64) +
           1;
    b.hz = (g.z_max - g.z_min) / (b.nz - 1);

    const std::size_t nn =
        static_cast<std::size_t>(b.nx) * b.ny * b.nz;
    std::vector<double> cx0(nn), cy0(nn), cz0(nn);
    for (int i = 0; i < b.nx; ++i) {
        double x = -g.r_max + i * b.hx;
        for (int j = 0; j < b.ny; ++j) {
            double y = -g.r_max + j * b.hy;
            double r = std::hypot(x, y);
            double cth = r > 0 ? x / r : 1.0, sth = r > 0 ? y / r : 0.0;
            for (int k = 0; k < b.nz; ++k) {
                double z = g.z_min + k * b.hz;
                double ur = sample_rz(state.ur, r, z);
                std::size_t m = b.at(i, j, k);
                cx0[m] = ur * cth;
                cy0[m] = ur * sth;
                cz0[m] = sample_rz(state.u3, r, z);
            }
        }
    }

    double best = 0.0;
    const int kLadder = 16;
    for (int l = 0; l < kLadder; ++l) {
        double s = S * std::pow(1e-4, 1.0 - double(l) / (kLadder - 1));
        b.cx = cx0;
        b.cy = cy0;
        b.cz = cz0;
        for (int axis = 0; axis < 3; ++axis) {
            smooth_axis(b.cx, b, axis, s);
            smooth_axis(b.cy, b, axis, s);
            smooth_axis(b.cz, b, axis, s);
        }
        double m = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            double v = b.cx[i] * b.cx[i] + b.cy[i] * b.cy[i] +
                       b.cz[i] * b.cz[i];
            m = std::max(m, v);
        }
        best = std::max(best, std::sqrt(s) * std::sqrt(m));
    }
    return best;
}

double quantity_B(const FlowHistory& h, const Cylinder& c) {
    c.validate(h);
    auto idx = window_snapshots(h, c);
    std::vector<double> t, v;
    for (int k : idx) {
        t.push_back(h.snapshots[k].t);
        double w = besov_norm_b(h.snapshots[k], c.R * c.R);
        v.push_back(std::pow(w, 6.0));
    }
    double l6 = std::pow(
        window_time_integral(t, v, c.t0 - c.R * c.R, c.t0), 1.0 / 6.0);
    return std::pow(c.R, -1.0 / 3.0) * l6;
}

CylinderQuantities compute_quantities(const FlowHistory& h, const Cylinder& c,
                                      const QuantityParams& prm) {
    CylinderQuantities out;
    out.p = prm.p;
    out.q = prm.q;
    out.gamma_exp = prm.gamma_exp;
    out.alpha = prm.alpha;
    out.beta = prm.beta;
    out.A = quantity_A(h, c);
    out.E = quantity_E(h, c);
    out.C = quantity_C(h, c);
    out.D = quantity_D(h, c);
    out.script_E = out.A + out.E + out.D;
    out.G = quantity_G(h, c, prm.p, prm.q, prm.gamma_exp);
    out.omega = 1.0 / std::log(std::log(100.0 / c.R));
    out.G_alpha = out.G * std::pow(out.omega, prm.alpha);
    out.B_besov = prm.with_besov ? quantity_B(h, c) : 0.0;
    return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "t0,x03,R,omega,A,E,C,D,script_E,G,G_alpha,B\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                      "%.17g,%.17g,%.17g\n",
                      r.cyl.t0, r.cyl.x03, r.cyl.R, r.q.omega, r.q.A, r.q.E,
                      r.q.C, r.q.D, r.q.script_E, r.q.G, r.q.G_alpha,
                      r.q.B_besov);
        out << buf;
    }
}

void write_sweep_json(const std::vector<SweepRow>& rows,
                      const QuantityParams& prm, std::ostream& out) {
    nlohmann::json j;
    j["params"] = {{"p", prm.p},
                   {"q", prm.q},
                   {"gamma", prm.gamma_exp},
                   {"alpha", prm.alpha},
                   {"beta", prm.beta}};
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"t0", r.cyl.t0},
                             {"x03", r.cyl.x03},
                             {"R", r.cyl.R},
                             {"omega", r.q.omega},
                             {"A", r.q.A},
                             {"E", r.q.E},
                             {"C", r.q.C},
                             {"D", r.q.D},
                             {"script_E", r.q.script_E},
                             {"G", r.q.G},
                             {"G_alpha", r.q.G_alpha},
                             {"B", r.q.B_besov}});
    }
    out << j.dump(2) << "\n";
}

}  // namespace axilab
