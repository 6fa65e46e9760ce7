#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "axilab/solver.hpp"

namespace axilab {

// Parabolic cylinder Q = B((0, x03), R) x (t0 - R^2, t0], centered on the
// axis.
struct Cylinder {
    double x03 = 0.0;
    double t0 = 0.0;
    double R = 0.0;

    void validate(const AxiGrid& g) const;             // ball inside domain
    void validate(const FlowHistory& h) const;         // + time slab coverage
};

struct QuantityParams {
    double p = 10.0 / 3.0;
    double q = 10.0 / 3.0;
    double gamma_exp = 0.5;  // scaling gap: 3/p + 2/q = 2 - gamma
    double alpha = 0.5 / (48.0 + 16.0 * 0.5);
    double beta = 1.0 / 16.0;
    bool with_besov = false;  // B is costly; off unless requested
};

struct CylinderQuantities {
    double A = 0.0, E = 0.0, C = 0.0, D = 0.0, script_E = 0.0;
    double G = 0.0, G_alpha = 0.0, B_besov = 0.0, omega = 0.0;
    double p = 0.0, q = 0.0, gamma_exp = 0.0, alpha = 0.0, beta = 0.0;
};

// 2*pi * Int_{r^2 + (z - x03)^2 <= R^2} |f|^power r dr dz.  Midpoint rule on
// full cells; cells cut by the sphere use the exact circle-rectangle overlap
// area times 2*pi*r at the clipped cell centroid.
double ball_integral(const Field2D& f, double x03, double R, double power);

// Area of the disc {(u-cx)^2 + (v-cy)^2 <= R^2} intersected with the
// rectangle [x1,x2] x [y1,y2] (closed form; exposed for testing).
double disc_rect_overlap(double cx, double cy, double R, double x1, double x2,
                         double y1, double y2);

double quantity_A(const FlowHistory& h, const Cylinder& c);
double quantity_E(const FlowHistory& h, const Cylinder& c);
double quantity_C(const FlowHistory& h, const Cylinder& c);
double quantity_D(const FlowHistory& h, const Cylinder& c);
double quantity_G(const FlowHistory& h, const Cylinder& c, double p, double q,
                  double gamma_exp);

double weight_omega(double R);                       // (ln ln(100/R))^-1
double g_alpha(double G, double R, double alpha);    // G * omega^alpha

// Heat-kernel characterization of the (-1)-regularity sup-norm of the
// poloidal field b, zero-extended: sup_{0<s<=S} sqrt(s) ||e^{s Lap} b||_inf.
double besov_norm_b(const FlowState& state, double S);

double quantity_B(const FlowHistory& h, const Cylinder& c);

CylinderQuantities compute_quantities(const FlowHistory& h, const Cylinder& c,
                                      const QuantityParams& prm);

struct SweepRow {
    Cylinder cyl;
    CylinderQuantities q;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_json(const std::vector<SweepRow>& rows,
                      const QuantityParams& prm, std::ostream& out);

}  // namespace axilab
