#pragma once

#include <iosfwd>
#include <vector>

#include "axilab/quadrature.hpp"

namespace axilab {

// Oscillation of Gamma over Q(z0,R) minus the axis (nodes with r >= dr).
struct OscillationRecord {
    double R = 0.0;
    double m_R = 0.0;
    double M_R = 0.0;
    double J_R = 0.0;
    double axis_constant_a = 0.0;  // 2 max(M, -m)/J; >= 1 when J > 0
    bool degenerate = false;       // J_R == 0
};

struct DecayParams {
    double tau = 0.5;        // in (0,1)
    double N7 = 0.1;         // in (0,1)
    double c_fit = 0.0;      // fitted decay rate
    double K = 0.0;          // empirical standing-assumption constant
    double beta = 1.0 / 16;  // in (0, 1/8)
};

OscillationRecord oscillation(const FlowHistory& h, const Cylinder& c);

// h = 2(M - Gamma)/J on the larger branch (or the mirrored one), in [0,2]
// off-axis; axis column carries the constant a.
Field2D normalized_h(const Field2D& gamma, const OscillationRecord& rec);

struct LocalMaxReport {
    double sup_half = 0.0;  // sup |Gamma| over Q(R/2)\S
    double A = 0.0;
    double gamma_l2 = 0.0;  // ||Gamma||_{L^2(Q(R))}
    double N_emp = 0.0;
    bool degenerate = false;
};
LocalMaxReport verify_local_max(const FlowHistory& h, const Cylinder& c);

struct WeakHarnackReport {
    double integral = 0.0;  // worst -int ln h zeta_R^2 dx over eligible times
    double A = 0.0;
    double bound = 0.0;  // (1 + A)^3
    double ratio = 0.0;
    bool clamped = false;  // h hit the log clamp where zeta > 0
    bool degenerate = false;
};
WeakHarnackReport verify_weak_harnack(const FlowHistory& h, const Cylinder& c);

struct StrongHarnackReport {
    double inf_h = 0.0;  // over Q(R/4)\S
    double lambda = 0.0;
    double floor = 0.0;  // lambda/2
    double margin = 0.0;
    double N7_max = 0.0;  // largest N7 for which the floor holds here
    bool degenerate = false;
};
StrongHarnackReport strong_harnack_floor(const FlowHistory& h,
                                         const Cylinder& c,
                                         const DecayParams& dp);

struct LadderLevel {
    int j = 0;
    double R = 0.0;
    double m = 0.0, M = 0.0, J = 0.0;
    double contraction = 1.0;    // J_j / J_{j-1}; 1 at the top level
    double lambda_floor = 0.0;   // lambda(R_j)/2
    double inf_h = 0.0;          // NaN when the quarter cylinder is too small
    bool degenerate = false;
};

std::vector<LadderLevel> decay_ladder(const FlowHistory& h, double x03,
                                      double t0, double R0, int levels,
                                      const DecayParams& dp = {});

// Least-squares slope of ln J against -(ln(100/R))^tau over the
// non-degenerate levels (J >= 1e-12); needs at least 3 of them.
DecayParams fit_decay_exponent(const std::vector<LadderLevel>& ladder,
                               double tau);

// Compounded contraction bound prod(1 - lambda(R_j)/4) dominates the measured
// J ladder on every level where the floor held.
bool ladder_consistent(const std::vector<LadderLevel>& ladder);

struct ShellDatum {
    double r = 0.0;
    double sup_gamma = 0.0;
    double envelope = 0.0;
};

struct EnvelopeReport {
    double tau = 0.0;
    double c_fit = 0.0;
    double N_calibrated = 0.0;
    double empirical_K = 0.0;
    std::vector<ShellDatum> shells;
    bool pass = false;
    bool degenerate = false;  // Gamma vanishes on every probed shell
};

// Near-axis shell suprema of |Gamma| against N e^{-c |ln r|^tau}, with N
// calibrated at the outermost shell; probes supply the standing-assumption
// measurement K = max A(z0,R) omega(R)^beta.
EnvelopeReport decay_envelope_check(const FlowHistory& h,
                                    const DecayParams& dp,
                                    const std::vector<Cylinder>& probes);

void write_ladder_csv(const std::vector<LadderLevel>& ladder,
                      std::ostream& out);
void write_decay_json(const EnvelopeReport& rep, const DecayParams& dp,
                      bool ladder_ok, std::ostream& out);

}  // namespace axilab
