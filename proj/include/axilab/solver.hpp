#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "axilab/grid.hpp"

namespace axilab {

enum class OuterBC {
    NoSlip,    // all velocity components 0 on r = r_max and z in {z_min, z_max}
    Fixed,     // boundary nodes held at their initial values
    Analytic,  // boundary nodes follow the scenario's closed-form solution
};

enum class AdvectionScheme { Upwind, Centered };

struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BlowUp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic initial conditions; the kinds with a closed-form evolution double
// as exact references for boundary values and error measurement.
struct InitialCondition {
    enum class Kind { Zero, RigidRotation, OseenSwirl, GaussianSwirl, PoloidalBump };
    Kind kind = Kind::Zero;
    double amp = 1.0;
    double width = 0.25;
    double r0 = 0.5;
    double z0 = 0.0;
    double t_offset = 1.0;  // Oseen diffusion-time origin

    bool has_exact() const {
        return kind == Kind::Zero || kind == Kind::RigidRotation ||
               kind == Kind::OseenSwirl;
    }
    double ur(double r, double z, double t) const;
    double utheta(double r, double z, double t) const;
    double u3(double r, double z, double t) const;
    double gamma(double r, double z, double t) const;

    static InitialCondition parse(const std::string& name);
    std::string name() const;
};

// Per-equation analytic forcing, for manufactured-solution verification only.
struct Forcing {
    using Fn = std::function<double(double r, double z, double t)>;
    Fn fur, futheta, fu3;
    bool any() const { return bool(fur) || bool(futheta) || bool(fu3); }
};

struct SolverConfig {
    double dt = 0.0;
    double nu = 1.0;  // unit viscosity
    OuterBC bc_outer = OuterBC::NoSlip;
    double cfl_limit = 0.9;
    AdvectionScheme advection = AdvectionScheme::Upwind;
    std::optional<InitialCondition> exact;  // boundary source for Analytic bc
    Forcing forcing;

    void validate(const AxiGrid& g) const;  // diffusive CFL bound
};

struct Scenario {
    std::string name = "zero";
    InitialCondition ic;
    int Nr = 64, Nz = 64;
    double r_max = 1.0, z_min = -0.5, z_max = 0.5;
    double duration = 0.01;
    int snapshot_every = 10;  // cadence, in steps
};

// Exact solver for the discrete pressure Poisson problem L phi = rhs with
// L = div o grad (centered stencils, parity ghosts at the axis, reflection
// ghosts at the outer boundaries). Diagonalized by a cosine transform in z;
// one dense factorization per z-mode, reused across steps.
class PressureProjector {
public:
    explicit PressureProjector(const AxiGrid& g);

    // Divergence with the projector's ghost closures; the quantity driven to
    // the solve residual by project().
    Field2D solver_divergence(const Field2D& ur, const Field2D& u3) const;

    // Projects (ur, u3) to discrete divergence-free, writes the correction
    // potential into phi. Returns max |divergence| after correction.
    double project(Field2D& ur, Field2D& u3, Field2D& phi, double dt) const;

private:
    AxiGrid g_;
    Eigen::MatrixXd dct_;      // coefficients -> values, cos(pi k j / Nz)
    Eigen::MatrixXd dct_inv_;  // values -> coefficients
    std::vector<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> modes_;
};

// Advances the axisymmetric system one step: SSP-RK2 for advection,
// diffusion and swirl coupling, then pressure projection.
FlowState step(const FlowState& state, const SolverConfig& cfg,
               const PressureProjector& proj);

struct GammaBC {
    // Outer boundary values for the advected-diffused swirl quantity; axis
    // value is pinned to zero always. Unset = hold boundary values fixed.
    std::function<double(double r, double z, double t)> exact;
};

Field2D step_gamma(const Field2D& gamma, const Field2D& br, const Field2D& bz,
                   const SolverConfig& cfg, double t, const GammaBC& bc = {});

struct RunLogLine {
    long step = 0;
    double t = 0.0;
    double energy = 0.0;
    double max_div = 0.0;  // solver divergence after projection
    double max_gamma = 0.0;
    double gamma_consistency = 0.0;  // Linf gap between evolved Gamma and r*utheta
};

struct FlowHistory {
    std::vector<FlowState> snapshots;
    double cadence_dt = 0.0;

    double t_begin() const { return snapshots.front().t; }
    double t_end() const { return snapshots.back().t; }
    const AxiGrid& grid() const { return snapshots.front().ur.grid(); }
};

struct RunResult {
    FlowHistory history;
    std::vector<RunLogLine> log;
    bool aborted = false;       // non-finite values encountered
    double last_valid_t = 0.0;  // time of the last finite state
};

constexpr std::size_t kMaxSnapshots = 4096;

RunResult run_scenario(const Scenario& scn, SolverConfig cfg);

FlowState initial_state(const Scenario& scn);

}  // namespace axilab
