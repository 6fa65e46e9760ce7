#include "axilab/solver.hpp"

#include <cmath>

namespace axilab {

double InitialCondition::ur(double r, double z, double t) const {
    (void)t;
    switch (kind) {
        case Kind::PoloidalBump: {
            const double e = std::exp(-((r - r0) * (r - r0) + (z - z0) * (z - z0)) /
                                      (width * width));
            return 2.0 * amp * r * (z - z0) / (width * width) * e;
        }
        default:
            return 0.0;
    }
}

double InitialCondition::utheta(double r, double z, double t) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::RigidRotation:
            return amp * r;
        case Kind::OseenSwirl: {
            const double s = 4.0 * (t + t_offset);
            if (r < 1e-6) return amp * (r / s - r * r * r / (2.0 * s * s));
            return amp * (1.0 - std::exp(-r * r / s)) / r;
        }
        case Kind::GaussianSwirl:
            return amp * r *
                   std::exp(-(r * r + (z - z0) * (z - z0)) / (width * width));
        case Kind::PoloidalBump:
            return 0.0;
    }
    return 0.0;
}

double InitialCondition::u3(double r, double z, double t) const {
    (void)t;
    switch (kind) {
        case Kind::PoloidalBump: {
            const double e = std::exp(-((r - r0) * (r - r0) + (z - z0) * (z - z0)) /
                                      (width * width));
            return amp * e * (2.0 - 2.0 * r * (r - r0) / (width * width));
        }
        default:
            return 0.0;
    }
}

double InitialCondition::gamma(double r, double z, double t) const {
    if (kind == Kind::OseenSwirl) {
        const double s = 4.0 * (t + t_offset);
        return amp * (1.0 - std::exp(-r * r / s));
    }
    return r * utheta(r, z, t);
}

InitialCondition InitialCondition::parse(const std::string& name) {
    InitialCondition ic;
    if (name == "zero")
        ic.kind = Kind::Zero;
    else if (name == "rigid-rotation")
        ic.kind = Kind::RigidRotation;
    else if (name == "oseen-swirl")
        ic.kind = Kind::OseenSwirl;
    else if (name == "gaussian-swirl")
        ic.kind = Kind::GaussianSwirl;
    else if (name == "poloidal-bump")
        ic.kind = Kind::PoloidalBump;
    else
        throw std::invalid_argument("unknown initial condition: " + name);
    return ic;
}

std::string InitialCondition::name() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::RigidRotation: return "rigid-rotation";
        case Kind::OseenSwirl: return "oseen-swirl";
        case Kind::GaussianSwirl: return "gaussian-swirl";
        case Kind::PoloidalBump: return "poloidal-bump";
    }
    return "?";
}

void SolverConfig::validate(const AxiGrid& g) const {
    if (!(dt > 0.0)) throw CflViolation("dt must be positive");
    const double h = std::min(g.dr, g.dz);
    const double bound = cfl_limit * h * h / (4.0 * nu);
    if (dt > bound * (1.0 + 1e-12))
        throw CflViolation("dt exceeds diffusive CFL bound");
}

// ---------------------------------------------------------------------------
// Pressure projection

PressureProjector::PressureProjector(const AxiGrid& g) : g_(g) {
    const int nr = g.nr_nodes();
    const int nz = g.nz_nodes();
    const double dr = g.dr, dz = g.dz;

    dct_.resize(nz, nz);
    for (int j = 0; j < nz; ++j)
        for (int k = 0; k < nz; ++k)
            dct_(j, k) = std::cos(M_PI * k * j / g.Nz);
    dct_inv_ = dct_.inverse();

    // r-part of div o grad by columns: phi ghosts are even at the axis and
    // reflected at r_max, so grad phi vanishes at both ends.
    Eigen::MatrixXd Lr = Eigen::MatrixXd::Zero(nr, nr);
    Eigen::VectorXd phi(nr), v(nr), w(nr);
    for (int c = 0; c < nr; ++c) {
        phi.setZero();
        phi[c] = 1.0;
        v[0] = 0.0;
        for (int i = 1; i < nr - 1; ++i) v[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * dr);
        v[nr - 1] = 0.0;
        w[0] = 2.0 * v[1] / dr;
        for (int i = 1; i < nr - 1; ++i)
            w[i] = (v[i + 1] - v[i - 1]) / (2.0 * dr) + v[i] / g.r(i);
        w[nr - 1] = -v[nr - 2] / dr;
        Lr.col(c) = w;
    }

    modes_.reserve(nz);
    Eigen::MatrixXd A(nr, nr);
    for (int k = 0; k < nz; ++k) {
        const double th = M_PI * k / g.Nz;
        const double lam = (std::cos(2.0 * th) - 1.0) / (2.0 * dz * dz);
        A = Lr;
        A.diagonal().array() += lam;
        modes_.emplace_back(A);
    }
}

Field2D PressureProjector::solver_divergence(const Field2D& ur,
                                             const Field2D& u3) const {
    const AxiGrid& g = g_;
    Field2D out(g, Parity::Even);
    const double dr = g.dr, dz = g.dz;
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j = 0; j <= g.Nz; ++j) {
            double dpart;
            if (i == 0)
                dpart = 2.0 * ur(1, j) / dr;
            else if (i == g.Nr)
                dpart = (ur(g.Nr, j) - ur(g.Nr - 1, j)) / dr + ur(g.Nr, j) / g.r(i);
            else
                dpart = (ur(i + 1, j) - ur(i - 1, j)) / (2.0 * dr) + ur(i, j) / g.r(i);
            double zpart;
            if (j == 0)
                zpart = (u3(i, 1) - u3(i, 0)) / dz;
            else if (j == g.Nz)
                zpart = (u3(i, g.Nz) - u3(i, g.Nz - 1)) / dz;
            else
                zpart = (u3(i, j + 1) - u3(i, j - 1)) / (2.0 * dz);
            out(i, j) = dpart + zpart;
        }
    }
    return out;
}

double PressureProjector::project(Field2D& ur, Field2D& u3, Field2D& phi,
                                  double dt) const {
    const AxiGrid& g = g_;
    const int nr = g.nr_nodes(), nz = g.nz_nodes();

    const Field2D div0 = solver_divergence(ur, u3);
    Eigen::MatrixXd R(nr, nz);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) R(i, j) = div0(i, j);

    Eigen::MatrixXd Rhat = R * dct_inv_.transpose();
    Eigen::MatrixXd Phihat(nr, nz);
    for (int k = 0; k < nz; ++k) Phihat.col(k) = modes_[k].solve(Rhat.col(k));
    Eigen::MatrixXd Phi = Phihat * dct_.transpose();

    for (int i = 1; i < nr - 1; ++i)
        for (int j = 0; j < nz; ++j)
            ur(i, j) -= (Phi(i + 1, j) - Phi(i - 1, j)) / (2.0 * g.dr);
    for (int i = 0; i < nr; ++i)
        for (int j = 1; j < nz - 1; ++j)
            u3(i, j) -= (Phi(i, j + 1) - Phi(i, j - 1)) / (2.0 * g.dz);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) phi(i, j) = Phi(i, j) / dt;

    return solver_divergence(ur, u3).max_abs();
}

// ---------------------------------------------------------------------------
// Time stepping

namespace {

void apply_velocity_bc(FlowState& s, const SolverConfig& cfg, double t) {
    const AxiGrid& g = s.ur.grid();
    auto bval = [&](Field2D& f, double (InitialCondition::*comp)(double, double,
                                                                 double) const,
                    int i, int j) {
        switch (cfg.bc_outer) {
            case OuterBC::NoSlip:
                f(i, j) = 0.0;
                break;
            case OuterBC::Fixed:
                f(i, j) = cfg.exact ? ((*cfg.exact).*comp)(g.r(i), g.z(j), 0.0) : 0.0;
                break;
            case OuterBC::Analytic:
                f(i, j) = cfg.exact ? ((*cfg.exact).*comp)(g.r(i), g.z(j), t) : 0.0;
                break;
        }
    };
    for (int j = 0; j <= g.Nz; ++j) {
        bval(s.ur, &InitialCondition::ur, g.Nr, j);
        bval(s.utheta, &InitialCondition::utheta, g.Nr, j);
        bval(s.u3, &InitialCondition::u3, g.Nr, j);
    }
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j : {0, g.Nz}) {
            bval(s.ur, &InitialCondition::ur, i, j);
            bval(s.utheta, &InitialCondition::utheta, i, j);
            bval(s.u3, &InitialCondition::u3, i, j);
        }
    }
    s.ur.enforce_axis_parity();
    s.utheta.enforce_axis_parity();
}

// Advective derivative b . grad f at an interior or axis node.
double advect_at(const Field2D& f, const Field2D& br, const Field2D& bz, int i,
                 int j, AdvectionScheme scheme) {
    const AxiGrid& g = f.grid();
    const double vr = br(i, j), vz = bz(i, j);
    double ddr, ddz;
    if (scheme == AdvectionScheme::Upwind) {
        if (i == 0) {
            ddr = 0.0;  // vr vanishes on the axis
        } else {
            ddr = vr > 0.0 ? (f(i, j) - f(i - 1, j)) / g.dr
                           : (f(i + 1, j) - f(i, j)) / g.dr;
        }
        ddz = vz > 0.0 ? (f(i, j) - f(i, j - 1)) / g.dz
                       : (f(i, j + 1) - f(i, j)) / g.dz;
    } else {
        ddr = (i == 0) ? (f(1, j) - f.ghost_r(j)) / (2.0 * g.dr)
                       : (f(i + 1, j) - f(i - 1, j)) / (2.0 * g.dr);
        ddz = (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.dz);
    }
    return vr * ddr + vz * ddz;
}

struct Rhs {
    Field2D fur, futheta, fu3;
};

Rhs momentum_rhs(const FlowState& s, const SolverConfig& cfg, double t) {
    const AxiGrid& g = s.ur.grid();
    Rhs out{Field2D(g, Parity::Odd), Field2D(g, Parity::Odd),
            Field2D(g, Parity::Even)};
    const Field2D lap_ur = axi_laplacian(s.ur, LaplacianMode::Swirl);
    const Field2D lap_ut = axi_laplacian(s.utheta, LaplacianMode::Swirl);
    const Field2D lap_u3 = axi_laplacian(s.u3, LaplacianMode::Full);
    for (int i = 0; i < g.Nr; ++i) {
        const double r = g.r(i);
        for (int j = 1; j < g.Nz; ++j) {
            const double centrifugal =
                (i == 0) ? 0.0 : s.utheta(i, j) * s.utheta(i, j) / r;
            const double coupling =
                (i == 0) ? 0.0 : s.utheta(i, j) * s.ur(i, j) / r;
            // lagged pressure gradient: the projection then only corrects the
            // increment, so steady balances (e.g. centrifugal vs radial
            // pressure) are not disturbed near the clamped boundary nodes
            const double dpi_r =
                (i == 0) ? 0.0
                         : (s.pi(i + 1, j) - s.pi(i - 1, j)) / (2.0 * g.dr);
            const double dpi_z = (s.pi(i, j + 1) - s.pi(i, j - 1)) / (2.0 * g.dz);
            out.fur(i, j) = -advect_at(s.ur, s.ur, s.u3, i, j, cfg.advection) +
                            cfg.nu * lap_ur(i, j) + centrifugal - dpi_r;
            out.futheta(i, j) =
                -advect_at(s.utheta, s.ur, s.u3, i, j, cfg.advection) +
                cfg.nu * lap_ut(i, j) - coupling;
            out.fu3(i, j) = -advect_at(s.u3, s.ur, s.u3, i, j, cfg.advection) +
                            cfg.nu * lap_u3(i, j) - dpi_z;
            if (cfg.forcing.fur) out.fur(i, j) += cfg.forcing.fur(r, g.z(j), t);
            if (cfg.forcing.futheta)
                out.futheta(i, j) += cfg.forcing.futheta(r, g.z(j), t);
            if (cfg.forcing.fu3) out.fu3(i, j) += cfg.forcing.fu3(r, g.z(j), t);
        }
    }
    out.fur.enforce_axis_parity();
    out.futheta.enforce_axis_parity();
    return out;
}

void axpy(Field2D& dst, const Field2D& a, const Field2D& b, double coef) {
    for (std::size_t n = 0; n < dst.data().size(); ++n)
        dst.data()[n] = a.data()[n] + coef * b.data()[n];
}

void check_advective_cfl(const FlowState& s, const SolverConfig& cfg) {
    const AxiGrid& g = s.ur.grid();
    const double maxb = std::max(s.ur.max_abs(), s.u3.max_abs());
    if (cfg.dt * maxb / std::min(g.dr, g.dz) > cfg.cfl_limit)
        throw CflViolation("dt exceeds advective CFL bound");
}

}  // namespace

FlowState step(const FlowState& state, const SolverConfig& cfg,
               const PressureProjector& proj) {
    const AxiGrid& g = state.ur.grid();
    cfg.validate(g);
    check_advective_cfl(state, cfg);
    const double t = state.t, dt = cfg.dt;

    const Rhs k1 = momentum_rhs(state, cfg, t);
    FlowState s1 = state;
    axpy(s1.ur, state.ur, k1.fur, dt);
    axpy(s1.utheta, state.utheta, k1.futheta, dt);
    axpy(s1.u3, state.u3, k1.fu3, dt);
    apply_velocity_bc(s1, cfg, t + dt);
    s1.t = t + dt;

    const Rhs k2 = momentum_rhs(s1, cfg, t + dt);
    FlowState out = state;
    for (std::size_t n = 0; n < out.ur.data().size(); ++n) {
        out.ur.data()[n] =
            0.5 * (state.ur.data()[n] + s1.ur.data()[n] + dt * k2.fur.data()[n]);
        out.utheta.data()[n] = 0.5 * (state.utheta.data()[n] +
                                      s1.utheta.data()[n] + dt * k2.futheta.data()[n]);
        out.u3.data()[n] =
            0.5 * (state.u3.data()[n] + s1.u3.data()[n] + dt * k2.fu3.data()[n]);
    }
    apply_velocity_bc(out, cfg, t + dt);
    Field2D dpi(g, Parity::Even);
    proj.project(out.ur, out.u3, dpi, dt);
    for (std::size_t n = 0; n < out.pi.data().size(); ++n)
        out.pi.data()[n] = state.pi.data()[n] + dpi.data()[n];
    out.t = t + dt;
    out.sync_gamma();
    if (!out.all_finite())
        throw BlowUp("non-finite values after step (discrete blow-up)");
    return out;
}

namespace {

Field2D gamma_rhs(const Field2D& gamma, const Field2D& br, const Field2D& bz,
                  const SolverConfig& cfg) {
    const AxiGrid& g = gamma.grid();
    Field2D out(g, Parity::Even);
    const Field2D lap = axi_laplacian(gamma, LaplacianMode::Gamma);
    for (int i = 1; i < g.Nr; ++i)
        for (int j = 1; j < g.Nz; ++j)
            out(i, j) = -advect_at(gamma, br, bz, i, j, cfg.advection) + lap(i, j);
    return out;
}

void apply_gamma_bc(Field2D& gamma, const Field2D& before, const GammaBC& bc,
                    double t) {
    const AxiGrid& g = gamma.grid();
    for (int j = 0; j <= g.Nz; ++j) {
        gamma(0, j) = 0.0;
        gamma(g.Nr, j) =
            bc.exact ? bc.exact(g.r_max, g.z(j), t) : before(g.Nr, j);
    }
    for (int i = 0; i <= g.Nr; ++i)
        for (int j : {0, g.Nz})
            gamma(i, j) = bc.exact ? bc.exact(g.r(i), g.z(j), t) : before(i, j);
    for (int j = 0; j <= g.Nz; ++j) gamma(0, j) = 0.0;
}

}  // namespace

Field2D step_gamma(const Field2D& gamma, const Field2D& br, const Field2D& bz,
                   const SolverConfig& cfg, double t, const GammaBC& bc) {
    const AxiGrid& g = gamma.grid();
    cfg.validate(g);
    if (gamma.parity() != Parity::Even)
        throw std::invalid_argument("step_gamma: gamma must be even");
    const double dt = cfg.dt;

    const Field2D k1 = gamma_rhs(gamma, br, bz, cfg);
    Field2D g1(g, Parity::Even);
    axpy(g1, gamma, k1, dt);
    apply_gamma_bc(g1, gamma, bc, t + dt);

    const Field2D k2 = gamma_rhs(g1, br, bz, cfg);
    Field2D out(g, Parity::Even);
    for (std::size_t n = 0; n < out.data().size(); ++n)
        out.data()[n] =
            0.5 * (gamma.data()[n] + g1.data()[n] + dt * k2.data()[n]);
    apply_gamma_bc(out, gamma, bc, t + dt);
    if (!out.all_finite())
        throw BlowUp("non-finite Gamma after step (discrete blow-up)");
    return out;
}

FlowState initial_state(const Scenario& scn) {
    const AxiGrid g =
        make_grid(scn.Nr, scn.Nz, scn.r_max, scn.z_min, scn.z_max);
    FlowState s = FlowState::zero(g);
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j = 0; j <= g.Nz; ++j) {
            s.ur(i, j) = scn.ic.ur(g.r(i), g.z(j), 0.0);
            s.utheta(i, j) = scn.ic.utheta(g.r(i), g.z(j), 0.0);
            s.u3(i, j) = scn.ic.u3(g.r(i), g.z(j), 0.0);
        }
    }
    s.ur.enforce_axis_parity();
    s.utheta.enforce_axis_parity();
    s.sync_gamma();
    return s;
}

RunResult run_scenario(const Scenario& scn, SolverConfig cfg) {
    const AxiGrid g =
        make_grid(scn.Nr, scn.Nz, scn.r_max, scn.z_min, scn.z_max);
    if (cfg.dt <= 0.0) {
        const double h = std::min(g.dr, g.dz);
        cfg.dt = cfg.cfl_limit * h * h / (4.0 * cfg.nu);
    }
    if ((cfg.bc_outer == OuterBC::Fixed || cfg.bc_outer == OuterBC::Analytic) &&
        !cfg.exact && scn.ic.has_exact())
        cfg.exact = scn.ic;
    cfg.validate(g);

    const int cadence = std::max(1, scn.snapshot_every);
    long steps = static_cast<long>(std::ceil(scn.duration / cfg.dt - 1e-12));
    steps = ((steps + cadence - 1) / cadence) * cadence;
    if (static_cast<std::size_t>(steps / cadence + 1) > kMaxSnapshots)
        throw std::runtime_error("run_scenario: snapshot window exceeds memory budget");

    PressureProjector proj(g);
    FlowState state = initial_state(scn);
    apply_velocity_bc(state, cfg, 0.0);
    proj.project(state.ur, state.u3, state.pi, cfg.dt);
    state.sync_gamma();

    GammaBC gbc;
    if (scn.ic.has_exact()) {
        InitialCondition ic = scn.ic;
        gbc.exact = [ic](double r, double z, double t) {
            return ic.gamma(r, z, t);
        };
    }
    Field2D gamma_ev = state.gamma;

    RunResult res;
    res.history.cadence_dt = cadence * cfg.dt;
    res.history.snapshots.push_back(state);
    res.log.reserve(steps);
    res.last_valid_t = 0.0;

    for (long n = 1; n <= steps; ++n) {
        FlowState prev = state;
        try {
            state = step(prev, cfg, proj);
            gamma_ev = step_gamma(gamma_ev, prev.ur, prev.u3, cfg, prev.t, gbc);
        } catch (const BlowUp&) {
            res.aborted = true;
            break;
        }
        double cons = 0.0;
        for (std::size_t m = 0; m < gamma_ev.data().size(); ++m)
            cons = std::max(cons,
                            std::abs(gamma_ev.data()[m] - state.gamma.data()[m]));
        RunLogLine line;
        line.step = n;
        line.t = state.t;
        line.energy = kinetic_energy(state);
        line.max_div = proj.solver_divergence(state.ur, state.u3).max_abs();
        line.max_gamma = state.gamma.max_abs();
        line.gamma_consistency = cons;
        res.log.push_back(line);
        res.last_valid_t = state.t;
        if (n % cadence == 0) res.history.snapshots.push_back(state);
    }
    return res;
}

}  // namespace axilab
