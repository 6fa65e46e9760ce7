#include "axilab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace axilab {

AxiGrid make_grid(int Nr, int Nz, double r_max, double z_min, double z_max) {
    if (Nr < 4 || Nz < 4)
        throw std::invalid_argument("make_grid: need Nr, Nz >= 4");
    if (!(r_max > 0.0))
        throw std::invalid_argument("make_grid: r_max must be positive");
    if (!(z_min < z_max))
        throw std::invalid_argument("make_grid: need z_min < z_max");
    AxiGrid g;
    g.Nr = Nr;
    g.Nz = Nz;
    g.r_max = r_max;
    g.z_min = z_min;
    g.z_max = z_max;
    g.dr = r_max / Nr;
    g.dz = (z_max - z_min) / Nz;
    return g;
}

Field2D::Field2D(const AxiGrid& grid, Parity parity, double fill)
    : grid_(grid),
      parity_(parity),
      values_(static_cast<std::size_t>(grid.nr_nodes()) * grid.nz_nodes(), fill) {
    if (parity_ == Parity::Odd) enforce_axis_parity();
}

void Field2D::enforce_axis_parity() {
    if (parity_ != Parity::Odd) return;
    for (int j = 0; j <= grid_.Nz; ++j) (*this)(0, j) = 0.0;
}

double Field2D::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool Field2D::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Centered second derivative in r with parity ghost at the axis and a
// second-order one-sided stencil at r_max (exact on quadratics).
double frr(const Field2D& f, int i, int j) {
    const double dr2 = f.grid().dr * f.grid().dr;
    const int Nr = f.grid().Nr;
    if (i == 0) return (f(1, j) - 2.0 * f(0, j) + f.ghost_r(j)) / dr2;
    if (i == Nr)
        return (2.0 * f(Nr, j) - 5.0 * f(Nr - 1, j) + 4.0 * f(Nr - 2, j) -
                f(Nr - 3, j)) /
               dr2;
    return (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / dr2;
}

double fr(const Field2D& f, int i, int j) {
    const double dr = f.grid().dr;
    const int Nr = f.grid().Nr;
    if (i == 0) return (f(1, j) - f.ghost_r(j)) / (2.0 * dr);
    if (i == Nr)
        return (3.0 * f(Nr, j) - 4.0 * f(Nr - 1, j) + f(Nr - 2, j)) / (2.0 * dr);
    return (f(i + 1, j) - f(i - 1, j)) / (2.0 * dr);
}

double fzz(const Field2D& f, int i, int j) {
    const double dz2 = f.grid().dz * f.grid().dz;
    const int Nz = f.grid().Nz;
    if (j == 0)
        return (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) / dz2;
    if (j == Nz)
        return (2.0 * f(i, Nz) - 5.0 * f(i, Nz - 1) + 4.0 * f(i, Nz - 2) -
                f(i, Nz - 3)) /
               dz2;
    return (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / dz2;
}

double fz(const Field2D& f, int i, int j) {
    const double dz = f.grid().dz;
    const int Nz = f.grid().Nz;
    if (j == 0) return (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * dz);
    if (j == Nz)
        return (3.0 * f(i, Nz) - 4.0 * f(i, Nz - 1) + f(i, Nz - 2)) / (2.0 * dz);
    return (f(i, j + 1) - f(i, j - 1)) / (2.0 * dz);
}

}  // namespace

Field2D axi_laplacian(const Field2D& f, LaplacianMode mode) {
    if (mode == LaplacianMode::Swirl && f.parity() != Parity::Odd)
        throw std::invalid_argument("axi_laplacian: swirl mode needs an odd field");
    if (mode == LaplacianMode::Gamma && f.parity() != Parity::Even)
        throw std::invalid_argument("axi_laplacian: gamma mode needs an even field");

    const AxiGrid& g = f.grid();
    Field2D out(g, mode == LaplacianMode::Swirl ? Parity::Odd : f.parity());
    for (int i = 0; i <= g.Nr; ++i) {
        const double r = g.r(i);
        for (int j = 0; j <= g.Nz; ++j) {
            double v;
            if (i == 0) {
                switch (mode) {
                    case LaplacianMode::Full:
                        // (1/r) d_r -> d_rr for even profiles; odd Laplacians
                        // are odd and vanish on the axis.
                        v = (f.parity() == Parity::Even)
                                ? 2.0 * frr(f, 0, j) + fzz(f, 0, j)
                                : 0.0;
                        break;
                    case LaplacianMode::Swirl:
                        v = 0.0;
                        break;
                    case LaplacianMode::Gamma:
                        // d_rr and (1/r) d_r cancel in the limit.
                        v = fzz(f, 0, j);
                        break;
                }
            } else {
                const double lap = frr(f, i, j) + fr(f, i, j) / r + fzz(f, i, j);
                switch (mode) {
                    case LaplacianMode::Full:
                        v = lap;
                        break;
                    case LaplacianMode::Swirl:
                        v = lap - f(i, j) / (r * r);
                        break;
                    case LaplacianMode::Gamma:
                        v = frr(f, i, j) - fr(f, i, j) / r + fzz(f, i, j);
                        break;
                }
            }
            out(i, j) = v;
        }
    }
    return out;
}

Field2D divergence(const Field2D& ur, const Field2D& u3) {
    if (ur.parity() != Parity::Odd)
        throw std::invalid_argument("divergence: ur must be odd");
    if (u3.parity() != Parity::Even)
        throw std::invalid_argument("divergence: u3 must be even");
    const AxiGrid& g = ur.grid();
    Field2D out(g, Parity::Even);
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j = 0; j <= g.Nz; ++j) {
            const double durdr = fr(ur, i, j);
            const double metric = (i == 0) ? durdr : ur(i, j) / g.r(i);
            out(i, j) = durdr + metric + fz(u3, i, j);
        }
    }
    return out;
}

Field2D d_r(const Field2D& f) {
    Field2D out(f.grid(),
                f.parity() == Parity::Odd ? Parity::Even : Parity::Odd);
    for (int i = 0; i <= f.grid().Nr; ++i)
        for (int j = 0; j <= f.grid().Nz; ++j) out(i, j) = fr(f, i, j);
    if (out.parity() == Parity::Odd) out.enforce_axis_parity();
    return out;
}

Field2D d_z(const Field2D& f) {
    Field2D out(f.grid(), f.parity());
    for (int i = 0; i <= f.grid().Nr; ++i)
        for (int j = 0; j <= f.grid().Nz; ++j) out(i, j) = fz(f, i, j);
    return out;
}

FlowState FlowState::zero(const AxiGrid& grid, double t) {
    FlowState s;
    s.t = t;
    s.ur = Field2D(grid, Parity::Odd);
    s.utheta = Field2D(grid, Parity::Odd);
    s.u3 = Field2D(grid, Parity::Even);
    s.pi = Field2D(grid, Parity::Even);
    s.gamma = Field2D(grid, Parity::Even);
    return s;
}

void FlowState::sync_gamma() {
    const AxiGrid& g = ur.grid();
    for (int i = 0; i <= g.Nr; ++i)
        for (int j = 0; j <= g.Nz; ++j) gamma(i, j) = g.r(i) * utheta(i, j);
}

bool FlowState::all_finite() const {
    return ur.all_finite() && utheta.all_finite() && u3.all_finite() &&
           pi.all_finite() && gamma.all_finite();
}

double kinetic_energy(const FlowState& s) {
    const AxiGrid& g = s.ur.grid();
    double sum = 0.0;
    for (int i = 0; i <= g.Nr; ++i) {
        const double wr = (i == 0 || i == g.Nr) ? 0.5 : 1.0;
        const double r = g.r(i);
        for (int j = 0; j <= g.Nz; ++j) {
            const double wz = (j == 0 || j == g.Nz) ? 0.5 : 1.0;
            const double u2 = s.ur(i, j) * s.ur(i, j) +
                              s.utheta(i, j) * s.utheta(i, j) +
                              s.u3(i, j) * s.u3(i, j);
            sum += wr * wz * u2 * r;
        }
    }
    return 2.0 * M_PI * sum * g.dr * g.dz;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_field_csv(const Field2D& f, std::ostream& out) {
    const AxiGrid& g = f.grid();
    out << g.Nr << ',' << g.Nz << ',' << fmt(g.r_max) << ',' << fmt(g.z_min)
        << ',' << fmt(g.z_max) << ','
        << (f.parity() == Parity::Odd ? "odd" : "even") << '\n';
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j = 0; j <= g.Nz; ++j) {
            if (j) out << ',';
            out << fmt(f(i, j));
        }
        out << '\n';
    }
}

Field2D read_field_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("field csv: missing header");
    std::istringstream hs(header);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(hs, tok, ',')) parts.push_back(tok);
    if (parts.size() != 6) throw std::runtime_error("field csv: bad header");
    AxiGrid g = make_grid(std::stoi(parts[0]), std::stoi(parts[1]),
                          std::stod(parts[2]), std::stod(parts[3]),
                          std::stod(parts[4]));
    Parity p = parts[5] == "odd" ? Parity::Odd : Parity::Even;
    Field2D f(g, p);
    for (int i = 0; i <= g.Nr; ++i) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("field csv: truncated data");
        std::istringstream ls(line);
        for (int j = 0; j <= g.Nz; ++j) {
            std::string cell;
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("field csv: short row");
            f(i, j) = std::stod(cell);
        }
    }
    return f;
}

void write_field_csv(const Field2D& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field_csv(f, out);
}

Field2D read_field_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_field_csv(in);
}

void write_field_binary(const Field2D& f, std::ostream& out) {
    const AxiGrid& g = f.grid();
    const double header[5] = {static_cast<double>(g.Nr),
                              static_cast<double>(g.Nz), g.r_max, g.z_min,
                              g.z_max};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    const char p = f.parity() == Parity::Odd ? 1 : 0;
    out.write(&p, 1);
    out.write(reinterpret_cast<const char*>(f.data().data()),
              static_cast<std::streamsize>(f.data().size() * sizeof(double)));
}

Field2D read_field_binary(std::istream& in) {
    double header[5];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    char p = 0;
    in.read(&p, 1);
    if (!in) throw std::runtime_error("field binary: truncated header");
    AxiGrid g = make_grid(static_cast<int>(header[0]), static_cast<int>(header[1]),
                          header[2], header[3], header[4]);
    Field2D f(g, p ? Parity::Odd : Parity::Even);
    in.read(reinterpret_cast<char*>(f.data().data()),
            static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    if (!in) throw std::runtime_error("field binary: truncated data");
    return f;
}

void write_field_binary(const Field2D& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field_binary(f, out);
}

Field2D read_field_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_field_binary(in);
}

}  // namespace axilab
