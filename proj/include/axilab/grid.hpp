#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace axilab {

// Uniform node-centered grid on {0 <= r <= r_max, z_min <= z <= z_max}.
// Nodes are (r_i, z_j) = (i*dr, z_min + j*dz), i = 0..Nr, j = 0..Nz, so the
// axis r = 0 is the i = 0 column.
struct AxiGrid {
    int Nr = 0;
    int Nz = 0;
    double r_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    double dr = 0.0;
    double dz = 0.0;

    int nr_nodes() const { return Nr + 1; }
    int nz_nodes() const { return Nz + 1; }
    double r(int i) const { return i * dr; }
    double z(int j) const { return z_min + j * dz; }

    bool operator==(const AxiGrid&) const = default;
};

AxiGrid make_grid(int Nr, int Nz, double r_max, double z_min, double z_max);

// Behavior of a scalar profile under the reflection r -> -r.
enum class Parity { Even, Odd };

class Field2D {
public:
    Field2D() = default;
    Field2D(const AxiGrid& grid, Parity parity, double fill = 0.0);

    const AxiGrid& grid() const { return grid_; }
    Parity parity() const { return parity_; }

    double& operator()(int i, int j) { return values_[idx(i, j)]; }
    double operator()(int i, int j) const { return values_[idx(i, j)]; }

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    // Ghost value at r = -dr reconstructed by parity.
    double ghost_r(int j) const {
        double v = (*this)(1, j);
        return parity_ == Parity::Odd ? -v : v;
    }

    // Odd fields vanish on the axis; enforce exactly.
    void enforce_axis_parity();

    double max_abs() const;
    bool all_finite() const;

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * (grid_.Nz + 1) + j;
    }

private:
    AxiGrid grid_;
    Parity parity_ = Parity::Even;
    std::vector<double> values_;
};

enum class LaplacianMode {
    Full,   // d_rr + (1/r) d_r + d_zz
    Swirl,  // full - 1/r^2, acts on odd profiles
    Gamma   // d_rr - (1/r) d_r + d_zz, acts on even profiles vanishing on axis
};

// Second-order centered stencils; 1/r terms closed at the axis by parity
// ghosts, one-sided second-order stencils at the outer boundaries.
Field2D axi_laplacian(const Field2D& f, LaplacianMode mode);

// Discrete d_r ur + ur/r + d_z u3; axis value of ur/r taken as d_r ur(0,.)
Field2D divergence(const Field2D& ur, const Field2D& u3);

// Centered first derivatives (parity ghost at the axis, one-sided at the
// outer boundaries).
Field2D d_r(const Field2D& f);
Field2D d_z(const Field2D& f);

struct FlowState {
    double t = 0.0;
    Field2D ur;      // odd
    Field2D utheta;  // odd
    Field2D u3;      // even
    Field2D pi;      // even
    Field2D gamma;   // even, = r * utheta

    static FlowState zero(const AxiGrid& grid, double t = 0.0);

    // Recompute gamma = r * utheta node by node.
    void sync_gamma();
    bool all_finite() const;
};

// Kinetic energy integral  2*pi * Int |u|^2 r dr dz  by trapezoid weights.
double kinetic_energy(const FlowState& s);

// Flat CSV: one header line "Nr,Nz,r_max,z_min,z_max,parity" then row-major
// values (one row of the grid per line).
void write_field_csv(const Field2D& f, std::ostream& out);
Field2D read_field_csv(std::istream& in);
void write_field_csv(const Field2D& f, const std::string& path);
Field2D read_field_csv_file(const std::string& path);

// Compact binary: 5 little-endian doubles Nr,Nz,r_max,z_min,z_max, one byte
// parity, then row-major 64-bit floats.
void write_field_binary(const Field2D& f, std::ostream& out);
Field2D read_field_binary(std::istream& in);
void write_field_binary(const Field2D& f, const std::string& path);
Field2D read_field_binary_file(const std::string& path);

}  // namespace axilab
