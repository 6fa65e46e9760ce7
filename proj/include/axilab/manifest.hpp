#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "axilab/oscillation.hpp"
#include "axilab/solver.hpp"

namespace axilab {

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain key = value run description; '#' starts a comment.  Parameter
// couplings are enforced at parse time with the violated relation named in
// the error message.
struct RunManifest {
    // scenario
    Scenario scenario;
    SolverConfig solver;

    // cylinder sweep: every x03 crossed with every R, at time t0
    std::vector<double> sweep_x03{0.0};
    std::vector<double> sweep_R{0.25, 0.125, 0.0625};
    double t0 = -1.0;  // < 0: use the end of the history

    // criteria parameters
    double p = 10.0 / 3.0;
    double q = 10.0 / 3.0;
    double gamma_exp = 0.5;
    double alpha = 0.5 * 0.0625 / 7.0;  // gamma beta/(6+2 gamma) at defaults
    double beta = 0.0625;
    double tau = 0.5;
    double G_bound = 10.0;
    double K = 10.0;
    double N7 = 0.1;

    // decay fit
    double decay_R0 = 0.25;
    int decay_levels = 3;

    std::uint64_t seed = 0x5EED;
    int corpus_count = 200;

    QuantityParams quantity_params() const;
    DecayParams decay_params() const;

    static RunManifest parse(std::istream& in);
    static RunManifest parse_file(const std::string& path);
};

}  // namespace axilab
