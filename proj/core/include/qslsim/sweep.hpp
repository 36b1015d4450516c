#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qslsim/analysis.hpp"
#include "qslsim/bloch.hpp"
#include "qslsim/decay.hpp"
#include "qslsim/io.hpp"

namespace qsl {

// One swept parameter. Ranges follow "name=lo:hi:logN" / "name=lo:hi:linN";
// a bare "name=v" pins a single value.
struct GridAxis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
    bool log_spaced = false;
    std::vector<double> values;

    std::string spec_string() const;
};

GridAxis parse_grid_axis(const std::string& spec);

// Comma-joined axes, e.g. "lambda=1e-2:1e2:log25,gamma0=1e-2:1e2:log25".
std::vector<GridAxis> parse_grid(const std::string& spec);
std::string grid_to_string(const std::vector<GridAxis>& axes);

// "x,y,z" with |r| <= 1.
BlochVector parse_state(const std::string& spec);

// Families a sweep can instantiate: const {gamma0}, jc {lambda, gamma0},
// cos {zeta, omega}. The params map must name exactly the family's set.
DecayProfile profile_from_params(const std::string& family,
                                 const std::map<std::string, double>& params);

struct SweepSpec {
    std::string family;
    std::vector<GridAxis> axes;            // row-major, first axis slowest
    std::map<std::string, double> fixed;   // family params not on the grid
    double beta = 0.0;
    BlochVector initial;
    double eps = 0.01;
    Strategy strategy = Strategy::cool;
    std::string out_path;                  // empty writes to stdout
    int threads = 1;
};

// Flat key=value form; parsing it back reproduces the identical run.
std::string sweep_spec_to_config(const SweepSpec& spec);
SweepSpec sweep_spec_from_config(const std::string& text);

struct SweepOutcome {
    std::vector<ReportRow> rows;  // row-major grid order
    size_t ok = 0;
    size_t failed = 0;
};

// Evaluates every grid point. Per-point failures land in the row's status
// cell instead of aborting the sweep. Output is independent of spec.threads.
SweepOutcome run_sweep(const SweepSpec& spec);

// Report CSV with the trailing status column.
void write_sweep_csv(std::ostream& os, const SweepOutcome& outcome);

}  // namespace qsl
