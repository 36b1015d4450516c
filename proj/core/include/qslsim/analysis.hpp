#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qslsim/bloch.hpp"
#include "qslsim/control.hpp"
#include "qslsim/decay.hpp"

namespace qsl {

enum class Strategy { cool, heat, flip, free_evolution };

Strategy parse_strategy(const std::string& name);  // cool | heat | flip | free
std::string to_string(Strategy s);

struct QslReport {
    double eps = 0.0;
    bool markovian = false;
    DynamicsClass dynamics_class = DynamicsClass::markov;
    std::optional<double> t_free;
    std::optional<double> t_qsl;   // empty for pure free-evolution reports
    std::optional<double> ratio;   // t_free / t_qsl where both exist and t_qsl > 0
    bool bound_only = false;
    std::optional<double> analytic_exact;
    std::optional<double> analytic_paper;
    std::optional<double> rel_dev_exact;
    std::optional<double> rel_dev_paper;
};

// Free-evolution time to the eps-ball around the fixed point; none when the
// accumulated rate saturates first.
std::optional<double> t_free(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps);

// Runs the selected strategy and assembles the full report. Analytic columns
// are filled for constant and Jaynes-Cummings rates (the families the
// closed-form expressions cover).
QslReport speedup(const BlochVector& initial, const DecayProfile& profile, const BathSpec& bath,
                  double eps, Strategy strategy);

enum class FormulaKind {
    cool_m,
    cool_nm,
    heat_m,
    heat_nm,
    free_m,
    free_nm,
    gain_heat_m,
    gain_heat_nm,
};

struct FormulaParams {
    double beta = 0.0;
    // lambda <= 0 selects the constant-rate realization of the deep-M limit.
    double lambda = 0.0;
    double gamma0 = 0.0;
    double r_i = 0.0;   // initial radius (cooling, heating, gains)
    double rx_i = 0.0;  // initial transverse component (free-evolution forms)
    double rz_i = 0.0;  // initial longitudinal component (free-evolution forms)
    double eps = 0.0;
};

struct FormulaValue {
    double paper = 0.0;  // printed closed form, evaluated literally
    double exact = 0.0;  // counterpart derived from the propagator closed form
    bool in_regime = false;
};

// Evaluates one closed-form prediction in both printed and derived variants.
// M kinds need lambda <= 0 (constant rate) or lambda/gamma0 >= 1e3 to be in
// regime; NM kinds need lambda/gamma0 <= 1e-3. Out-of-regime parameters are
// flagged, not rejected.
FormulaValue appendix_formula(FormulaKind kind, const FormulaParams& p);

struct RegimePoint {
    double lambda = 0.0;
    double gamma0 = 0.0;
    bool markovian = false;
    double t_qsl = 0.0;
};

struct RegimeReport {
    std::vector<RegimePoint> points;
    double slope_vs_gamma0 = 0.0;  // log-log least-squares slope of t_qsl
};

// Cooling-time scan over n log-spaced gamma0 values at fixed lambda.
RegimeReport regime_scan_gamma0(double lambda, double gamma0_lo, double gamma0_hi, int n,
                                const BathSpec& bath, const BlochVector& initial, double eps);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qsl
