#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qslsim/analysis.hpp"
#include "qslsim/control.hpp"
#include "qslsim/decay.hpp"
#include "qslsim/propagate.hpp"

namespace qsl {

// 9 significant digits, locale-independent, '.' decimal separator.
std::string format_sig9(double v);

// Shortest representation that parses back to the identical double.
std::string format_shortest(double v);

// Columns t,rx,ry,rz,d,P,gamma,Lambda with a mandatory header row.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

// One row of the report CSV. Family parameters that do not apply stay empty
// (the damped-cosine zeta has no column; it travels in the config instead).
struct ReportRow {
    std::optional<double> lambda;
    std::optional<double> gamma0;
    std::optional<double> omega;
    double beta = 0.0;
    double eps = 0.0;
    // Empty on rows whose evaluation failed before classification.
    std::optional<DynamicsClass> dynamics_class;
    std::optional<bool> markovian;
    std::optional<double> t_free;
    std::optional<double> t_qsl;
    std::optional<double> ratio;
    std::optional<double> analytic_exact;
    std::optional<double> analytic_paper;
    std::optional<double> rel_dev_exact;
    std::optional<double> rel_dev_paper;
    bool bound_only = false;
    // Per-row failure note in sweeps; "ok" rows leave it empty.
    std::optional<std::string> status;
};

ReportRow to_report_row(const DecayProfile& profile, const BathSpec& bath, const QslReport& rep);

void report_csv_header(std::ostream& os, bool with_status);
void report_csv_row(std::ostream& os, const ReportRow& row, bool with_status);

// Schedule events serialize to {"events": [{t, type, axis, angle}, ...]} with
// full round-trip precision (replay must reproduce the run exactly). The
// reader also accepts a bare event array.
std::string schedule_to_json(const std::vector<ScheduleEvent>& events);
std::vector<ScheduleEvent> schedule_from_json(const std::string& text);

// One-line JSON verdicts for the CLI.
std::string classification_to_json(const Classification& cls);
std::string report_to_json(const QslReport& rep);

}  // namespace qsl
