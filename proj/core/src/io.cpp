#include "qslsim/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace qsl {

namespace {

std::string csv_cell(const std::optional<double>& v) {
    return v ? format_sig9(*v) : std::string();
}

const char* csv_bool(bool b) { return b ? "true" : "false"; }

// Keeps the single-cell shape of the status column intact.
std::string sanitize_status(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

std::string json_number(const std::optional<double>& v) {
    return v ? format_sig9(*v) : std::string("null");
}

}  // namespace

std::string format_sig9(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,rx,ry,rz,d,P,gamma,Lambda\n";
    for (size_t i = 0; i < tr.size(); ++i) {
        os << format_sig9(tr.t[i]) << ',' << format_sig9(tr.state[i].rx) << ','
           << format_sig9(tr.state[i].ry) << ',' << format_sig9(tr.state[i].rz) << ','
           << format_sig9(tr.distance[i]) << ',' << format_sig9(tr.purity[i]) << ','
           << format_sig9(tr.gamma[i]) << ',' << format_sig9(tr.lambda[i]) << '\n';
    }
}

ReportRow to_report_row(const DecayProfile& profile, const BathSpec& bath, const QslReport& rep) {
    ReportRow row;
    if (const auto* c = profile.constant_rate()) {
        row.gamma0 = c->gamma0;
    } else if (const auto* j = profile.jc()) {
        row.lambda = j->lambda;
        row.gamma0 = j->gamma0;
    } else if (const auto* c = profile.cosine()) {
        row.omega = c->omega;
    }
    row.beta = bath.beta;
    row.eps = rep.eps;
    row.dynamics_class = rep.dynamics_class;
    row.markovian = rep.markovian;
    row.t_free = rep.t_free;
    row.t_qsl = rep.t_qsl;
    row.ratio = rep.ratio;
    row.analytic_exact = rep.analytic_exact;
    row.analytic_paper = rep.analytic_paper;
    row.rel_dev_exact = rep.rel_dev_exact;
    row.rel_dev_paper = rep.rel_dev_paper;
    row.bound_only = rep.bound_only;
    return row;
}

void report_csv_header(std::ostream& os, bool with_status) {
    os << "lambda,gamma0,omega,beta,eps,class,markovian,t_free,t_qsl,R,analytic_exact,"
          "analytic_paper,rel_dev_exact,rel_dev_paper,bound_only";
    if (with_status) os << ",status";
    os << '\n';
}

void report_csv_row(std::ostream& os, const ReportRow& row, bool with_status) {
    os << csv_cell(row.lambda) << ',' << csv_cell(row.gamma0) << ',' << csv_cell(row.omega) << ','
       << format_sig9(row.beta) << ',' << format_sig9(row.eps) << ','
       << (row.dynamics_class ? to_string(*row.dynamics_class) : std::string()) << ','
       << (row.markovian ? std::string(csv_bool(*row.markovian)) : std::string()) << ','
       << csv_cell(row.t_free) << ',' << csv_cell(row.t_qsl) << ',' << csv_cell(row.ratio) << ','
       << csv_cell(row.analytic_exact) << ',' << csv_cell(row.analytic_paper) << ','
       << csv_cell(row.rel_dev_exact) << ',' << csv_cell(row.rel_dev_paper) << ','
       << csv_bool(row.bound_only);
    if (with_status) os << ',' << sanitize_status(row.status.value_or(""));
    os << '\n';
}

std::string schedule_to_json(const std::vector<ScheduleEvent>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ev : events) {
        nlohmann::json e;
        e["t"] = ev.t;
        if (ev.type == ScheduleEvent::Type::pulse) {
            e["type"] = "pulse";
            e["axis"] = {ev.rotation.axis[0], ev.rotation.axis[1], ev.rotation.axis[2]};
            e["angle"] = ev.rotation.angle;
        } else {
            e["type"] = "segment_end";
        }
        arr.push_back(std::move(e));
    }
    nlohmann::json doc;
    doc["events"] = std::move(arr);
    return doc.dump();
}

std::vector<ScheduleEvent> schedule_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("schedule JSON: ") + e.what());
    }

    const nlohmann::json* arr = nullptr;
    if (doc.is_array()) {
        arr = &doc;
    } else if (doc.is_object() && doc.contains("events") && doc["events"].is_array()) {
        arr = &doc["events"];
    } else {
        throw std::invalid_argument(
            "schedule JSON: expected an event array or an object with an \"events\" array");
    }

    std::vector<ScheduleEvent> events;
    events.reserve(arr->size());
    try {
        for (const auto& e : *arr) {
            ScheduleEvent ev;
            ev.t = e.at("t").get<double>();
            if (!std::isfinite(ev.t) || ev.t < 0.0)
                throw std::invalid_argument("schedule JSON: event times must be finite and >= 0");
            const std::string type = e.at("type").get<std::string>();
            if (type == "pulse") {
                ev.type = ScheduleEvent::Type::pulse;
                const auto& ax = e.at("axis");
                if (!ax.is_array() || ax.size() != 3)
                    throw std::invalid_argument("schedule JSON: pulse axis must have 3 entries");
                ev.rotation.axis = {ax[0].get<double>(), ax[1].get<double>(),
                                    ax[2].get<double>()};
                ev.rotation.angle = e.at("angle").get<double>();
                const double n2 = ev.rotation.axis[0] * ev.rotation.axis[0] +
                                  ev.rotation.axis[1] * ev.rotation.axis[1] +
                                  ev.rotation.axis[2] * ev.rotation.axis[2];
                if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-9 ||
                    !std::isfinite(ev.rotation.angle))
                    throw std::invalid_argument(
                        "schedule JSON: pulse axis must be unit length with a finite angle");
            } else if (type == "segment_end") {
                ev.type = ScheduleEvent::Type::segment_end;
            } else {
                throw std::invalid_argument("schedule JSON: unknown event type '" + type + "'");
            }
            events.push_back(ev);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("schedule JSON: ") + e.what());
    }
    return events;
}

std::string classification_to_json(const Classification& cls) {
    std::string out = "{\"markovian\":";
    out += csv_bool(cls.markovian);
    out += ",\"class\":\"";
    out += to_string(cls.dynamics_class);
    out += "\",\"t_first_sign_change\":";
    out += json_number(cls.t_first_sign_change);
    out += ",\"t_fixed_point\":";
    out += json_number(cls.t_fixed_point);
    if (cls.divergence_like) out += ",\"divergence_like\":true";
    out += "}";
    return out;
}

std::string report_to_json(const QslReport& rep) {
    std::string out = "{\"eps\":";
    out += format_sig9(rep.eps);
    out += ",\"markovian\":";
    out += csv_bool(rep.markovian);
    out += ",\"class\":\"";
    out += to_string(rep.dynamics_class);
    out += "\",\"t_free\":";
    out += json_number(rep.t_free);
    out += ",\"t_qsl\":";
    out += json_number(rep.t_qsl);
    out += ",\"R\":";
    out += json_number(rep.ratio);
    out += ",\"bound_only\":";
    out += csv_bool(rep.bound_only);
    out += ",\"analytic_exact\":";
    out += json_number(rep.analytic_exact);
    out += ",\"analytic_paper\":";
    out += json_number(rep.analytic_paper);
    out += ",\"rel_dev_exact\":";
    out += json_number(rep.rel_dev_exact);
    out += ",\"rel_dev_paper\":";
    out += json_number(rep.rel_dev_paper);
    out += "}";
    return out;
}

}  // namespace qsl
