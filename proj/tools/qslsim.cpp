#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qslsim/analysis.hpp"
#include "qslsim/control.hpp"
#include "qslsim/io.hpp"
#include "qslsim/sweep.hpp"
#include "validate.hpp"

using qsl::BathSpec;
using qsl::BlochVector;
using qsl::DecayProfile;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Turns config file entries into trailing flags. Flags already on the command
// line win: their keys are skipped entirely.
void inject_config(std::vector<std::string>& args) {
    std::string path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return;

    const auto has_flag = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };

    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const size_t eq = sv.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw std::invalid_argument("config line is not key=value: '" + std::string(sv) +
                                        "'");
        const std::string key(trim(sv.substr(0, eq)));
        if (key == "config") continue;
        const std::string flag = "--" + key;
        if (has_flag(flag)) continue;
        args.push_back(flag);
        args.emplace_back(trim(sv.substr(eq + 1)));
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file '" + path + "'");
    out << text;
}

struct CommonArgs {
    std::string profile;
    std::string state;
    double beta = 0.0;
    double eps = 0.01;
    std::string config;
    long seed = 0;  // reserved, unused
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--profile", a.profile,
                    "decay profile: const:gamma0=V | jc:lambda=V,gamma0=V | "
                    "cos:zeta=V,omega=V | table:PATH")
        ->required();
    sub->add_option("--beta", a.beta, "inverse bath temperature (>= 0)")->required();
    sub->add_option("--state", a.state, "initial Bloch vector x,y,z")->required();
    sub->add_option("--eps", a.eps, "target ball radius (default 0.01)");
    sub->add_option("--config", a.config, "key=value config file; flags override it");
    sub->add_option("--seed", a.seed, "reserved; all computations are deterministic");
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        inject_config(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"simulator and analysis toolkit for time-local qubit master equations"};
    app.require_subcommand(1);
    int exit_code = 0;

    // simulate
    CommonArgs sim_common;
    double sim_horizon = 0.0, sim_dt = 0.0;
    std::string sim_out, sim_schedule;
    CLI::App* sim = app.add_subcommand("simulate", "sample one trajectory as CSV");
    add_common(sim, sim_common);
    CLI::Option* sim_horizon_opt = sim->add_option("--horizon", sim_horizon, "end time");
    CLI::Option* sim_dt_opt = sim->add_option("--dt-sample", sim_dt, "sampling step");
    sim->add_option("--out", sim_out, "output path (default stdout)");
    sim->add_option("--schedule", sim_schedule, "replay a control schedule JSON file");
    sim->callback([&] {
        const DecayProfile profile = DecayProfile::parse(sim_common.profile);
        const BathSpec bath = BathSpec::from_beta(sim_common.beta);
        const BlochVector s0 = qsl::parse_state(sim_common.state);

        qsl::Trajectory tr;
        if (!sim_schedule.empty()) {
            const auto events = qsl::schedule_from_json(read_file(sim_schedule));
            tr = qsl::execute_schedule(s0, events, profile, bath);
        } else {
            if (sim_horizon_opt->count() == 0)
                throw std::invalid_argument("simulate needs --horizon (or --schedule)");
            if (!(sim_horizon > 0.0))
                throw std::invalid_argument("--horizon must be positive");
            const double dt = sim_dt_opt->count() ? sim_dt : sim_horizon / 500.0;
            tr = qsl::sample_free_evolution(s0, profile, bath, 0.0, sim_horizon, dt);
        }
        if (!sim_schedule.empty() && sim_horizon_opt->count() && sim_horizon > tr.t.back()) {
            const double t0 = tr.t.back();
            const double dt = sim_dt_opt->count() ? sim_dt : (sim_horizon - t0) / 100.0;
            const qsl::Trajectory tail =
                qsl::sample_free_evolution(tr.state.back(), profile, bath, t0, sim_horizon, dt);
            for (size_t i = 1; i < tail.size(); ++i)
                tr.push(tail.t[i], tail.state[i], bath, profile);
        }

        std::ostringstream csv;
        qsl::write_trajectory_csv(csv, tr);
        if (sim_out.empty())
            std::cout << csv.str();
        else
            write_text(sim_out, csv.str());
    });

    // classify
    CommonArgs cls_common;
    CLI::App* cls_cmd = app.add_subcommand("classify", "print the dynamics class as JSON");
    add_common(cls_cmd, cls_common);
    cls_cmd->callback([&] {
        const DecayProfile profile = DecayProfile::parse(cls_common.profile);
        const BathSpec bath = BathSpec::from_beta(cls_common.beta);
        const BlochVector s0 = qsl::parse_state(cls_common.state);
        std::cout << qsl::classification_to_json(qsl::classify(profile, bath, s0, cls_common.eps))
                  << '\n';
    });

    // qsl
    CommonArgs qsl_common;
    std::string qsl_strategy = "cool", qsl_out;
    CLI::App* qsl_cmd = app.add_subcommand("qsl", "impulsive-control speed-limit report");
    add_common(qsl_cmd, qsl_common);
    qsl_cmd->add_option("--strategy", qsl_strategy, "cool | heat | flip | free (default cool)");
    qsl_cmd->add_option("--out", qsl_out, "also write a one-row report CSV");
    qsl_cmd->callback([&] {
        const DecayProfile profile = DecayProfile::parse(qsl_common.profile);
        const BathSpec bath = BathSpec::from_beta(qsl_common.beta);
        const BlochVector s0 = qsl::parse_state(qsl_common.state);
        const qsl::QslReport rep =
            qsl::speedup(s0, profile, bath, qsl_common.eps, qsl::parse_strategy(qsl_strategy));
        std::cout << qsl::report_to_json(rep) << '\n';
        if (!qsl_out.empty()) {
            std::ostringstream csv;
            qsl::report_csv_header(csv, false);
            qsl::report_csv_row(csv, qsl::to_report_row(profile, bath, rep), false);
            write_text(qsl_out, csv.str());
        }
    });

    // sweep
    CommonArgs sw_common;
    std::string sw_grid, sw_strategy = "cool", sw_out;
    int sw_threads = 1;
    double sw_lambda = 0.0, sw_gamma0 = 0.0, sw_zeta = 0.0, sw_omega = 0.0;
    CLI::App* sw = app.add_subcommand("sweep", "grid sweep emitting the report CSV");
    add_common(sw, sw_common);
    CLI::Option* sw_grid_opt =
        sw->add_option("--grid", sw_grid, "axes, e.g. lambda=1e-2:1e2:log25,gamma0=...");
    CLI::Option* sw_lambda_opt = sw->add_option("--lambda", sw_lambda, "fixed lambda");
    CLI::Option* sw_gamma0_opt = sw->add_option("--gamma0", sw_gamma0, "fixed gamma0");
    CLI::Option* sw_zeta_opt = sw->add_option("--zeta", sw_zeta, "fixed zeta");
    CLI::Option* sw_omega_opt = sw->add_option("--omega", sw_omega, "fixed omega");
    sw->add_option("--strategy", sw_strategy, "cool | heat | flip | free (default cool)");
    sw->add_option("--out", sw_out, "output path (default stdout)");
    sw->add_option("--threads", sw_threads, "worker count; output is identical for any value");
    sw->callback([&] {
        if (sw_grid_opt->count() == 0) throw std::invalid_argument("sweep needs --grid");
        qsl::SweepSpec spec;
        spec.family = sw_common.profile;
        spec.axes = qsl::parse_grid(sw_grid);
        if (sw_lambda_opt->count()) spec.fixed["lambda"] = sw_lambda;
        if (sw_gamma0_opt->count()) spec.fixed["gamma0"] = sw_gamma0;
        if (sw_zeta_opt->count()) spec.fixed["zeta"] = sw_zeta;
        if (sw_omega_opt->count()) spec.fixed["omega"] = sw_omega;
        spec.beta = sw_common.beta;
        spec.initial = qsl::parse_state(sw_common.state);
        spec.eps = sw_common.eps;
        spec.strategy = qsl::parse_strategy(sw_strategy);
        spec.out_path = sw_out;
        spec.threads = sw_threads;

        const qsl::SweepOutcome outcome = qsl::run_sweep(spec);
        std::ostringstream csv;
        qsl::write_sweep_csv(csv, outcome);
        if (sw_out.empty())
            std::cout << csv.str();
        else
            write_text(sw_out, csv.str());
        if (outcome.ok == 0) {
            std::cerr << "error: every grid point failed\n";
            exit_code = 1;
        }
    });

    // validate
    double val_tol = 1e-8;
    std::string val_config;
    long val_seed = 0;
    CLI::App* val = app.add_subcommand("validate", "run the built-in check suite");
    val->add_option("--tol", val_tol, "oracle equivalence tolerance (default 1e-8)");
    val->add_option("--config", val_config, "key=value config file; flags override it");
    val->add_option("--seed", val_seed, "reserved; all computations are deterministic");
    val->callback([&] {
        if (qsl::run_validation_suite(val_tol, std::cout) != 0) exit_code = 1;
    });

    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back(argv[0]);
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> cargs;
    cargs.reserve(full.size());
    for (const auto& a : full) cargs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return exit_code;
}
