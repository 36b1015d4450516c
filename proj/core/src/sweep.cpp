#include "qslsim/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qsl {

namespace {

double parse_number(std::string_view s, const char* what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw std::invalid_argument(std::string("malformed number in ") + what + ": '" +
                                    std::string(s) + "'");
    return v;
}

long parse_count(std::string_view s, const char* what) {
    long v = 0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument(std::string("malformed count in ") + what + ": '" +
                                    std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

const std::set<std::string>& family_params(const std::string& family) {
    static const std::set<std::string> kConst{"gamma0"};
    static const std::set<std::string> kJc{"lambda", "gamma0"};
    static const std::set<std::string> kCos{"zeta", "omega"};
    if (family == "const") return kConst;
    if (family == "jc") return kJc;
    if (family == "cos") return kCos;
    throw std::invalid_argument("sweep family must be const, jc, or cos, got '" + family + "'");
}

}  // namespace

std::string GridAxis::spec_string() const {
    if (n == 1) return name + "=" + format_shortest(lo);
    return name + "=" + format_shortest(lo) + ":" + format_shortest(hi) + ":" +
           (log_spaced ? "log" : "lin") + std::to_string(n);
}

GridAxis parse_grid_axis(const std::string& spec) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("grid axis needs the form name=lo:hi:logN|linN, got '" +
                                    spec + "'");
    GridAxis ax;
    ax.name = spec.substr(0, eq);
    const std::string_view rest = std::string_view(spec).substr(eq + 1);

    if (rest.find(':') == std::string_view::npos) {
        ax.lo = ax.hi = parse_number(rest, "grid axis");
        ax.n = 1;
        ax.values = {ax.lo};
        return ax;
    }

    const auto parts = split(rest, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("grid axis needs lo:hi:logN|linN, got '" + spec + "'");
    ax.lo = parse_number(parts[0], "grid axis");
    ax.hi = parse_number(parts[1], "grid axis");
    std::string_view kind = parts[2];
    if (kind.substr(0, 3) == "log") {
        ax.log_spaced = true;
    } else if (kind.substr(0, 3) != "lin") {
        throw std::invalid_argument("grid spacing must be logN or linN, got '" + spec + "'");
    }
    const long n = parse_count(kind.substr(3), "grid axis");
    if (n < 2 || n > 1000000)
        throw std::invalid_argument("grid axis needs 2 to 1e6 points, got '" + spec + "'");
    if (!(ax.hi > ax.lo))
        throw std::invalid_argument("grid axis needs lo < hi, got '" + spec + "'");
    if (ax.log_spaced && !(ax.lo > 0.0))
        throw std::invalid_argument("log-spaced axis needs lo > 0, got '" + spec + "'");

    ax.n = static_cast<int>(n);
    ax.values.resize(static_cast<size_t>(n));
    if (ax.log_spaced) {
        const double step = std::log(ax.hi / ax.lo) / (n - 1);
        for (long i = 0; i < n; ++i) ax.values[static_cast<size_t>(i)] = ax.lo * std::exp(step * i);
    } else {
        const double step = (ax.hi - ax.lo) / (n - 1);
        for (long i = 0; i < n; ++i) ax.values[static_cast<size_t>(i)] = ax.lo + step * i;
    }
    ax.values.back() = ax.hi;
    return ax;
}

std::vector<GridAxis> parse_grid(const std::string& spec) {
    if (trim(spec).empty()) throw std::invalid_argument("empty grid");
    std::vector<GridAxis> axes;
    for (const auto piece : split(spec, ','))
        axes.push_back(parse_grid_axis(std::string(trim(piece))));
    return axes;
}

std::string grid_to_string(const std::vector<GridAxis>& axes) {
    std::string out;
    for (size_t i = 0; i < axes.size(); ++i) {
        if (i) out += ',';
        out += axes[i].spec_string();
    }
    return out;
}

BlochVector parse_state(const std::string& spec) {
    const auto parts = split(spec, ',');
    if (parts.size() != 3)
        throw std::invalid_argument("state needs the form x,y,z, got '" + spec + "'");
    return make_state(parse_number(trim(parts[0]), "state"), parse_number(trim(parts[1]), "state"),
                      parse_number(trim(parts[2]), "state"));
}

DecayProfile profile_from_params(const std::string& family,
                                 const std::map<std::string, double>& params) {
    const auto& expected = family_params(family);
    for (const auto& name : expected)
        if (!params.count(name))
            throw std::invalid_argument("family '" + family + "' needs parameter '" + name + "'");
    for (const auto& [name, v] : params)
        if (!expected.count(name))
            throw std::invalid_argument("family '" + family + "' does not take parameter '" +
                                        name + "'");
    if (family == "const") return DecayProfile::constant(params.at("gamma0"));
    if (family == "jc")
        return DecayProfile::jaynes_cummings(params.at("lambda"), params.at("gamma0"));
    return DecayProfile::damped_cosine(params.at("zeta"), params.at("omega"));
}

std::string sweep_spec_to_config(const SweepSpec& spec) {
    std::string out;
    out += "profile=" + spec.family + "\n";
    out += "grid=" + grid_to_string(spec.axes) + "\n";
    for (const auto& [name, v] : spec.fixed) out += name + "=" + format_shortest(v) + "\n";
    out += "beta=" + format_shortest(spec.beta) + "\n";
    out += "state=" + format_shortest(spec.initial.rx) + "," + format_shortest(spec.initial.ry) +
           "," + format_shortest(spec.initial.rz) + "\n";
    out += "eps=" + format_shortest(spec.eps) + "\n";
    out += "strategy=" + to_string(spec.strategy) + "\n";
    out += "threads=" + std::to_string(spec.threads) + "\n";
    if (!spec.out_path.empty()) out += "out=" + spec.out_path + "\n";
    return out;
}

SweepSpec sweep_spec_from_config(const std::string& text) {
    SweepSpec spec;
    bool have_profile = false, have_grid = false, have_beta = false, have_state = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const size_t eq = sv.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw std::invalid_argument("config line is not key=value: '" + std::string(sv) + "'");
        const std::string key(trim(sv.substr(0, eq)));
        const std::string value(trim(sv.substr(eq + 1)));
        if (key == "profile") {
            spec.family = value;
            have_profile = true;
        } else if (key == "grid") {
            spec.axes = parse_grid(value);
            have_grid = true;
        } else if (key == "beta") {
            spec.beta = parse_number(value, "config beta");
            have_beta = true;
        } else if (key == "state") {
            spec.initial = parse_state(value);
            have_state = true;
        } else if (key == "eps") {
            spec.eps = parse_number(value, "config eps");
        } else if (key == "strategy") {
            spec.strategy = parse_strategy(value);
        } else if (key == "threads") {
            spec.threads = static_cast<int>(parse_count(value, "config threads"));
        } else if (key == "out") {
            spec.out_path = value;
        } else if (key == "seed") {
            // reserved, ignored
        } else {
            spec.fixed[key] = parse_number(value, ("config " + key).c_str());
        }
    }
    if (!have_profile || !have_grid || !have_beta || !have_state)
        throw std::invalid_argument("config needs profile, grid, beta, and state keys");
    return spec;
}

SweepOutcome run_sweep(const SweepSpec& spec) {
    const auto& expected = family_params(spec.family);
    if (spec.axes.empty()) throw std::invalid_argument("empty grid");

    std::set<std::string> seen;
    for (const auto& ax : spec.axes)
        if (!seen.insert(ax.name).second)
            throw std::invalid_argument("duplicate grid axis '" + ax.name + "'");
    for (const auto& [name, v] : spec.fixed)
        if (!seen.insert(name).second)
            throw std::invalid_argument("parameter '" + name + "' is both fixed and on the grid");
    if (seen != expected) {
        std::string msg = "family '" + spec.family + "' needs exactly {";
        for (const auto& name : expected) msg += " " + name;
        msg += " }";
        throw std::invalid_argument(msg);
    }
    if (spec.threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (!(spec.eps > 0.0 && spec.eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
    const BathSpec bath = BathSpec::from_beta(spec.beta);

    size_t total = 1;
    for (const auto& ax : spec.axes) total *= static_cast<size_t>(ax.n);

    SweepOutcome outcome;
    outcome.rows.resize(total);

    auto evaluate = [&](size_t idx) {
        std::map<std::string, double> params = spec.fixed;
        size_t rem = idx;
        for (size_t a = spec.axes.size(); a-- > 0;) {
            const GridAxis& ax = spec.axes[a];
            params[ax.name] = ax.values[rem % static_cast<size_t>(ax.n)];
            rem /= static_cast<size_t>(ax.n);
        }

        ReportRow row;
        row.beta = spec.beta;
        row.eps = spec.eps;
        if (spec.family == "const") {
            row.gamma0 = params.at("gamma0");
        } else if (spec.family == "jc") {
            row.lambda = params.at("lambda");
            row.gamma0 = params.at("gamma0");
        } else {
            row.omega = params.at("omega");
        }
        try {
            const DecayProfile profile = profile_from_params(spec.family, params);
            const QslReport rep = speedup(spec.initial, profile, bath, spec.eps, spec.strategy);
            row = to_report_row(profile, bath, rep);
            row.status = "ok";
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        outcome.rows[idx] = std::move(row);
    };

    const size_t nworkers =
        std::min<size_t>(static_cast<size_t>(spec.threads), std::max<size_t>(total, 1));
    if (nworkers <= 1) {
        for (size_t i = 0; i < total; ++i) evaluate(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (size_t w = 0; w < nworkers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const size_t idx = next.fetch_add(1);
                    if (idx >= total) return;
                    evaluate(idx);
                }
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& row : outcome.rows)
        (row.status && *row.status == "ok" ? outcome.ok : outcome.failed) += 1;
    return outcome;
}

void write_sweep_csv(std::ostream& os, const SweepOutcome& outcome) {
    report_csv_header(os, true);
    for (const auto& row : outcome.rows) report_csv_row(os, row, true);
}

}  // namespace qsl
