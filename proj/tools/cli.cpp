#include "cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

#include "ptwalk/version.hpp"

namespace ptwalk::cli {

namespace {

constexpr double kPi = std::numbers::pi;

using evolution::Formalism;
using numerics::CMat;
using numerics::cdouble;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_plain_double(const std::string& text) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + text + "'");
    }
    if (used != text.size()) throw ConfigError("trailing characters in number '" + text + "'");
    return v;
}

int max_threads() {
    if (const char* env = std::getenv("PTWALK_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(i) for i in [0, n) on a bounded pool; results are joined in index
/// order so output bytes do not depend on scheduling.
template <typename F>
std::vector<std::string> ordered_parallel(int n, F&& f) {
    std::vector<std::string> results(n);
    const int workers = std::min(max_threads(), std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) results[i] = f(i);
        return results;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= n) break;
                    results[i] = f(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* formalism_name(Formalism f) {
    switch (f) {
        case Formalism::Raw: return "raw";
        case Formalism::Normalised: return "normalised";
        case Formalism::Metric: return "metric";
    }
    return "?";
}

const char* command_name(Command c) {
    switch (c) {
        case Command::EpGrid: return "ep-grid";
        case Command::Trace: return "trace";
        case Command::TraceDist: return "tracedist";
        case Command::Blp: return "blp";
        case Command::BlpScan: return "blp-scan";
        case Command::Rhp: return "rhp";
        case Command::Entanglement: return "entanglement";
        case Command::Purity: return "purity";
    }
    return "?";
}

std::string regime_label(const ExperimentConfig& cfg, double gamma) {
    try {
        const double gpt = walk::exceptional_point(cfg.theta1, cfg.theta2);
        if (std::abs(gamma - gpt) < 1e-12) return "critical";
        return gamma < gpt ? "unbroken" : "broken";
    } catch (const Error&) {
        return "none";
    }
}

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void emit(const Table& t, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::Csv) {
        for (const auto& [k, v] : t.meta) out << "# " << k << " = " << v << "\n";
        for (size_t i = 0; i < t.columns.size(); ++i)
            out << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
        out << "\n";
        for (const auto& row : t.rows) {
            for (size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "");
            out << "\n";
        }
        return;
    }
    nlohmann::ordered_json j;
    for (const auto& [k, v] : t.meta) j["config"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) j["rows"].push_back(row);
    out << j.dump(2) << "\n";
}

Table base_table(const ExperimentConfig& cfg) {
    Table t;
    t.meta.emplace_back("artifact", std::string("ptwalk ") + PTWALK_VERSION);
    t.meta.emplace_back("command", command_name(cfg.command));
    t.meta.emplace_back("theta1", fmt(cfg.theta1));
    t.meta.emplace_back("theta2", fmt(cfg.theta2));
    if (cfg.gammas.size() == 1) t.meta.emplace_back("gamma", fmt(cfg.gammas[0]));
    else {
        t.meta.emplace_back("gamma_first", fmt(cfg.gammas.front()));
        t.meta.emplace_back("gamma_last", fmt(cfg.gammas.back()));
        t.meta.emplace_back("gamma_count", std::to_string(cfg.gammas.size()));
    }
    t.meta.emplace_back("steps", std::to_string(cfg.steps));
    t.meta.emplace_back("grid", std::to_string(cfg.grid_n));
    t.meta.emplace_back("grid_shifted", cfg.shifted_grid ? "true" : "false");
    t.meta.emplace_back("formalism", formalism_name(cfg.formalism));
    return t;
}

walk::KGrid make_grid(const ExperimentConfig& cfg) {
    return walk::KGrid::uniform(cfg.grid_n, cfg.shifted_grid);
}

// ---- command implementations ----------------------------------------------

void run_ep_grid(const ExperimentConfig& cfg, Table& t) {
    const auto& t1s = cfg.theta1_range;
    const auto& t2s = cfg.theta2_range;
    t.meta.emplace_back("theta1_count", std::to_string(t1s.size()));
    t.meta.emplace_back("theta2_count", std::to_string(t2s.size()));
    t.columns = {"theta1", "theta2", "gamma_pt", "e_gamma_pt", "status"};

    const auto rows = ordered_parallel(static_cast<int>(t1s.size()), [&](int i) {
        std::ostringstream os;
        for (double t2 : t2s) {
            os << fmt(t1s[i]) << "," << fmt(t2) << ",";
            try {
                const double g = walk::exceptional_point(t1s[i], t2);
                os << fmt(g) << "," << fmt(std::exp(g)) << ",ok\n";
            } catch (const Error&) {
                os << ",,no_transition\n";
            }
        }
        return os.str();
    });
    for (const auto& block : rows) {
        std::istringstream is(block);
        std::string line;
        while (std::getline(is, line)) {
            std::vector<std::string> row;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) row.push_back(cell);
            while (row.size() < 5) row.emplace_back("");
            t.rows.push_back(row);
        }
    }
}

void run_series_command(const ExperimentConfig& cfg, Table& t) {
    const walk::KGrid grid = make_grid(cfg);
    const bool sweep = cfg.gamma_is_sweep;

    auto series_rows = [&](double gamma) {
        const walk::WalkParams p(cfg.theta1, cfg.theta2, gamma);
        const evolution::CoinState rho0{cfg.state, Formalism::Raw};
        const evolution::CoinState sigma0{cfg.state2, Formalism::Raw};
        std::vector<std::vector<std::string>> rows;
        auto prefix = [&](int time) {
            std::vector<std::string> row;
            if (sweep) row.push_back(fmt(gamma));
            row.push_back(std::to_string(time));
            return row;
        };
        switch (cfg.command) {
            case Command::Trace: {
                const Formalism branch = (cfg.formalism == Formalism::Metric)
                                             ? Formalism::Metric
                                             : Formalism::Raw;
                const auto s = evolution::trace_series(p, rho0, cfg.steps, grid, branch);
                for (size_t i = 0; i < s.size(); ++i) {
                    auto row = prefix(s.times[i]);
                    row.push_back(fmt(s.values[i]));
                    rows.push_back(std::move(row));
                }
                break;
            }
            case Command::TraceDist: {
                for (int time = 0; time <= cfg.steps; ++time) {
                    auto evolved = [&](const evolution::CoinState& s0) {
                        return cfg.formalism == Formalism::Metric
                                   ? evolution::evolve_metric(p, s0, time, grid)
                                   : evolution::evolve_normalised(p, s0, time, grid);
                    };
                    auto row = prefix(time);
                    row.push_back(fmt(measures::trace_distance(evolved(rho0), evolved(sigma0))));
                    rows.push_back(std::move(row));
                }
                break;
            }
            case Command::Blp: {
                const auto s =
                    measures::blp_series(p, rho0, sigma0, cfg.steps, grid, cfg.formalism);
                for (size_t i = 0; i < s.size(); ++i) {
                    auto row = prefix(s.times[i]);
                    row.push_back(fmt(s.values[i]));
                    rows.push_back(std::move(row));
                }
                break;
            }
            case Command::Rhp: {
                const auto chain =
                    measures::rhp_chain(p, cfg.steps, grid, cfg.formalism);
                for (const auto& pt : chain) {
                    auto row = prefix(pt.t);
                    row.push_back(fmt(pt.choi_trace2));
                    row.push_back(fmt(pt.g));
                    row.push_back(fmt(std::max(pt.g, 0.0))); // display clamp, raw kept
                    row.push_back(fmt(pt.cumulative));
                    row.push_back(pt.pseudo_inverted ? "1" : "0");
                    rows.push_back(std::move(row));
                }
                break;
            }
            case Command::Entanglement: {
                const auto s = measures::entanglement_series(p, rho0, cfg.steps, grid);
                for (size_t i = 0; i < s.size(); ++i) {
                    auto row = prefix(s.times[i]);
                    row.push_back(fmt(s.values[i]));
                    row.push_back((s.status[i] & measures::kBeyondEp) ? "1" : "0");
                    rows.push_back(std::move(row));
                }
                break;
            }
            default:
                throw ConfigError("internal: not a series command");
        }
        return rows;
    };

    switch (cfg.command) {
        case Command::Trace: t.columns = {"t", "trace"}; break;
        case Command::TraceDist: t.columns = {"t", "trace_distance"}; break;
        case Command::Blp: t.columns = {"t", "blp"}; break;
        case Command::Rhp:
            t.columns = {"t", "choi_trace_x2", "g", "g_clamped", "rhp", "pinv_flag"};
            break;
        case Command::Entanglement: t.columns = {"t", "ee", "beyond_ep"}; break;
        default: break;
    }
    if (sweep) t.columns.insert(t.columns.begin(), "gamma");

    const auto blocks = ordered_parallel(static_cast<int>(cfg.gammas.size()), [&](int i) {
        std::ostringstream os;
        for (const auto& row : series_rows(cfg.gammas[i])) {
            for (size_t c = 0; c < row.size(); ++c) os << row[c] << (c + 1 < row.size() ? "," : "");
            os << "\n";
        }
        return os.str();
    });
    for (const auto& block : blocks) {
        std::istringstream is(block);
        std::string line;
        while (std::getline(is, line)) {
            std::vector<std::string> row;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) row.push_back(cell);
            t.rows.push_back(row);
        }
    }
}

void run_blp_scan(const ExperimentConfig& cfg, Table& t) {
    const walk::KGrid grid = make_grid(cfg);
    t.columns = {"gamma", "e_gamma", "blp", "regime"};
    const auto rows = ordered_parallel(static_cast<int>(cfg.gammas.size()), [&](int i) {
        const double gamma = cfg.gammas[i];
        const walk::WalkParams p(cfg.theta1, cfg.theta2, gamma);
        const auto s = measures::blp_series(p, {cfg.state, Formalism::Raw},
                                            {cfg.state2, Formalism::Raw}, cfg.steps, grid,
                                            cfg.formalism);
        std::ostringstream os;
        os << fmt(gamma) << "," << fmt(std::exp(gamma)) << "," << fmt(s.values.back()) << ","
           << regime_label(cfg, gamma);
        return os.str();
    });
    for (const auto& r : rows) {
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(r);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        t.rows.push_back(row);
    }
}

void run_purity(const ExperimentConfig& cfg, Table& t) {
    t.meta.emplace_back("lattice", std::to_string(cfg.lattice));
    t.columns = {"t", "purity"};
    const walk::WalkParams p(cfg.theta1, cfg.theta2, cfg.gammas[0]);
    const auto full0 = evolution::make_full_origin(cfg.lattice, cfg.state);
    const auto s = measures::purity_series(p, full0, cfg.steps);
    for (size_t i = 0; i < s.size(); ++i)
        t.rows.push_back({std::to_string(s.times[i]), fmt(s.values[i])});
}

} // namespace

double parse_angle(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) throw ConfigError("empty angle");
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return parse_plain_double(text);

    std::string head = trim(text.substr(0, pos));
    std::string tail = trim(text.substr(pos + 2));
    double coeff = 1.0;
    if (head == "-") coeff = -1.0;
    else if (head == "+" || head.empty()) coeff = 1.0;
    else coeff = parse_plain_double(head);
    double denom = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("bad angle '" + raw + "'");
        denom = parse_plain_double(trim(tail.substr(1)));
        if (denom == 0.0) throw ConfigError("zero denominator in angle '" + raw + "'");
    }
    return coeff * kPi / denom;
}

std::vector<double> parse_range(const std::string& raw) {
    const std::string text = trim(raw);
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("range must be first:last:step, got '" + raw + "'");
    const double first = parse_angle(text.substr(0, c1));
    const double last = parse_angle(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_angle(text.substr(c2 + 1));
    if (!(step > 0.0)) throw ConfigError("range step must be positive");
    if (last < first) throw ConfigError("range end precedes start");
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((last - first) / step + 0.5)) + 1;
    if (count > 1000000) throw ConfigError("range too large");
    for (int i = 0; i < count; ++i) {
        const double v = first + i * step;
        if (v > last + 0.5 * step) break;
        out.push_back(v);
    }
    if (out.empty()) out.push_back(first);
    return out;
}

numerics::CMat parse_state(const std::string& raw) {
    const std::string text = trim(raw);
    if (text == "up") return evolution::coin_up().matrix;
    if (text == "plus") return evolution::coin_plus().matrix;

    auto parse_complex = [](const std::string& s) -> cdouble {
        std::string v = trim(s);
        if (v.empty()) throw ConfigError("empty state entry");
        if (v.back() == 'i') {
            v.pop_back();
            // split "a+b" / "a-b" at the last sign that is not an exponent
            size_t split = std::string::npos;
            for (size_t i = v.size(); i-- > 1;) {
                if ((v[i] == '+' || v[i] == '-') && v[i - 1] != 'e' && v[i - 1] != 'E') {
                    split = i;
                    break;
                }
            }
            if (split == std::string::npos)
                return {0.0, v.empty() || v == "+" ? 1.0 : (v == "-" ? -1.0 : parse_plain_double(v))};
            const double re = parse_plain_double(trim(v.substr(0, split)));
            std::string im = trim(v.substr(split));
            if (im == "+") return {re, 1.0};
            if (im == "-") return {re, -1.0};
            return {re, parse_plain_double(im)};
        }
        return {parse_plain_double(v), 0.0};
    };

    std::vector<std::vector<cdouble>> rows;
    std::istringstream rs(text);
    std::string rowtext;
    while (std::getline(rs, rowtext, ';')) {
        std::vector<cdouble> row;
        std::istringstream cs(rowtext);
        std::string cell;
        while (std::getline(cs, cell, ',')) row.push_back(parse_complex(cell));
        rows.push_back(std::move(row));
    }
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
        throw ConfigError("state must be 'up', 'plus' or four entries 'a,b;c,d'");
    const CMat m(2, {rows[0][0], rows[0][1], rows[1][0], rows[1][1]});
    try {
        (void)evolution::make_density(m);
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid state: ") + e.what());
    }
    return m;
}

Command parse_command(const std::string& name) {
    if (name == "ep-grid") return Command::EpGrid;
    if (name == "trace") return Command::Trace;
    if (name == "tracedist") return Command::TraceDist;
    if (name == "blp") return Command::Blp;
    if (name == "blp-scan") return Command::BlpScan;
    if (name == "rhp") return Command::Rhp;
    if (name == "entanglement") return Command::Entanglement;
    if (name == "purity") return Command::Purity;
    throw ConfigError("unknown command '" + name + "'");
}

void check_config(const ExperimentConfig& cfg) {
    // rhp needs at least one intermediate map; the other series include t=0.
    if (cfg.steps < (cfg.command == Command::Rhp ? 1 : 0))
        throw ConfigError("steps must be at least 1");
    if (cfg.grid_n < 16) throw ConfigError("grid must be at least 16");
    if (cfg.lattice < 2) throw ConfigError("lattice must be at least 2");
    if (cfg.gammas.empty()) throw ConfigError("no gamma values");
    for (double g : cfg.gammas)
        if (!std::isfinite(g)) throw ConfigError("non-finite gamma");
    if (cfg.command == Command::EpGrid) {
        if (cfg.theta1_range.empty() || cfg.theta2_range.empty())
            throw ConfigError("ep-grid needs theta1/theta2 ranges");
    }
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> notes;
    if (cfg.command == Command::EpGrid) {
        notes.push_back("ep-grid sweeps " + std::to_string(cfg.theta1_range.size()) + " x " +
                        std::to_string(cfg.theta2_range.size()) + " cells");
        return notes;
    }
    const walk::KGrid grid = make_grid(cfg);
    for (double gamma : cfg.gammas) {
        const walk::WalkParams p(cfg.theta1, cfg.theta2, gamma);
        double min_gap = 1e300;
        for (double k : grid.points)
            min_gap = std::min(min_gap, std::abs(walk::dispersion_a(p, k) - 1.0));
        std::ostringstream os;
        os << "gamma " << fmt(gamma) << ": regime " << regime_label(cfg, gamma)
           << ", min |a(k)-1| = " << fmt(min_gap);
        if (gamma < 0.0) os << " [negative gamma folded to its magnitude; spectrum even in gamma]";
        if (min_gap < 1e-8)
            os << " [collision with the exceptional locus; shift the grid by half a step"
               << (cfg.shifted_grid ? " differently" : " (--shift-grid)") << "]";
        notes.push_back(os.str());
    }
    return notes;
}

void run(const ExperimentConfig& cfg, std::ostream& out) {
    check_config(cfg);
    Table t = base_table(cfg);
    switch (cfg.command) {
        case Command::EpGrid: run_ep_grid(cfg, t); break;
        case Command::BlpScan: run_blp_scan(cfg, t); break;
        case Command::Purity: run_purity(cfg, t); break;
        default: run_series_command(cfg, t); break;
    }
    emit(t, cfg.format, out);
}

} // namespace ptwalk::cli
