#pragma once

// frackit command-line front end. `run` is kept in a header so the test
// suite can drive it in-process.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <frackit/acceptance.hpp>
#include <frackit/config.hpp>
#include <frackit/frackit.hpp>

namespace frackit::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

/// Shortest decimal text that parses back to the same double.
inline std::string num(double v) {
    char buf[40];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline unsigned thread_count() {
    unsigned n = 0;
    if (const char* env = std::getenv("FRACKIT_THREADS")) {
        const std::string s(env);
        unsigned v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ConfigError("FRACKIT_THREADS must be a nonnegative integer, got '" + s + "'");
        n = v;
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Calls body(i) for i in [0, n) on up to thread_count() threads; body(i)
/// writes only to slot i, so the result does not depend on scheduling. The
/// first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(w, i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- config

inline TimeGrid time_grid(const Config& c) {
    const double t_max = c.get_double("grid.t_max");
    const long points = c.get_int("grid.points");
    if (!(t_max > 0.0)) throw ConfigError("field 'grid.t_max' must be > 0");
    if (points < 3) throw ConfigError("field 'grid.points' must be >= 3");
    const std::string spacing = c.get_string("grid.spacing", "uniform");
    const auto intervals = static_cast<std::size_t>(points - 1);
    if (spacing == "uniform") return TimeGrid::uniform(t_max, intervals);
    if (spacing == "graded") {
        const double q = c.get_double("grid.grading", 2.5);
        if (!(q >= 1.0)) throw ConfigError("field 'grid.grading' must be >= 1");
        return TimeGrid::graded(t_max, intervals, q);
    }
    throw ConfigError("field 'grid.spacing' must be uniform or graded, got '" + spacing + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// "a:nu, a:nu, ..."
inline std::vector<ReactionTerm> parse_terms(const std::string& text) {
    std::vector<ReactionTerm> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("field 'problem.terms': entry '" + item + "' must look like a:nu");
        Config tmp;
        tmp.set("problem.terms", trim(item.substr(0, colon)));
        const double a = tmp.get_double("problem.terms");
        tmp.set("problem.terms", trim(item.substr(colon + 1)));
        const double nu = tmp.get_double("problem.terms");
        out.push_back({a, nu});
    }
    if (out.empty()) throw ConfigError("field 'problem.terms' is empty");
    return out;
}

inline SampledFunction read_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("field 'forcing.table': cannot open '" + path + "'");
    std::vector<double> t, v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("field 'forcing.table': line " + std::to_string(line_no) + " needs t,f");
        Config tmp;
        tmp.set("forcing.table", trim(line.substr(0, comma)));
        t.push_back(tmp.get_double("forcing.table"));
        tmp.set("forcing.table", trim(line.substr(comma + 1)));
        v.push_back(tmp.get_double("forcing.table"));
    }
    try {
        return SampledFunction(TimeGrid(std::move(t)), std::move(v));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field 'forcing.table': ") + e.what());
    }
}

inline Forcing forcing_from(const Config& c) {
    const std::string type = c.get_string("forcing.type", "unit");
    if (type == "unit") return Forcing::unit();
    if (type == "power_law") return Forcing::power_law(c.get_double("forcing.rho"));
    if (type == "mittag_leffler")
        return Forcing::mittag_leffler(c.get_double("forcing.nu"), c.get_double("forcing.gamma"),
                                       c.get_double("forcing.delta", 1.0), c.get_double("forcing.c", 1.0));
    if (type == "table") return Forcing::tabulated(read_table(c.get_string("forcing.table")));
    throw ConfigError("field 'forcing.type' must be unit, power_law, mittag_leffler or table, got '" + type + "'");
}

inline SolverConfig solver_from(const Config& c) {
    SolverConfig s;
    s.max_layers = static_cast<int>(c.get_int("solver.max_layers", s.max_layers));
    s.layer_tolerance = c.get_double("solver.layer_tolerance", s.layer_tolerance);
    s.series.eps_rel = c.get_double("solver.eps_rel", s.series.eps_rel);
    s.series.max_terms = c.get_int("solver.max_terms", s.series.max_terms);
    if (!(s.series.eps_rel > 0.0)) throw ConfigError("field 'solver.eps_rel' must be > 0");
    if (s.series.max_terms < 1) throw ConfigError("field 'solver.max_terms' must be >= 1");
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field ") + e.what());
    }
    return s;
}

inline std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& console) {
    if (path.empty() || path == "-") return console;
    file.open(path);
    if (!file) throw ConfigError("field 'output.path': cannot write '" + path + "'");
    return file;
}

// ---------------------------------------------------------------- reaction

struct ReactionSetup {
    std::string method;
    ReactionProblem problem;
    SolverConfig solver;
    TimeGrid grid;
    double nu = 0.0, c = 0.0, a = 0.0;  // cascade / geometric parameters
    int n = 0;
};

inline ReactionSetup reaction_setup(const Config& cfg) {
    ReactionSetup s;
    s.method = cfg.get_string("solver.method", "theorem1");
    s.problem.N0 = cfg.get_double("problem.N0", 1.0);
    s.problem.forcing = forcing_from(cfg);
    s.solver = solver_from(cfg);
    s.grid = time_grid(cfg);
    auto int_field = [&](const std::string& key) {
        const long v = cfg.get_int(key);
        if (v < 1) throw ConfigError("field '" + key + "' must be >= 1");
        return static_cast<int>(v);
    };
    if (s.method == "cascade") {
        s.nu = cfg.get_double("cascade.nu");
        s.c = cfg.get_double("cascade.c");
        s.n = int_field("cascade.n");
        if (!(s.nu > 0.0)) throw ConfigError("field 'cascade.nu' must be > 0");
        if (!(s.c > 0.0)) throw ConfigError("field 'cascade.c' must be > 0");
        s.problem.terms = binomial_cascade_terms(s.nu, s.c, s.n);
    } else if (s.method == "geometric") {
        s.nu = cfg.get_double("geometric.nu");
        s.a = cfg.get_double("geometric.a");
        s.n = int_field("geometric.n");
        if (!(s.nu > 0.0)) throw ConfigError("field 'geometric.nu' must be > 0");
        if (!(s.a > 0.0)) throw ConfigError("field 'geometric.a' must be > 0");
        s.problem.terms = geometric_terms(s.nu, s.a, s.n);
    } else if (s.method == "theorem1" || s.method == "volterra") {
        s.problem.terms = parse_terms(cfg.get_string("problem.terms"));
    } else {
        throw ConfigError("field 'solver.method' must be theorem1, cascade, geometric or volterra, got '" + s.method + "'");
    }
    try {
        s.problem.validate();
        // bounded forcing is a precondition of every grid solver
        (void)s.problem.forcing.sample(TimeGrid::uniform(s.grid.back(), 1));
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field ") + e.what());
    }
    return s;
}

inline Solution reaction_solve(const ReactionSetup& s, const TimeGrid& grid) {
    if (s.method == "theorem1") return solve_theorem1(s.problem, grid, s.solver);
    if (s.method == "cascade") return solve_binomial_cascade(s.nu, s.c, s.n, s.problem.forcing, grid, s.solver, s.problem.N0);
    if (s.method == "geometric") return solve_geometric(s.nu, s.a, s.n, s.problem.forcing, grid, s.solver, s.problem.N0);
    return solve_volterra_direct(s.problem, grid);
}

/// Every other node of `grid` (the grid-halving companion).
inline TimeGrid coarsen(const TimeGrid& grid) {
    std::vector<double> t;
    for (std::size_t i = 0; i < grid.size(); i += 2) t.push_back(grid[i]);
    if (t.back() != grid.back()) t.push_back(grid.back());
    return TimeGrid(std::move(t));
}

inline int run_reaction(const Config& cfg, const std::string& output, std::ostream& console, std::ostream& log) {
    const ReactionSetup s = reaction_setup(cfg);
    Solution sol = reaction_solve(s, s.grid);
    if (s.method != "theorem1") {
        // direct discretizations: compare with the solution on the halved grid
        const Solution coarse = reaction_solve(s, coarsen(s.grid));
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            sol.err_est[i] = std::abs(sol.N.values[i] - coarse.N(s.grid[i]));
    }
    std::ofstream file;
    std::ostream& out = open_output(output, file, console);
    out << "t,N,err_est,flags\n";
    const std::string flags = sol.cancellation_warning ? "cancellation" : "";
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        out << num(s.grid[i]) << ',' << num(sol.N.values[i]) << ',' << num(sol.err_est[i]) << ',' << flags << '\n';
    double worst = 0.0;
    for (double e : sol.err_est) worst = std::max(worst, e);
    log << "reaction: method=" << s.method << " nodes=" << s.grid.size() << " N(t_max)=" << num(sol.N.values.back())
        << " max_err_est=" << num(worst);
    if (s.method == "theorem1") log << " layers=" << sol.layers_used;
    if (sol.cancellation_warning) log << " [cancellation warning]";
    log << '\n';
    return kOk;
}

// ---------------------------------------------------------------- diffusion

inline std::vector<double> linspace(const Config& c, const std::string& prefix) {
    const double lo = c.get_double(prefix + "_min");
    const double hi = c.get_double(prefix + "_max");
    const long n = c.get_int(prefix + "_points");
    if (n < 1) throw ConfigError("field '" + prefix + "_points' must be >= 1");
    if (n > 1 && !(hi > lo)) throw ConfigError("field '" + prefix + "_max' must exceed '" + prefix + "_min'");
    std::vector<double> out;
    for (long i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

inline int run_diffusion(const Config& cfg, const std::string& output, std::ostream& console, std::ostream& log) {
    DiffusionQuery base;
    base.n = static_cast<int>(cfg.get_int("diffusion.dim", 1));
    base.alpha = cfg.get_double("diffusion.alpha");
    base.c_nu = cfg.get_double("diffusion.c", 1.0);
    const std::vector<double> xs = linspace(cfg, "grid.x");
    const std::vector<double> ts = cfg.get_list("grid.t_values");
    if (ts.empty()) throw ConfigError("field 'grid.t_values' is empty");
    try {
        for (double t : ts) {
            DiffusionQuery q = base;
            q.t = t;
            q.validate();
        }
        if (base.n == 2 && base.alpha == 1.0)
            throw ConfigError("field 'diffusion.alpha': dim = 2 is served by the small-r asymptote, which needs alpha < 1");
        if (base.n % 2 == 0 && base.n != 2)
            throw ConfigError("field 'diffusion.dim': even dim " + std::to_string(base.n) + " is unsupported");
        if (base.n >= 2)
            for (double x : xs)
                if (x == 0.0) throw ConfigError("field 'grid.x_min'/'grid.x_max': x = 0 is singular for dim >= 2");
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field ") + e.what());
    }

    struct Row { double N = 0.0, err = 0.0; std::string flags; };
    std::vector<Row> rows(xs.size() * ts.size());
    const unsigned workers = thread_count();
    std::vector<std::unique_ptr<Propagator1D>> p1(workers);
    parallel_for(rows.size(), [&](std::size_t w, std::size_t k) {
        const double t = ts[k / xs.size()];
        const double x = xs[k % xs.size()];
        Row& r = rows[k];
        if (base.n == 2) {
            r.N = propagator_2d_smallx(base.alpha, base.c_nu, std::abs(x), t);
            r.flags = "asymptotic";
            return;
        }
        SeriesValue v;
        if (base.n == 1) {
            if (!p1[w]) p1[w] = std::make_unique<Propagator1D>(base.alpha, base.c_nu);
            v = (*p1[w])(x, t);
        } else {
            DiffusionQuery q = base;
            q.r = std::abs(x);
            q.t = t;
            v = propagator(q);
        }
        r.N = v.value;
        r.err = v.abs_error_estimate;
        if (v.cancellation_warning()) r.flags = "cancellation";
    });

    std::ofstream file;
    std::ostream& out = open_output(output, file, console);
    out << "x,t,N,err_est,flags\n";
    std::size_t flagged = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Row& r = rows[k];
        flagged += r.flags == "cancellation";
        out << num(xs[k % xs.size()]) << ',' << num(ts[k / xs.size()]) << ',' << num(r.N) << ',' << num(r.err) << ','
            << r.flags << '\n';
    }
    log << "diffusion: dim=" << base.n << " alpha=" << num(base.alpha) << " rows=" << rows.size();
    if (flagged) log << " [" << flagged << " rows with cancellation warning]";
    log << '\n';
    return kOk;
}

// ---------------------------------------------------------------- levy

inline int run_levy(const Config& cfg, const std::string& output, std::ostream& console, std::ostream& log) {
    const double rho = cfg.get_double("levy.rho");
    std::vector<double> ts = linspace(cfg, "grid.t");
    const std::string spacing = cfg.get_string("grid.spacing", "linear");
    if (spacing == "log") {
        const double lo = cfg.get_double("grid.t_min"), hi = cfg.get_double("grid.t_max");
        if (!(lo > 0.0)) throw ConfigError("field 'grid.t_min' must be > 0");
        for (std::size_t i = 0; i < ts.size(); ++i)
            ts[i] = ts.size() == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(ts.size() - 1));
    } else if (spacing != "linear") {
        throw ConfigError("field 'grid.spacing' must be linear or log, got '" + spacing + "'");
    }
    try {
        for (double t : ts) LevyQuery{rho, t}.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field ") + e.what());
    }
    std::vector<SeriesValue> vals(ts.size());
    parallel_for(ts.size(), [&](std::size_t, std::size_t i) { vals[i] = levy_density({rho, ts[i]}); });
    std::ofstream file;
    std::ostream& out = open_output(output, file, console);
    out << "t,phi,err_est\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        out << num(ts[i]) << ',' << num(vals[i].value) << ',' << num(vals[i].abs_error_estimate) << '\n';
    log << "levy: rho=" << num(rho) << " points=" << ts.size() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- ml, verify

inline int run_ml(double beta, double gamma_, double delta, double z, std::ostream& out) {
    const SeriesValue v = ml_generalized({beta, gamma_, delta}, z);
    out << "value=" << num(v.value) << '\n'
        << "err_est=" << num(v.abs_error_estimate) << '\n'
        << "terms=" << v.terms_used << '\n'
        << "cancellation_ratio=" << num(v.cancellation_ratio) << (v.cancellation_warning() ? " [warning]" : "") << '\n';
    return kOk;
}

inline int run_verify(std::ostream& out) {
    const auto results = run_acceptance();
    bool ok = true;
    for (const auto& r : results) {
        out << format_result(r) << '\n';
        ok = ok && r.passed;
    }
    out << (ok ? "all criteria passed" : "some criteria FAILED") << '\n';
    return ok ? kOk : kNumericalError;
}

// ---------------------------------------------------------------- entry

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fractional reaction and diffusion solvers"};
    app.require_subcommand(1);

    std::string config_path, output;
    std::vector<std::string> overrides;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "config file")->required();
        sub->add_option("-o,--output", output, "CSV output path (default: stdout or output.path)");
        sub->add_option("-s,--set", overrides, "override a config key: section.key=value");
    };
    auto* reaction = app.add_subcommand("reaction", "solve a fractional reaction problem");
    auto* diffusion = app.add_subcommand("diffusion", "evaluate the diffusion propagator on a grid");
    auto* levy = app.add_subcommand("levy", "evaluate the one-sided stable density");
    add_common(reaction);
    add_common(diffusion);
    add_common(levy);

    auto* ml = app.add_subcommand("ml", "evaluate E^delta_{beta,gamma}(z)");
    double beta = 1.0, gamma_ = 1.0, delta = 1.0, z = 0.0;
    ml->add_option("--beta", beta)->required();
    ml->add_option("--gamma", gamma_, "default 1");
    ml->add_option("--delta", delta, "default 1");
    ml->add_option("--z", z)->required();

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (ml->parsed()) return run_ml(beta, gamma_, delta, z, out);
        if (verify->parsed()) return run_verify(out);
        Config cfg = Config::load(config_path);
        for (const auto& o : overrides) cfg.apply_override(o);
        if (output.empty()) output = cfg.get_string("output.path", "-");
        if (reaction->parsed()) return run_reaction(cfg, output, out, err);
        if (diffusion->parsed()) return run_diffusion(cfg, output, out, err);
        return run_levy(cfg, output, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << " (best value " << num(e.best_value()) << ")\n";
        return kNumericalError;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace frackit::cli
