#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "characteristics.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "initial_data.hpp"
#include "io.hpp"
#include "theorems.hpp"

namespace zeq {

namespace exit_status {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int diverged = 2;
inline constexpr int io_error = 3;
inline constexpr int usage = 64;
} // namespace exit_status

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{
        "zero",          "theorem12_k1",   "theorem12_k2", "theorem12_k3",   "conservation_k1",
        "lemma52_k1",    "ifunctional_k1", "support_bump", "radius_poisson", "lifespan_table",
    };
    return names;
}

/// Reference configurations, one bundle per claim family.
inline RunConfig preset(const std::string& name)
{
    RunConfig c;
    c.output_dir = "out/" + name;
    c.initial = {Family::gaussian_momentum, 1.0, 1.0, 0.0, 1, 1, ""};
    c.solver.dt = 1e-3;
    c.solver.snapshot_stride = 10;

    if (name == "zero") {
        c.n_points = 128;
        c.initial.amplitude = 0.0;
        c.solver.dt = 1e-2;
        c.solver.t_end = 0.5;
        c.solver.snapshot_stride = 1;
        c.checks = {"mean_conservation", "sign_invariance",   "l1_conservation", "slope_bound",
                    "h3_growth",         "i_functional_identity", "energy_estimate", "transport"};
    } else if (name == "theorem12_k1" || name == "theorem12_k2" || name == "theorem12_k3") {
        c.model.k = name.back() - '0';
        c.solver.t_end = 1.0;
        if (c.model.k == 3)
            c.solver.dealias_fraction = 0.5;
        c.checks = {"sign_invariance", "transport"};
    } else if (name == "conservation_k1") {
        c.solver.t_end = 2.0;
        c.checks = {"mean_conservation", "l1_conservation"};
    } else if (name == "lemma52_k1") {
        c.solver.t_end = 2.0;
        c.checks = {"slope_bound", "h3_growth", "energy_estimate"};
    } else if (name == "ifunctional_k1") {
        c.solver.t_end = 1.0;
        c.checks = {"i_functional_identity"};
    } else if (name == "support_bump") {
        c.half_length = 10.0;
        c.n_points = 1024;
        c.initial = {Family::smooth_bump, 1.0, 1.0, 0.0, 1, 1, ""};
        c.solver.t_end = 0.1;
        c.solver.snapshot_stride = 1;
        c.checks = {"support_spreading"};
    } else if (name == "radius_poisson") {
        c.initial = {Family::poisson_kernel, 1.0, 1.5, 0.0, 1, 1, ""};
        c.solver.t_end = 0.05;
        c.solver.snapshot_stride = 5;
        c.kato_masuda = {{-0.5, 2.0, 10}};
        c.checks = {"radius_bound"};
    } else if (name == "lifespan_table") {
        c.n_points = 128;
        c.solver.t_end = 0.0;
        c.checks = {"lifespan"};
    } else {
        std::string known;
        for (const auto& n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Overrides: "section.key=value" applied to the resolved document, then re-validated.

inline void set_config_value(nlohmann::ordered_json& doc, const std::string& key, const std::string& value)
{
    nlohmann::ordered_json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ConfigError("malformed override key '" + key + "'");
        if (dot == std::string::npos) {
            nlohmann::ordered_json v;
            try {
                v = nlohmann::ordered_json::parse(value);
            } catch (const nlohmann::json::parse_error&) {
                v = value;
            }
            (*node)[part] = v;
            return;
        }
        node = &(*node)[part];
        if (!node->is_object() && !node->is_null())
            throw ConfigError("override key '" + key + "' descends into a non-object");
        start = dot + 1;
    }
}

inline RunConfig with_overrides(const RunConfig& base, const std::vector<std::pair<std::string, std::string>>& sets)
{
    if (sets.empty())
        return base;
    auto doc = config_to_json(base);
    for (const auto& [k, v] : sets)
        set_config_value(doc, k, v);
    return parse_config(doc.dump());
}

// ---------------------------------------------------------------------------
// Running one configuration

/// kappa_m for k = 1..12, exact at c_m = 1 and scaled by c_m^{-k}.
inline std::string lifespan_table_csv(double c_m)
{
    std::string out = "k,kappa_exact_cm1,kappa\n";
    for (int k = 1; k <= 12; ++k) {
        const Rational r = lifespan_constant_exact(k);
        out += std::to_string(k) + "," + std::to_string(r.num) + "/" + std::to_string(r.den) + ","
               + format_number(lifespan_constant(k, c_m)) + "\n";
    }
    return out;
}

/// Initial data for the config; the file family takes its grid from the file and records it in `cfg`.
inline Field resolve_initial_data(RunConfig& cfg)
{
    if (cfg.initial.family == Family::file) {
        const Field f = read_sample_file(cfg.initial.path);
        cfg.half_length = f.grid.half_length();
        cfg.n_points = f.grid.size();
        return (cfg.initial.sign * cfg.initial.amplitude) * f;
    }
    return make_initial_data(cfg.initial, cfg.grid());
}

inline DiagnosticsOptions diagnostics_options(const RunConfig& cfg)
{
    DiagnosticsOptions opt;
    opt.sobolev_s = cfg.sobolev_s;
    opt.kato_masuda = cfg.kato_masuda;
    opt.em = cfg.em;
    opt.support_eps_rel = cfg.support_eps_rel;
    opt.keep_snapshots = cfg.wants("transport") || cfg.plots;
    return opt;
}

inline FlowOptions flow_options(const RunConfig& cfg)
{
    FlowOptions f;
    f.substeps = cfg.flow_substeps;
    f.dealias_fraction = cfg.solver.dealias_fraction;
    return f;
}

/// Guaranteed existence time, checked against the run: no divergence before min(T, t_end).
inline TheoremReport check_lifespan(const DiagnosticsSeries& s, const RunConfig& cfg)
{
    TheoremReport r;
    r.claim = "lifespan";
    r.measured_name = "guaranteed existence time T";
    const auto& l = cfg.lifespan;
    const double norm = em_norm(s.u0, l.sigma0, l.m);
    const Rational kappa = lifespan_constant_exact(s.model.k);
    r.parameters = {{"k", static_cast<double>(s.model.k)},
                    {"m", static_cast<double>(l.m)},
                    {"sigma0", l.sigma0},
                    {"sigma", l.sigma},
                    {"c_m", cfg.solver.c_m},
                    {"kappa_num", static_cast<double>(kappa.num)},
                    {"kappa_den", static_cast<double>(kappa.den)},
                    {"kappa", lifespan_constant(s.model.k, cfg.solver.c_m)},
                    {"em_norm", norm}};
    r.measured = lifespan_bound_from_norm(norm, s.model.k, l.sigma0, l.sigma, cfg.solver.c_m);
    const double t_reached = s.records.empty() ? 0.0 : s.records.back().t;
    if (s.diverged() && t_reached < r.measured) {
        r.verdict = Verdict::fail;
        r.notes = "run diverged before the guaranteed time";
    } else {
        r.verdict = Verdict::pass;
        r.notes = "kappa = " + std::to_string(kappa.num) + "/" + std::to_string(kappa.den) + " at c_m = 1";
    }
    return r;
}

inline std::vector<TheoremReport> run_checks(const RunConfig& cfg, const DiagnosticsSeries& s)
{
    std::vector<TheoremReport> out;
    for (const auto& id : cfg.checks) {
        if (id == "mean_conservation")
            out.push_back(check_mean_conservation(s));
        else if (id == "sign_invariance")
            out.push_back(check_sign_invariance(s, s.m0));
        else if (id == "l1_conservation")
            out.push_back(check_l1_conservation(s));
        else if (id == "slope_bound")
            out.push_back(check_slope_bound(s, s.m0));
        else if (id == "h3_growth")
            out.push_back(check_h3_growth(s, s.m0));
        else if (id == "i_functional_identity")
            out.push_back(check_i_functional_identity(s));
        else if (id == "support_spreading")
            out.push_back(check_support_spreading(s));
        else if (id == "energy_estimate")
            out.push_back(check_energy_estimate(s));
        else if (id == "transport")
            out.push_back(check_transport(s, tolerance::transport, {}, flow_options(cfg)));
        else if (id == "radius_bound")
            out.push_back(check_radius_bound(s, cfg.radius_sigma0, NormTruncation{cfg.radius_J}));
        else if (id == "lifespan")
            out.push_back(check_lifespan(s, cfg));
        else
            throw ConfigError("unknown check '" + id + "'");
    }
    return out;
}

struct ExperimentResult {
    int exit_code = exit_status::ok;
    RunConfig resolved;
    DiagnosticsSeries series;
    std::vector<TheoremReport> reports;
    std::string message;
};

inline int exit_code_for(const DiagnosticsSeries& s, const std::vector<TheoremReport>& reports)
{
    if (s.diverged())
        return exit_status::diverged;
    for (const auto& r : reports)
        if (!r.ok())
            return exit_status::check_failed;
    return exit_status::ok;
}

/// Integrate, run the requested checks and, if `write` is set, write the artifacts into cfg.output_dir.
inline ExperimentResult run_experiment(const RunConfig& cfg_in, bool write = true)
{
    const auto started = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.resolved = cfg_in;
    RunConfig& cfg = res.resolved;
    const Field u0 = resolve_initial_data(cfg);

    res.series = simulate_series(u0, cfg.solver, cfg.model, diagnostics_options(cfg));
    res.reports = run_checks(cfg, res.series);
    res.exit_code = exit_code_for(res.series, res.reports);
    res.message = res.series.message;

    if (!write)
        return res;
    const std::filesystem::path dir(cfg.output_dir);
    ensure_directory(dir);
    write_text_file(dir / "diagnostics.csv", diagnostics_csv(res.series));
    write_text_file(dir / "reports.json", reports_json(res.reports));
    write_text_file(dir / "resolved_config.json", emit_config(cfg));
    if (!cfg.em.empty())
        write_text_file(dir / "em_norms.csv", em_norms_csv(res.series));
    if (cfg.wants("lifespan"))
        write_text_file(dir / "lifespan_table.csv", lifespan_table_csv(cfg.solver.c_m));
    if (cfg.plots) {
        const auto& snaps = res.series.snapshots;
        const Field u_final = snaps.empty() ? u0 : snaps.back().u;
        std::optional<FlowHistory> flow;
        if (!snaps.empty())
            flow = evolve_flow(snaps, cfg.model, {}, flow_options(cfg));
        for (const auto& [name, body] : run_plots(res.series, u_final, flow ? &*flow : nullptr))
            write_text_file(dir / name, body);
    }

    // Wall-clock data lives only here.
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::string log = std::string("finished ") + stamp + "\nwall_seconds " + std::to_string(secs) + "\nstatus "
                      + to_string(res.series.status) + "\nexit_code " + std::to_string(res.exit_code) + "\n";
    if (!res.message.empty())
        log += "message " + res.message + "\n";
    write_text_file(dir / "run.log", log);
    return res;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepPoint {
    std::vector<std::string> values;
    std::string dir;
    int exit_code = exit_status::ok;
    std::string error;
};

/// "key=v1,v2,..." into an axis.
inline SweepAxis parse_sweep_axis(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw ConfigError("sweep axis must look like key=v1,v2 (got '" + spec + "')");
    SweepAxis a{spec.substr(0, eq), {}};
    std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        const auto comma = rest.find(',', start);
        const std::string v = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (v.empty())
            throw ConfigError("empty value in sweep axis '" + spec + "'");
        a.values.push_back(v);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return a;
}

/// Cartesian product of the axes, last axis fastest.  Every point is validated before any runs.
inline std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes, unsigned jobs,
                                         const std::string& out_dir)
{
    std::size_t total = 1;
    for (const auto& a : axes)
        total *= a.values.size();

    std::vector<SweepPoint> points(total);
    std::vector<RunConfig> configs;
    configs.reserve(total);
    for (std::size_t p = 0; p < total; ++p) {
        std::vector<std::pair<std::string, std::string>> sets;
        std::size_t rem = p;
        std::vector<std::string> values(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            values[a] = axes[a].values[rem % axes[a].values.size()];
            rem /= axes[a].values.size();
        }
        for (std::size_t a = 0; a < axes.size(); ++a)
            sets.emplace_back(axes[a].key, values[a]);
        char name[32];
        std::snprintf(name, sizeof name, "point_%04zu", p);
        sets.emplace_back("output.dir", nlohmann::json((std::filesystem::path(out_dir) / name).string()).dump());
        configs.push_back(with_overrides(base, sets));
        points[p].values = std::move(values);
        points[p].dir = name;
    }

    ensure_directory(out_dir);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t p; (p = next.fetch_add(1)) < total;) {
            try {
                points[p].exit_code = run_experiment(configs[p]).exit_code;
            } catch (const IoError& e) {
                points[p].exit_code = exit_status::io_error;
                points[p].error = e.what();
            } catch (const std::exception& e) {
                points[p].exit_code = exit_status::usage;
                points[p].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::max(1u, jobs); ++j)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::string index = "point";
    for (const auto& a : axes)
        index += "," + a.key;
    index += ",exit_code,dir\n";
    for (std::size_t p = 0; p < total; ++p) {
        index += std::to_string(p);
        for (const auto& v : points[p].values)
            index += "," + v;
        index += "," + std::to_string(points[p].exit_code) + "," + points[p].dir + "\n";
    }
    write_text_file(std::filesystem::path(out_dir) / "index.csv", index);
    return points;
}

/// Worst status over sweep points: I/O > usage > diverged > failed check.
inline int sweep_exit_code(const std::vector<SweepPoint>& points)
{
    int worst = exit_status::ok;
    const auto rank = [](int c) {
        switch (c) {
        case exit_status::io_error: return 4;
        case exit_status::usage: return 3;
        case exit_status::diverged: return 2;
        case exit_status::check_failed: return 1;
        default: return 0;
        }
    };
    for (const auto& p : points)
        if (rank(p.exit_code) > rank(worst))
            worst = p.exit_code;
    return worst;
}

} // namespace zeq
