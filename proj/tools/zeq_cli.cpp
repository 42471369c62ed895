#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <zeq/zeq.hpp>

using namespace zeq;

namespace {

struct Source {
    std::string config;
    std::string preset;
    std::vector<std::string> sets;
    std::string out;
    bool plots = false;
};

void add_source_options(CLI::App* app, Source& src, bool with_sets = true)
{
    app->add_option("--config", src.config, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--preset", src.preset, "named preset")->excludes(app->get_option("--config"));
    if (with_sets)
        app->add_option("--set", src.sets, "override, e.g. --set solver.dt=5e-4 (repeatable)");
    app->add_option("--out", src.out, "output directory");
    app->add_flag("--plots", src.plots, "write SVG plots");
}

std::pair<std::string, std::string> split_assignment(const std::string& s)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value (got '" + s + "')");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

RunConfig resolve(const Source& src, const std::string& fallback_preset)
{
    RunConfig c;
    if (!src.config.empty())
        c = load_config(src.config);
    else
        c = preset(src.preset.empty() ? fallback_preset : src.preset);
    std::vector<std::pair<std::string, std::string>> sets;
    for (const auto& s : src.sets)
        sets.push_back(split_assignment(s));
    c = with_overrides(c, sets);
    if (!src.out.empty())
        c.output_dir = src.out;
    if (src.plots)
        c.plots = true;
    return c;
}

void print_reports(const std::vector<TheoremReport>& reports)
{
    for (const auto& r : reports) {
        const char* tag = r.verdict == Verdict::pass           ? "PASS"
                          : r.verdict == Verdict::inapplicable ? "N/A "
                          : r.verdict == Verdict::diverged     ? "DIVG"
                                                               : "FAIL";
        std::printf("%s %-22s %s = %s (tol %s)  %s\n", tag, r.claim.c_str(), r.measured_name.c_str(),
                    format_number(r.measured).c_str(), format_number(r.tolerance).c_str(), r.notes.c_str());
    }
}

int finish(const ExperimentResult& res)
{
    print_reports(res.reports);
    if (res.series.diverged())
        std::fprintf(stderr, "diverged: %s\n", res.message.c_str());
    std::printf("wrote %s (exit %d)\n", res.resolved.output_dir.c_str(), res.exit_code);
    return res.exit_code;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t expected, const char* what)
{
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw ConfigError(std::string("malformed ") + what + " '" + s + "'");
        v.push_back(x);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (expected && v.size() != expected)
        throw ConfigError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated numbers");
    return v;
}

int cmd_norms(const std::string& file, const std::vector<double>& sobolev, const std::vector<double>& gevrey,
              const std::vector<std::string>& km, const std::vector<std::string>& em, const std::string& out)
{
    const Field u = read_sample_file(file);
    nlohmann::ordered_json j;
    j["file"] = file;
    j["L"] = u.grid.half_length();
    j["N"] = u.grid.size();
    j["max_abs"] = max_abs(u);
    j["l1"] = l1_norm(u);
    j["c1"] = c1_norm(u);
    nlohmann::ordered_json hs = nlohmann::ordered_json::array();
    for (double s : sobolev)
        hs.push_back({{"s", s}, {"value", sobolev_norm(u, s)}});
    j["sobolev"] = hs;
    nlohmann::ordered_json gv = nlohmann::ordered_json::array();
    for (double sigma : gevrey) {
        const auto g = gevrey_norm(u, {sigma, 0.0});
        gv.push_back({{"sigma", sigma}, {"s", 0.0}, {"value", g.value}, {"tail_dominated", g.tail_dominated}});
    }
    j["gevrey"] = gv;
    nlohmann::ordered_json kj = nlohmann::ordered_json::array();
    for (const auto& spec : km) {
        const auto p = parse_numbers(spec, 3, "--km");
        kj.push_back({{"sigma", p[0]}, {"s", p[1]}, {"J", static_cast<int>(p[2])},
                      {"value_sq", kato_masuda_sq(u, p[0], p[1], NormTruncation{static_cast<int>(p[2])})}});
    }
    j["kato_masuda"] = kj;
    nlohmann::ordered_json ej = nlohmann::ordered_json::array();
    for (const auto& spec : em) {
        const auto p = parse_numbers(spec, 3, "--em");
        ej.push_back({{"sigma", p[0]}, {"m", static_cast<int>(p[1])}, {"J", static_cast<int>(p[2])},
                      {"value", em_norm(u, p[0], static_cast<int>(p[1]), NormTruncation{static_cast<int>(p[2])})}});
    }
    j["em"] = ej;
    const auto est = analyticity_radius(u);
    j["radius"] = {{"radius", est.radius},         {"infinite", est.infinite}, {"fit_quality", est.fit_quality},
                   {"points", est.points},         {"low_quality", est.low_quality},
                   {"curvature", est.curvature}};
    const std::string text = to_json_text(j);
    std::fputs(text.c_str(), stdout);
    if (!out.empty())
        write_text_file(out, text);
    return exit_status::ok;
}

int cmd_lifespan(int k, double cm, double norm, const std::string& file, int m, double sigma0, double sigma,
                 bool table)
{
    if (table) {
        std::fputs(lifespan_table_csv(cm).c_str(), stdout);
        return exit_status::ok;
    }
    if (!file.empty())
        norm = em_norm(read_sample_file(file), sigma0, m);
    if (!(norm >= 0.0))
        throw ConfigError("give --norm or --file");
    const Rational r = lifespan_constant_exact(k);
    std::printf("kappa_exact_cm1 %lld/%lld\n", static_cast<long long>(r.num), static_cast<long long>(r.den));
    std::printf("kappa %s\n", format_number(lifespan_constant(k, cm)).c_str());
    std::printf("norm %s\n", format_number(norm).c_str());
    std::printf("T %s\n", format_number(lifespan_bound_from_norm(norm, k, sigma0, sigma, cm)).c_str());
    return exit_status::ok;
}

int cmd_radius_track(RunConfig cfg)
{
    if (!cfg.wants("radius_bound"))
        cfg.checks.push_back("radius_bound");
    const auto res = run_experiment(cfg);
    const auto& s = res.series;
    TheoremReport bound;
    for (const auto& r : res.reports)
        if (r.claim == "radius_bound")
            bound = r;
    double A = 0, B = 0;
    for (const auto& [name, value] : bound.parameters) {
        if (name == "A")
            A = value;
        if (name == "B")
            B = value;
    }
    std::string csv = "t,radius_fit,radius_fit_quality,radius_infinite,sigma_t,lower_bound\n";
    PlotSeries fit{"fitted radius", {}, {}}, low{"lower bound", {}, {}};
    for (const auto& r : s.records) {
        const double sig = cfg.radius_sigma0 - A * std::expm1(B * r.t);
        csv += format_number(r.t) + "," + format_number(r.radius_fit) + "," + format_number(r.radius_fit_quality) + ","
               + (r.radius_infinite ? "1" : "0") + "," + format_number(sig) + "," + format_number(std::exp(sig)) + "\n";
        fit.x.push_back(r.t);
        fit.y.push_back(r.radius_fit);
        low.x.push_back(r.t);
        low.y.push_back(std::exp(sig));
    }
    const std::filesystem::path dir(res.resolved.output_dir);
    write_text_file(dir / "radius_track.csv", csv);
    if (res.resolved.plots)
        write_text_file(dir / "radius_track.svg",
                        svg_line_plot({"Analyticity radius", "t", "radius", true}, {fit, low}));
    return finish(res);
}

int cmd_characteristics(RunConfig cfg, int substeps, std::size_t n_seeds, const std::string& interp)
{
    if (substeps > 0)
        cfg.flow_substeps = substeps;
    if (!cfg.wants("transport"))
        cfg.checks.push_back("transport");
    auto res = run_experiment(cfg);
    const auto& snaps = res.series.snapshots;
    if (snaps.empty())
        return finish(res);
    const Grid g = res.series.grid;
    std::vector<double> seeds;
    if (n_seeds > 0)
        for (std::size_t i = 0; i < n_seeds; ++i)
            seeds.push_back(-g.half_length() + 2.0 * g.half_length() * (i + 0.5) / n_seeds);
    FlowOptions opt = flow_options(res.resolved);
    if (interp == "linear")
        opt.interpolation = TimeInterpolation::linear;
    else if (interp != "hermite")
        throw ConfigError("--interp must be hermite or linear");
    const FlowHistory flow = evolve_flow(snaps, res.resolved.model, seeds, opt);

    // One row per recorded time, matching the diagnostics stride.
    std::string csv = "t";
    for (std::size_t i = 0; i < flow.maps.front().seeds.size(); ++i)
        csv += ",y" + std::to_string(i);
    csv += "\nseed";
    for (double x : flow.maps.front().seeds)
        csv += "," + format_number(x);
    csv += "\n";
    const auto stride = static_cast<std::size_t>(res.resolved.solver.snapshot_stride);
    for (std::size_t n = 0; n < flow.maps.size(); ++n) {
        if (n % stride != 0 && n + 1 != flow.maps.size())
            continue;
        csv += format_number(flow.maps[n].t);
        for (double y : flow.maps[n].positions)
            csv += "," + format_number(y);
        csv += "\n";
    }
    const std::filesystem::path dir(res.resolved.output_dir);
    write_text_file(dir / "flow_map.csv", csv);
    const double resid = transport_residual(flow.maps.back(), res.series.m0, momentum(snaps.back().u));
    std::printf("transport_residual %s monotone %d\n", format_number(resid).c_str(), flow.monotone ? 1 : 0);
    return finish(res);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pseudospectral simulator and diagnostics for m_t + u^k m_x = 0, m = u - u_xx"};
    app.require_subcommand(1);

    Source sim_src, ver_src, rad_src, chr_src, swp_src;
    auto* simulate = app.add_subcommand("simulate", "integrate and write diagnostics.csv (no checks)");
    add_source_options(simulate, sim_src);

    auto* verify = app.add_subcommand("verify", "run the theorem checks of a preset or config; all presets if neither is given");
    add_source_options(verify, ver_src);

    std::string norms_file, norms_out;
    std::vector<double> norms_s, norms_gevrey;
    std::vector<std::string> norms_km, norms_em;
    auto* norms = app.add_subcommand("norms", "one-shot norm report for a sample file (x,u CSV)");
    norms->add_option("--file", norms_file, "sample file")->required();
    norms->add_option("--sobolev", norms_s, "Sobolev indices s")->delimiter(',');
    norms->add_option("--gevrey", norms_gevrey, "Gevrey sigma values (s = 0)")->delimiter(',');
    norms->add_option("--km", norms_km, "Kato-Masuda sigma,s,J (repeatable)");
    norms->add_option("--em", norms_em, "E_{sigma,m} sigma,m,J (repeatable)");
    norms->add_option("--out", norms_out, "also write the JSON report here");

    int ls_k = 1, ls_m = 3;
    double ls_cm = 1.0, ls_norm = -1.0, ls_sigma0 = 1.0, ls_sigma = 0.5;
    std::string ls_file;
    bool ls_table = false;
    auto* lifespan = app.add_subcommand("lifespan", "guaranteed existence time kappa / norm^k * (sigma0 - sigma)");
    lifespan->add_option("--k", ls_k, "nonlinearity exponent")->check(CLI::Range(1, 12));
    lifespan->add_option("--cm", ls_cm, "algebra constant c_m")->check(CLI::PositiveNumber);
    auto* norm_opt = lifespan->add_option("--norm", ls_norm, "E_{sigma0,m} norm of u0");
    lifespan->add_option("--file", ls_file, "compute the norm from a sample file")->excludes(norm_opt);
    lifespan->add_option("--m", ls_m, "Sobolev order m >= 3 (with --file)");
    lifespan->add_option("--sigma0", ls_sigma0, "initial strip parameter");
    lifespan->add_option("--sigma", ls_sigma, "target strip parameter");
    lifespan->add_flag("--table", ls_table, "print kappa for k = 1..12");

    auto* radius = app.add_subcommand("radius-track", "radius fit along a k = 1 run with the lower-bound overlay");
    add_source_options(radius, rad_src);

    int chr_substeps = 0;
    std::size_t chr_seeds = 0;
    std::string chr_interp = "hermite";
    auto* chars = app.add_subcommand("characteristics", "flow map y(t, x) and transport residual");
    add_source_options(chars, chr_src);
    chars->add_option("--substeps", chr_substeps, "RK4 substeps per snapshot interval")->check(CLI::PositiveNumber);
    chars->add_option("--seeds", chr_seeds, "number of uniformly spaced seeds (default: grid nodes)");
    chars->add_option("--interp", chr_interp, "time interpolation: hermite or linear");

    unsigned jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "cartesian parameter grid, one subdirectory per point");
    add_source_options(sweep, swp_src, false);
    sweep->add_option("--set", swp_src.sets, "axis key=v1,v2,... (repeatable)")->required();
    sweep->add_option("--jobs", jobs, "concurrent points")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_status::usage;
    }

    try {
        if (*simulate) {
            RunConfig c = resolve(sim_src, "zero");
            c.checks.clear();
            return finish(run_experiment(c));
        }
        if (*verify) {
            if (ver_src.config.empty() && ver_src.preset.empty()) {
                int worst = exit_status::ok;
                for (const auto& name : preset_names()) {
                    Source s = ver_src;
                    s.preset = name;
                    if (!ver_src.out.empty())
                        s.out = (std::filesystem::path(ver_src.out) / name).string();
                    std::printf("== %s\n", name.c_str());
                    const int code = finish(run_experiment(resolve(s, name)));
                    worst = std::max(worst, code);
                }
                return worst;
            }
            const RunConfig c = resolve(ver_src, "zero");
            const auto res = run_experiment(c);
            if (c.wants("lifespan"))
                std::fputs(lifespan_table_csv(c.solver.c_m).c_str(), stdout);
            return finish(res);
        }
        if (*norms)
            return cmd_norms(norms_file, norms_s, norms_gevrey, norms_km, norms_em, norms_out);
        if (*lifespan)
            return cmd_lifespan(ls_k, ls_cm, ls_norm, ls_file, ls_m, ls_sigma0, ls_sigma, ls_table);
        if (*radius)
            return cmd_radius_track(resolve(rad_src, "radius_poisson"));
        if (*chars)
            return cmd_characteristics(resolve(chr_src, "theorem12_k1"), chr_substeps, chr_seeds, chr_interp);
        if (*sweep) {
            Source base_src = swp_src;
            base_src.sets.clear();
            const RunConfig base = resolve(base_src, "zero");
            std::vector<SweepAxis> parsed;
            for (const auto& a : swp_src.sets)
                parsed.push_back(parse_sweep_axis(a));
            const auto points = run_sweep(base, parsed, jobs, swp_src.out.empty() ? base.output_dir : swp_src.out);
            for (std::size_t p = 0; p < points.size(); ++p) {
                std::printf("%s exit %d", points[p].dir.c_str(), points[p].exit_code);
                if (!points[p].error.empty())
                    std::printf("  %s", points[p].error.c_str());
                std::printf("\n");
            }
            return sweep_exit_code(points);
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return exit_status::io_error;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n\n%s", e.what(), app.help().c_str());
        return exit_status::usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_status::io_error;
    }
    return exit_status::usage;
}
