#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagnostics.hpp"
#include "dynamics.hpp"
#include "grid.hpp"
#include "initial_data.hpp"

namespace zeq {

/// One schema problem: JSON pointer-style path plus message.
struct ConfigIssue {
    std::string path;
    std::string message;
};

class SchemaError : public ConfigError {
public:
    explicit SchemaError(std::vector<ConfigIssue> issues)
        : ConfigError(summarize(issues)), issues_(std::move(issues))
    {
    }

    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    static std::string summarize(const std::vector<ConfigIssue>& issues)
    {
        std::string s = "invalid configuration:";
        for (const auto& i : issues)
            s += "\n  " + i.path + ": " + i.message;
        return s;
    }

    std::vector<ConfigIssue> issues_;
};

struct LifespanRequest {
    int m = 3;
    double sigma0 = 1.0;
    double sigma = 0.5;

    bool operator==(const LifespanRequest&) const = default;
};

/// Check ids understood by the harness.
inline const std::vector<std::string>& known_checks()
{
    static const std::vector<std::string> ids{
        "mean_conservation", "sign_invariance",   "l1_conservation", "slope_bound",  "h3_growth",
        "i_functional_identity", "support_spreading", "energy_estimate", "transport", "radius_bound",
        "lifespan",
    };
    return ids;
}

struct RunConfig {
    ModelParams model;
    double half_length = 20.0;
    std::size_t n_points = 512;
    SolverConfig solver{1e-3, 1.0, kTwoThirds, false, 1.0, 1.0, 10};
    InitialDataSpec initial;
    std::vector<double> sobolev_s;
    std::vector<KatoMasudaRequest> kato_masuda;
    std::vector<EmRequest> em;
    std::vector<std::string> checks;
    LifespanRequest lifespan;
    double radius_sigma0 = -0.5;
    int radius_J = 10;
    double support_eps_rel = 1e-10;
    int flow_substeps = 1;
    std::string output_dir = "out";
    bool plots = false;

    Grid grid() const { return Grid(half_length, n_points); }
    bool wants(const std::string& check) const
    {
        for (const auto& c : checks)
            if (c == check)
                return true;
        return false;
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

using nlohmann::json;

class Reader {
public:
    std::vector<ConfigIssue> issues;

    void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

    /// Object at `path`; records an issue and returns nullptr if it is not one.
    const json* object(const json& parent, const std::string& key, const std::string& path)
    {
        if (!parent.contains(key))
            return nullptr;
        const json& v = parent.at(key);
        if (!v.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
    {
        for (const auto& [key, value] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed)
                ok = ok || key == a;
            if (!ok)
                fail(path + "/" + key, "unknown key");
        }
    }

    void number(const json& obj, const char* key, const std::string& path, double& out)
    {
        if (!obj.contains(key))
            return;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(path + "/" + key, "expected a number");
            return;
        }
        out = v.get<double>();
        if (!std::isfinite(out))
            fail(path + "/" + key, "must be finite");
    }

    template <class Int>
    void integer(const json& obj, const char* key, const std::string& path, Int& out)
    {
        if (!obj.contains(key))
            return;
        const json& v = obj.at(key);
        if (v.is_number_integer()) {
            const auto raw = v.get<long long>();
            if constexpr (std::is_unsigned_v<Int>) {
                if (raw < 0) {
                    fail(path + "/" + key, "must be nonnegative");
                    return;
                }
            }
            out = static_cast<Int>(raw);
            return;
        }
        fail(path + "/" + key, "expected an integer");
    }

    void boolean(const json& obj, const char* key, const std::string& path, bool& out)
    {
        if (!obj.contains(key))
            return;
        if (!obj.at(key).is_boolean()) {
            fail(path + "/" + key, "expected true or false");
            return;
        }
        out = obj.at(key).get<bool>();
    }

    void string(const json& obj, const char* key, const std::string& path, std::string& out)
    {
        if (!obj.contains(key))
            return;
        if (!obj.at(key).is_string()) {
            fail(path + "/" + key, "expected a string");
            return;
        }
        out = obj.at(key).get<std::string>();
    }

    const json* array(const json& obj, const char* key, const std::string& path)
    {
        if (!obj.contains(key))
            return nullptr;
        if (!obj.at(key).is_array()) {
            fail(path + "/" + key, "expected an array");
            return nullptr;
        }
        return &obj.at(key);
    }
};

} // namespace detail

/// Parse and validate a JSON run configuration.  Throws SchemaError listing every problem found.
inline RunConfig parse_config(const std::string& text)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::vector<ConfigIssue>{{"", std::string("not valid JSON: ") + e.what()}});
    }
    if (!doc.is_object())
        throw SchemaError(std::vector<ConfigIssue>{{"", "top level must be an object"}});

    RunConfig c;
    detail::Reader rd;
    rd.reject_unknown(doc, "", {"model", "grid", "solver", "initial", "norms", "checks", "constants", "lifespan",
                                "radius", "support", "characteristics", "output"});

    if (const json* m = rd.object(doc, "model", "/model")) {
        rd.reject_unknown(*m, "/model", {"k"});
        if (!m->contains("k"))
            rd.fail("/model/k", "required key missing");
        rd.integer(*m, "k", "/model", c.model.k);
        if (c.model.k < 1)
            rd.fail("/model/k", "must be >= 1");
    } else if (!doc.contains("model")) {
        rd.fail("/model/k", "required key missing");
    }

    if (const json* g = rd.object(doc, "grid", "/grid")) {
        rd.reject_unknown(*g, "/grid", {"L", "N"});
        rd.number(*g, "L", "/grid", c.half_length);
        rd.integer(*g, "N", "/grid", c.n_points);
    }
    if (!(c.half_length > 0.0))
        rd.fail("/grid/L", "must be positive");
    if (c.n_points < 16 || c.n_points % 2 != 0)
        rd.fail("/grid/N", "must be even and >= 16 (got " + std::to_string(c.n_points) + ")");

    if (const json* s = rd.object(doc, "solver", "/solver")) {
        rd.reject_unknown(*s, "/solver", {"dt", "t_end", "dealias_fraction", "filter", "snapshot_stride"});
        rd.number(*s, "dt", "/solver", c.solver.dt);
        rd.number(*s, "t_end", "/solver", c.solver.t_end);
        rd.number(*s, "dealias_fraction", "/solver", c.solver.dealias_fraction);
        rd.boolean(*s, "filter", "/solver", c.solver.filter_on);
        rd.integer(*s, "snapshot_stride", "/solver", c.solver.snapshot_stride);
    }
    if (!(c.solver.dt > 0.0))
        rd.fail("/solver/dt", "must be positive");
    if (!(c.solver.t_end >= 0.0))
        rd.fail("/solver/t_end", "must be >= 0");
    if (!(c.solver.dealias_fraction > 0.0 && c.solver.dealias_fraction <= 1.0))
        rd.fail("/solver/dealias_fraction", "must lie in (0, 1]");
    if (c.solver.snapshot_stride < 1)
        rd.fail("/solver/snapshot_stride", "must be >= 1");

    if (const json* i = rd.object(doc, "initial", "/initial")) {
        rd.reject_unknown(*i, "/initial", {"family", "amplitude", "width", "center", "sign", "mode", "path"});
        std::string fam;
        if (!i->contains("family"))
            rd.fail("/initial/family", "required key missing");
        rd.string(*i, "family", "/initial", fam);
        if (!fam.empty()) {
            try {
                c.initial.family = family_from_string(fam);
            } catch (const ConfigError& e) {
                rd.fail("/initial/family", e.what());
            }
        }
        rd.number(*i, "amplitude", "/initial", c.initial.amplitude);
        rd.number(*i, "width", "/initial", c.initial.width);
        rd.number(*i, "center", "/initial", c.initial.center);
        rd.integer(*i, "sign", "/initial", c.initial.sign);
        rd.integer(*i, "mode", "/initial", c.initial.mode);
        rd.string(*i, "path", "/initial", c.initial.path);
        if (c.initial.sign != 1 && c.initial.sign != -1)
            rd.fail("/initial/sign", "must be +1 or -1");
        if (c.initial.family != Family::single_mode && c.initial.family != Family::file && !(c.initial.width > 0.0))
            rd.fail("/initial/width", "must be positive");
        if (c.initial.family == Family::file && c.initial.path.empty())
            rd.fail("/initial/path", "required for family 'file'");
    } else if (!doc.contains("initial")) {
        rd.fail("/initial/family", "required key missing");
    }

    if (const json* n = rd.object(doc, "norms", "/norms")) {
        rd.reject_unknown(*n, "/norms", {"sobolev_s", "kato_masuda", "em"});
        if (const json* a = rd.array(*n, "sobolev_s", "/norms")) {
            for (std::size_t k = 0; k < a->size(); ++k) {
                if ((*a)[k].is_number())
                    c.sobolev_s.push_back((*a)[k].get<double>());
                else
                    rd.fail("/norms/sobolev_s/" + std::to_string(k), "expected a number");
            }
        }
        if (const json* a = rd.array(*n, "kato_masuda", "/norms")) {
            for (std::size_t k = 0; k < a->size(); ++k) {
                const std::string p = "/norms/kato_masuda/" + std::to_string(k);
                if (!(*a)[k].is_object()) {
                    rd.fail(p, "expected an object");
                    continue;
                }
                KatoMasudaRequest req;
                rd.reject_unknown((*a)[k], p, {"sigma", "s", "J"});
                rd.number((*a)[k], "sigma", p, req.sigma);
                rd.number((*a)[k], "s", p, req.s);
                rd.integer((*a)[k], "J", p, req.J);
                if (req.J < 0 || req.J > kDefaultMaxDerivativeOrder)
                    rd.fail(p + "/J", "must lie in [0, " + std::to_string(kDefaultMaxDerivativeOrder) + "]");
                c.kato_masuda.push_back(req);
            }
        }
        if (const json* a = rd.array(*n, "em", "/norms")) {
            for (std::size_t k = 0; k < a->size(); ++k) {
                const std::string p = "/norms/em/" + std::to_string(k);
                if (!(*a)[k].is_object()) {
                    rd.fail(p, "expected an object");
                    continue;
                }
                EmRequest req;
                rd.reject_unknown((*a)[k], p, {"sigma", "m", "J"});
                rd.number((*a)[k], "sigma", p, req.sigma);
                rd.integer((*a)[k], "m", p, req.m);
                rd.integer((*a)[k], "J", p, req.J);
                if (!(req.sigma > 0.0 && req.sigma <= 1.0))
                    rd.fail(p + "/sigma", "must lie in (0, 1]");
                if (req.m < 1)
                    rd.fail(p + "/m", "must be >= 1");
                if (req.J < 0 || req.J > kDefaultMaxDerivativeOrder)
                    rd.fail(p + "/J", "must lie in [0, " + std::to_string(kDefaultMaxDerivativeOrder) + "]");
                c.em.push_back(req);
            }
        }
    }

    if (const json* a = rd.array(doc, "checks", "")) {
        for (std::size_t k = 0; k < a->size(); ++k) {
            const std::string p = "/checks/" + std::to_string(k);
            if (!(*a)[k].is_string()) {
                rd.fail(p, "expected a string");
                continue;
            }
            const auto id = (*a)[k].get<std::string>();
            bool known = false;
            for (const auto& kc : known_checks())
                known = known || kc == id;
            if (!known)
                rd.fail(p, "unknown check '" + id + "'");
            c.checks.push_back(id);
        }
    }

    if (const json* k = rd.object(doc, "constants", "/constants")) {
        rd.reject_unknown(*k, "/constants", {"c_m", "c_s"});
        rd.number(*k, "c_m", "/constants", c.solver.c_m);
        rd.number(*k, "c_s", "/constants", c.solver.c_s);
    }
    if (!(c.solver.c_m > 0.0))
        rd.fail("/constants/c_m", "must be positive");
    if (!(c.solver.c_s > 0.0))
        rd.fail("/constants/c_s", "must be positive");

    if (const json* l = rd.object(doc, "lifespan", "/lifespan")) {
        rd.reject_unknown(*l, "/lifespan", {"m", "sigma0", "sigma"});
        rd.integer(*l, "m", "/lifespan", c.lifespan.m);
        rd.number(*l, "sigma0", "/lifespan", c.lifespan.sigma0);
        rd.number(*l, "sigma", "/lifespan", c.lifespan.sigma);
    }
    if (c.lifespan.m < 3)
        rd.fail("/lifespan/m", "must be >= 3");
    if (!(c.lifespan.sigma0 > 0.0 && c.lifespan.sigma0 <= 1.0))
        rd.fail("/lifespan/sigma0", "must lie in (0, 1]");
    if (!(c.lifespan.sigma > 0.0 && c.lifespan.sigma < c.lifespan.sigma0))
        rd.fail("/lifespan/sigma", "must satisfy 0 < sigma < sigma0");

    if (const json* r = rd.object(doc, "radius", "/radius")) {
        rd.reject_unknown(*r, "/radius", {"sigma0", "J"});
        rd.number(*r, "sigma0", "/radius", c.radius_sigma0);
        rd.integer(*r, "J", "/radius", c.radius_J);
    }
    if (!(c.radius_sigma0 < 0.0))
        rd.fail("/radius/sigma0", "must be negative");
    if (c.radius_J < 0 || c.radius_J > kDefaultMaxDerivativeOrder)
        rd.fail("/radius/J", "must lie in [0, " + std::to_string(kDefaultMaxDerivativeOrder) + "]");

    if (const json* s = rd.object(doc, "support", "/support")) {
        rd.reject_unknown(*s, "/support", {"eps_rel"});
        rd.number(*s, "eps_rel", "/support", c.support_eps_rel);
    }
    if (!(c.support_eps_rel > 0.0))
        rd.fail("/support/eps_rel", "must be positive");

    if (const json* f = rd.object(doc, "characteristics", "/characteristics")) {
        rd.reject_unknown(*f, "/characteristics", {"substeps"});
        rd.integer(*f, "substeps", "/characteristics", c.flow_substeps);
    }
    if (c.flow_substeps < 1)
        rd.fail("/characteristics/substeps", "must be >= 1");

    if (const json* o = rd.object(doc, "output", "/output")) {
        rd.reject_unknown(*o, "/output", {"dir", "plots"});
        rd.string(*o, "dir", "/output", c.output_dir);
        rd.boolean(*o, "plots", "/output", c.plots);
    }

    if (!rd.issues.empty())
        throw SchemaError(std::move(rd.issues));
    return c;
}

/// Fully resolved document; parse_config(emit_config(c)) == c.
inline nlohmann::ordered_json config_to_json(const RunConfig& c)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["model"] = {{"k", c.model.k}};
    j["grid"] = {{"L", c.half_length}, {"N", c.n_points}};
    j["solver"] = {{"dt", c.solver.dt},
                   {"t_end", c.solver.t_end},
                   {"dealias_fraction", c.solver.dealias_fraction},
                   {"filter", c.solver.filter_on},
                   {"snapshot_stride", c.solver.snapshot_stride}};
    j["initial"] = {{"family", to_string(c.initial.family)}, {"amplitude", c.initial.amplitude},
                    {"width", c.initial.width},               {"center", c.initial.center},
                    {"sign", c.initial.sign},                 {"mode", c.initial.mode},
                    {"path", c.initial.path}};
    ordered_json km = ordered_json::array();
    for (const auto& r : c.kato_masuda)
        km.push_back({{"sigma", r.sigma}, {"s", r.s}, {"J", r.J}});
    ordered_json em = ordered_json::array();
    for (const auto& r : c.em)
        em.push_back({{"sigma", r.sigma}, {"m", r.m}, {"J", r.J}});
    j["norms"] = {{"sobolev_s", c.sobolev_s}, {"kato_masuda", km}, {"em", em}};
    j["checks"] = c.checks;
    j["constants"] = {{"c_m", c.solver.c_m}, {"c_s", c.solver.c_s}};
    j["lifespan"] = {{"m", c.lifespan.m}, {"sigma0", c.lifespan.sigma0}, {"sigma", c.lifespan.sigma}};
    j["radius"] = {{"sigma0", c.radius_sigma0}, {"J", c.radius_J}};
    j["support"] = {{"eps_rel", c.support_eps_rel}};
    j["characteristics"] = {{"substeps", c.flow_substeps}};
    j["output"] = {{"dir", c.output_dir}, {"plots", c.plots}};
    return j;
}

inline std::string emit_config(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace zeq
