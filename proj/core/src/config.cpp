#include "qnsk/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qnsk {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::simulate, "simulate"},
    {ExperimentKind::sweep_delta, "sweep_delta"},
    {ExperimentKind::sweep_eta, "sweep_eta"},
    {ExperimentKind::sweep_drag_ell, "sweep_drag_ell"},
    {ExperimentKind::longtime, "longtime"},
    {ExperimentKind::korteweg_crosscheck, "korteweg_crosscheck"},
    {ExperimentKind::tau, "tau"},
    {ExperimentKind::check, "check"},
};

constexpr std::pair<GeneratorSpec::Kind, const char*> kGenerators[] = {
    {GeneratorSpec::Kind::gaussian, "gaussian"},
    {GeneratorSpec::Kind::perturbed_gaussian, "perturbed_gaussian"},
    {GeneratorSpec::Kind::two_bump, "two_bump"},
    {GeneratorSpec::Kind::plane_wave, "plane_wave"},
};

template <class E, size_t N>
E enum_from(const std::pair<E, const char*> (&table)[N], const std::string& s, const char* what) {
    for (const auto& [k, name] : table)
        if (s == name) return k;
    throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
}

template <class E, size_t N>
const char* enum_name(const std::pair<E, const char*> (&table)[N], E k) {
    for (const auto& [e, name] : table)
        if (e == k) return name;
    return "?";
}

/// Reads the keys of `obj` into the targets, rejecting unknown ones.
class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
    }
    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }
    const json* sub(const char* key) {
        seen_.insert(key);
        return obj_.contains(key) ? &obj_.at(key) : nullptr;
    }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

void read_params(const json& j, ParamSet& p) {
    Reader r(j, "params");
    r.get("nu", p.nu);
    r.get("eps", p.eps);
    r.get("r0", p.r0);
    r.get("r1", p.r1);
    r.get("delta1", p.delta1);
    r.get("delta2", p.delta2);
    r.get("eta1", p.eta1);
    r.get("eta2", p.eta2);
    r.get("alpha", p.alpha);
    r.get("s", p.s);
    r.get("R_min", p.R_min);
    if (const json* dt = r.sub("dt")) {
        Reader rd(*dt, "params.dt");
        std::string policy = p.dt.kind == DtPolicy::Kind::fixed ? "fixed" : "cfl";
        rd.get("policy", policy);
        if (policy == "fixed")
            p.dt.kind = DtPolicy::Kind::fixed;
        else if (policy == "cfl")
            p.dt.kind = DtPolicy::Kind::cfl;
        else
            throw ConfigError("params.dt.policy must be 'fixed' or 'cfl'");
        rd.get("dt", p.dt.dt);
        rd.get("c_cfl", p.dt.c_cfl);
    }
}

void read_initial(const json& j, GeneratorSpec& g) {
    Reader r(j, "initial");
    std::string name = enum_name(kGenerators, g.kind);
    r.get("generator", name);
    g.kind = enum_from(kGenerators, name, "generator");
    r.get("mass", g.mass);
    r.get("amplitude", g.amplitude);
    r.get("mode", g.mode);
    r.get("separation", g.separation);
    r.get("width", g.width);
    r.get("velocity", g.velocity);
    r.get("lift", g.lift);
}

json to_json(const ExperimentConfig& c) {
    const ParamSet& p = c.params;
    const GeneratorSpec& g = c.initial;
    return json{
        {"schema_version", c.schema_version},
        {"kind", to_string(c.kind)},
        {"grid", {{"d", c.grid.d}, {"ell", c.grid.ell}, {"n", c.grid.n}}},
        {"params",
         {{"nu", p.nu},
          {"eps", p.eps},
          {"r0", p.r0},
          {"r1", p.r1},
          {"delta1", p.delta1},
          {"delta2", p.delta2},
          {"eta1", p.eta1},
          {"eta2", p.eta2},
          {"alpha", p.alpha},
          {"s", p.s},
          {"R_min", p.R_min},
          {"dt",
           {{"policy", p.dt.kind == DtPolicy::Kind::fixed ? "fixed" : "cfl"},
            {"dt", p.dt.dt},
            {"c_cfl", p.dt.c_cfl}}}}},
        {"initial",
         {{"generator", enum_name(kGenerators, g.kind)},
          {"mass", g.mass},
          {"amplitude", g.amplitude},
          {"mode", g.mode},
          {"separation", g.separation},
          {"width", g.width},
          {"velocity", g.velocity},
          {"lift", g.lift}}},
        {"truncation", {{"enabled", c.truncation.enabled}, {"theta", c.truncation.theta}, {"iota", c.truncation.iota}}},
        {"t_end", c.t_end},
        {"cadence", {{"snapshot_every", c.snapshot_every}, {"diag_every", c.diag_every}}},
        {"ladder", c.ladder},
        {"crosscheck", {{"dt", c.dt_ladder}, {"delta_stab", c.delta_ladder}}},
        {"tau", {{"t_max", c.tau_t_max}, {"rel_tol", c.tau_rel_tol}}},
        {"out_dir", c.out_dir},
        {"seed", c.seed},
        {"threads", c.threads},
        {"filter", c.filter},
    };
}

bool pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    bool up = true, down = true;
    for (size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    return up || down;
}

}  // namespace

const char* to_string(ExperimentKind k) { return enum_name(kKinds, k); }

int sweep_grid_n(const GridSpec& base, double ell) {
    const double n = base.n * ell / base.ell;
    return std::max(8, 2 * static_cast<int>(std::lround(n / 2.0)));
}

void validate(const ExperimentConfig& c) {
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    if (c.grid.d < 1 || c.grid.d > 3) throw ConfigError("grid.d must be 1, 2 or 3");
    if (c.grid.n < 8 || !pow2(c.grid.n)) throw ConfigError("grid.n must be a power of two, at least 8");
    if (!(c.grid.ell > 0.0)) throw ConfigError("grid.ell must be positive");
    c.params.validate(c.grid.d);
    if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    if (c.snapshot_every < 0 || c.diag_every < 0) throw ConfigError("cadences must be nonnegative");
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
    if (!strictly_monotone(c.ladder)) throw ConfigError("ladder must be strictly monotone");
    const bool sweep = c.kind == ExperimentKind::sweep_delta || c.kind == ExperimentKind::sweep_eta ||
                       c.kind == ExperimentKind::sweep_drag_ell;
    if (sweep && c.ladder.empty()) throw ConfigError("sweeps need a nonempty ladder");
    for (double v : c.ladder) {
        if (c.kind == ExperimentKind::sweep_drag_ell) {
            if (!(v > 0.0)) throw ConfigError("ell ladder must be positive");
            if (!pow2(sweep_grid_n(c.grid, v)))
                throw ConfigError("ell ladder value " + std::to_string(v) + " gives grid size " +
                                  std::to_string(sweep_grid_n(c.grid, v)) + ", not a power of two");
        }
        if ((c.kind == ExperimentKind::sweep_delta || c.kind == ExperimentKind::sweep_eta) && !(v >= 0.0 && v < 1.0))
            throw ConfigError("delta/eta ladder values must lie in [0, 1)");
    }
    if (c.dt_ladder.size() != c.delta_ladder.size())
        throw ConfigError("crosscheck.dt and crosscheck.delta_stab must have equal length");
    for (double v : c.dt_ladder)
        if (!(v > 0.0)) throw ConfigError("crosscheck.dt values must be positive");
    for (double v : c.delta_ladder)
        if (!(v >= 0.0)) throw ConfigError("crosscheck.delta_stab values must be nonnegative");
    if (c.kind == ExperimentKind::korteweg_crosscheck && c.dt_ladder.empty())
        throw ConfigError("korteweg_crosscheck needs a crosscheck ladder");
    if (!(c.tau_t_max > 0.0) || !(c.tau_rel_tol > 0.0)) throw ConfigError("tau.t_max and tau.rel_tol must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig c;
    {
        Reader r(j, "config");
        r.get("schema_version", c.schema_version);
        std::string kind = to_string(c.kind);
        r.get("kind", kind);
        c.kind = enum_from(kKinds, kind, "experiment kind");
        if (const json* g = r.sub("grid")) {
            Reader rg(*g, "grid");
            rg.get("d", c.grid.d);
            rg.get("ell", c.grid.ell);
            rg.get("n", c.grid.n);
        }
        if (const json* p = r.sub("params")) read_params(*p, c.params);
        if (const json* g = r.sub("initial")) read_initial(*g, c.initial);
        if (const json* t = r.sub("truncation")) {
            Reader rt(*t, "truncation");
            rt.get("enabled", c.truncation.enabled);
            rt.get("theta", c.truncation.theta);
            rt.get("iota", c.truncation.iota);
        }
        r.get("t_end", c.t_end);
        if (const json* cad = r.sub("cadence")) {
            Reader rc(*cad, "cadence");
            rc.get("snapshot_every", c.snapshot_every);
            rc.get("diag_every", c.diag_every);
        }
        r.get("ladder", c.ladder);
        if (const json* x = r.sub("crosscheck")) {
            Reader rx(*x, "crosscheck");
            rx.get("dt", c.dt_ladder);
            rx.get("delta_stab", c.delta_ladder);
        }
        if (const json* t = r.sub("tau")) {
            Reader rt(*t, "tau");
            rt.get("t_max", c.tau_t_max);
            rt.get("rel_tol", c.tau_rel_tol);
        }
        r.get("out_dir", c.out_dir);
        r.get("seed", c.seed);
        r.get("threads", c.threads);
        r.get("filter", c.filter);
    }
    c.initial.seed = c.seed;
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) { return to_json(c).dump(2); }

std::string config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace qnsk
