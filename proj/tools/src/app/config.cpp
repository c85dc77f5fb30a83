#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fracrit::app {

using json = nlohmann::ordered_json;

namespace {

// Reads members of one JSON object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key)) return require(key, def);
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path(key) + ": not finite");
        return x;
    }

    long long integer(const std::string& key, std::optional<long long> def = std::nullopt) {
        if (!has(key)) {
            if (!def) throw ConfigError(path(key) + ": required");
            return *def;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
        return v.get<long long>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError(path(key) + ": expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
        if (!has(key)) {
            if (!def) throw ConfigError(path(key) + ": required");
            return *def;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    Point point(const std::string& key, int N) {
        Point p{0.0, 0.0, 0.0};
        if (!has(key)) return p;
        const json& v = j_.at(key);
        if (!v.is_array() || static_cast<int>(v.size()) != N)
            throw ConfigError(path(key) + ": expected an array of " + std::to_string(N) + " numbers");
        for (int i = 0; i < N; ++i) {
            if (!v[i].is_number()) throw ConfigError(path(key) + ": expected numbers");
            p[i] = v[i].get<double>();
        }
        return p;
    }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }

private:
    double require(const std::string& key, std::optional<double> def) {
        if (!def) throw ConfigError(path(key) + ": required");
        return *def;
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void positive(double x, const std::string& what) {
    if (!(x > 0.0)) throw ConfigError(what + ": must be positive");
}

int to_int(long long x, const std::string& what, long long lo) {
    if (x < lo || x > 1000000000LL) throw ConfigError(what + ": out of range");
    return static_cast<int>(x);
}

json point_json(const Point& p, int N) {
    json a = json::array();
    for (int i = 0; i < N; ++i) a.push_back(p[i]);
    return a;
}

void parse_solver(const json& j, RunConfig& c) {
    Reader r(j, "solver");
    if (const json* d = r.child("descent")) {
        Reader rd(*d, "solver.descent");
        DescentConfig& dc = c.solve.descent;
        dc.armijo = rd.number("armijo", dc.armijo);
        dc.tol_g = rd.number("tol_g", dc.tol_g);
        dc.max_iterations = to_int(rd.integer("max_iterations", dc.max_iterations), "solver.descent.max_iterations", 1);
        dc.ball_projection = rd.boolean("ball_projection", dc.ball_projection);
        rd.finish();
    }
    if (const json* m = r.child("mountain_pass")) {
        Reader rm(*m, "solver.mountain_pass");
        MountainPassConfig& mc = c.solve.mp;
        mc.P = to_int(rm.integer("P", mc.P), "solver.mountain_pass.P", 3);
        mc.tol_mp = rm.number("tol_mp", mc.tol_mp);
        mc.max_sweeps = to_int(rm.integer("max_sweeps", mc.max_sweeps), "solver.mountain_pass.max_sweeps", 1);
        mc.reparam_every = to_int(rm.integer("reparam_every", mc.reparam_every), "solver.mountain_pass.reparam_every", 1);
        mc.plateau_window = to_int(rm.integer("plateau_window", mc.plateau_window), "solver.mountain_pass.plateau_window", 1);
        mc.stall_sweeps = to_int(rm.integer("stall_sweeps", mc.stall_sweeps), "solver.mountain_pass.stall_sweeps", 1);
        mc.climb_switch = rm.number("climb_switch", mc.climb_switch);
        mc.climb_step = rm.number("climb_step", mc.climb_step);
        mc.armijo = rm.number("armijo", mc.armijo);
        rm.finish();
    }
    if (const json* m = r.child("c1")) {
        Reader rc(*m, "solver.c1");
        c.solve.c1.n_starts = to_int(rc.integer("n_starts", c.solve.c1.n_starts), "solver.c1.n_starts", 0);
        c.solve.c1.max_steps = to_int(rc.integer("max_steps", c.solve.c1.max_steps), "solver.c1.max_steps", 1);
        rc.finish();
    }
    c.solve.decompose_deviation = r.boolean("decompose_deviation", c.solve.decompose_deviation);
    r.finish();
    try {
        c.solve.descent.validate();
        c.solve.mp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
}

void parse_decompose(const json& j, RunConfig& c) {
    Reader r(j, "decompose");
    DecomposeOptions& o = c.solve.decompose;
    o.stop_threshold_rel = r.number("stop_threshold_rel", o.stop_threshold_rel);
    if (r.has("stop_threshold")) o.stop_threshold = r.number("stop_threshold");
    o.max_bubbles = to_int(r.integer("max_bubbles", o.max_bubbles), "decompose.max_bubbles", 0);
    o.fit_tol = r.number("fit_tol", o.fit_tol);
    o.window = r.number("window", o.window);
    if (r.has("max_scale")) o.max_scale = r.number("max_scale");
    o.morrey_r = r.number("morrey_r", o.morrey_r);
    r.finish();
    positive(o.fit_tol, "decompose.fit_tol");
    positive(o.window, "decompose.window");
    if (o.morrey_r < 1.0) throw ConfigError("decompose.morrey_r: must be >= 1");
}

} // namespace

json default_config_json() {
    return json{
        {"grid", {{"N", 1}, {"M", 4096}, {"L", 50.0}}},
        {"s", 0.25},
        {"zero_mode", "cell_average"},
        {"coefficient", {{"type", "constant"}, {"value", 1.0}}},
        {"forcing", {{"type", "gaussian"}, {"center", {0.0}}, {"width", 1.0}, {"smallness_fraction", 0.5}}},
        {"seed", 1},
    };
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    Reader r(j, "config");
    {
        const json* gj = r.child("grid");
        if (!gj) throw ConfigError("config.grid: required");
        Reader rg(*gj, "grid");
        c.grid.N = to_int(rg.integer("N"), "grid.N", 1);
        c.grid.M = to_int(rg.integer("M"), "grid.M", 2);
        c.grid.L = rg.number("L");
        rg.finish();
    }
    const double s = r.number("s");
    ZeroMode zm = ZeroMode::cell_average;
    const std::string zm_name = r.string("zero_mode", std::string("cell_average"));
    try {
        zm = zero_mode_from_string(zm_name);
        c.grid.validate();
        c.params = FracParams(c.grid.N, s, zm);
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const int N = c.grid.N;

    if (const json* cj = r.child("coefficient")) {
        Reader rc(*cj, "coefficient");
        CoefficientSpec& cs = c.coefficient;
        cs.type = rc.string("type");
        if (cs.type == "constant") {
            cs.value = rc.number("value", 1.0);
            positive(cs.value, "coefficient.value");
        } else if (cs.type == "bump") {
            cs.peak = rc.number("peak");
            cs.width = rc.number("width");
            cs.center = rc.point("center", N);
            positive(cs.peak, "coefficient.peak");
            positive(cs.width, "coefficient.width");
        } else {
            throw ConfigError("coefficient.type: expected 'constant' or 'bump'");
        }
        rc.finish();
    }

    if (const json* fj = r.child("forcing")) {
        Reader rf(*fj, "forcing");
        ForcingSpec& fs = c.forcing;
        fs.type = rf.string("type");
        if (fs.type == "gaussian") {
            fs.center = rf.point("center", N);
            fs.width = rf.number("width", 1.0);
            positive(fs.width, "forcing.width");
            if (rf.has("dual_norm")) fs.dual_norm = rf.number("dual_norm");
            if (rf.has("smallness_fraction")) fs.smallness_fraction = rf.number("smallness_fraction");
            if (fs.dual_norm.has_value() == fs.smallness_fraction.has_value())
                throw ConfigError("forcing: give exactly one of dual_norm, smallness_fraction");
            if (fs.dual_norm) positive(*fs.dual_norm, "forcing.dual_norm");
            if (fs.smallness_fraction) positive(*fs.smallness_fraction, "forcing.smallness_fraction");
        } else if (fs.type != "zero") {
            throw ConfigError("forcing.type: expected 'gaussian' or 'zero'");
        }
        rf.finish();
    } else {
        c.forcing.type = "zero";
    }

    if (const json* sj = r.child("solver")) parse_solver(*sj, c);
    if (const json* dj = r.child("decompose")) parse_decompose(*dj, c);
    if (const json* kj = r.child("calibration")) {
        Reader rk(*kj, "calibration");
        c.calibration.max_residual = rk.number("max_residual", c.calibration.max_residual);
        c.beta_scale = rk.number("beta_scale", 1.0);
        rk.finish();
        positive(c.calibration.max_residual, "calibration.max_residual");
        positive(c.beta_scale, "calibration.beta_scale");
    }
    c.seed = r.unsigned_integer("seed", c.seed);
    c.solve.c1.seed = c.seed;
    c.output_dir = r.string("output_dir", std::string("."));
    r.finish();

    // Normalised echo: every knob with its effective value.
    json e;
    e["grid"] = {{"N", c.grid.N}, {"M", c.grid.M}, {"L", c.grid.L}};
    e["s"] = c.params.s;
    e["zero_mode"] = to_string(c.params.zero_mode);
    if (c.coefficient.type == "constant")
        e["coefficient"] = {{"type", "constant"}, {"value", c.coefficient.value}};
    else
        e["coefficient"] = {{"type", "bump"},
                            {"peak", c.coefficient.peak},
                            {"width", c.coefficient.width},
                            {"center", point_json(c.coefficient.center, N)}};
    if (c.forcing.type == "zero") {
        e["forcing"] = {{"type", "zero"}};
    } else {
        json f = {{"type", "gaussian"}, {"center", point_json(c.forcing.center, N)}, {"width", c.forcing.width}};
        if (c.forcing.dual_norm) f["dual_norm"] = *c.forcing.dual_norm;
        if (c.forcing.smallness_fraction) f["smallness_fraction"] = *c.forcing.smallness_fraction;
        e["forcing"] = f;
    }
    const auto& sc = c.solve;
    e["solver"] = {
        {"descent",
         {{"armijo", sc.descent.armijo},
          {"tol_g", sc.descent.tol_g},
          {"max_iterations", sc.descent.max_iterations},
          {"ball_projection", sc.descent.ball_projection}}},
        {"mountain_pass",
         {{"P", sc.mp.P},
          {"tol_mp", sc.mp.tol_mp},
          {"max_sweeps", sc.mp.max_sweeps},
          {"reparam_every", sc.mp.reparam_every},
          {"plateau_window", sc.mp.plateau_window},
          {"stall_sweeps", sc.mp.stall_sweeps},
          {"climb_switch", sc.mp.climb_switch},
          {"climb_step", sc.mp.climb_step},
          {"armijo", sc.mp.armijo}}},
        {"c1", {{"n_starts", sc.c1.n_starts}, {"max_steps", sc.c1.max_steps}}},
        {"decompose_deviation", sc.decompose_deviation},
    };
    json dec = {{"stop_threshold_rel", sc.decompose.stop_threshold_rel},
                {"max_bubbles", sc.decompose.max_bubbles},
                {"fit_tol", sc.decompose.fit_tol},
                {"window", sc.decompose.window},
                {"morrey_r", sc.decompose.morrey_r}};
    if (sc.decompose.stop_threshold) dec["stop_threshold"] = *sc.decompose.stop_threshold;
    if (sc.decompose.max_scale) dec["max_scale"] = *sc.decompose.max_scale;
    e["decompose"] = dec;
    e["calibration"] = {{"max_residual", c.calibration.max_residual}, {"beta_scale", c.beta_scale}};
    e["seed"] = c.seed;
    e["output_dir"] = c.output_dir;
    c.echo = std::move(e);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

Field build_coefficient(const RunConfig& cfg) {
    const CoefficientSpec& cs = cfg.coefficient;
    if (cs.type == "constant") return Field(cfg.grid, cs.value);
    return Field::from_function(cfg.grid, [&](const Point& x) {
        const double d = periodic_distance(x, cs.center, cfg.grid);
        return 1.0 + (cs.peak - 1.0) * std::exp(-d * d / (cs.width * cs.width));
    });
}

Field build_forcing(const RunConfig& cfg, double S_num) {
    const ForcingSpec& fs = cfg.forcing;
    if (fs.type == "zero") return Field(cfg.grid);
    Field f = Field::from_function(cfg.grid, [&](const Point& x) {
        const double d = periodic_distance(x, fs.center, cfg.grid);
        return std::exp(-d * d / (2.0 * fs.width * fs.width));
    });
    double target = 0.0;
    if (fs.dual_norm) {
        target = *fs.dual_norm;
    } else {
        const Field a = build_coefficient(cfg);
        const double a_sup = a.max();
        const FracParams& p = cfg.params;
        target = *fs.smallness_fraction * C0_constant(p, a_sup) * std::pow(S_num, p.N / (4.0 * p.s));
    }
    f *= target / dual_norm(f, cfg.params);
    return f;
}

ProblemData build_problem(const RunConfig& cfg, double S_num) {
    return ProblemData(cfg.params, build_coefficient(cfg), build_forcing(cfg, S_num));
}

} // namespace fracrit::app
