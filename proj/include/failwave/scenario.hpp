#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "grid.hpp"
#include "material.hpp"
#include "profile.hpp"

namespace failwave {

using Json = nlohmann::json;

/// Elastic boundary data h1 on an X end.
///   Fixed:    U = value
///   Velocity: U = value * t (wall moving at constant speed)
///   Stress:   S = value * min(1, t/ramp) on the boundary face (ramp 0: step)
///   Free:     S = 0
///   Periodic: both ends must be periodic
enum class ElasticBcKind { Fixed, Velocity, Stress, Free, Periodic };

struct ElasticBc {
    ElasticBcKind kind = ElasticBcKind::Fixed;
    double value = 0.0;
    double ramp = 0.0;

    bool is_dirichlet() const noexcept { return kind == ElasticBcKind::Fixed || kind == ElasticBcKind::Velocity; }
    bool is_traction() const noexcept { return kind == ElasticBcKind::Stress || kind == ElasticBcKind::Free; }

    double displacement(double t) const noexcept { return kind == ElasticBcKind::Velocity ? value * t : value; }
    double displacement_rate() const noexcept { return kind == ElasticBcKind::Velocity ? value : 0.0; }
    double stress(double t) const noexcept {
        if (kind == ElasticBcKind::Free) return 0.0;
        if (ramp > 0.0) return value * std::min(1.0, t / ramp);
        return value;
    }

    bool operator==(const ElasticBc&) const = default;
};

/// Damage boundary data h2 on a side.
///   Dirichlet: Gamma = value
///   ZeroFlux:  B.n = 0
///   Flux:      B.n = value (prescribed outward flux)
///   Periodic:  paired with the opposite side
enum class DamageBcKind { Dirichlet, ZeroFlux, Flux, Periodic };

struct DamageBc {
    DamageBcKind kind = DamageBcKind::ZeroFlux;
    double value = 0.0;
    bool operator==(const DamageBc&) const = default;
};

enum class BodyForceKind { None, Uniform, Gaussian };

/// Specific body force r(X), constant in time.
struct BodyForce {
    BodyForceKind kind = BodyForceKind::None;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    double at(double x) const noexcept {
        switch (kind) {
        case BodyForceKind::Uniform: return amplitude;
        case BodyForceKind::Gaussian: {
            const double a = (x - center) / width;
            return amplitude * std::exp(-0.5 * a * a);
        }
        default: return 0.0;
        }
    }
    bool operator==(const BodyForce&) const = default;
};

enum class DamageScheme { CrankNicolson, Explicit };

struct Gauge {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Gauge&) const = default;
};

struct OutputSpec {
    int snapshot_every = 0; // steps between snapshots; 0 disables
    std::string dir;
    bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ModelKind model = ModelKind::Feng;
    Grid grid;
    MaterialParams material;
    double dt = 1.0;
    double t_end = 1.0;
    DamageScheme damage_scheme = DamageScheme::CrankNicolson;

    Profile u0 = ZeroProfile{};
    Profile v0 = ZeroProfile{};
    Profile gamma0 = ZeroProfile{};

    ElasticBc elastic_left;
    ElasticBc elastic_right;
    DamageBc damage_left;
    DamageBc damage_right;
    DamageBc damage_bottom;
    DamageBc damage_top;

    BodyForce body_force;
    std::vector<Gauge> gauges;
    OutputSpec output;

    /// Number of steps covering [0, t_end]; t_end/dt rounded when it is an
    /// integer up to roundoff, otherwise rounded up.
    long steps() const {
        const double n = t_end / dt;
        const double r = std::round(n);
        if (std::abs(n - r) <= 1e-9 * std::max(1.0, r)) return static_cast<long>(r);
        return static_cast<long>(std::ceil(n));
    }

    bool elastic_periodic() const noexcept { return elastic_left.kind == ElasticBcKind::Periodic; }

    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline const Json* find(const Json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw InvalidValue(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidValue(path, "must be finite");
    return x;
}

inline double number(const Json& j, const std::string& prefix, const std::string& key) {
    const Json* v = find(j, key);
    if (!v) throw MissingKey(prefix + key);
    return as_number(*v, prefix + key);
}

inline double number_or(const Json& j, const std::string& prefix, const std::string& key, double fallback) {
    const Json* v = find(j, key);
    return v ? as_number(*v, prefix + key) : fallback;
}

inline int integer(const Json& j, const std::string& prefix, const std::string& key) {
    const Json* v = find(j, key);
    if (!v) throw MissingKey(prefix + key);
    if (!v->is_number_integer()) throw InvalidValue(prefix + key, "must be an integer");
    return v->get<int>();
}

inline std::string string_or(const Json& j, const std::string& prefix, const std::string& key,
                             const std::string& fallback) {
    const Json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) throw InvalidValue(prefix + key, "must be a string");
    return v->get<std::string>();
}

inline Profile parse_profile(const Json* j, const std::string& path) {
    if (!j) return ZeroProfile{};
    const std::string p = path + ".";
    const std::string kind = string_or(*j, p, "kind", "");
    if (kind.empty()) throw MissingKey(p + "kind");
    if (kind == "zero") return ZeroProfile{};
    if (kind == "constant") return ConstantProfile{number(*j, p, "value")};
    if (kind == "gaussian") {
        GaussianProfile g;
        g.amplitude = number(*j, p, "amplitude");
        g.center_x = number(*j, p, "center_x");
        g.center_y = number_or(*j, p, "center_y", 0.0);
        g.width_x = number(*j, p, "width_x");
        g.width_y = number_or(*j, p, "width_y", g.width_x);
        if (!(g.width_x > 0.0)) throw InvalidValue(p + "width_x", "must be > 0");
        if (!(g.width_y > 0.0)) throw InvalidValue(p + "width_y", "must be > 0");
        return g;
    }
    if (kind == "sine") {
        SineProfile s;
        s.amplitude = number(*j, p, "amplitude");
        s.wavenumber = number(*j, p, "wavenumber");
        s.phase = number_or(*j, p, "phase", 0.0);
        return s;
    }
    if (kind == "step") {
        StepProfile s;
        s.value = number(*j, p, "value");
        s.position = number(*j, p, "position");
        s.width = number_or(*j, p, "width", 0.0);
        if (s.width < 0.0) throw InvalidValue(p + "width", "must be >= 0");
        return s;
    }
    if (kind == "table") {
        const Json* v = find(*j, "values");
        if (!v) throw MissingKey(p + "values");
        if (!v->is_array()) throw InvalidValue(p + "values", "must be an array");
        TableProfile t;
        t.values.reserve(v->size());
        for (const auto& e : *v) t.values.push_back(as_number(e, p + "values"));
        return t;
    }
    throw InvalidValue(p + "kind", "unknown profile kind '" + kind + "'");
}

inline Json profile_json(const Profile& prof) {
    return std::visit(
        [](const auto& q) -> Json {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, ZeroProfile>) return {{"kind", "zero"}};
            else if constexpr (std::is_same_v<T, ConstantProfile>) return {{"kind", "constant"}, {"value", q.value}};
            else if constexpr (std::is_same_v<T, GaussianProfile>)
                return {{"kind", "gaussian"}, {"amplitude", q.amplitude}, {"center_x", q.center_x},
                        {"center_y", q.center_y}, {"width_x", q.width_x}, {"width_y", q.width_y}};
            else if constexpr (std::is_same_v<T, SineProfile>)
                return {{"kind", "sine"}, {"amplitude", q.amplitude}, {"wavenumber", q.wavenumber}, {"phase", q.phase}};
            else if constexpr (std::is_same_v<T, StepProfile>)
                return {{"kind", "step"}, {"value", q.value}, {"position", q.position}, {"width", q.width}};
            else return {{"kind", "table"}, {"values", q.values}};
        },
        prof);
}

inline ElasticBc parse_elastic_bc(const Json* j, const std::string& path) {
    ElasticBc bc;
    if (!j) return bc;
    const std::string p = path + ".";
    const std::string kind = string_or(*j, p, "kind", "fixed");
    if (kind == "fixed") bc.kind = ElasticBcKind::Fixed;
    else if (kind == "velocity") bc.kind = ElasticBcKind::Velocity;
    else if (kind == "stress") bc.kind = ElasticBcKind::Stress;
    else if (kind == "free") bc.kind = ElasticBcKind::Free;
    else if (kind == "periodic") bc.kind = ElasticBcKind::Periodic;
    else throw InvalidValue(p + "kind", "unknown elastic boundary kind '" + kind + "'");
    bc.value = number_or(*j, p, "value", 0.0);
    bc.ramp = number_or(*j, p, "ramp", 0.0);
    if (bc.ramp < 0.0) throw InvalidValue(p + "ramp", "must be >= 0");
    return bc;
}

inline std::string_view to_string(ElasticBcKind k) {
    switch (k) {
    case ElasticBcKind::Fixed: return "fixed";
    case ElasticBcKind::Velocity: return "velocity";
    case ElasticBcKind::Stress: return "stress";
    case ElasticBcKind::Free: return "free";
    default: return "periodic";
    }
}

inline DamageBc parse_damage_bc(const Json* j, const std::string& path) {
    DamageBc bc;
    if (!j) return bc;
    const std::string p = path + ".";
    const std::string kind = string_or(*j, p, "kind", "zero_flux");
    if (kind == "dirichlet") bc.kind = DamageBcKind::Dirichlet;
    else if (kind == "zero_flux") bc.kind = DamageBcKind::ZeroFlux;
    else if (kind == "flux") bc.kind = DamageBcKind::Flux;
    else if (kind == "periodic") bc.kind = DamageBcKind::Periodic;
    else throw InvalidValue(p + "kind", "unknown damage boundary kind '" + kind + "'");
    bc.value = number_or(*j, p, "value", 0.0);
    return bc;
}

inline std::string_view to_string(DamageBcKind k) {
    switch (k) {
    case DamageBcKind::Dirichlet: return "dirichlet";
    case DamageBcKind::ZeroFlux: return "zero_flux";
    case DamageBcKind::Flux: return "flux";
    default: return "periodic";
    }
}

} // namespace detail

inline void ScenarioConfig::validate() const {
    grid.validate();
    material.validate();
    if (!(dt > 0.0)) throw InvalidValue("time.dt", "must be > 0");
    if (!(t_end >= dt)) throw InvalidValue("time.t_end", "must be >= dt");
    if ((elastic_left.kind == ElasticBcKind::Periodic) != (elastic_right.kind == ElasticBcKind::Periodic))
        throw InvalidValue("boundary.elastic", "periodic must be set on both ends");
    if ((damage_left.kind == DamageBcKind::Periodic) != (damage_right.kind == DamageBcKind::Periodic))
        throw InvalidValue("boundary.damage", "periodic must be set on both left and right");
    if ((damage_bottom.kind == DamageBcKind::Periodic) != (damage_top.kind == DamageBcKind::Periodic))
        throw InvalidValue("boundary.damage", "periodic must be set on both bottom and top");
    if (output.snapshot_every < 0) throw InvalidValue("output.snapshot_every", "must be >= 0");
    const double xl = grid.x0, xr = grid.x0 + grid.length_x();
    const double yl = grid.y0, yr = grid.y0 + grid.length_y();
    for (std::size_t k = 0; k < gauges.size(); ++k) {
        const auto& g = gauges[k];
        const bool inside_x = g.x >= xl && g.x <= xr;
        const bool inside_y = grid.dimension() == 1 || (g.y >= yl && g.y <= yr);
        if (!inside_x || !inside_y)
            throw InvalidValue("gauges[" + std::to_string(k) + "]", "must lie inside the grid");
    }
}

/// Parses and validates a scenario document.
inline ScenarioConfig build_scenario(const Json& doc) {
    using namespace detail;
    if (!doc.is_object()) throw InvalidValue("<root>", "must be an object");
    ScenarioConfig cfg;
    cfg.name = string_or(doc, "", "name", "scenario");

    const std::string model = string_or(doc, "", "model", "feng");
    if (model == "feng") cfg.model = ModelKind::Feng;
    else if (model == "linear") cfg.model = ModelKind::Linear;
    else throw InvalidValue("model", "must be 'feng' or 'linear'");

    const Json* grid = find(doc, "grid");
    if (!grid) throw MissingKey("grid");
    cfg.grid.nx = integer(*grid, "grid.", "nx");
    cfg.grid.dx = number(*grid, "grid.", "dx");
    cfg.grid.x0 = number_or(*grid, "grid.", "x0", 0.0);
    if (find(*grid, "ny")) {
        cfg.grid.ny = integer(*grid, "grid.", "ny");
        cfg.grid.dy = number(*grid, "grid.", "dy");
        cfg.grid.y0 = number_or(*grid, "grid.", "y0", 0.0);
        if (cfg.grid.ny == 1) throw InvalidValue("grid.ny", "must be >= 3");
    }

    const Json* mat = find(doc, "material");
    if (!mat) throw MissingKey("material");
    auto& m = cfg.material;
    const std::string mp = "material.";
    m.rho0 = number(*mat, mp, "rho0");
    m.theta0 = number(*mat, mp, "theta0");
    m.c1 = number(*mat, mp, "c1");
    m.lambda = number(*mat, mp, "lambda");
    m.c2 = number_or(*mat, mp, "c2", 0.0);
    m.c3 = number_or(*mat, mp, "c3", 0.0);
    m.b = number_or(*mat, mp, "b", 0.0);
    m.d1 = number_or(*mat, mp, "d1", 0.0);
    m.d2 = number_or(*mat, mp, "d2", m.d1);
    m.sigma0 = number_or(*mat, mp, "sigma0", 0.0);
    const std::string law = string_or(*mat, mp, "source_law", "linear_decay");
    if (law == "linear_decay") m.source_law = SourceLaw::LinearDecay;
    else if (law == "logistic") m.source_law = SourceLaw::Logistic;
    else throw InvalidValue("material.source_law", "must be 'linear_decay' or 'logistic'");
    m.source_rate = number_or(*mat, mp, "source_rate", 0.0);
    m.gamma_max = number_or(*mat, mp, "gamma_max", 1.0);

    const Json* time = find(doc, "time");
    if (!time) throw MissingKey("time");
    cfg.dt = number(*time, "time.", "dt");
    cfg.t_end = number(*time, "time.", "t_end");

    const std::string scheme = string_or(doc, "", "damage_scheme", "crank_nicolson");
    if (scheme == "crank_nicolson") cfg.damage_scheme = DamageScheme::CrankNicolson;
    else if (scheme == "explicit") cfg.damage_scheme = DamageScheme::Explicit;
    else throw InvalidValue("damage_scheme", "must be 'crank_nicolson' or 'explicit'");

    if (const Json* init = find(doc, "initial")) {
        cfg.u0 = parse_profile(find(*init, "U"), "initial.U");
        cfg.v0 = parse_profile(find(*init, "v"), "initial.v");
        cfg.gamma0 = parse_profile(find(*init, "gamma"), "initial.gamma");
    }

    if (const Json* bnd = find(doc, "boundary")) {
        if (const Json* el = find(*bnd, "elastic")) {
            cfg.elastic_left = parse_elastic_bc(find(*el, "left"), "boundary.elastic.left");
            cfg.elastic_right = parse_elastic_bc(find(*el, "right"), "boundary.elastic.right");
        }
        if (const Json* dm = find(*bnd, "damage")) {
            cfg.damage_left = parse_damage_bc(find(*dm, "left"), "boundary.damage.left");
            cfg.damage_right = parse_damage_bc(find(*dm, "right"), "boundary.damage.right");
            cfg.damage_bottom = parse_damage_bc(find(*dm, "bottom"), "boundary.damage.bottom");
            cfg.damage_top = parse_damage_bc(find(*dm, "top"), "boundary.damage.top");
        }
    }

    if (const Json* bf = find(doc, "body_force")) {
        const std::string kind = string_or(*bf, "body_force.", "kind", "none");
        if (kind == "none") cfg.body_force.kind = BodyForceKind::None;
        else if (kind == "uniform") cfg.body_force.kind = BodyForceKind::Uniform;
        else if (kind == "gaussian") cfg.body_force.kind = BodyForceKind::Gaussian;
        else throw InvalidValue("body_force.kind", "must be none, uniform or gaussian");
        cfg.body_force.amplitude = number_or(*bf, "body_force.", "amplitude", 0.0);
        cfg.body_force.center = number_or(*bf, "body_force.", "center", 0.0);
        cfg.body_force.width = number_or(*bf, "body_force.", "width", 1.0);
        if (!(cfg.body_force.width > 0.0)) throw InvalidValue("body_force.width", "must be > 0");
    }

    if (const Json* gauges = find(doc, "gauges")) {
        if (!gauges->is_array()) throw InvalidValue("gauges", "must be an array");
        for (std::size_t k = 0; k < gauges->size(); ++k) {
            const std::string gp = "gauges[" + std::to_string(k) + "].";
            const Json& g = (*gauges)[k];
            cfg.gauges.push_back({number(g, gp, "x"), number_or(g, gp, "y", 0.0)});
        }
    }

    if (const Json* out = find(doc, "output")) {
        const Json* every = find(*out, "snapshot_every");
        if (every) {
            if (!every->is_number_integer()) throw InvalidValue("output.snapshot_every", "must be an integer");
            cfg.output.snapshot_every = every->get<int>();
        }
        cfg.output.dir = string_or(*out, "output.", "dir", "");
    }

    cfg.validate();
    return cfg;
}

/// Emits a document that build_scenario maps back to an equal config.
inline Json to_json(const ScenarioConfig& cfg) {
    using namespace detail;
    Json doc;
    doc["name"] = cfg.name;
    doc["model"] = std::string(to_string(cfg.model));
    doc["grid"] = {{"nx", cfg.grid.nx}, {"dx", cfg.grid.dx}, {"x0", cfg.grid.x0}};
    if (cfg.grid.dimension() == 2) {
        doc["grid"]["ny"] = cfg.grid.ny;
        doc["grid"]["dy"] = cfg.grid.dy;
        doc["grid"]["y0"] = cfg.grid.y0;
    }
    const auto& m = cfg.material;
    doc["material"] = {{"rho0", m.rho0},       {"theta0", m.theta0},
                       {"c1", m.c1},           {"c2", m.c2},
                       {"c3", m.c3},           {"b", m.b},
                       {"lambda", m.lambda},   {"d1", m.d1},
                       {"d2", m.d2},           {"sigma0", m.sigma0},
                       {"source_law", std::string(to_string(m.source_law))},
                       {"source_rate", m.source_rate},
                       {"gamma_max", m.gamma_max}};
    doc["time"] = {{"dt", cfg.dt}, {"t_end", cfg.t_end}};
    doc["damage_scheme"] = cfg.damage_scheme == DamageScheme::CrankNicolson ? "crank_nicolson" : "explicit";
    doc["initial"] = {{"U", profile_json(cfg.u0)}, {"v", profile_json(cfg.v0)}, {"gamma", profile_json(cfg.gamma0)}};
    auto ebc = [](const ElasticBc& b) {
        return Json{{"kind", std::string(to_string(b.kind))}, {"value", b.value}, {"ramp", b.ramp}};
    };
    auto dbc = [](const DamageBc& b) { return Json{{"kind", std::string(to_string(b.kind))}, {"value", b.value}}; };
    doc["boundary"]["elastic"] = {{"left", ebc(cfg.elastic_left)}, {"right", ebc(cfg.elastic_right)}};
    doc["boundary"]["damage"] = {{"left", dbc(cfg.damage_left)},
                                 {"right", dbc(cfg.damage_right)},
                                 {"bottom", dbc(cfg.damage_bottom)},
                                 {"top", dbc(cfg.damage_top)}};
    const char* bf_kind = cfg.body_force.kind == BodyForceKind::None      ? "none"
                          : cfg.body_force.kind == BodyForceKind::Uniform ? "uniform"
                                                                          : "gaussian";
    doc["body_force"] = {{"kind", bf_kind},
                         {"amplitude", cfg.body_force.amplitude},
                         {"center", cfg.body_force.center},
                         {"width", cfg.body_force.width}};
    doc["gauges"] = Json::array();
    for (const auto& g : cfg.gauges) doc["gauges"].push_back({{"x", g.x}, {"y", g.y}});
    doc["output"] = {{"snapshot_every", cfg.output.snapshot_every}, {"dir", cfg.output.dir}};
    return doc;
}

inline ScenarioConfig build_scenario(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidValue("<document>", std::string("does not parse: ") + e.what());
    }
    return build_scenario(doc);
}

class ConfigNotFound : public Error {
public:
    explicit ConfigNotFound(const std::string& path)
        : Error("ConfigNotFound", ErrorClass::Config, "config not found: " + path) {}
};

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigNotFound(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return build_scenario(ss.str());
}

} // namespace failwave
