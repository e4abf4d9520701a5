#ifndef FSLAB_CONFIG_HPP
#define FSLAB_CONFIG_HPP

#include "fslab/potential.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fslab {

using nlohmann::json;

struct DomainConfig {
    std::string kind = "interval";  // "interval" | "box"
    double a = -1.0, b = 1.0;
    int n = 400;
    std::array<double, 2> lo{-1.0, -1.0}, hi{1.0, 1.0};
    std::array<int, 2> n2{16, 16};
};

struct PotentialConfig {
    std::string kind = "none";
    std::optional<double> c;                     // absolute strength
    std::optional<double> fraction_of_critical;  // c = fraction * c*
    std::optional<double> truncation;
    std::string file;                            // tabulated values (index, value)
};

struct SolverConfig {
    int eigencount = 0;      // 0 = full spectrum
    double eig_tol = 1e-9;
    double solve_tol = 1e-10;
};

struct AnalysisConfig {
    std::vector<double> t_list{0.5, 1.0, 2.0, 4.0, 8.0, 30.0};  // multiples of 1/lambda0
    double moser_q = 4.0 / 3.0;
    int moser_k_max = 20;
    int ladder_k_max = 32;
    int random_probes = 100;
    int sobolev_probes = 1000;
    std::uint64_t seed = 20240901;
    std::optional<double> critical_r;  // section-4 exponent override
};

struct RunConfig {
    DomainConfig domain;
    double alpha = 0.5;
    PotentialConfig potential;
    SolverConfig solver;
    AnalysisConfig analysis;
    json raw;  // echoed into the report
};

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.raw = j;
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    const json jd = j.value("domain", json::object());
    cfg.domain.kind = detail::get_or<std::string>(jd, "kind", "interval");
    if (cfg.domain.kind == "interval") {
        cfg.domain.a = detail::get_or<double>(jd, "a", -1.0);
        cfg.domain.b = detail::get_or<double>(jd, "b", 1.0);
        cfg.domain.n = detail::get_or<int>(jd, "n", 400);
    } else if (cfg.domain.kind == "box") {
        const auto lo = detail::get_or<std::vector<double>>(jd, "lo", {-1.0, -1.0});
        const auto hi = detail::get_or<std::vector<double>>(jd, "hi", {1.0, 1.0});
        const auto nn = detail::get_or<std::vector<int>>(jd, "n", {16, 16});
        if (lo.size() != 2 || hi.size() != 2 || nn.size() != 2)
            throw ConfigError("config: box lo/hi/n must have two entries");
        cfg.domain.lo = {lo[0], lo[1]};
        cfg.domain.hi = {hi[0], hi[1]};
        cfg.domain.n2 = {nn[0], nn[1]};
    } else {
        throw ConfigError("config: unknown domain kind '" + cfg.domain.kind + "'");
    }

    cfg.alpha = detail::get_or<double>(j, "alpha", 0.5);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
        throw ConfigError("config: alpha must lie in (0, 2)");

    const json jp = j.value("potential", json::object());
    cfg.potential.kind = detail::get_or<std::string>(jp, "kind", "none");
    if (jp.contains("c")) cfg.potential.c = jp.at("c").get<double>();
    if (jp.contains("fraction_of_critical"))
        cfg.potential.fraction_of_critical = jp.at("fraction_of_critical").get<double>();
    if (jp.contains("truncation")) cfg.potential.truncation = jp.at("truncation").get<double>();
    cfg.potential.file = detail::get_or<std::string>(jp, "file", "");
    if (cfg.potential.c && cfg.potential.fraction_of_critical)
        throw ConfigError("config: give either potential.c or potential.fraction_of_critical");

    const json js = j.value("solver", json::object());
    cfg.solver.eigencount = detail::get_or<int>(js, "eigencount", 0);
    cfg.solver.eig_tol = detail::get_or<double>(js, "eig_tol", 1e-9);
    cfg.solver.solve_tol = detail::get_or<double>(js, "solve_tol", 1e-10);
    if (cfg.solver.eigencount != 0 && cfg.solver.eigencount < 2)
        throw ConfigError("config: solver.eigencount must be 0 (full) or at least 2");
    if (!(cfg.solver.eig_tol > 0) || !(cfg.solver.solve_tol > 0))
        throw ConfigError("config: tolerances must be positive");

    const json ja = j.value("analysis", json::object());
    cfg.analysis.t_list = detail::get_or<std::vector<double>>(
        ja, "t_list", cfg.analysis.t_list);
    for (double t : cfg.analysis.t_list)
        if (!(t > 0)) throw ConfigError("config: analysis.t_list entries must be positive");
    cfg.analysis.moser_q = detail::get_or<double>(ja, "moser_q", cfg.analysis.moser_q);
    if (!(cfg.analysis.moser_q > 1.0)) throw ConfigError("config: moser_q must exceed 1");
    cfg.analysis.moser_k_max = detail::get_or<int>(ja, "moser_k_max", cfg.analysis.moser_k_max);
    cfg.analysis.ladder_k_max = detail::get_or<int>(ja, "ladder_k_max", cfg.analysis.ladder_k_max);
    cfg.analysis.random_probes = detail::get_or<int>(ja, "random_probes", cfg.analysis.random_probes);
    cfg.analysis.sobolev_probes =
        detail::get_or<int>(ja, "sobolev_probes", cfg.analysis.sobolev_probes);
    cfg.analysis.seed = detail::get_or<std::uint64_t>(ja, "seed", cfg.analysis.seed);
    if (ja.contains("critical_r")) cfg.analysis.critical_r = ja.at("critical_r").get<double>();
    if (cfg.analysis.moser_k_max < 1 || cfg.analysis.ladder_k_max < 6)
        throw ConfigError("config: moser_k_max >= 1 and ladder_k_max >= 6 required");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure in '") + path + "': " + e.what());
    }
    return parse_config(j);
}

inline Grid make_grid(const DomainConfig& d) {
    if (d.kind == "interval") return build_interval(d.a, d.b, d.n);
    return build_box(d.lo, d.hi, d.n2);
}

/// Two-column text file (node index, value) for tabulated potentials.
inline Vector load_tabulated(const std::string& path, Index n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("potential: cannot open tabulated file '" + path + "'");
    Vector v = Vector::Constant(n, -1.0);
    Index idx;
    double val;
    while (in >> idx >> val) {
        if (idx < 0 || idx >= n)
            throw ConfigError("potential: tabulated index out of range");
        v[idx] = val;
    }
    if ((v.array() < 0.0).any())
        throw ConfigError("potential: tabulated file must cover every node with a value >= 0");
    return v;
}

inline PotentialSpec make_potential_spec(const PotentialConfig& p, const Grid& g, double alpha) {
    PotentialSpec spec;
    if (p.kind == "none") {
        spec.kind = PotentialKind::none;
    } else if (p.kind == "hardy_origin") {
        spec.kind = PotentialKind::hardy_origin;
    } else if (p.kind == "hardy_boundary") {
        spec.kind = PotentialKind::hardy_boundary;
    } else if (p.kind == "bounded_constant") {
        spec.kind = PotentialKind::bounded_constant;
    } else if (p.kind == "tabulated") {
        spec.kind = PotentialKind::tabulated;
        spec.tabulated = load_tabulated(p.file, g.size());
    } else {
        throw ConfigError("config: unknown potential kind '" + p.kind + "'");
    }
    spec.truncation = p.truncation;
    if (p.fraction_of_critical) {
        const auto cs = critical_constant(spec.kind, g.dim, alpha);
        if (!cs)
            throw ConfigError("config: fraction_of_critical needs a potential with a critical "
                              "constant");
        spec.strength = *p.fraction_of_critical * *cs;
    } else if (p.c) {
        spec.strength = *p.c;
    } else {
        spec.strength = spec.kind == PotentialKind::none ? 0.0 : 1.0;
    }
    if (spec.strength < 0) throw ConfigError("config: potential strength must be nonnegative");
    return spec;
}

}  // namespace fslab

#endif
