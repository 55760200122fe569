#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracns/model.hpp"
#include "fracns/optimizer.hpp"

namespace fracns {

struct ProblemConfig {
    int dim = 1;
    double s = 0.5;
    double box_length = 64.0;
    int points = 512;

    Grid make_grid() const { return Grid::uniform(dim, box_length, points); }
};

struct AutonomousConfig {
    double eta = -1.0;
    double mu = 1.0;
};

struct SolveConfig {
    std::string mode = "autonomous";  // autonomous | frozen | nonautonomous
    double alpha_h = 1.0;             // frozen mode
    double beta_V = 0.0;              // frozen mode
    double eps = 0.1;                 // nonautonomous mode
    int restarts = 0;                 // extra random seeds beyond the dilation seed
};

struct LandscapeConfig {
    std::vector<double> masses;
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> thetas;
    std::vector<double> eps_list;
    double tol = 1e-8;
};

struct MultiplicityConfig {
    double eps = 0.1;
    double rho0_fraction = 0.5;
};

struct RunConfig {
    ProblemConfig problem;
    Nonlinearity nonlinearity = Nonlinearity::pure_power(2.5, 1.0);
    std::optional<PotentialSpec> potential;
    double mass = 1.0;
    AutonomousConfig autonomous;
    SolverOptions solver;
    SolveConfig solve;
    LandscapeConfig landscape;
    MultiplicityConfig multiplicity;
    nlohmann::ordered_json echo;  // parsed document, for the manifest
};

namespace detail {

class ConfigReader {
public:
    ConfigReader(const nlohmann::ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key); }

    ConfigReader child(const char* key) const {
        const auto& sub = j_.at(key);
        if (!sub.is_object()) fail(key, "must be an object");
        return ConfigReader(sub, path_ + key + ".");
    }

    template <typename T>
    T get(const char* key, T fallback) const {
        if (!j_.contains(key)) return fallback;
        return read<T>(key);
    }

    template <typename T>
    T require(const char* key) const {
        if (!j_.contains(key)) fail(key, "is required");
        return read<T>(key);
    }

    [[noreturn]] void fail(const char* key, const std::string& what) const {
        throw std::invalid_argument("config: " + path_ + key + " " + what);
    }

    const nlohmann::ordered_json& raw() const { return j_; }

private:
    template <typename T>
    T read(const char* key) const {
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    const nlohmann::ordered_json& j_;
    std::string path_;
};

inline std::array<double, 3> read_point(const nlohmann::ordered_json& j, int dim,
                                        const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw std::invalid_argument("config: " + where + " must be an array of " +
                                    std::to_string(dim) + " coordinates");
    std::array<double, 3> p{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        if (!j.at(d).is_number())
            throw std::invalid_argument("config: " + where + " must contain numbers");
        p[d] = j.at(d).get<double>();
    }
    return p;
}

}  // namespace detail

inline PotentialSpec parse_potential(const nlohmann::ordered_json& j, int dim) {
    detail::ConfigReader r(j, "potential.");
    PotentialSpec spec;
    spec.dim = dim;
    spec.centers.clear();
    if (!j.contains("centers") || !j.at("centers").is_array() || j.at("centers").empty())
        throw std::invalid_argument("config: potential.centers must be a nonempty array of points");
    for (std::size_t i = 0; i < j.at("centers").size(); ++i)
        spec.centers.push_back(detail::read_point(j.at("centers").at(i), dim,
                                                  "potential.centers[" + std::to_string(i) + "]"));
    spec.h_infinity = r.get("h_infinity", 1.0);
    spec.h_peak = r.get("h_peak", 2.0);
    spec.h_bump_width = r.get("h_bump_width", 1.0);
    spec.V_depth = r.get("V_depth", -1.0);
    spec.V_well_width = r.get("V_well_width", 1.0);
    if (j.contains("peak_scale")) spec.peak_scale = j.at("peak_scale").get<std::vector<double>>();
    if (j.contains("well_centers")) {
        for (std::size_t i = 0; i < j.at("well_centers").size(); ++i)
            spec.well_centers.push_back(
                detail::read_point(j.at("well_centers").at(i), dim,
                                   "potential.well_centers[" + std::to_string(i) + "]"));
    }
    spec.validate_shape();
    return spec;
}

inline RunConfig parse_config(const nlohmann::ordered_json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: document root must be an object");
    detail::ConfigReader root(j, "");
    RunConfig cfg;
    cfg.echo = j;

    {
        auto p = root.child("problem");
        cfg.problem.dim = p.get("dim", 1);
        cfg.problem.s = p.require<double>("s");
        cfg.problem.box_length = p.require<double>("box_length");
        cfg.problem.points = p.require<int>("points");
        if (cfg.problem.dim < 1 || cfg.problem.dim > 3) p.fail("dim", "must be 1, 2 or 3");
        if (!(cfg.problem.s > 0.0) || cfg.problem.s > 1.0) p.fail("s", "must lie in (0, 1]");
        if (!(cfg.problem.box_length > 0.0)) p.fail("box_length", "must be positive");
        if (cfg.problem.points < 8 || !is_power_of_two(cfg.problem.points))
            p.fail("points", "must be a power of two >= 8");
    }
    {
        auto n = root.child("nonlinearity");
        std::string form = n.get<std::string>("form", "pure_power");
        try {
            if (form == "pure_power") {
                cfg.nonlinearity = Nonlinearity::pure_power(n.require<double>("q"), n.get("c_q", 1.0));
            } else if (form == "two_power") {
                cfg.nonlinearity = Nonlinearity::two_power(n.require<double>("q"), n.require<double>("p"),
                                                           n.get("c_q", 1.0), n.get("c_p", 1.0));
            } else {
                n.fail("form", "must be \"pure_power\" or \"two_power\"");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config: nonlinearity invalid: " + std::string(e.what()));
        }
    }
    if (root.has("potential"))
        cfg.potential = parse_potential(j.at("potential"), cfg.problem.dim);

    {
        auto c = root.child("constraint");
        cfg.mass = c.require<double>("mass");
        if (!(cfg.mass > 0.0)) c.fail("mass", "must be positive");
    }
    if (root.has("autonomous")) {
        auto a = root.child("autonomous");
        cfg.autonomous.eta = a.get("eta", -1.0);
        cfg.autonomous.mu = a.get("mu", 1.0);
        if (!(cfg.autonomous.mu > 0.0)) a.fail("mu", "must be positive");
    }
    if (root.has("solver")) {
        auto s = root.child("solver");
        cfg.solver.max_iters = s.get("max_iters", cfg.solver.max_iters);
        cfg.solver.grad_tol = s.get("grad_tol", cfg.solver.grad_tol);
        cfg.solver.initial_step = s.get("initial_step", cfg.solver.initial_step);
        cfg.solver.backtrack_factor = s.get("backtrack_factor", cfg.solver.backtrack_factor);
        cfg.solver.armijo_c = s.get("armijo_c", cfg.solver.armijo_c);
        cfg.solver.step_growth = s.get("step_growth", cfg.solver.step_growth);
        cfg.solver.rng_seed = s.get<std::uint64_t>("rng_seed", cfg.solver.rng_seed);
        cfg.solver.tau_seed_step = s.get("tau_seed_step", cfg.solver.tau_seed_step);
        cfg.solver.tau_max = s.get("tau_max", cfg.solver.tau_max);
        try {
            cfg.solver.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config: " + std::string(e.what()));
        }
    }
    if (root.has("solve")) {
        auto s = root.child("solve");
        cfg.solve.mode = s.get<std::string>("mode", "autonomous");
        if (cfg.solve.mode != "autonomous" && cfg.solve.mode != "frozen" &&
            cfg.solve.mode != "nonautonomous")
            s.fail("mode", "must be \"autonomous\", \"frozen\" or \"nonautonomous\"");
        cfg.solve.alpha_h = s.get("alpha_h", 1.0);
        cfg.solve.beta_V = s.get("beta_V", 0.0);
        cfg.solve.eps = s.get("eps", 0.1);
        cfg.solve.restarts = s.get("restarts", 0);
        if (cfg.solve.mode == "nonautonomous") {
            if (!cfg.potential)
                s.fail("mode", "\"nonautonomous\" requires a potential block");
            if (!(cfg.solve.eps > 0.0)) s.fail("eps", "must be positive");
        }
        if (cfg.solve.restarts < 0) s.fail("restarts", "must be nonnegative");
    }
    if (root.has("landscape")) {
        auto l = root.child("landscape");
        cfg.landscape.masses = l.get("masses", std::vector<double>{});
        cfg.landscape.thetas = l.get("thetas", std::vector<double>{});
        cfg.landscape.eps_list = l.get("eps_list", std::vector<double>{});
        cfg.landscape.tol = l.get("tol", 1e-8);
        if (l.raw().contains("pairs")) {
            for (const auto& pr : l.raw().at("pairs")) {
                if (!pr.is_array() || pr.size() != 2)
                    l.fail("pairs", "must be an array of [a, b] mass pairs");
                cfg.landscape.pairs.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
            }
        }
        for (double m : cfg.landscape.masses)
            if (!(m > 0.0)) l.fail("masses", "must be positive");
        for (double e : cfg.landscape.eps_list)
            if (!(e > 0.0)) l.fail("eps_list", "must be positive");
    }
    if (root.has("multiplicity")) {
        auto m = root.child("multiplicity");
        cfg.multiplicity.eps = m.require<double>("eps");
        cfg.multiplicity.rho0_fraction = m.get("rho0_fraction", 0.5);
        if (!(cfg.multiplicity.eps > 0.0)) m.fail("eps", "must be positive");
        if (!(cfg.multiplicity.rho0_fraction > 0.0) || cfg.multiplicity.rho0_fraction > 1.0)
            m.fail("rho0_fraction", "must lie in (0, 1]");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace fracns
