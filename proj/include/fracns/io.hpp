#pragma once

#include <bit>
#include <charconv>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fracns/landscape.hpp"
#include "fracns/multiplicity.hpp"

namespace fracns {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form, identical across runs.
inline std::string format_double(double v) {
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline ordered_json json_or_null(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

inline ordered_json barycenter_json(const std::optional<std::array<double, 3>>& b, int dim) {
    if (!b) return nullptr;
    ordered_json arr = ordered_json::array();
    for (int d = 0; d < dim; ++d) arr.push_back((*b)[d]);
    return arr;
}

inline ordered_json solve_result_json(const SolveResult& r) {
    ordered_json j;
    j["energy"] = r.energy;
    j["lambda"] = r.lambda;
    j["mass"] = r.mass;
    j["pohozaev_rel"] = json_or_null(r.pohozaev_rel);
    j["barycenter"] = barycenter_json(r.barycenter, r.u.grid.dim());
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["grad_norm"] = r.grad_norm;
    return j;
}

inline std::string curve_csv(const LandscapeCurve& curve) {
    std::string out = "mass,energy,lambda,pohozaev_rel,converged\n";
    for (const auto& p : curve.points) {
        const auto& r = p.result;
        out += format_double(p.mass) + ',' + format_double(r.energy) + ',' +
               format_double(r.lambda) + ',' +
               (r.pohozaev_rel ? format_double(*r.pohozaev_rel) : std::string()) + ',' +
               (r.converged ? "true" : "false") + '\n';
    }
    return out;
}

inline std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,energy,grad_norm\n";
    for (const auto& row : trace)
        out += std::to_string(row.iteration) + ',' + format_double(row.energy) + ',' +
               format_double(row.grad_norm) + '\n';
    return out;
}

inline ordered_json landscape_report_json(const LandscapeReport& rep) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        ordered_json j;
        j["kind"] = c.kind;
        j["description"] = c.description;
        j["passed"] = c.passed;
        j["margin"] = c.margin;
        checks.push_back(std::move(j));
    }
    ordered_json j;
    j["passed"] = rep.passed();
    j["checks"] = std::move(checks);
    return j;
}

inline ordered_json comparison_levels_json(const ComparisonLevels& lv) {
    ordered_json j;
    j["mass"] = lv.a;
    j["eps"] = lv.eps;
    j["E_full"] = lv.E_full;
    j["E_frozen"] = lv.E_frozen;
    j["E_background"] = lv.E_background;
    j["gap_to_best_frozen"] = lv.E_full - lv.min_frozen();
    j["full"] = solve_result_json(lv.full_result);
    return j;
}

inline ordered_json multiplicity_report_json(const MultiplicityReport& rep) {
    ordered_json regions = ordered_json::array();
    for (const auto& oc : rep.outcomes) {
        ordered_json j;
        ordered_json center = ordered_json::array(), shift = ordered_json::array(),
                     bary = ordered_json::array();
        int dim = rep.geometry.dim;
        for (int d = 0; d < dim; ++d) {
            center.push_back(oc.center[d]);
            shift.push_back(oc.seed_shift[d]);
            bary.push_back(oc.barycenter[d]);
        }
        j["center"] = std::move(center);
        j["seed_offset"] = std::move(shift);
        j["converged"] = oc.converged;
        j["energy"] = oc.energy;
        j["lambda"] = oc.lambda;
        j["mass"] = oc.mass;
        j["barycenter"] = std::move(bary);
        j["region"] = oc.region ? ordered_json(*oc.region + 1) : ordered_json(nullptr);
        j["distinct"] = oc.distinct_from_others;
        ordered_json th;
        th["level_threshold"] = oc.level_threshold;
        th["below_threshold"] = oc.below_threshold;
        th["lambda_bound"] = oc.lambda_bound;
        th["lambda_bounded"] = oc.lambda_bounded;
        th["energy_negative"] = oc.energy_negative;
        th["lambda_negative"] = oc.lambda_negative;
        j["thresholds"] = std::move(th);
        regions.push_back(std::move(j));
    }
    ordered_json j;
    j["mass"] = rep.a;
    j["eps"] = rep.eps;
    j["rho0"] = rep.rho0;
    j["E_background"] = rep.E_background;
    j["E_frozen"] = rep.E_frozen;
    j["rho_bar"] = rep.geometry.rho_bar;
    j["r_bar"] = rep.geometry.r_bar;
    j["regions"] = std::move(regions);
    ordered_json summary;
    summary["k_requested"] = rep.k_requested;
    summary["k_found"] = rep.k_found;
    summary["success"] = rep.success;
    j["summary"] = std::move(summary);
    return j;
}

// Raw nodal values, row major, IEEE little-endian float64, plus a JSON
// sidecar describing the layout.
inline void write_field(const std::filesystem::path& base, const Field& u) {
    static_assert(std::endian::native == std::endian::little,
                  "field dumps assume a little-endian host");
    std::ofstream raw(base.string() + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("write_field: cannot open " + base.string() + ".f64");
    raw.write(reinterpret_cast<const char*>(u.values.data()),
              static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    raw.close();

    ordered_json meta;
    meta["dtype"] = "float64";
    meta["byte_order"] = "little";
    meta["layout"] = "row-major";
    meta["dim"] = u.grid.dim();
    ordered_json lengths = ordered_json::array(), points = ordered_json::array();
    for (int d = 0; d < u.grid.dim(); ++d) {
        lengths.push_back(u.grid.length(d));
        points.push_back(u.grid.points(d));
    }
    meta["box_length"] = std::move(lengths);
    meta["points"] = std::move(points);
    meta["count"] = u.values.size();
    std::ofstream side(base.string() + ".json");
    side << meta.dump(2) << '\n';
}

inline Field read_field(const std::filesystem::path& base) {
    std::ifstream side(base.string() + ".json");
    if (!side) throw std::runtime_error("read_field: cannot open " + base.string() + ".json");
    ordered_json meta = ordered_json::parse(side);
    int dim = meta.at("dim").get<int>();
    std::array<double, 3> lengths{1, 1, 1};
    std::array<int, 3> points{1, 1, 1};
    for (int d = 0; d < dim; ++d) {
        lengths[d] = meta.at("box_length").at(d).get<double>();
        points[d] = meta.at("points").at(d).get<int>();
    }
    Grid grid(dim, lengths, points);
    Field u(grid);
    std::ifstream raw(base.string() + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("read_field: cannot open " + base.string() + ".f64");
    raw.read(reinterpret_cast<char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (raw.gcount() != static_cast<std::streamsize>(u.values.size() * sizeof(double)))
        throw std::runtime_error("read_field: truncated data in " + base.string() + ".f64");
    return u;
}

inline std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline ordered_json manifest_json(const ordered_json& config_echo, const std::string& started,
                                  double elapsed_s) {
    ordered_json j;
    j["config"] = config_echo;
    j["started"] = started;
    j["elapsed_s"] = elapsed_s;
    j["artifact_version"] = "0.1.0";
    return j;
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
    out << j.dump(2) << '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_text: cannot open " + path.string());
    out << text;
}

}  // namespace fracns
