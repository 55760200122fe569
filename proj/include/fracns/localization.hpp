#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "fracns/model.hpp"
#include "fracns/spectral.hpp"

namespace fracns {

// Radial clamp to the closed ball of radius `radius`: identity inside,
// projection to the sphere outside.  Applied to the slow variable eps*x so
// that mass parked near the periodic box faces cannot drag averages off to
// infinity.
struct TruncationMap {
    double radius;

    std::array<double, 3> apply(const std::array<double, 3>& z, int dim) const {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += z[d] * z[d];
        double r = std::sqrt(r2);
        if (r <= radius) return z;
        std::array<double, 3> out{0, 0, 0};
        for (int d = 0; d < dim; ++d) out[d] = z[d] * (radius / r);
        return out;
    }
};

// Disjoint sampling balls around the concentration centers: rho_bar keeps the
// balls separated, r_bar puts them inside the truncation ball.
struct RegionGeometry {
    int dim = 1;
    std::vector<std::array<double, 3>> centers;
    double rho_bar = 1.0;
    double r_bar = 3.0;

    TruncationMap truncation() const { return TruncationMap{r_bar}; }
};

inline double center_distance(const std::array<double, 3>& a, const std::array<double, 3>& b,
                              int dim) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
        double dx = a[d] - b[d];
        r2 += dx * dx;
    }
    return std::sqrt(r2);
}

// Chooses rho_bar as a third of the minimal pairwise center distance (so the
// balls B(a_i, 2 rho_bar) stay disjoint) and r_bar large enough that every
// ball sits inside the truncation radius.  A single center gets default_rho.
inline RegionGeometry choose_geometry(const std::vector<std::array<double, 3>>& centers, int dim,
                                      double default_rho = 1.0) {
    if (centers.empty()) throw std::invalid_argument("choose_geometry: no centers");
    if (dim < 1 || dim > 3) throw std::invalid_argument("choose_geometry: dim must be 1, 2 or 3");
    RegionGeometry geo;
    geo.dim = dim;
    geo.centers = centers;
    if (centers.size() == 1) {
        geo.rho_bar = default_rho;
    } else {
        double min_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i)
            for (std::size_t j = i + 1; j < centers.size(); ++j)
                min_dist = std::min(min_dist, center_distance(centers[i], centers[j], dim));
        if (min_dist <= 0.0)
            throw std::invalid_argument("choose_geometry: duplicate centers");
        geo.rho_bar = min_dist / 3.0;
    }
    double max_norm = 0.0;
    std::array<double, 3> origin{0, 0, 0};
    for (const auto& c : centers) max_norm = std::max(max_norm, center_distance(c, origin, dim));
    geo.r_bar = max_norm + 2.0 * geo.rho_bar;
    return geo;
}

// Truncated center of mass in the slow variable:
//   G(u) = int chi(eps x) |u|^2 dx / int |u|^2 dx.
inline std::array<double, 3> barycenter(const Field& u, double eps, const TruncationMap& chi) {
    if (!(eps > 0.0)) throw std::invalid_argument("barycenter: eps must be positive");
    const Grid& g = u.grid;
    double total = 0.0;
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        double w = u[i] * u[i];
        if (w == 0.0) continue;
        total += w;
        auto idx = g.unflatten(i);
        std::array<double, 3> z{0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) z[d] = eps * g.coord(d, idx[d]);
        z = chi.apply(z, g.dim());
        for (int d = 0; d < g.dim(); ++d) acc[d] += w * z[d];
    }
    if (total <= 0.0) throw std::domain_error("barycenter: zero field");
    for (int d = 0; d < g.dim(); ++d) acc[d] /= total;
    return acc;
}

// Index of the sampling ball the barycenter falls into, or nothing if it sits
// in none of them.  Balls are disjoint by construction, so at most one match.
inline std::optional<std::size_t> region_membership(const Field& u, double eps,
                                                    const RegionGeometry& geo) {
    auto G = barycenter(u, eps, geo.truncation());
    for (std::size_t i = 0; i < geo.centers.size(); ++i)
        if (center_distance(G, geo.centers[i], geo.dim) <= geo.rho_bar) return i;
    return std::nullopt;
}

// Two fields count as distinct solutions when their barycenters land in
// different sampling balls; failing that, when they are separated in L2 by
// more than rel_tol * sqrt(mass).
inline bool distinctness(const Field& u, const Field& v, double eps, const RegionGeometry& geo,
                         double rel_tol = 1e-3) {
    require_same_grid(u.grid, v.grid, "distinctness");
    auto ru = region_membership(u, eps, geo);
    auto rv = region_membership(v, eps, geo);
    if (ru && rv && *ru != *rv) return true;
    Field diff = u;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= v[i];
    double scale = std::sqrt(std::max(mass(u), mass(v)));
    return l2_norm(diff) > rel_tol * scale;
}

}  // namespace fracns
