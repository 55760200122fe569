#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fracns/optimizer.hpp"

namespace fracns {

struct CurvePoint {
    double mass = 0.0;
    SolveResult result;
    bool warm_started = false;  // winner grew out of the previous mass point
};

// Ground-state energy as a function of the constraint mass, one solve per
// requested mass on a common grid and context.
struct LandscapeCurve {
    std::vector<CurvePoint> points;

    std::vector<double> masses() const {
        std::vector<double> m;
        m.reserve(points.size());
        for (const auto& p : points) m.push_back(p.mass);
        return m;
    }
    std::vector<double> energies() const {
        std::vector<double> e;
        e.reserve(points.size());
        for (const auto& p : points) e.push_back(p.result.energy);
        return e;
    }

    const CurvePoint& at_mass(double a) const {
        for (const auto& p : points)
            if (std::abs(p.mass - a) <= 1e-9 * std::max(1.0, std::abs(a))) return p;
        throw std::invalid_argument("landscape: no curve point at mass " + std::to_string(a) +
                                    " (interpolation is not supported)");
    }
};

// Minimizes at each mass in ascending order.  Every point is seeded from the
// negative-energy dilation seed; from the second point on, the previous
// minimizer reprojected to the new sphere joins as a warm start, and the two
// runs are merged by multistart.
inline LandscapeCurve energy_curve(const EnergyContext& ctx, const std::vector<double>& masses,
                                   const SolverOptions& opts) {
    ctx.require_constant("energy_curve");
    if (masses.empty()) throw std::invalid_argument("energy_curve: no masses");
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] > 0.0)) throw std::invalid_argument("energy_curve: masses must be positive");
        if (i > 0 && !(masses[i] > masses[i - 1]))
            throw std::invalid_argument("energy_curve: masses must be strictly increasing");
    }

    LandscapeCurve curve;
    curve.points.reserve(masses.size());
    const Field* prev = nullptr;
    for (double a : masses) {
        std::vector<Field> seeds;
        seeds.push_back(seed_negative_energy(ctx, a, opts));
        if (prev) seeds.push_back(project_to_sphere(*prev, a));
        auto results = multistart(ctx, a, seeds, opts);

        CurvePoint pt;
        pt.mass = a;
        auto best = std::find_if(results.begin(), results.end(),
                                 [](const SolveResult& r) { return !r.failed && r.converged; });
        if (best == results.end())
            best = std::find_if(results.begin(), results.end(),
                                [](const SolveResult& r) { return !r.failed; });
        if (best == results.end())
            throw NumericalFailure("energy_curve: every start failed at mass " + std::to_string(a),
                                   results.front().u);
        pt.result = *best;
        pt.warm_started = pt.result.seed_index == 1;
        curve.points.push_back(std::move(pt));
        prev = &curve.points.back().result.u;
    }
    return curve;
}

struct LandscapeCheck {
    std::string kind;
    std::string description;
    bool passed = false;
    double margin = 0.0;  // slack in the inequality, positive when strict
};

struct LandscapeReport {
    std::vector<LandscapeCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const LandscapeCheck& c) { return c.passed; });
    }
};

// Structural inequalities of the ground-state energy map:
//   adjacent monotonicity   E(a2) <= E(a1) for a1 < a2,
//   subadditivity           E(a+b) <= E(a) + E(b) for requested pairs,
//   sublinear scaling       E(theta a) <= theta E(a) for requested factors.
// Every mass referenced by a check must be a computed curve point.
inline LandscapeReport check_landscape(const LandscapeCurve& curve,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const std::vector<double>& thetas, double tol = 1e-8) {
    LandscapeReport rep;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& lo = curve.points[i - 1];
        const auto& hi = curve.points[i];
        LandscapeCheck c;
        c.kind = "monotone";
        std::ostringstream os;
        os << "E(" << hi.mass << ") <= E(" << lo.mass << ")";
        c.description = os.str();
        c.margin = lo.result.energy - hi.result.energy;
        c.passed = c.margin >= -tol;
        rep.checks.push_back(std::move(c));
    }
    for (const auto& [a, b] : pairs) {
        const auto& pa = curve.at_mass(a);
        const auto& pb = curve.at_mass(b);
        const auto& pab = curve.at_mass(a + b);
        LandscapeCheck c;
        c.kind = "subadditive";
        std::ostringstream os;
        os << "E(" << a + b << ") <= E(" << a << ") + E(" << b << ")";
        c.description = os.str();
        c.margin = pa.result.energy + pb.result.energy - pab.result.energy;
        c.passed = c.margin >= -tol;
        rep.checks.push_back(std::move(c));
    }
    for (double theta : thetas) {
        if (!(theta >= 1.0))
            throw std::invalid_argument("check_landscape: scaling factors must be >= 1");
        bool any = false;
        for (const auto& base : curve.points) {
            double target = theta * base.mass;
            bool have = false;
            for (const auto& q : curve.points)
                if (std::abs(q.mass - target) <= 1e-9 * std::max(1.0, target)) have = true;
            if (!have) continue;
            any = true;
            const auto& pt = curve.at_mass(target);
            LandscapeCheck c;
            c.kind = "scaling";
            std::ostringstream os;
            os << "E(" << target << ") <= " << theta << " * E(" << base.mass << ")";
            c.description = os.str();
            c.margin = theta * base.result.energy - pt.result.energy;
            c.passed = c.margin >= -tol;
            rep.checks.push_back(std::move(c));
        }
        if (!any)
            throw std::invalid_argument(
                "check_landscape: no curve point pair realizes scaling factor " +
                std::to_string(theta));
    }
    return rep;
}

// Ground-state levels entering the localization comparison, all computed on
// the same grid so discretization bias cancels in the differences:
//   full      slowly varying coefficients at this eps,
//   frozen_i  coefficients pinned at center i (best h, deepest V),
//   background coefficients pinned at their far-field values.
struct ComparisonLevels {
    double a = 0.0;
    double eps = 0.0;
    double E_full = 0.0;
    std::vector<double> E_frozen;
    double E_background = 0.0;
    SolveResult full_result;
    std::vector<SolveResult> frozen_results;
    SolveResult background_result;

    double min_frozen() const {
        return *std::min_element(E_frozen.begin(), E_frozen.end());
    }
    double max_frozen() const {
        return *std::max_element(E_frozen.begin(), E_frozen.end());
    }
};

// Frozen solves run first (each from the dilation seed); the full problem is
// then seeded by translating the first frozen minimizer to every rescaled
// center and keeping the best outcome.
inline ComparisonLevels comparison_levels(const PotentialSpec& spec, const Nonlinearity& nl,
                                          double s, double a, double eps, const Grid& grid,
                                          const SolverOptions& opts) {
    spec.validate_shape();
    ComparisonLevels out;
    out.a = a;
    out.eps = eps;

    for (const auto& c : spec.centers) {
        auto ctx_i = EnergyContext::frozen(grid, s, nl, spec.h_at(c), spec.V_at(c));
        auto r = minimize_on_sphere(ctx_i, a, seed_negative_energy(ctx_i, a, opts), opts);
        out.E_frozen.push_back(r.energy);
        out.frozen_results.push_back(std::move(r));
    }

    auto ctx_bg = EnergyContext::frozen(grid, s, nl, spec.h_infinity, 0.0);
    out.background_result =
        minimize_on_sphere(ctx_bg, a, seed_negative_energy(ctx_bg, a, opts), opts);
    out.E_background = out.background_result.energy;

    auto ctx_full = EnergyContext::nonautonomous(grid, s, nl, spec, eps);
    if (ctx_full.center_outside_box())
        throw std::invalid_argument("comparison_levels: a rescaled center a_i/eps leaves the box; "
                                    "enlarge the box or increase eps");
    std::vector<Field> seeds;
    for (const auto& c : spec.centers) {
        std::array<double, 3> shift{0, 0, 0};
        for (int d = 0; d < grid.dim(); ++d) shift[d] = c[d] / eps;
        seeds.push_back(translate(out.frozen_results.front().u, shift));
    }
    auto full = multistart(ctx_full, a, seeds, opts);
    auto best = std::find_if(full.begin(), full.end(),
                             [](const SolveResult& r) { return !r.failed && r.converged; });
    if (best == full.end())
        throw NumericalFailure("comparison_levels: full solve failed", full.front().u);
    out.full_result = *best;
    out.E_full = out.full_result.energy;
    return out;
}

struct FrozenComparison {
    double E1 = 0.0;
    double E2 = 0.0;
    double margin = 0.0;  // E1 - E2, positive when the better coefficients win
    bool ordered = false;
    bool both_negative = false;
};

// A stronger bump or a deeper well strictly lowers the frozen ground level:
// for 0 < h1 <= h2 and V2 <= V1 <= 0 (not both equal) the levels satisfy
// E2 < E1 < 0.
inline FrozenComparison frozen_monotonicity_check(const Grid& grid, double s,
                                                  const Nonlinearity& nl, double a, double h1,
                                                  double V1, double h2, double V2,
                                                  const SolverOptions& opts, double tol = 1e-8) {
    if (!(h1 > 0.0) || !(h2 >= h1))
        throw std::invalid_argument("frozen_monotonicity_check: needs 0 < h1 <= h2");
    if (!(V1 <= 0.0) || !(V2 <= V1))
        throw std::invalid_argument("frozen_monotonicity_check: needs V2 <= V1 <= 0");
    auto ctx1 = EnergyContext::frozen(grid, s, nl, h1, V1);
    auto ctx2 = EnergyContext::frozen(grid, s, nl, h2, V2);
    auto r1 = minimize_on_sphere(ctx1, a, seed_negative_energy(ctx1, a, opts), opts);
    auto r2 = minimize_on_sphere(ctx2, a, seed_negative_energy(ctx2, a, opts), opts);
    FrozenComparison cmp;
    cmp.E1 = r1.energy;
    cmp.E2 = r2.energy;
    cmp.margin = cmp.E1 - cmp.E2;
    bool strict_params = h2 > h1 || V2 < V1;
    cmp.ordered = strict_params ? cmp.margin > -tol : std::abs(cmp.margin) <= tol;
    cmp.both_negative = cmp.E1 < 0.0 && cmp.E2 < 0.0;
    return cmp;
}

}  // namespace fracns
