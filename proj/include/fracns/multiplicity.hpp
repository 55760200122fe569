#pragma once

#include <sstream>

#include "fracns/landscape.hpp"
#include "fracns/localization.hpp"

namespace fracns {

struct RegionOutcome {
    std::size_t index = 0;                      // which center this run targeted
    std::array<double, 3> center{0, 0, 0};      // a_i in the slow variable
    std::array<double, 3> seed_shift{0, 0, 0};  // a_i / eps on the grid
    bool converged = false;
    double energy = 0.0;
    double lambda = 0.0;
    double mass = 0.0;
    std::array<double, 3> barycenter{0, 0, 0};
    std::optional<std::size_t> region;
    bool distinct_from_others = false;
    // Diagnostics against the comparison levels.
    double level_threshold = 0.0;  // frozen level at this center plus the gap allowance
    bool below_threshold = false;
    double lambda_bound = 0.0;  // 2 E_background / a
    bool lambda_bounded = false;
    bool energy_negative = false;
    bool lambda_negative = false;
};

struct MultiplicityReport {
    double a = 0.0;
    double eps = 0.0;
    double rho0 = 0.0;
    double E_background = 0.0;
    std::vector<double> E_frozen;
    RegionGeometry geometry;
    std::vector<RegionOutcome> outcomes;
    std::vector<SolveResult> solutions;
    std::size_t k_requested = 0;
    std::size_t k_found = 0;
    bool success = false;
};

// Runs the localized multi-well experiment: freeze the coefficients at each
// center to get the reference levels and a profile u0, translate u0 to every
// rescaled center a_i/eps, minimize the full slowly varying functional from
// each start, and classify the outcomes by truncated barycenter.  Succeeds
// when the k starts produce k pairwise-distinct converged minimizers sitting
// in k different sampling balls.
inline MultiplicityReport multiplicity_experiment(const PotentialSpec& spec,
                                                  const Nonlinearity& nl, double s, double a,
                                                  double eps, const Grid& grid,
                                                  const SolverOptions& opts,
                                                  double rho0_fraction = 0.5) {
    spec.validate_shape();
    if (!(rho0_fraction > 0.0 && rho0_fraction <= 1.0))
        throw std::invalid_argument("multiplicity_experiment: rho0_fraction must lie in (0, 1]");

    auto sampled = sample_on_grid(spec, grid, eps);
    if (sampled.center_outside_box) {
        std::ostringstream os;
        os << "multiplicity_experiment: a rescaled center a_i/eps falls outside the box "
           << "(eps = " << eps << ", box length " << grid.length(0)
           << "); enlarge the box or increase eps";
        throw std::invalid_argument(os.str());
    }

    MultiplicityReport rep;
    rep.a = a;
    rep.eps = eps;
    rep.k_requested = spec.centers.size();
    rep.geometry = choose_geometry(spec.centers, grid.dim());

    // Reference levels on the same grid.
    std::vector<SolveResult> frozen;
    for (const auto& c : spec.centers) {
        auto ctx_i = EnergyContext::frozen(grid, s, nl, spec.h_at(c), spec.V_at(c));
        frozen.push_back(minimize_on_sphere(ctx_i, a, seed_negative_energy(ctx_i, a, opts), opts));
        rep.E_frozen.push_back(frozen.back().energy);
    }
    auto ctx_bg = EnergyContext::frozen(grid, s, nl, spec.h_infinity, 0.0);
    rep.E_background =
        minimize_on_sphere(ctx_bg, a, seed_negative_energy(ctx_bg, a, opts), opts).energy;

    double worst_frozen = *std::max_element(rep.E_frozen.begin(), rep.E_frozen.end());
    rep.rho0 = rho0_fraction * (rep.E_background - worst_frozen);

    auto ctx_full = EnergyContext::nonautonomous(grid, s, nl, spec, eps);
    const Field& u0 = frozen.front().u;

    rep.solutions.resize(spec.centers.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= spec.centers.size()) return;
            std::array<double, 3> shift{0, 0, 0};
            for (int d = 0; d < grid.dim(); ++d) shift[d] = spec.centers[i][d] / eps;
            try {
                rep.solutions[i] = minimize_on_sphere(ctx_full, a, translate(u0, shift), opts);
            } catch (const NumericalFailure& e) {
                rep.solutions[i].u = e.last_iterate;
                rep.solutions[i].failed = true;
                rep.solutions[i].failure = e.what();
            }
            rep.solutions[i].seed_index = static_cast<int>(i);
        }
    };
    int workers = std::min<std::size_t>(opts.threads, spec.centers.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    auto chi = rep.geometry.truncation();
    for (std::size_t i = 0; i < spec.centers.size(); ++i) {
        const auto& sol = rep.solutions[i];
        RegionOutcome oc;
        oc.index = i;
        oc.center = spec.centers[i];
        for (int d = 0; d < grid.dim(); ++d) oc.seed_shift[d] = spec.centers[i][d] / eps;
        oc.converged = !sol.failed && sol.converged;
        oc.energy = sol.energy;
        oc.lambda = sol.lambda;
        oc.mass = sol.mass;
        if (!sol.failed) {
            oc.barycenter = barycenter(sol.u, eps, chi);
            oc.region = region_membership(sol.u, eps, rep.geometry);
        }
        oc.level_threshold = rep.E_frozen[i] + rep.rho0;
        oc.below_threshold = oc.converged && sol.energy < oc.level_threshold;
        oc.lambda_bound = 2.0 * rep.E_background / a;
        oc.lambda_bounded = oc.converged && sol.lambda <= oc.lambda_bound + 1e-6;
        oc.energy_negative = oc.converged && sol.energy < 0.0;
        oc.lambda_negative = oc.converged && sol.lambda < 0.0;
        rep.outcomes.push_back(std::move(oc));
    }

    for (std::size_t i = 0; i < rep.outcomes.size(); ++i) {
        bool all_distinct = true;
        for (std::size_t j = 0; j < rep.outcomes.size(); ++j) {
            if (i == j) continue;
            if (rep.solutions[i].failed || rep.solutions[j].failed) {
                all_distinct = false;
                continue;
            }
            if (!distinctness(rep.solutions[i].u, rep.solutions[j].u, eps, rep.geometry))
                all_distinct = false;
        }
        rep.outcomes[i].distinct_from_others = rep.outcomes.size() == 1 ? true : all_distinct;
    }

    std::set<std::size_t> occupied;
    for (const auto& oc : rep.outcomes)
        if (oc.converged && oc.distinct_from_others && oc.region) occupied.insert(*oc.region);
    rep.k_found = occupied.size();
    rep.success = rep.k_found == rep.k_requested;
    return rep;
}

}  // namespace fracns
