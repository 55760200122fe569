#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>

#include "fracns/energy.hpp"
#include "fracns/localization.hpp"

namespace fracns {

struct SolverOptions {
    int max_iters = 50000;
    double grad_tol = 1e-8;
    double initial_step = 0.1;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    double step_growth = 2.0;
    double step_max = 1e3;
    double step_min = 1e-18;
    std::uint64_t rng_seed = 12345;
    double tau_seed_step = 0.25;
    double tau_max = 3.0;
    int threads = 1;
    bool record_trace = false;

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be positive");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("solver: grad_tol must be positive");
        if (!(initial_step > 0.0)) throw std::invalid_argument("solver: initial_step must be positive");
        if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
            throw std::invalid_argument("solver: backtrack_factor must lie in (0,1)");
        if (!(armijo_c > 0.0 && armijo_c < 1.0))
            throw std::invalid_argument("solver: armijo_c must lie in (0,1)");
        if (!(step_growth >= 1.0)) throw std::invalid_argument("solver: step_growth must be >= 1");
        if (!(tau_seed_step > 0.0) || !(tau_max > 0.0))
            throw std::invalid_argument("solver: dilation seeding steps must be positive");
        if (threads < 1) throw std::invalid_argument("solver: threads must be positive");
    }
};

struct TraceRow {
    int iteration;
    double energy;
    double grad_norm;
};

struct SolveResult {
    Field u;
    double energy = 0.0;
    double lambda = 0.0;
    double mass = 0.0;
    std::optional<double> pohozaev_rel;
    std::optional<std::array<double, 3>> barycenter;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    double boundary_mass = 0.0;
    int seed_index = -1;
    bool failed = false;
    std::string failure;
    std::vector<TraceRow> trace;
};

// Solver blew up (non-finite energy); carries the last finite iterate so the
// caller can inspect or restart.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& msg, Field last)
        : std::runtime_error(msg), last_iterate(std::move(last)) {}
    Field last_iterate;
};

// Rescales onto the mass sphere: mass(out) == a to roundoff.  Idempotent.
inline Field project_to_sphere(const Field& u, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("project_to_sphere: mass must be positive");
    double m = mass(u);
    if (m <= 0.0) throw std::domain_error("project_to_sphere: zero field has no projection");
    Field out = u;
    double scale = std::sqrt(a / m);
    for (auto& v : out.values) v *= scale;
    return out;
}

// Normally distributed nodal values projected to the mass sphere; the
// deterministic seed makes runs reproducible.
inline Field random_sphere_field(const Grid& grid, double a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field u(grid);
    for (auto& v : u.values) v = dist(rng);
    return project_to_sphere(u, a);
}

namespace detail {

struct IterateState {
    Field u;
    std::vector<std::complex<double>> hat;
    EnergyTerms terms;
    double energy = 0.0;
};

inline IterateState evaluate(const EnergyContext& ctx, Field u) {
    IterateState st{std::move(u), {}, {}, 0.0};
    std::vector<std::complex<double>> in(st.u.size());
    for (std::size_t i = 0; i < st.u.size(); ++i) in[i] = st.u[i];
    st.hat = fft_forward(st.u.grid, in);
    st.terms = energy_terms_from_spectrum(ctx, st.u, st.hat);
    st.energy = st.terms.total();
    return st;
}

}  // namespace detail

// Projected gradient descent on the sphere {mass(u) == a}: the L2 gradient is
// projected onto the tangent space, an Armijo backtracking line search picks
// the step, and each trial point is renormalized back onto the sphere.
// Accepted steps never increase the energy beyond the roundoff of the energy
// sums themselves.  Once the Armijo sufficient decrease falls below that
// roundoff scale, energy comparisons can no longer tell descent from noise,
// so the search switches to unconditional gradient steps with a fixed
// Lipschitz-safe step; the iterate map is then a local contraction and the
// gradient norm keeps falling to the arithmetic floor.  Convergence is
// declared when the tangent gradient L2 norm drops below grad_tol, which at
// a constrained critical point bounds |grad E(u) - lambda u|.
inline SolveResult minimize_on_sphere(const EnergyContext& ctx, double a, const Field& seed,
                                      const SolverOptions& opts) {
    opts.validate();
    require_same_grid(ctx.grid(), seed.grid, "minimize_on_sphere");
    if (!(a > 0.0)) throw std::invalid_argument("minimize_on_sphere: mass must be positive");

    const Grid& g = ctx.grid();
    const double volume_weight = g.cell_volume();
    auto st = detail::evaluate(ctx, project_to_sphere(seed, a));
    if (!std::isfinite(st.energy))
        throw NumericalFailure("minimize_on_sphere: seed energy is not finite", st.u);

    SolveResult res{Field(g)};
    double step = opts.initial_step;
    double safe_step = 0.0;  // fixed step for the sub-roundoff regime, set on first entry
    int it = 0;
    double gnorm = 0.0;
    bool converged = false;

    Field grad(g), tangent(g);
    for (;; ++it) {
        // grad E = ifft(symbol * hat) + c u - w f(u)
        std::vector<std::complex<double>> tmp(st.hat);
        const auto& sym = ctx.symbol();
        for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] *= sym[i];
        auto lap = fft_inverse(g, tmp);
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] = lap[i].real() + ctx.coefficient_c(i) * st.u[i] -
                      ctx.coefficient_w(i) * f_eval(ctx.nonlinearity(), st.u[i]);

        double gu = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) gu += grad[i] * st.u[i];
        gu *= volume_weight;
        double lam = gu / a;
        double gt2 = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            tangent[i] = grad[i] - lam * st.u[i];
            gt2 += tangent[i] * tangent[i];
        }
        gt2 *= volume_weight;
        gnorm = std::sqrt(gt2);

        if (opts.record_trace) res.trace.push_back({it, st.energy, gnorm});
        if (gnorm <= opts.grad_tol) {
            converged = true;
            break;
        }
        if (it >= opts.max_iters) break;

        // Sub-roundoff regime: the largest decrease the Armijo test could
        // certify is below the noise floor of the energy evaluation, so take
        // plain gradient steps with a step bounded by the inverse curvature
        // (symbol peak + potential + nonlinear stiffness + multiplier).
        const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(st.energy);
        if (opts.armijo_c * step * gt2 <= noise) {
            if (safe_step == 0.0) {
                double lip = 0.0;
                for (double v : sym) lip = std::max(lip, v);
                double cmax = 0.0, wmax = 0.0, umax = 0.0;
                for (std::size_t i = 0; i < st.u.size(); ++i) {
                    cmax = std::max(cmax, std::abs(ctx.coefficient_c(i)));
                    wmax = std::max(wmax, std::abs(ctx.coefficient_w(i)));
                    umax = std::max(umax, std::abs(st.u[i]));
                }
                const auto& nl = ctx.nonlinearity();
                double fp = umax > 0.0 ? nl.c_q * (nl.q - 1.0) * std::pow(umax, nl.q - 2.0) : 0.0;
                if (nl.form == NonlinearityForm::two_power && umax > 0.0)
                    fp += nl.c_p * (nl.p - 1.0) * std::pow(umax, nl.p - 2.0);
                safe_step = 1.5 / (lip + cmax + wmax * fp + std::abs(lam) + 1e-30);
            }
            Field trial(g);
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] = st.u[i] - safe_step * tangent[i];
            double m = mass(trial);
            if (m <= 0.0) break;  // degenerate iterate; report unconverged state
            double fix = std::sqrt(a / m);
            for (auto& v : trial.values) v *= fix;
            st = detail::evaluate(ctx, std::move(trial));
            if (!std::isfinite(st.energy))
                throw NumericalFailure("minimize_on_sphere: energy became non-finite", st.u);
            continue;
        }

        bool accepted = false;
        while (step >= opts.step_min) {
            Field trial(g);
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] = st.u[i] - step * tangent[i];
            double m = mass(trial);
            if (m > 0.0) {
                double fix = std::sqrt(a / m);
                for (auto& v : trial.values) v *= fix;
                auto cand = detail::evaluate(ctx, std::move(trial));
                if (std::isfinite(cand.energy) &&
                    cand.energy <= st.energy - opts.armijo_c * step * gt2) {
                    st = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            step *= opts.backtrack_factor;
        }
        if (!accepted) break;  // line search exhausted; report unconverged state
        if (!std::isfinite(st.energy))
            throw NumericalFailure("minimize_on_sphere: energy became non-finite", st.u);
        step = std::min(step * opts.step_growth, opts.step_max);
    }

    res.u = std::move(st.u);
    res.energy = st.energy;
    res.mass = mass(res.u);
    res.lambda = lagrange_multiplier(ctx, res.u);
    res.iterations = it;
    res.converged = converged;
    res.grad_norm = gnorm;
    res.boundary_mass = boundary_mass_fraction(res.u);
    if (ctx.constant_coefficients()) {
        res.pohozaev_rel = pohozaev_relative(ctx, res.u);
    } else if (ctx.potential()) {
        auto geo = choose_geometry(ctx.potential()->centers, g.dim());
        res.barycenter = barycenter(res.u, ctx.eps(), geo.truncation());
    }
    return res;
}

// Lowest-energy point on the sampled dilation fiber through a centered
// Gaussian, walking tau downward in steps of tau_seed_step.  Returning the
// fiber minimizer (not merely the first point under the constant-quadratic
// level c0 a / 2) matters: descent is monotone, so a seed below the energy of
// every spurious stationary plateau (the constant state in particular) can
// never be captured by one.  Throws when the whole sampled fiber stays above
// the quadratic level, which happens exactly when the focusing term is too
// weak or the box cannot hold the required spreading.
inline Field seed_negative_energy(const EnergyContext& ctx, double a, const SolverOptions& opts) {
    opts.validate();
    ctx.require_constant("seed_negative_energy");
    if (!(a > 0.0)) throw std::invalid_argument("seed_negative_energy: mass must be positive");
    if (!ctx.nonlinearity().active() || !(ctx.w0() > 0.0))
        throw std::domain_error(
            "seed_negative_energy: focusing term is switched off (c_q = 0), "
            "no dilation can push the energy below the quadratic level");

    const Grid& g = ctx.grid();
    double min_len = g.length(0);
    for (int d = 1; d < g.dim(); ++d) min_len = std::min(min_len, g.length(d));
    Field base = gaussian_bump(g, {0.0, 0.0, 0.0}, min_len / 32.0, a);
    double threshold = 0.5 * ctx.c0() * a;

    Field best = base;
    double best_energy = energy(ctx, base);
    int max_steps = static_cast<int>(std::ceil(opts.tau_max / opts.tau_seed_step));
    for (int j = 1; j <= max_steps; ++j) {
        double tau = -std::min(j * opts.tau_seed_step, opts.tau_max);
        Field cand = project_to_sphere(dilate(base, tau, opts.tau_max).field, a);
        double e = energy(ctx, cand);
        if (e < best_energy) {
            best = std::move(cand);
            best_energy = e;
        }
    }
    if (best_energy < threshold) return best;
    throw std::domain_error(
        "seed_negative_energy: no point on the dilation fiber beat the quadratic level; "
        "the box or resolution is too small for this parameter set");
}

// L2 distance after aligning v to u over all integer-cell translations
// (cross-correlation via FFT).  Collapses translated copies of the same
// profile; the exact roll keeps it symmetric in its arguments.
inline double aligned_l2_distance(const Field& u, const Field& v) {
    require_same_grid(u.grid, v.grid, "aligned_l2_distance");
    const Grid& g = u.grid;
    std::vector<std::complex<double>> a(u.size()), b(v.size());
    for (std::size_t i = 0; i < u.size(); ++i) a[i] = u[i];
    for (std::size_t i = 0; i < v.size(); ++i) b[i] = v[i];
    auto fa = fft_forward(g, a);
    auto fb = fft_forward(g, b);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= std::conj(fb[i]);
    auto corr = fft_inverse(g, fa);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : corr) best = std::max(best, z.real());
    double d2 = mass(u) + mass(v) - 2.0 * g.cell_volume() * best;
    return std::sqrt(std::max(d2, 0.0));
}

namespace detail {

inline bool results_distinct(const EnergyContext& ctx, const SolveResult& r1,
                             const SolveResult& r2, double rel_tol) {
    double scale = std::sqrt(std::max(r1.mass, r2.mass));
    if (ctx.constant_coefficients())
        return aligned_l2_distance(r1.u, r2.u) > rel_tol * scale;
    if (ctx.potential()) {
        auto geo = choose_geometry(ctx.potential()->centers, ctx.grid().dim());
        return distinctness(r1.u, r2.u, ctx.eps(), geo, rel_tol);
    }
    Field diff = r1.u;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= r2.u[i];
    return l2_norm(diff) > rel_tol * scale;
}

}  // namespace detail

// Runs one solve per seed (across opts.threads workers), merges results in
// seed order, drops duplicates of lower-energy minimizers, and returns the
// survivors sorted by energy with failed runs flagged at the tail.  The merge
// order depends only on seed indices, never on thread scheduling.
inline std::vector<SolveResult> multistart(const EnergyContext& ctx, double a,
                                           const std::vector<Field>& seeds,
                                           const SolverOptions& opts,
                                           double dedup_rel_tol = 1e-3) {
    opts.validate();
    if (seeds.empty()) throw std::invalid_argument("multistart: no seeds");

    std::vector<SolveResult> raw(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            try {
                raw[i] = minimize_on_sphere(ctx, a, seeds[i], opts);
            } catch (const NumericalFailure& e) {
                raw[i].u = e.last_iterate;
                raw[i].failed = true;
                raw[i].failure = e.what();
            }
            raw[i].seed_index = static_cast<int>(i);
        }
    };
    int workers = std::min<std::size_t>(opts.threads, seeds.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&raw](std::size_t i, std::size_t j) {
        if (raw[i].failed != raw[j].failed) return !raw[i].failed;
        if (!raw[i].failed && raw[i].energy != raw[j].energy) return raw[i].energy < raw[j].energy;
        return i < j;
    });

    std::vector<SolveResult> out;
    out.reserve(raw.size());
    for (std::size_t i : order) {
        if (raw[i].failed) {
            out.push_back(std::move(raw[i]));
            continue;
        }
        bool dup = false;
        for (const auto& kept : out) {
            if (kept.failed) continue;
            if (!detail::results_distinct(ctx, kept, raw[i], dedup_rel_tol)) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(std::move(raw[i]));
    }
    return out;
}

}  // namespace fracns
