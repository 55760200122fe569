#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "fracns/fft.hpp"
#include "fracns/grid.hpp"

namespace fracns {

inline void require_fractional_order(double s) {
    if (!(s > 0.0) || s > 1.0)
        throw std::invalid_argument("fractional order s must lie in (0, 1], got " + std::to_string(s));
}

// Symbol |k|^{2s} for every storage index.  s == 1 short-circuits to |k|^2 so
// the classical Laplacian is reproduced without a pow round trip.
inline std::vector<double> symbol_ks(const Grid& grid, double s) {
    require_fractional_order(s);
    std::vector<double> mult(grid.cell_count());
    for (std::size_t i = 0; i < mult.size(); ++i) {
        auto idx = grid.unflatten(i);
        double k2 = 0.0;
        for (int d = 0; d < grid.dim(); ++d) {
            double k = grid.wavenumber(d, idx[d]);
            k2 += k * k;
        }
        mult[i] = s == 1.0 ? k2 : std::pow(k2, s);
    }
    return mult;
}

// (-Delta)^s u via the Fourier multiplier |k|^{2s}.
inline Field frac_laplacian(const Field& u, double s) {
    auto mult = symbol_ks(u.grid, s);
    SpectralCoeffs c = to_spectrum(u);
    for (std::size_t i = 0; i < c.size(); ++i) c.coeffs[i] *= mult[i];
    return from_spectrum(c);
}

// Discrete L2 inner product h^N sum u_j v_j.
inline double inner(const Field& u, const Field& v) {
    require_same_grid(u.grid, v.grid, "inner");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc * u.grid.cell_volume();
}

inline double mass(const Field& u) { return inner(u, u); }

inline double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

// Gagliardo seminorm squared, |(-Delta)^{s/2} u|_{L2}^2, evaluated in Fourier
// space through Parseval: (h^N / n^N) sum |k|^{2s} |c_k|^2.
inline double hs_seminorm_sq(const Field& u, double s) {
    auto mult = symbol_ks(u.grid, s);
    SpectralCoeffs c = to_spectrum(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += mult[i] * std::norm(c.coeffs[i]);
    return acc * u.grid.cell_volume() / static_cast<double>(u.grid.cell_count());
}

namespace detail {

inline bool integer_cell_shift(const Grid& grid, const std::array<double, 3>& shift,
                               std::array<long long, 3>& cells) {
    for (int d = 0; d < grid.dim(); ++d) {
        double ratio = shift[d] / grid.spacing(d);
        long long r = std::llround(ratio);
        if (std::abs(ratio - r) > 1e-9) return false;
        cells[d] = r;
    }
    return true;
}

}  // namespace detail

// u(. - shift) on the periodic box.  Shifts landing on grid cells are an exact
// index roll.  Fractional shifts apply the spectral phase exp(-i k.shift) and
// keep the real part; on even grids the Nyquist sine component has no off-grid
// representative, so that projection is the best a real output can do.
inline Field translate(const Field& u, const std::array<double, 3>& shift) {
    const Grid& g = u.grid;
    std::array<long long, 3> cells{0, 0, 0};
    if (detail::integer_cell_shift(g, shift, cells)) {
        Field out(g);
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto idx = g.unflatten(i);
            std::array<int, 3> src = idx;
            for (int d = 0; d < g.dim(); ++d) {
                long long n = g.points(d);
                long long j = (static_cast<long long>(idx[d]) - cells[d]) % n;
                src[d] = static_cast<int>(j < 0 ? j + n : j);
            }
            out[i] = u[g.flatten(src)];
        }
        return out;
    }
    SpectralCoeffs c = to_spectrum(u);
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto idx = g.unflatten(i);
        double phase = 0.0;
        for (int d = 0; d < g.dim(); ++d) phase -= g.wavenumber(d, idx[d]) * shift[d];
        c.coeffs[i] *= std::polar(1.0, phase);
    }
    return from_spectrum(c);
}

struct DilateResult {
    Field field;
    double mass_rel_err;  // |mass(out) - mass(in)| / mass(in), from resampling the tails
};

// Mass-preserving dilation (tau * u)(x) = exp(N tau / 2) u(exp(tau) x),
// evaluated by sampling the trigonometric interpolant of u at the stretched
// nodes, one axis at a time.  Exact for the interpolant itself; the reported
// mass defect measures how much of u leaves the band the grid can hold.
inline DilateResult dilate(const Field& u, double tau, double tau_max = 3.0) {
    if (!(tau_max > 0.0)) throw std::invalid_argument("dilate: tau_max must be positive");
    if (std::abs(tau) > tau_max)
        throw std::domain_error("dilate: |tau| = " + std::to_string(std::abs(tau)) +
                                " exceeds tau_max = " + std::to_string(tau_max) +
                                " (aliasing risk)");
    const Grid& g = u.grid;
    double mass_in = mass(u);

    std::vector<std::complex<double>> work(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) work[i] = u[i];
    work = fft_forward(g, work);

    double stretch = std::exp(tau);
    for (int axis = 0; axis < g.dim(); ++axis) {
        int n = g.points(axis);
        // Evaluation phases exp(i k_m (y_j - x_0)) with y_j = stretch * x_j.
        // The DFT indexes samples from 0 while coordinates start at x_0, so
        // the interpolant's phase is anchored at x_0; the Nyquist mode is
        // symmetrized to its cosine part (the real representative of the
        // +/- n/2 pair).
        double x0 = g.coord(axis, 0);
        std::vector<std::complex<double>> eval(static_cast<std::size_t>(n) * n);
        for (int j = 0; j < n; ++j) {
            double y = stretch * g.coord(axis, j) - x0;
            for (int m = 0; m < n; ++m) {
                double k = g.wavenumber(axis, m);
                eval[static_cast<std::size_t>(j) * n + m] =
                    m == n / 2 ? std::complex<double>(std::cos(k * y), 0.0)
                               : std::polar(1.0, k * y);
            }
        }
        // Contract this axis: out[.., j, ..] = sum_m eval[j,m] work[.., m, ..].
        std::size_t stride = 1;
        for (int d = axis + 1; d < g.dim(); ++d) stride *= g.points(d);
        std::size_t blocks = u.size() / (static_cast<std::size_t>(n) * stride);
        std::vector<std::complex<double>> next(u.size());
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t base = b * n * stride;
            for (std::size_t r = 0; r < stride; ++r) {
                for (int j = 0; j < n; ++j) {
                    std::complex<double> acc = 0.0;
                    const std::complex<double>* row = &eval[static_cast<std::size_t>(j) * n];
                    for (int m = 0; m < n; ++m) acc += row[m] * work[base + m * stride + r];
                    next[base + j * stride + r] = acc;
                }
            }
        }
        work.swap(next);
    }

    double amp = std::exp(0.5 * g.dim() * tau) / static_cast<double>(g.cell_count());
    Field out(g);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = amp * work[i].real();

    double mass_out = mass(out);
    double rel = mass_in > 0.0 ? std::abs(mass_out - mass_in) / mass_in : 0.0;
    return DilateResult{std::move(out), rel};
}

// Band-limited resampling to a new per-axis resolution (each a power of two).
// Upsampling pads the spectrum with zeros; downsampling drops modes above the
// new Nyquist.  Values at shared nodes are preserved for band-limited input.
inline Field resample(const Field& u, const std::array<int, 3>& new_npts) {
    const Grid& g = u.grid;
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<int, 3> pts{1, 1, 1};
    for (int d = 0; d < g.dim(); ++d) {
        lengths[d] = g.length(d);
        pts[d] = new_npts[d];
    }
    Grid fine(g.dim(), lengths, pts);
    SpectralCoeffs c = to_spectrum(u);
    SpectralCoeffs out(fine);
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto idx = g.unflatten(i);
        std::array<int, 3> dst{0, 0, 0};
        bool keep = true;
        for (int d = 0; d < g.dim(); ++d) {
            int m = g.mode(d, idx[d]);
            int nn = fine.points(d);
            if (m < -nn / 2 || m >= nn / 2) { keep = false; break; }
            dst[d] = m >= 0 ? m : m + nn;
        }
        if (keep) out.coeffs[fine.flatten(dst)] = c.coeffs[i];
    }
    double scale = static_cast<double>(fine.cell_count()) / static_cast<double>(g.cell_count());
    for (auto& z : out.coeffs) z *= scale;
    return from_spectrum(out);
}

// Normalized Gaussian bump with L2 mass `target_mass`.
inline Field gaussian_bump(const Grid& grid, const std::array<double, 3>& center, double sigma,
                           double target_mass) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_bump: sigma must be positive");
    if (!(target_mass > 0.0)) throw std::invalid_argument("gaussian_bump: mass must be positive");
    Field u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0.0;
        for (int d = 0; d < grid.dim(); ++d) {
            double dx = grid.coord(d, idx[d]) - center[d];
            // nearest periodic image
            double L = grid.length(d);
            dx -= L * std::round(dx / L);
            r2 += dx * dx;
        }
        u[i] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
    double m = mass(u);
    double scale = std::sqrt(target_mass / m);
    for (auto& v : u.values) v *= scale;
    return u;
}

// Fraction of the mass sitting within `band` * L of the box faces, per axis.
// A diagnostic for whether the periodic box is large enough for the decay of
// the state under study.
inline double boundary_mass_fraction(const Field& u, double band = 1.0 / 16.0) {
    if (!(band > 0.0) || band >= 0.5)
        throw std::invalid_argument("boundary_mass_fraction: band must lie in (0, 0.5)");
    const Grid& g = u.grid;
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double w = u[i] * u[i];
        total += w;
        auto idx = g.unflatten(i);
        for (int d = 0; d < g.dim(); ++d) {
            double margin = 0.5 * g.length(d) - std::abs(g.coord(d, idx[d]));
            if (margin <= band * g.length(d)) {
                edge += w;
                break;
            }
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace fracns
