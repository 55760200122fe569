#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "fracns/grid.hpp"

namespace fracns {
namespace detail {

// Cache of FFTW plans keyed by (dims, sign).  Plans are created with
// FFTW_ESTIMATE so planning never runs measurement trials (keeps transforms
// bit-reproducible across runs) and FFTW_UNALIGNED so the new-array execute
// interface accepts ordinary vector storage.  Plan creation is serialized;
// fftw_execute_dft on distinct buffers is thread-safe.
class PlanCache {
public:
    static fftw_plan get(const Grid& grid, int sign) {
        static PlanCache cache;
        std::array<int, 4> key{grid.dim(), 0, 0, 0};
        for (int d = 0; d < grid.dim(); ++d) key[d + 1] = grid.points(d);

        std::lock_guard<std::mutex> lock(cache.mutex_);
        auto& slot = sign == FFTW_FORWARD ? cache.forward_ : cache.backward_;
        auto it = slot.find(key);
        if (it != slot.end()) return it->second;

        std::vector<int> dims(grid.dim());
        for (int d = 0; d < grid.dim(); ++d) dims[d] = grid.points(d);
        std::vector<std::complex<double>> in(grid.cell_count()), out(grid.cell_count());
        fftw_plan plan = fftw_plan_dft(grid.dim(), dims.data(),
                                       reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()),
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fft: plan creation failed");
        slot.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::array<int, 4>, fftw_plan> forward_;
    std::map<std::array<int, 4>, fftw_plan> backward_;
};

inline void execute(const Grid& grid, int sign, const std::complex<double>* in,
                    std::complex<double>* out) {
    fftw_plan plan = PlanCache::get(grid, sign);
    // fftw_execute_dft does not modify the input for out-of-place plans.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

// Unnormalized forward transform: c_m = sum_j u_j exp(-2*pi*i*m.j/n).
inline std::vector<std::complex<double>> fft_forward(const Grid& grid,
                                                     const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out(in.size());
    detail::execute(grid, FFTW_FORWARD, in.data(), out.data());
    return out;
}

// Inverse transform normalized by the cell count, so fft_inverse(fft_forward(u)) == u.
inline std::vector<std::complex<double>> fft_inverse(const Grid& grid,
                                                     const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out(in.size());
    detail::execute(grid, FFTW_BACKWARD, in.data(), out.data());
    double scale = 1.0 / static_cast<double>(grid.cell_count());
    for (auto& z : out) z *= scale;
    return out;
}

inline SpectralCoeffs to_spectrum(const Field& u) {
    std::vector<std::complex<double>> in(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) in[i] = u[i];
    return SpectralCoeffs(u.grid, fft_forward(u.grid, in));
}

// Real part of the inverse transform.  For coefficients with conjugate
// symmetry the imaginary part is roundoff noise and is dropped.
inline Field from_spectrum(const SpectralCoeffs& c) {
    auto out = fft_inverse(c.grid, c.coeffs);
    Field u(c.grid);
    for (std::size_t i = 0; i < out.size(); ++i) u[i] = out[i].real();
    return u;
}

// Largest relative deviation from c_{-m} == conj(c_m).  Real fields keep this
// at roundoff level; the check runs in tests and in input validation.
inline double conjugate_symmetry_defect(const SpectralCoeffs& c) {
    const Grid& g = c.grid;
    double max_abs = 0.0;
    for (const auto& z : c.coeffs) max_abs = std::max(max_abs, std::abs(z));
    if (max_abs == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto idx = g.unflatten(i);
        std::array<int, 3> neg{0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) {
            int n = g.points(d);
            neg[d] = idx[d] == 0 ? 0 : n - idx[d];
        }
        std::complex<double> mirror = c.coeffs[g.flatten(neg)];
        worst = std::max(worst, std::abs(c.coeffs[i] - std::conj(mirror)));
    }
    return worst / max_abs;
}

}  // namespace fracns
