#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracns {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Uniform periodic box [-L/2, L/2)^dim sampled at n points per axis.
// Nodes are x_j = -L/2 + j*h with h = L/n; wavenumbers are 2*pi*m/L with
// m in [-n/2, n/2), the Nyquist index mapping to the negative frequency.
class Grid {
public:
    // The default grid is the smallest valid one (1D, unit box, 8 nodes).  It
    // exists so result aggregates can be declared before they are filled;
    // every Grid instance, default or not, satisfies the class invariants.
    Grid() : Grid(1, {1.0, 1.0, 1.0}, {8, 8, 8}) {}

    Grid(int dim, std::array<double, 3> length, std::array<int, 3> npts)
        : dim_(dim), length_(length), npts_(npts) {
        if (dim < 1 || dim > 3)
            throw std::invalid_argument("Grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
        for (int d = 0; d < dim; ++d) {
            if (!(length_[d] > 0.0))
                throw std::invalid_argument("Grid: box length must be positive on axis " + std::to_string(d));
            if (npts_[d] < 8 || !is_power_of_two(npts_[d]))
                throw std::invalid_argument("Grid: points per axis must be a power of two >= 8, got " +
                                            std::to_string(npts_[d]) + " on axis " + std::to_string(d));
        }
        for (int d = dim; d < 3; ++d) {
            length_[d] = 1.0;
            npts_[d] = 1;
        }
    }

    static Grid uniform(int dim, double box_length, int points) {
        return Grid(dim, {box_length, box_length, box_length}, {points, points, points});
    }

    int dim() const { return dim_; }
    double length(int axis) const { return length_[axis]; }
    int points(int axis) const { return npts_[axis]; }
    double spacing(int axis) const { return length_[axis] / npts_[axis]; }

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int d = 0; d < dim_; ++d) n *= static_cast<std::size_t>(npts_[d]);
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim_; ++d) v *= spacing(d);
        return v;
    }

    double volume() const {
        double v = 1.0;
        for (int d = 0; d < dim_; ++d) v *= length_[d];
        return v;
    }

    double coord(int axis, int index) const {
        return -0.5 * length_[axis] + index * spacing(axis);
    }

    // Signed integer mode for a storage index: 0..n/2-1 map to themselves,
    // n/2..n-1 map to the negative half, with the Nyquist index going to -n/2.
    int mode(int axis, int index) const {
        int n = npts_[axis];
        return index < n / 2 ? index : index - n;
    }

    double wavenumber(int axis, int index) const {
        return 2.0 * std::numbers::pi * mode(axis, index) / length_[axis];
    }

    // Row-major flattening, axis 0 slowest.
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int d = dim_ - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % npts_[d]);
            flat /= npts_[d];
        }
        return idx;
    }

    std::size_t flatten(const std::array<int, 3>& idx) const {
        std::size_t flat = 0;
        for (int d = 0; d < dim_; ++d)
            flat = flat * npts_[d] + static_cast<std::size_t>(idx[d]);
        return flat;
    }

    bool operator==(const Grid& o) const {
        if (dim_ != o.dim_) return false;
        for (int d = 0; d < dim_; ++d)
            if (length_[d] != o.length_[d] || npts_[d] != o.npts_[d]) return false;
        return true;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int dim_;
    std::array<double, 3> length_;
    std::array<int, 3> npts_;
};

// Real-valued sample vector over a grid.  Value semantics throughout: copies
// are deep and instances are safe to move between threads.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() : Field(Grid()) {}
    explicit Field(const Grid& g) : grid(g), values(g.cell_count(), 0.0) {}
    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.cell_count())
            throw std::invalid_argument("Field: value count does not match grid");
    }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

// Complex Fourier coefficients in FFT index order (unnormalized forward sums).
struct SpectralCoeffs {
    Grid grid;
    std::vector<std::complex<double>> coeffs;

    explicit SpectralCoeffs(const Grid& g) : grid(g), coeffs(g.cell_count()) {}
    SpectralCoeffs(const Grid& g, std::vector<std::complex<double>> c)
        : grid(g), coeffs(std::move(c)) {
        if (coeffs.size() != grid.cell_count())
            throw std::invalid_argument("SpectralCoeffs: coefficient count does not match grid");
    }

    std::size_t size() const { return coeffs.size(); }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b)
        throw std::invalid_argument(std::string(where) + ": operands live on different grids");
}

}  // namespace fracns
