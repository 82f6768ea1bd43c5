#pragma once

#include <vector>

#include "channet/grid.hpp"

namespace channet {

/// Sampled Gaussian (derivative) kernel on integer offsets -radius..radius.
///
/// Taps are normalized to unit response on the canonical polynomial of their
/// order: order 0 sums to 1, order 1 maps the ramp x to 1, order 2 maps x^2/2
/// to 1 (and sums to 0).
struct Kernel1D {
    std::vector<double> taps;
    double sigma = 0.0;
    int order = 0;

    int radius() const noexcept { return static_cast<int>(taps.size() / 2); }
    int length() const noexcept { return static_cast<int>(taps.size()); }
    /// Tap at offset j in [-radius, radius].
    double at(int j) const noexcept { return taps[static_cast<std::size_t>(j + radius())]; }
};

/// Cumulative-sum table with one row and column of zero padding.
/// sums(r, c) holds the sum of the source over rows < r and cols < c.
struct IntegralField {
    Grid<double> sums;

    int rows() const noexcept { return sums.rows() - 1; }
    int cols() const noexcept { return sums.cols() - 1; }
    /// Sum over the half-open rectangle [r0, r1) x [c0, c1).
    double rect_sum(int r0, int c0, int r1, int c1) const noexcept {
        return sums(r1, c1) - sums(r0, c1) - sums(r1, c0) + sums(r0, c0);
    }
};

/// Radius used for a kernel at `sigma`: ceil(3 sigma), so the full window is ceil(6 sigma)+1 taps.
int kernel_radius(double sigma);

/// Builds a derivative-of-Gaussian kernel. `max_radius` (if >= 0) truncates the
/// support before normalization. Throws std::invalid_argument for sigma <= 0 or order > 2.
Kernel1D gaussian_kernel(double sigma, int order, int max_radius = -1);

/// Identity kernel {1}.
Kernel1D identity_kernel();

/// Mirror index without repeating the edge sample (dcb|abcd|cba). Valid for i in [-(n-1), 2n-2].
constexpr int reflect_index(int i, int n) noexcept {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
}

/// Filters every row with `kx` and then every column with `ky` under mirror
/// reflection. Output pixel sums are accumulated in a fixed tap order, so the
/// result is bit-identical for any thread count.
/// Throws std::invalid_argument if a kernel is not shorter than twice the
/// corresponding image dimension.
ScalarField convolve_separable(const ScalarField& field, const Kernel1D& kx, const Kernel1D& ky);

/// Row pass only (convolution along x).
ScalarField convolve_rows(const ScalarField& field, const Kernel1D& kx);
/// Column pass only (convolution along y).
ScalarField convolve_cols(const ScalarField& field, const Kernel1D& ky);

IntegralField integral_image(const ScalarField& field);

/// Mean over [r-half, r+half] x [c-half, c+half] clipped to the image.
double box_mean(const IntegralField& integral, int r, int c, int half);

namespace reference {

// Straightforward single-threaded versions of the kernels above. They share
// the per-pixel summation order of the parallel code and are used as the
// baseline in tests and in the benchmark.

ScalarField convolve_rows(const ScalarField& field, const Kernel1D& kx);
ScalarField convolve_cols(const ScalarField& field, const Kernel1D& ky);
ScalarField convolve_separable(const ScalarField& field, const Kernel1D& kx, const Kernel1D& ky);
IntegralField integral_image(const ScalarField& field);

}  // namespace reference

}  // namespace channet
