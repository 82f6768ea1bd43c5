#include "channet/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace channet {

namespace {

void check_fits(const Kernel1D& k, int n, const char* axis) {
    if (k.taps.empty() || k.taps.size() % 2 == 0) {
        throw std::invalid_argument("kernel must have odd, nonzero length");
    }
    if (k.length() >= 2 * n) {
        throw std::invalid_argument(std::string("kernel of length ") + std::to_string(k.length()) +
                                    " too large for image " + axis + " of " + std::to_string(n));
    }
}

// Fills `buf` (size n + 2r) with the row mirrored by r samples on each side.
void pad_row(std::span<const double> src, int r, std::vector<double>& buf) {
    const int n = static_cast<int>(src.size());
    buf.resize(static_cast<std::size_t>(n + 2 * r));
    for (int i = -r; i < n + r; ++i) buf[static_cast<std::size_t>(i + r)] = src[static_cast<std::size_t>(reflect_index(i, n))];
}

}  // namespace

int kernel_radius(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

Kernel1D gaussian_kernel(double sigma, int order, int max_radius) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("gaussian_kernel: sigma must be positive, got " + std::to_string(sigma));
    }
    if (order < 0 || order > 2) throw std::invalid_argument("gaussian_kernel: order must be 0, 1 or 2");

    int r = kernel_radius(sigma);
    if (max_radius >= 0) r = std::min(r, max_radius);

    // Half-kernel for j = 0..r, mirrored afterwards so symmetry is exact.
    std::vector<double> g(static_cast<std::size_t>(r + 1));
    const double s2 = sigma * sigma;
    for (int j = 0; j <= r; ++j) g[static_cast<std::size_t>(j)] = std::exp(-0.5 * j * j / s2);

    double g_sum = g[0];
    for (int j = 1; j <= r; ++j) g_sum += 2.0 * g[static_cast<std::size_t>(j)];

    std::vector<double> half(static_cast<std::size_t>(r + 1));
    switch (order) {
        case 0:
            for (int j = 0; j <= r; ++j) half[static_cast<std::size_t>(j)] = g[static_cast<std::size_t>(j)] / g_sum;
            break;
        case 1: {
            // Positive-side taps are -j g(j); first moment sum_j j k(j) = 2 sum_{j>0} j k(j).
            double moment = 0.0;
            for (int j = 1; j <= r; ++j) moment += 2.0 * j * (-j * g[static_cast<std::size_t>(j)]);
            const double scale = moment != 0.0 ? -1.0 / moment : 0.0;
            for (int j = 0; j <= r; ++j) half[static_cast<std::size_t>(j)] = -j * g[static_cast<std::size_t>(j)] * scale;
            break;
        }
        case 2: {
            std::vector<double> raw(static_cast<std::size_t>(r + 1));
            double raw_sum = 0.0;
            for (int j = 0; j <= r; ++j) {
                raw[static_cast<std::size_t>(j)] = (j * j / (s2 * s2) - 1.0 / s2) * g[static_cast<std::size_t>(j)];
                raw_sum += (j == 0 ? 1.0 : 2.0) * raw[static_cast<std::size_t>(j)];
            }
            // Remove the DC component with a multiple of the normalized Gaussian.
            double second = 0.0;
            for (int j = 0; j <= r; ++j) {
                raw[static_cast<std::size_t>(j)] -= raw_sum * g[static_cast<std::size_t>(j)] / g_sum;
                second += 2.0 * j * j * raw[static_cast<std::size_t>(j)];
            }
            const double scale = second != 0.0 ? 2.0 / second : 0.0;
            for (int j = 0; j <= r; ++j) half[static_cast<std::size_t>(j)] = raw[static_cast<std::size_t>(j)] * scale;
            break;
        }
    }

    Kernel1D k;
    k.sigma = sigma;
    k.order = order;
    k.taps.resize(static_cast<std::size_t>(2 * r + 1));
    const double parity = order == 1 ? -1.0 : 1.0;
    for (int j = 0; j <= r; ++j) {
        k.taps[static_cast<std::size_t>(r + j)] = half[static_cast<std::size_t>(j)];
        k.taps[static_cast<std::size_t>(r - j)] = parity * half[static_cast<std::size_t>(j)];
    }
    if (order == 1) k.taps[static_cast<std::size_t>(r)] = 0.0;
    return k;
}

Kernel1D identity_kernel() {
    Kernel1D k;
    k.taps = {1.0};
    k.sigma = 0.0;
    k.order = 0;
    return k;
}

ScalarField convolve_rows(const ScalarField& field, const Kernel1D& kx) {
    check_fits(kx, field.cols(), "width");
    const int rows = field.rows();
    const int cols = field.cols();
    const int r = kx.radius();
    ScalarField out(rows, cols);

#pragma omp parallel
    {
        std::vector<double> buf;
#pragma omp for schedule(static)
        for (int y = 0; y < rows; ++y) {
            pad_row(field.row(y), r, buf);
            std::span<double> dst = out.row(y);
            // out(x) = sum_j k(j) f(x - j), j ascending; buf index of f(x - j) is x - j + r.
            for (int j = -r; j <= r; ++j) {
                const double kj = kx.at(j);
                const double* src = buf.data() + (r - j);
                for (int x = 0; x < cols; ++x) dst[static_cast<std::size_t>(x)] += kj * src[x];
            }
        }
    }
    return out;
}

ScalarField convolve_cols(const ScalarField& field, const Kernel1D& ky) {
    check_fits(ky, field.rows(), "height");
    const int rows = field.rows();
    const int cols = field.cols();
    const int r = ky.radius();
    ScalarField out(rows, cols);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < rows; ++y) {
        std::span<double> dst = out.row(y);
        for (int j = -r; j <= r; ++j) {
            const double kj = ky.at(j);
            std::span<const double> src = field.row(reflect_index(y - j, rows));
            for (int x = 0; x < cols; ++x) dst[static_cast<std::size_t>(x)] += kj * src[static_cast<std::size_t>(x)];
        }
    }
    return out;
}

ScalarField convolve_separable(const ScalarField& field, const Kernel1D& kx, const Kernel1D& ky) {
    check_fits(ky, field.rows(), "height");
    return convolve_cols(convolve_rows(field, kx), ky);
}

IntegralField integral_image(const ScalarField& field) {
    const int rows = field.rows();
    const int cols = field.cols();
    IntegralField out{Grid<double>(rows + 1, cols + 1, 0.0)};
    Grid<double>& s = out.sums;

    // Row prefix sums, then a running sum down each column. Each entry ends up
    // as prefix(r, c) + S(r, c+1), the same arithmetic as the serial one-pass form.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < rows; ++y) {
        double running = 0.0;
        for (int x = 0; x < cols; ++x) {
            running += field(y, x);
            s(y + 1, x + 1) = running;
        }
    }
#pragma omp parallel for schedule(static)
    for (int x = 1; x <= cols; ++x) {
        for (int y = 1; y <= rows; ++y) s(y, x) = s(y - 1, x) + s(y, x);
    }
    return out;
}

double box_mean(const IntegralField& integral, int r, int c, int half) {
    half = std::max(half, 0);
    const int r0 = std::max(r - half, 0);
    const int c0 = std::max(c - half, 0);
    const int r1 = std::min(r + half + 1, integral.rows());
    const int c1 = std::min(c + half + 1, integral.cols());
    const double area = static_cast<double>(r1 - r0) * static_cast<double>(c1 - c0);
    return integral.rect_sum(r0, c0, r1, c1) / area;
}

namespace reference {

ScalarField convolve_rows(const ScalarField& field, const Kernel1D& kx) {
    check_fits(kx, field.cols(), "width");
    ScalarField out(field.rows(), field.cols());
    const int r = kx.radius();
    for (int y = 0; y < field.rows(); ++y) {
        for (int x = 0; x < field.cols(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) acc += kx.at(j) * field(y, reflect_index(x - j, field.cols()));
            out(y, x) = acc;
        }
    }
    return out;
}

ScalarField convolve_cols(const ScalarField& field, const Kernel1D& ky) {
    check_fits(ky, field.rows(), "height");
    ScalarField out(field.rows(), field.cols());
    const int r = ky.radius();
    for (int y = 0; y < field.rows(); ++y) {
        for (int x = 0; x < field.cols(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) acc += ky.at(j) * field(reflect_index(y - j, field.rows()), x);
            out(y, x) = acc;
        }
    }
    return out;
}

ScalarField convolve_separable(const ScalarField& field, const Kernel1D& kx, const Kernel1D& ky) {
    check_fits(ky, field.rows(), "height");
    return reference::convolve_cols(reference::convolve_rows(field, kx), ky);
}

IntegralField integral_image(const ScalarField& field) {
    IntegralField out{Grid<double>(field.rows() + 1, field.cols() + 1, 0.0)};
    for (int y = 0; y < field.rows(); ++y) {
        double running = 0.0;
        for (int x = 0; x < field.cols(); ++x) {
            running += field(y, x);
            out.sums(y + 1, x + 1) = out.sums(y, x + 1) + running;
        }
    }
    return out;
}

}  // namespace reference

}  // namespace channet
