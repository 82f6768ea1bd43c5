#include "channet/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "channet/errors.hpp"

namespace channet {

namespace {

// Mirror a continuous coordinate into [0, n-1] (single fold).
double reflect_coord(double u, int n) {
    if (n == 1) return 0.0;
    const double hi = static_cast<double>(n - 1);
    if (u < 0.0) u = -u;
    if (u > hi) u = 2.0 * hi - u;
    return std::clamp(u, 0.0, hi);
}

double bilinear(const ScalarField& f, double x, double y) {
    x = reflect_coord(x, f.cols());
    y = reflect_coord(y, f.rows());
    const int x0 = std::min(static_cast<int>(x), f.cols() - 1);
    const int y0 = std::min(static_cast<int>(y), f.rows() - 1);
    const int x1 = std::min(x0 + 1, f.cols() - 1);
    const int y1 = std::min(y0 + 1, f.rows() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = f(y0, x0) * (1.0 - fx) + f(y0, x1) * fx;
    const double bottom = f(y1, x0) * (1.0 - fx) + f(y1, x1) * fx;
    return top * (1.0 - fy) + bottom * fy;
}

}  // namespace

ScalarField nms(const ScalarField& psi, const ScalarField& theta) {
    require_same_shape(psi, theta, "nms");
    const int rows = psi.rows();
    const int cols = psi.cols();
    ScalarField out(rows, cols, 0.0);

#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = psi(r, c);
            if (v <= 0.0) continue;
            const double dx = std::cos(theta(r, c));
            const double dy = std::sin(theta(r, c));
            const double a = bilinear(psi, c + dx, r + dy);
            const double b = bilinear(psi, c - dx, r - dy);
            if (v >= a && v >= b && (v > a || v > b)) out(r, c) = v;
        }
    }
    return out;
}

double otsu_threshold(const ScalarField& field, bool exclude_zeros, int bins) {
    if (bins < 2) throw std::invalid_argument("otsu_threshold: need at least two bins");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t considered = 0;
    for (const double v : field.values()) {
        if (exclude_zeros && v == 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++considered;
    }
    if (considered == 0 || !(hi > lo)) {
        throw DegenerateInputError("otsu_threshold: fewer than two distinct values to threshold");
    }

    const double step = (hi - lo) / bins;
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
    for (const double v : field.values()) {
        if (exclude_zeros && v == 0.0) continue;
        const int b = std::min(static_cast<int>((v - lo) / step), bins - 1);
        count[static_cast<std::size_t>(b)] += 1.0;
        mass[static_cast<std::size_t>(b)] += v;
    }

    double total_count = 0.0;
    double total_mass = 0.0;
    for (int b = 0; b < bins; ++b) {
        total_count += count[static_cast<std::size_t>(b)];
        total_mass += mass[static_cast<std::size_t>(b)];
    }

    // Cut t puts bins [0, t) in the lower class.
    double best = -1.0;
    int best_cut = 1;
    double w0 = 0.0;
    double m0 = 0.0;
    for (int t = 1; t < bins; ++t) {
        w0 += count[static_cast<std::size_t>(t - 1)];
        m0 += mass[static_cast<std::size_t>(t - 1)];
        const double w1 = total_count - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = m0 / w0;
        const double mu1 = (total_mass - m0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_cut = t;
        }
    }
    return lo + best_cut * step;
}

LabelMap connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8) throw std::invalid_argument("connectivity must be 4 or 8");
    const int rows = mask.rows();
    const int cols = mask.cols();
    LabelMap out{Grid<std::int32_t>(rows, cols, 0), 0, {}};

    static constexpr int kOffsets8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
    static constexpr int kOffsets4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

    std::vector<std::pair<int, int>> stack;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (mask(r, c) == 0 || out.labels(r, c) != 0) continue;
            const std::int32_t label = ++out.count;
            std::int64_t size = 0;
            out.labels(r, c) = label;
            stack.assign(1, {r, c});
            while (!stack.empty()) {
                const auto [y, x] = stack.back();
                stack.pop_back();
                ++size;
                const int n = connectivity == 8 ? 8 : 4;
                for (int k = 0; k < n; ++k) {
                    const int ny = y + (connectivity == 8 ? kOffsets8[k][0] : kOffsets4[k][0]);
                    const int nx = x + (connectivity == 8 ? kOffsets8[k][1] : kOffsets4[k][1]);
                    if (ny < 0 || nx < 0 || ny >= rows || nx >= cols) continue;
                    if (mask(ny, nx) == 0 || out.labels(ny, nx) != 0) continue;
                    out.labels(ny, nx) = label;
                    stack.emplace_back(ny, nx);
                }
            }
            out.sizes.push_back(size);
        }
    }
    return out;
}

BinaryMask hysteresis(const ScalarField& nms_field, double threshold, double epsilon_factor, int connectivity) {
    if (!(threshold > 0.0)) throw std::invalid_argument("hysteresis: threshold must be > 0");
    if (!(epsilon_factor > 0.0 && epsilon_factor < 1.0)) {
        throw std::invalid_argument("hysteresis: epsilon factor must lie in (0, 1)");
    }
    const double epsilon = epsilon_factor * threshold;

    BinaryMask weak(nms_field.rows(), nms_field.cols(), 0);
    for (std::size_t i = 0; i < nms_field.size(); ++i) weak[i] = nms_field[i] > epsilon ? 1 : 0;

    const LabelMap cc = connected_components(weak, connectivity);
    std::vector<std::uint8_t> strong(static_cast<std::size_t>(cc.count) + 1, 0);
    for (std::size_t i = 0; i < nms_field.size(); ++i) {
        if (nms_field[i] > threshold) strong[static_cast<std::size_t>(cc.labels[i])] = 1;
    }

    BinaryMask out(nms_field.rows(), nms_field.cols(), 0);
    for (std::size_t i = 0; i < nms_field.size(); ++i) {
        const auto label = static_cast<std::size_t>(cc.labels[i]);
        out[i] = (label != 0 && strong[label]) ? 1 : 0;
    }
    return out;
}

}  // namespace channet
