#include "channet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace channet {

BinaryMask rasterize_bar(const Bar& bar, int rows, int cols) {
    BinaryMask mask(rows, cols, 0);
    const double dx = bar.x1 - bar.x0;
    const double dy = bar.y1 - bar.y0;
    const double len = std::hypot(dx, dy);
    const double half = 0.5 * bar.width;
    const double eps = 1e-9;
    const double ux = len > 0.0 ? dx / len : 1.0;
    const double uy = len > 0.0 ? dy / len : 0.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double px = c - bar.x0;
            const double py = r - bar.y0;
            const double along = px * ux + py * uy;
            const double across = std::abs(-px * uy + py * ux);
            bool inside = false;
            if (along >= -eps && along <= len + eps) {
                inside = across <= half + eps;
            } else if (bar.round_caps) {
                const double ex = along < 0.0 ? px : c - bar.x1;
                const double ey = along < 0.0 ? py : r - bar.y1;
                inside = std::hypot(ex, ey) <= half + eps;
            }
            if (inside) mask(r, c) = 1;
        }
    }
    return mask;
}

SyntheticScene make_synthetic_scene(const SceneSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("synthetic scene needs positive dimensions");
    if (spec.noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
    BinaryMask truth(spec.rows, spec.cols, 0);
    for (const Bar& bar : spec.bars) {
        for (const double x : {bar.x0, bar.x1}) {
            if (x < 0.0 || x > spec.cols - 1) throw std::invalid_argument("bar endpoint outside the image");
        }
        for (const double y : {bar.y0, bar.y1}) {
            if (y < 0.0 || y > spec.rows - 1) throw std::invalid_argument("bar endpoint outside the image");
        }
        if (!(bar.width > 0.0)) throw std::invalid_argument("bar width must be positive");
        const BinaryMask one = rasterize_bar(bar, spec.rows, spec.cols);
        for (std::size_t i = 0; i < truth.size(); ++i) truth[i] |= one[i];
    }

    ScalarField image(spec.rows, spec.cols);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    for (std::size_t i = 0; i < image.size(); ++i) {
        image[i] = truth[i] != 0 ? spec.foreground : spec.background;
        if (spec.noise_sigma > 0.0) image[i] += noise(rng);
    }
    return {std::move(image), std::move(truth)};
}

Bar centered_bar(int rows, int cols, double width, double angle_deg, double margin) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    const double ux = std::cos(a);
    const double uy = std::sin(a);
    // Axis through a pixel centre so an odd width W covers exactly W pixels.
    const double cx = cols / 2;
    const double cy = rows / 2;
    // Longest half-length that keeps both endpoints inside the margin box.
    double half = std::numeric_limits<double>::infinity();
    const double room_x = std::min(cx, cols - 1 - cx) - margin;
    const double room_y = std::min(cy, rows - 1 - cy) - margin;
    if (std::abs(ux) > 1e-12) half = std::min(half, room_x / std::abs(ux));
    if (std::abs(uy) > 1e-12) half = std::min(half, room_y / std::abs(uy));
    return {cx - half * ux, cy - half * uy, cx + half * ux, cy + half * uy, width, false};
}

std::vector<Pixel> axis_pixels(const Bar& bar, double from, double to) {
    const double len = std::hypot(bar.x1 - bar.x0, bar.y1 - bar.y0);
    std::vector<Pixel> out;
    const int steps = static_cast<int>(std::floor(len * (to - from)));
    for (int i = 0; i <= steps; ++i) {
        const double t = len > 0.0 ? from + i / len : from;
        const Pixel p{static_cast<int>(std::lround(bar.y0 + t * (bar.y1 - bar.y0))),
                      static_cast<int>(std::lround(bar.x0 + t * (bar.x1 - bar.x0)))};
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    return out;
}

double mean_at(const ScalarField& field, const std::vector<Pixel>& pixels) {
    if (pixels.empty()) return 0.0;
    double sum = 0.0;
    for (const Pixel& p : pixels) sum += field(p.row, p.col);
    return sum / static_cast<double>(pixels.size());
}

SceneSpec delta_scene(int size, double noise_sigma, std::uint64_t seed) {
    const double s = (size - 1) / 511.0;
    SceneSpec spec;
    spec.rows = size;
    spec.cols = size;
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    // Trunk enters at the top edge and bifurcates at (256, 180); the branches split again.
    spec.bars = {
        {256 * s, 0 * s, 256 * s, 180 * s, 25, true},
        {256 * s, 180 * s, 150 * s, 320 * s, 15, true},
        {256 * s, 180 * s, 380 * s, 330 * s, 13, true},
        {150 * s, 320 * s, 70 * s, 511 * s, 9, true},
        {150 * s, 320 * s, 215 * s, 511 * s, 5, true},
        {380 * s, 330 * s, 460 * s, 511 * s, 3, true},
    };
    return spec;
}

}  // namespace channet
