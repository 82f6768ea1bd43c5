#include "channet/channelmap.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "channet/centerline.hpp"

namespace channet {

namespace {

void plot(BinaryMask& mask, int r, int c) {
    if (r >= 0 && c >= 0 && r < mask.rows() && c < mask.cols()) mask(r, c) = 1;
}

// 4-connected integer line from (r0, c0) to (r1, c1): each step moves along
// one axis, whichever crosses its next half-pixel boundary first (ties step y).
void draw_line4(BinaryMask& mask, int r0, int c0, int r1, int c1) {
    const long dx = std::abs(c1 - c0);
    const long dy = std::abs(r1 - r0);
    const int sx = c0 < c1 ? 1 : -1;
    const int sy = r0 < r1 ? 1 : -1;
    int x = c0;
    int y = r0;
    plot(mask, y, x);
    for (long ix = 0, iy = 0; ix < dx || iy < dy;) {
        if ((1 + 2 * ix) * dy < (1 + 2 * iy) * dx) {
            x += sx;
            ++ix;
        } else {
            y += sy;
            ++iy;
        }
        plot(mask, y, x);
    }
}

}  // namespace

void draw_cross_segment(BinaryMask& mask, int row, int col, double width, double theta) {
    plot(mask, row, col);
    const long length = std::lround(width);
    if (!(width >= 1.0) || length <= 1) return;

    double t = std::fmod(theta, std::numbers::pi);
    if (t < 0.0) t += std::numbers::pi;
    const double ux = std::cos(t);
    const double uy = std::sin(t);

    // Odd lengths split evenly; the extra pixel of an even length goes to the +theta side.
    const double back = static_cast<double>((length - 1) / 2);
    const double ahead = static_cast<double>(length - 1) - back;
    const int ar = row + static_cast<int>(std::lround(ahead * uy));
    const int ac = col + static_cast<int>(std::lround(ahead * ux));
    const int br = row - static_cast<int>(std::lround(back * uy));
    const int bc = col - static_cast<int>(std::lround(back * ux));
    draw_line4(mask, row, col, ar, ac);
    draw_line4(mask, row, col, br, bc);
}

BinaryMask regrow(const BinaryMask& centerline, const ScalarField& width, const ScalarField& theta) {
    require_same_shape(centerline, width, "regrow");
    require_same_shape(centerline, theta, "regrow");
    BinaryMask out(centerline.rows(), centerline.cols(), 0);
    for (int r = 0; r < centerline.rows(); ++r) {
        for (int c = 0; c < centerline.cols(); ++c) {
            if (centerline(r, c) != 0) draw_cross_segment(out, r, c, width(r, c), theta(r, c));
        }
    }
    return out;
}

BinaryMask remove_small_components(const BinaryMask& mask, double min_fraction, FractionBasis basis,
                                   int connectivity) {
    if (!(min_fraction >= 0.0 && min_fraction < 1.0)) {
        throw std::invalid_argument("remove_small_components: min_fraction must lie in [0, 1)");
    }
    double denominator = static_cast<double>(mask.size());
    if (basis == FractionBasis::mapped) {
        denominator = 0.0;
        for (const auto v : mask.values()) denominator += v != 0 ? 1.0 : 0.0;
    }
    const double min_size = min_fraction * denominator;

    const LabelMap cc = connected_components(mask, connectivity);
    BinaryMask out(mask.rows(), mask.cols(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const std::int32_t label = cc.labels[i];
        if (label != 0 && static_cast<double>(cc.sizes[static_cast<std::size_t>(label - 1)]) >= min_size) out[i] = 1;
    }
    return out;
}

}  // namespace channet
