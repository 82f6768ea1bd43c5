#pragma once

#include <cstdint>
#include <vector>

#include "channet/grid.hpp"

namespace channet {

/// Straight channel segment from (x0, y0) to (x1, y1) in pixel-center
/// coordinates (x = column, y = row). A pixel belongs to the bar when its
/// perpendicular distance to the axis is <= width / 2 and its projection falls
/// on the segment; with `round_caps` the ends are half-disks instead.
struct Bar {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
    double width = 1.0;
    bool round_caps = false;
};

struct SceneSpec {
    int rows = 256;
    int cols = 256;
    double background = 0.0;
    double foreground = 1.0;
    double noise_sigma = 0.0;  ///< additive Gaussian noise; SNR = |foreground - background| / noise_sigma
    std::uint64_t seed = 1;
    std::vector<Bar> bars;
};

struct SyntheticScene {
    ScalarField image;
    BinaryMask truth;
};

/// Water-positive image with the bars drawn at `foreground`, plus the exact truth mask.
/// Throws std::invalid_argument if a bar endpoint lies outside the image.
SyntheticScene make_synthetic_scene(const SceneSpec& spec);

/// Truth mask of a single bar.
BinaryMask rasterize_bar(const Bar& bar, int rows, int cols);

/// A straight bar of the given width through the image center at `angle_deg`
/// (0 = along x, angles increase toward +y), ending `margin` pixels from the border.
Bar centered_bar(int rows, int cols, double width, double angle_deg, double margin = 0.0);

struct Pixel {
    int row = 0;
    int col = 0;
    bool operator==(const Pixel&) const = default;
};

/// Pixels nearest the bar axis, one per unit step, over the fraction
/// [from, to] of its length. Consecutive duplicates are dropped.
std::vector<Pixel> axis_pixels(const Bar& bar, double from = 0.25, double to = 0.75);

/// Mean of `field` over `pixels`; 0 for an empty list.
double mean_at(const ScalarField& field, const std::vector<Pixel>& pixels);

/// Six-branch "delta": a trunk splitting twice into progressively narrower
/// distributaries (widths 25, 15, 13, 9, 5, 3) on a 512 x 512 canvas (scaled for other sizes).
SceneSpec delta_scene(int size = 512, double noise_sigma = 0.1, std::uint64_t seed = 7);

}  // namespace channet
