#pragma once

#include "channet/grid.hpp"

namespace channet {

/// Which pixel count the small-component fraction refers to.
enum class FractionBasis {
    image,   ///< all pixels of the raster
    mapped,  ///< set pixels of the mask being filtered
};

/// Draws, at every centerline pixel, a 4-connected segment of round(width)
/// pixels' Euclidean extent along theta (the cross-channel direction), centered
/// on the pixel. Widths below 1 draw the pixel alone.
BinaryMask regrow(const BinaryMask& centerline, const ScalarField& width, const ScalarField& theta);

/// Rasterizes one segment into `mask` (clipped at the borders).
void draw_cross_segment(BinaryMask& mask, int row, int col, double width, double theta);

/// Removes connected components whose pixel count is below min_fraction of the basis.
BinaryMask remove_small_components(const BinaryMask& mask, double min_fraction,
                                   FractionBasis basis = FractionBasis::image, int connectivity = 8);

}  // namespace channet
