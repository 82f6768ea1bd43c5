#pragma once

#include <cstdint>
#include <vector>

#include "channet/grid.hpp"

namespace channet {

struct LabelMap {
    Grid<std::int32_t> labels;  ///< 0 = background, components numbered 1..count
    int count = 0;
    std::vector<std::int64_t> sizes;  ///< sizes[label - 1] = pixel count

    int rows() const noexcept { return labels.rows(); }
    int cols() const noexcept { return labels.cols(); }
};

/// Keeps psi where it is >= both bilinear samples one pixel away along +/-theta
/// and strictly greater than at least one of them.
ScalarField nms(const ScalarField& psi, const ScalarField& theta);

/// Otsu threshold over a `bins`-bin histogram spanning [min, max] of the
/// considered values. Returns the upper edge of the last bin of the lower class.
/// Throws DegenerateInputError when fewer than two distinct values are considered.
double otsu_threshold(const ScalarField& field, bool exclude_zeros = true, int bins = 256);

/// Pixels above epsilon_factor * T, keeping only connected components that
/// contain at least one pixel above T.
BinaryMask hysteresis(const ScalarField& nms_field, double threshold, double epsilon_factor = 0.1,
                      int connectivity = 8);

/// Labels in raster order of each component's first pixel. connectivity is 4 or 8.
LabelMap connected_components(const BinaryMask& mask, int connectivity = 8);

}  // namespace channet
