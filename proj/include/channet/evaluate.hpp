#pragma once

#include <cstdint>
#include <string>

#include "channet/grid.hpp"

namespace channet {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const noexcept { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Per-pixel tally with "channel" (nonzero) as the positive class.
ConfusionMatrix confusion(const BinaryMask& pred, const BinaryMask& truth);

/// (TP + TN) / (TP + TN + FP + FN). Throws std::invalid_argument on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

/// TP / (TP + FP + FN); 1 when both masks are empty.
double intersection_over_union(const ConfusionMatrix& cm);

/// {"tp":..,"tn":..,"fp":..,"fn":..,"accuracy":..}
std::string to_json(const ConfusionMatrix& cm);

}  // namespace channet
