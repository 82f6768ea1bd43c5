#include "channet/evaluate.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace channet {

ConfusionMatrix confusion(const BinaryMask& pred, const BinaryMask& truth) {
    require_same_shape(pred, truth, "confusion");
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    const std::size_t n = pred.size();
#pragma omp parallel for schedule(static) reduction(+ : tp, tn, fp, fn)
    for (std::size_t i = 0; i < n; ++i) {
        const bool p = pred[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) {
            ++tp;
        } else if (!p && !t) {
            ++tn;
        } else if (p) {
            ++fp;
        } else {
            ++fn;
        }
    }
    return {tp, tn, fp, fn};
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double intersection_over_union(const ConfusionMatrix& cm) {
    const std::int64_t uni = cm.tp + cm.fp + cm.fn;
    return uni == 0 ? 1.0 : static_cast<double>(cm.tp) / static_cast<double>(uni);
}

std::string to_json(const ConfusionMatrix& cm) {
    nlohmann::ordered_json j;
    j["tp"] = cm.tp;
    j["tn"] = cm.tn;
    j["fp"] = cm.fp;
    j["fn"] = cm.fn;
    j["accuracy"] = accuracy(cm);
    return j.dump();
}

}  // namespace channet
