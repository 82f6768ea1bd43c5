#include "channet/water_index.hpp"

#include <stdexcept>
#include <string>

namespace channet {

namespace {

const ScalarField& band_at(const MultiBandRaster& raster, int index, const char* role) {
    if (index < 1 || index > static_cast<int>(raster.bands.size())) {
        throw std::invalid_argument(std::string(role) + " band index " + std::to_string(index) + " out of range 1.." +
                                    std::to_string(raster.bands.size()));
    }
    return raster.bands[static_cast<std::size_t>(index - 1)];
}

}  // namespace

WaterMode parse_water_mode(const std::string& name) {
    if (name == "mndwi") return WaterMode::mndwi;
    if (name == "single_band" || name == "band") return WaterMode::single_band;
    if (name == "single_band_inverted" || name == "inverted") return WaterMode::single_band_inverted;
    throw std::invalid_argument("unknown water mode '" + name + "' (expected mndwi, single_band or single_band_inverted)");
}

ScalarField mndwi(const ScalarField& green, const ScalarField& swir) {
    require_same_shape(green, swir, "mndwi");
    ScalarField out(green.rows(), green.cols());
    const std::size_t n = green.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double sum = green[i] + swir[i];
        out[i] = sum != 0.0 ? (green[i] - swir[i]) / sum : 0.0;
    }
    return out;
}

ScalarField make_water_input(const MultiBandRaster& raster, const WaterInputSpec& spec, bool* degenerate) {
    if (degenerate != nullptr) *degenerate = false;
    switch (spec.mode) {
        case WaterMode::mndwi:
            return mndwi(band_at(raster, spec.green_band, "green"), band_at(raster, spec.swir_band, "swir"));
        case WaterMode::single_band:
        case WaterMode::single_band_inverted: {
            NormalizedBand n = normalize_band(band_at(raster, spec.band, "input"), 0.0, 1.0);
            if (degenerate != nullptr) *degenerate = n.degenerate;
            if (spec.mode == WaterMode::single_band_inverted) {
                for (double& v : n.field.values()) v = 1.0 - v;
            }
            return std::move(n.field);
        }
    }
    throw std::invalid_argument("make_water_input: unknown mode");
}

}  // namespace channet
