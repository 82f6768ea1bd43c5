#pragma once

#include "channet/grid.hpp"
#include "channet/raster_io.hpp"

namespace channet {

enum class WaterMode { mndwi, single_band, single_band_inverted };

/// Band indices are 1-based, matching the band numbering of the source product.
/// Defaults pair Landsat 8 green (band 3) with SWIR-1 (band 6).
struct WaterInputSpec {
    WaterMode mode = WaterMode::mndwi;
    int green_band = 3;
    int swir_band = 6;
    int band = 1;
};

WaterMode parse_water_mode(const std::string& name);

/// (green - swir) / (green + swir); pixels with green + swir == 0 map to 0.
ScalarField mndwi(const ScalarField& green, const ScalarField& swir);

/// Builds the water-positive input image (water brighter than land).
/// Single-band modes stretch the band between its 0th and 100th percentiles.
/// `degenerate`, when non-null, is set if the selected band was constant.
ScalarField make_water_input(const MultiBandRaster& raster, const WaterInputSpec& spec, bool* degenerate = nullptr);

}  // namespace channet
