#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "channet/grid.hpp"

namespace channet {

enum class PixelType { u8, u16, f32 };

enum class InputFormat { geotiff, pgm, f32raw };
enum class OutputFormat { pgm, f32raw, png8 };

/// A TIFF tag carried through without interpretation (GeoTIFF georeferencing etc.).
/// `bytes` holds the value exactly as stored in the file, in the file's byte order.
struct OpaqueTag {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::vector<std::uint8_t> bytes;
};

struct MultiBandRaster {
    std::vector<ScalarField> bands;
    std::vector<std::string> band_names;
    PixelType source_type = PixelType::f32;
    bool big_endian_source = false;
    std::vector<OpaqueTag> opaque_tags;

    int rows() const { return bands.empty() ? 0 : bands.front().rows(); }
    int cols() const { return bands.empty() ? 0 : bands.front().cols(); }
    /// Throws std::invalid_argument if the band/name invariants do not hold.
    void validate() const;
};

InputFormat parse_input_format(const std::string& name);

/// Reads every band as raw digital numbers. Throws IoError on unreadable or
/// unsupported files.
MultiBandRaster read_raster(const std::filesystem::path& path, InputFormat format);

/// f32raw sidecar path: `<path>.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

/// pgm and png8 are min-max stretched to 0..255 (a constant field maps to 0);
/// f32raw is written verbatim. Throws IoError on write failure and
/// std::invalid_argument for an empty field.
void write_raster(const ScalarField& field, const std::filesystem::path& path, OutputFormat format);

/// Masks are written with a fixed 0 -> 0, nonzero -> 255 stretch (0/1 for f32raw).
void write_raster(const BinaryMask& mask, const std::filesystem::path& path, OutputFormat format);

struct NormalizedBand {
    ScalarField field;
    bool degenerate = false;  ///< input had zero spread between the two percentiles
};

/// Maps the lo_pct percentile to 0 and the hi_pct percentile to 1, clamping to
/// [0, 1]. Percentiles interpolate linearly between order statistics.
NormalizedBand normalize_band(const ScalarField& band, double lo_pct, double hi_pct);

/// Percentile of `values` (0 <= p <= 1) by linear interpolation on a sorted copy.
double percentile(std::vector<double> values, double p);

}  // namespace channet
