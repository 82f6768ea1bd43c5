#include "channet/raster_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "channet/errors.hpp"

namespace channet {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading " + path.string());
    return bytes;
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path.string());
}

void require_finite(const ScalarField& f, const fs::path& path) {
    for (const double v : f.values()) {
        if (!std::isfinite(v)) throw IoError(path.string() + ": raster contains non-finite values");
    }
}

// ---------------------------------------------------------------- PGM

struct PgmCursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos]) != 0) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long next_int(const fs::path& path) {
        skip_space_and_comments();
        long v = 0;
        std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) != 0) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > std::numeric_limits<int>::max()) throw IoError(path.string() + ": PGM header value too large");
            ++pos;
        }
        if (pos == start) throw IoError(path.string() + ": malformed PGM header");
        return v;
    }
};

MultiBandRaster read_pgm(const fs::path& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw IoError(path.string() + ": not a binary (P5) PGM");
    PgmCursor cur{bytes, 2};
    const long cols = cur.next_int(path);
    const long rows = cur.next_int(path);
    const long maxval = cur.next_int(path);
    if (cols < 1 || rows < 1) throw IoError(path.string() + ": PGM dimensions must be positive");
    if (maxval < 1 || maxval > 65535) throw IoError(path.string() + ": unsupported PGM maxval");
    if (cur.pos >= bytes.size() || std::isspace(bytes[cur.pos]) == 0) throw IoError(path.string() + ": malformed PGM header");
    ++cur.pos;

    const int bpp = maxval > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(bpp);
    if (bytes.size() - cur.pos < need) throw IoError(path.string() + ": truncated PGM data");

    ScalarField band(static_cast<int>(rows), static_cast<int>(cols));
    const std::uint8_t* p = bytes.data() + cur.pos;
    for (std::size_t i = 0; i < band.size(); ++i) {
        band[i] = bpp == 1 ? p[i] : static_cast<double>((p[2 * i] << 8) | p[2 * i + 1]);
    }
    MultiBandRaster out;
    out.bands.push_back(std::move(band));
    out.band_names.emplace_back("band_1");
    out.source_type = bpp == 1 ? PixelType::u8 : PixelType::u16;
    out.big_endian_source = bpp == 2;
    return out;
}

std::vector<std::uint8_t> stretch_to_bytes(const ScalarField& field) {
    const auto [lo_it, hi_it] = std::minmax_element(field.values().begin(), field.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<std::uint8_t> out(field.size(), 0);
    if (!(hi > lo)) return out;
    const double scale = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double q = std::round((field[i] - lo) * scale);
        out[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
    }
    return out;
}

void write_pgm_bytes(const fs::path& path, int rows, int cols, const std::vector<std::uint8_t>& pixels) {
    std::ostringstream header;
    header << "P5\n" << cols << ' ' << rows << "\n255\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> bytes(h.begin(), h.end());
    bytes.insert(bytes.end(), pixels.begin(), pixels.end());
    write_file(path, bytes);
}

// ---------------------------------------------------------------- PNG

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(data.size() + 4));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

void write_png_gray8(const fs::path& path, int rows, int cols, const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(rows) * (static_cast<std::size_t>(cols) + 1));
    for (int r = 0; r < rows; ++r) {
        raw.push_back(0);  // filter: none
        const auto* row = pixels.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
        raw.insert(raw.end(), row, row + cols);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw IoError("zlib compression failed for " + path.string());
    }
    packed.resize(packed_size);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(cols));
    put_be32(ihdr, static_cast<std::uint32_t>(rows));
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // depth 8, grayscale, deflate, no filter, no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    write_file(path, out);
}

// ---------------------------------------------------------------- f32raw

MultiBandRaster read_f32raw(const fs::path& path) {
    const fs::path side = sidecar_path(path);
    nlohmann::json header;
    try {
        std::ifstream in(side);
        if (!in) throw IoError("cannot open sidecar " + side.string());
        header = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("invalid sidecar " + side.string() + ": " + e.what());
    }
    int rows = 0;
    int cols = 0;
    int bands = 1;
    try {
        rows = header.at("rows").get<int>();
        cols = header.at("cols").get<int>();
        if (header.contains("bands")) bands = header.at("bands").get<int>();
        if (header.value("dtype", std::string("f32le")) != "f32le") throw IoError(side.string() + ": dtype must be f32le");
    } catch (const nlohmann::json::exception& e) {
        throw IoError("invalid sidecar " + side.string() + ": " + e.what());
    }
    if (rows < 1 || cols < 1 || bands < 1) throw IoError(side.string() + ": dimensions must be positive");

    const std::vector<std::uint8_t> bytes = read_file(path);
    const std::size_t per_band = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (bytes.size() != per_band * static_cast<std::size_t>(bands) * 4) {
        throw IoError(path.string() + ": size does not match sidecar dimensions");
    }
    MultiBandRaster out;
    out.source_type = PixelType::f32;
    for (int b = 0; b < bands; ++b) {
        ScalarField band(rows, cols);
        for (std::size_t i = 0; i < per_band; ++i) {
            const std::uint8_t* p = bytes.data() + (static_cast<std::size_t>(b) * per_band + i) * 4;
            const std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                    (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
            band[i] = std::bit_cast<float>(u);
        }
        out.bands.push_back(std::move(band));
        out.band_names.push_back("band_" + std::to_string(b + 1));
    }
    return out;
}

void write_f32raw(const ScalarField& field, const fs::path& path) {
    std::vector<std::uint8_t> bytes(field.size() * 4);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(field[i]));
        bytes[4 * i] = static_cast<std::uint8_t>(u);
        bytes[4 * i + 1] = static_cast<std::uint8_t>(u >> 8);
        bytes[4 * i + 2] = static_cast<std::uint8_t>(u >> 16);
        bytes[4 * i + 3] = static_cast<std::uint8_t>(u >> 24);
    }
    write_file(path, bytes);
    nlohmann::ordered_json header;
    header["rows"] = field.rows();
    header["cols"] = field.cols();
    header["dtype"] = "f32le";
    const std::string text = header.dump();
    write_file(sidecar_path(path), std::vector<std::uint8_t>(text.begin(), text.end()));
}

// ---------------------------------------------------------------- TIFF

class TiffReader {
public:
    TiffReader(std::vector<std::uint8_t> bytes, fs::path path) : bytes_(std::move(bytes)), path_(std::move(path)) {
        if (bytes_.size() < 8) fail("file too short for a TIFF header");
        if (bytes_[0] == 'I' && bytes_[1] == 'I') {
            big_ = false;
        } else if (bytes_[0] == 'M' && bytes_[1] == 'M') {
            big_ = true;
        } else {
            fail("missing TIFF byte-order mark");
        }
        const std::uint16_t magic = u16(2);
        if (magic == 43) fail("BigTIFF is not supported");
        if (magic != 42) fail("bad TIFF magic number");
    }

    MultiBandRaster read() {
        MultiBandRaster out;
        out.big_endian_source = big_;
        std::uint32_t ifd = u32(4);
        bool first = true;
        int guard = 0;
        while (ifd != 0) {
            if (++guard > 4096) fail("IFD chain does not terminate");
            ifd = read_ifd(ifd, out, first);
        }
        if (out.bands.empty()) fail("no full-resolution image found");
        return out;
    }

private:
    struct Entry {
        std::uint16_t tag;
        std::uint16_t type;
        std::uint32_t count;
        std::size_t value_pos;  // position of the value bytes in the file
    };

    [[noreturn]] void fail(const std::string& what) const { throw IoError(path_.string() + ": " + what); }

    void need(std::size_t pos, std::size_t len) const {
        if (pos > bytes_.size() || len > bytes_.size() - pos) fail("truncated TIFF data");
    }

    std::uint16_t u16(std::size_t pos) const {
        need(pos, 2);
        const auto a = bytes_[pos];
        const auto b = bytes_[pos + 1];
        return static_cast<std::uint16_t>(big_ ? (a << 8) | b : (b << 8) | a);
    }

    std::uint32_t u32(std::size_t pos) const {
        need(pos, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint32_t byte = bytes_[pos + static_cast<std::size_t>(big_ ? i : 3 - i)];
            v = (v << 8) | byte;
        }
        return v;
    }

    static std::size_t type_size(std::uint16_t type) {
        switch (type) {
            case 1: case 2: case 6: case 7: return 1;
            case 3: case 8: return 2;
            case 4: case 9: case 11: return 4;
            case 5: case 10: case 12: return 8;
            default: return 0;
        }
    }

    std::vector<std::uint64_t> integers(const Entry& e) const {
        std::vector<std::uint64_t> out(e.count);
        for (std::uint32_t i = 0; i < e.count; ++i) {
            switch (e.type) {
                case 1: out[i] = bytes_[e.value_pos + i]; break;
                case 3: out[i] = u16(e.value_pos + 2 * i); break;
                case 4: out[i] = u32(e.value_pos + 4 * i); break;
                default: fail("tag " + std::to_string(e.tag) + " has a non-integer type");
            }
        }
        return out;
    }

    std::uint32_t read_ifd(std::uint32_t offset, MultiBandRaster& out, bool& first) {
        const std::uint16_t n = u16(offset);
        std::vector<Entry> entries;
        entries.reserve(n);
        std::vector<OpaqueTag> opaque;
        for (std::uint16_t i = 0; i < n; ++i) {
            const std::size_t at = offset + 2 + 12 * static_cast<std::size_t>(i);
            Entry e{u16(at), u16(at + 2), u32(at + 4), at + 8};
            const std::size_t size = type_size(e.type);
            if (size == 0) continue;  // unknown type: ignore per TIFF rules
            const std::size_t total = size * e.count;
            if (total > 4) e.value_pos = u32(at + 8);
            need(e.value_pos, total);
            entries.push_back(e);
            if (is_georeferencing(e.tag)) {
                OpaqueTag t{e.tag, e.type, e.count, {}};
                t.bytes.assign(bytes_.begin() + static_cast<std::ptrdiff_t>(e.value_pos),
                               bytes_.begin() + static_cast<std::ptrdiff_t>(e.value_pos + total));
                opaque.push_back(std::move(t));
            }
        }
        const std::uint32_t next = u32(offset + 2 + 12 * static_cast<std::size_t>(n));

        auto find = [&](std::uint16_t tag) -> const Entry* {
            for (const Entry& e : entries) {
                if (e.tag == tag) return &e;
            }
            return nullptr;
        };
        auto scalar = [&](std::uint16_t tag, std::uint64_t fallback) -> std::uint64_t {
            const Entry* e = find(tag);
            if (e == nullptr) return fallback;
            const auto v = integers(*e);
            if (v.empty()) fail("tag " + std::to_string(tag) + " is empty");
            return v.front();
        };

        if ((scalar(254, 0) & 1U) != 0) return next;  // reduced-resolution overview

        if (find(322) != nullptr || find(324) != nullptr) fail("tiled TIFF layout is not supported");
        if (scalar(259, 1) != 1) fail("compressed TIFF is not supported");
        const Entry* width_e = find(256);
        const Entry* height_e = find(257);
        const Entry* offsets_e = find(273);
        const Entry* counts_e = find(279);
        if (width_e == nullptr || height_e == nullptr || offsets_e == nullptr) fail("missing required TIFF tags");

        const std::uint64_t cols = scalar(256, 0);
        const std::uint64_t rows = scalar(257, 0);
        if (cols < 1 || rows < 1 || cols > (1U << 20) || rows > (1U << 20)) fail("unsupported image dimensions");
        const std::uint64_t spp = scalar(277, 1);
        if (spp < 1 || spp > 256) fail("unsupported samples per pixel");
        const std::uint64_t rows_per_strip = std::min<std::uint64_t>(scalar(278, rows), rows);
        if (rows_per_strip < 1) fail("RowsPerStrip must be positive");
        const std::uint64_t planar = scalar(284, 1);
        if (planar != 1 && planar != 2) fail("unsupported planar configuration");

        std::vector<std::uint64_t> bps(spp, 1);
        if (const Entry* e = find(258)) {
            bps = integers(*e);
            if (bps.size() == 1) bps.assign(spp, bps.front());
        }
        std::vector<std::uint64_t> formats(spp, 1);
        if (const Entry* e = find(339)) {
            formats = integers(*e);
            if (formats.size() == 1) formats.assign(spp, formats.front());
        }
        if (bps.size() != spp || formats.size() != spp) fail("per-sample tag count mismatch");
        for (std::size_t s = 1; s < spp; ++s) {
            if (bps[s] != bps[0] || formats[s] != formats[0]) fail("mixed sample types are not supported");
        }
        PixelType type;
        if (bps[0] == 8 && formats[0] == 1) {
            type = PixelType::u8;
        } else if (bps[0] == 16 && formats[0] == 1) {
            type = PixelType::u16;
        } else if (bps[0] == 32 && formats[0] == 3) {
            type = PixelType::f32;
        } else {
            fail("unsupported sample type (need u8, u16 or f32)");
        }
        const std::size_t sample_bytes = bps[0] / 8;

        const std::vector<std::uint64_t> offsets = integers(*offsets_e);
        const std::uint64_t strips_per_plane = (rows + rows_per_strip - 1) / rows_per_strip;
        const std::uint64_t planes = planar == 2 ? spp : 1;
        if (offsets.size() != strips_per_plane * planes) fail("StripOffsets count does not match the layout");
        std::vector<std::uint64_t> counts;
        if (counts_e != nullptr) counts = integers(*counts_e);

        std::vector<ScalarField> bands;
        for (std::uint64_t s = 0; s < spp; ++s) bands.emplace_back(static_cast<int>(rows), static_cast<int>(cols));

        const std::uint64_t pixel_stride = planar == 1 ? spp : 1;
        for (std::uint64_t plane = 0; plane < planes; ++plane) {
            for (std::uint64_t strip = 0; strip < strips_per_plane; ++strip) {
                const std::uint64_t idx = plane * strips_per_plane + strip;
                const std::uint64_t r0 = strip * rows_per_strip;
                const std::uint64_t nrows = std::min(rows_per_strip, rows - r0);
                const std::size_t len = nrows * cols * pixel_stride * sample_bytes;
                if (!counts.empty() && counts.size() == offsets.size() && counts[idx] < len) fail("strip shorter than expected");
                const std::size_t base = offsets[idx];
                need(base, len);
                for (std::uint64_t r = 0; r < nrows; ++r) {
                    for (std::uint64_t c = 0; c < cols; ++c) {
                        for (std::uint64_t k = 0; k < pixel_stride; ++k) {
                            const std::size_t pos = base + ((r * cols + c) * pixel_stride + k) * sample_bytes;
                            const std::uint64_t band = planar == 1 ? k : plane;
                            bands[band](static_cast<int>(r0 + r), static_cast<int>(c)) = sample(pos, type);
                        }
                    }
                }
            }
        }

        if (!first && (static_cast<int>(rows) != out.rows() || static_cast<int>(cols) != out.cols())) {
            fail("dimension mismatch across bands");
        }
        if (!first && type != out.source_type) fail("sample type mismatch across images");
        out.source_type = type;
        for (ScalarField& b : bands) {
            for (const double v : b.values()) {
                if (!std::isfinite(v)) fail("raster contains non-finite values");
            }
            out.bands.push_back(std::move(b));
            out.band_names.push_back("band_" + std::to_string(out.bands.size()));
        }
        if (first) out.opaque_tags = std::move(opaque);
        first = false;
        return next;
    }

    double sample(std::size_t pos, PixelType type) const {
        switch (type) {
            case PixelType::u8: return bytes_[pos];
            case PixelType::u16: return u16(pos);
            case PixelType::f32: return std::bit_cast<float>(u32(pos));
        }
        return 0.0;
    }

    static bool is_georeferencing(std::uint16_t tag) {
        switch (tag) {
            case 33550: case 33922: case 34264: case 34735: case 34736: case 34737: case 42112: case 42113: return true;
            default: return false;
        }
    }

    std::vector<std::uint8_t> bytes_;
    fs::path path_;
    bool big_ = false;
};

}  // namespace

void MultiBandRaster::validate() const {
    if (bands.empty()) throw std::invalid_argument("raster has no bands");
    if (band_names.size() != bands.size()) throw std::invalid_argument("band name count does not match band count");
    for (const ScalarField& b : bands) {
        if (b.rows() < 1 || b.cols() < 1) throw std::invalid_argument("raster band is empty");
        require_same_shape(b, bands.front(), "raster bands");
    }
}

InputFormat parse_input_format(const std::string& name) {
    if (name == "geotiff" || name == "tiff" || name == "tif" || name == "geotiff_subset") return InputFormat::geotiff;
    if (name == "pgm") return InputFormat::pgm;
    if (name == "f32raw" || name == "f32" || name == "raw") return InputFormat::f32raw;
    throw std::invalid_argument("unknown input format '" + name + "' (expected geotiff, pgm or f32raw)");
}

fs::path sidecar_path(const fs::path& raw_path) {
    fs::path side = raw_path;
    side += ".json";
    return side;
}

MultiBandRaster read_raster(const fs::path& path, InputFormat format) {
    MultiBandRaster out;
    switch (format) {
        case InputFormat::pgm: out = read_pgm(path); break;
        case InputFormat::f32raw: out = read_f32raw(path); break;
        case InputFormat::geotiff: out = TiffReader(read_file(path), path).read(); break;
    }
    for (const ScalarField& b : out.bands) require_finite(b, path);
    out.validate();
    return out;
}

void write_raster(const ScalarField& field, const fs::path& path, OutputFormat format) {
    if (field.empty()) throw std::invalid_argument("write_raster: empty field");
    switch (format) {
        case OutputFormat::f32raw: write_f32raw(field, path); break;
        case OutputFormat::pgm: write_pgm_bytes(path, field.rows(), field.cols(), stretch_to_bytes(field)); break;
        case OutputFormat::png8: write_png_gray8(path, field.rows(), field.cols(), stretch_to_bytes(field)); break;
    }
}

void write_raster(const BinaryMask& mask, const fs::path& path, OutputFormat format) {
    if (mask.empty()) throw std::invalid_argument("write_raster: empty mask");
    if (format == OutputFormat::f32raw) {
        ScalarField f(mask.rows(), mask.cols());
        for (std::size_t i = 0; i < mask.size(); ++i) f[i] = mask[i] != 0 ? 1.0 : 0.0;
        write_f32raw(f, path);
        return;
    }
    std::vector<std::uint8_t> pixels(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) pixels[i] = mask[i] != 0 ? 255 : 0;
    if (format == OutputFormat::pgm) {
        write_pgm_bytes(path, mask.rows(), mask.cols(), pixels);
    } else {
        write_png_gray8(path, mask.rows(), mask.cols(), pixels);
    }
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: no values");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

NormalizedBand normalize_band(const ScalarField& band, double lo_pct, double hi_pct) {
    if (!(lo_pct >= 0.0 && lo_pct < hi_pct && hi_pct <= 1.0)) {
        throw std::invalid_argument("normalize_band: need 0 <= lo_pct < hi_pct <= 1");
    }
    std::vector<double> sorted(band.values().begin(), band.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = percentile(sorted, lo_pct);
    const double hi = percentile(std::move(sorted), hi_pct);

    NormalizedBand out{ScalarField(band.rows(), band.cols(), 0.0), false};
    if (!(hi > lo)) {
        out.degenerate = true;
        return out;
    }
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < band.size(); ++i) out.field[i] = std::clamp((band[i] - lo) * inv, 0.0, 1.0);
    return out;
}

}  // namespace channet
