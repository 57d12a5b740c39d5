#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lanevp/types.hpp"
#include "lanevp/vp_labeler.hpp"

namespace lanevp {

enum class SigmaMode { kFixed, kDynamic };
enum class AmplitudeMode { kUnit, kNormalized };

inline SigmaMode parse_sigma_mode(std::string_view s) {
    if (s == "fixed") return SigmaMode::kFixed;
    if (s == "dynamic") return SigmaMode::kDynamic;
    throw ConfigError("unknown sigma mode '" + std::string(s) + "' (expected fixed|dynamic)");
}

inline AmplitudeMode parse_amplitude_mode(std::string_view s) {
    if (s == "unit") return AmplitudeMode::kUnit;
    if (s == "normalized") return AmplitudeMode::kNormalized;
    throw ConfigError("unknown amplitude mode '" + std::string(s) + "' (expected unit|normalized)");
}

/// Target Gaussian configuration. Fixed mode uses sigma_fixed; dynamic mode
/// derives sigma from the label's per-axis spread as the root mean square
/// sqrt((sigma_x^2 + sigma_y^2)/2), clipped to [clip_low, clip_high].
/// Unit amplitude peaks at 1; normalized uses A = 1/(sigma*sqrt(2*pi)).
struct GaussianSpec {
    SigmaMode sigma_mode = SigmaMode::kFixed;
    double sigma_fixed = 16.0;
    double sigma_clip_low = 6.0;
    double sigma_clip_high = 16.0;
    AmplitudeMode amplitude_mode = AmplitudeMode::kUnit;

    void validate() const {
        if (sigma_fixed <= 0.0) throw ConfigError("sigma_fixed must be positive");
        if (sigma_clip_low <= 0.0 || sigma_clip_low > sigma_clip_high)
            throw ConfigError("sigma clip range must satisfy 0 < low <= high");
    }

    double resolve_sigma(const VPLabel& label) const {
        if (sigma_mode == SigmaMode::kFixed) return sigma_fixed;
        double rms = std::sqrt(0.5 * (label.sigma_x * label.sigma_x +
                                      label.sigma_y * label.sigma_y));
        return std::clamp(rms, sigma_clip_low, sigma_clip_high);
    }

    double amplitude(double sigma) const {
        return amplitude_mode == AmplitudeMode::kUnit
                   ? 1.0
                   : 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    }
};

/// Dense single-channel probability grid, row-major float32.
struct Heatmap {
    ImageGeometry geometry;
    std::vector<float> values;

    float at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * geometry.width + col];
    }
    float& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * geometry.width + col];
    }
};

/// Peak location (integer grid coordinates) and its value.
struct PeakResult {
    int x = 0;
    int y = 0;
    double confidence = 0.0;
};

/// Render the training target: an isotropic 2-D Gaussian centered at the
/// label VP. The VP may sit off-grid (a label above the image top is
/// normal); in-grid pixels then carry the visible tail. The two axis
/// factors are precomputed, which keeps pixels at equal distance from an
/// integer-located center exactly equal.
inline Heatmap render_target(const VPLabel& label, const ImageGeometry& geometry,
                             const GaussianSpec& spec) {
    if (!label.valid) throw Error("render_target: label has no vanishing point");
    spec.validate();
    if (!geometry.valid()) throw ConfigError("render_target: empty geometry");

    const double sigma = spec.resolve_sigma(label);
    const double amp = spec.amplitude(sigma);
    const double inv = 1.0 / (2.0 * sigma * sigma);

    Heatmap h;
    h.geometry = geometry;
    h.values.resize(static_cast<std::size_t>(geometry.width) * geometry.height);

    std::vector<double> col_factor(geometry.width), row_factor(geometry.height);
    for (int c = 0; c < geometry.width; ++c) {
        double dx = c - label.vp.x;
        col_factor[c] = std::exp(-dx * dx * inv);
    }
    for (int r = 0; r < geometry.height; ++r) {
        double dy = r - label.vp.y;
        row_factor[r] = std::exp(-dy * dy * inv);
    }
    std::size_t i = 0;
    for (int r = 0; r < geometry.height; ++r)
        for (int c = 0; c < geometry.width; ++c)
            h.values[i++] = static_cast<float>(amp * row_factor[r] * col_factor[c]);
    return h;
}

/// Integer argmax; ties break to the smallest row, then smallest column.
inline PeakResult extract_peak(const Heatmap& h) {
    if (h.values.empty()) throw Error("extract_peak: empty heatmap");
    std::size_t best = 0;
    for (std::size_t i = 1; i < h.values.size(); ++i)
        if (h.values[i] > h.values[best]) best = i;
    PeakResult peak;
    peak.x = static_cast<int>(best % h.geometry.width);
    peak.y = static_cast<int>(best / h.geometry.width);
    peak.confidence = h.values[best];
    return peak;
}

/// Opt-in sub-pixel refinement: a parabola through the peak and its two
/// axis neighbors shifts each coordinate by up to half a pixel. Falls back
/// to the integer location at grid borders or flat/non-concave
/// neighborhoods. The integer argmax stays the default decoding.
inline Point2 refine_peak_subpixel(const Heatmap& h, const PeakResult& peak) {
    Point2 refined{static_cast<double>(peak.x), static_cast<double>(peak.y)};
    auto axis_offset = [](double lo, double mid, double hi) {
        double denom = lo - 2.0 * mid + hi;
        if (!(denom < 0.0)) return 0.0;
        return std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
    };
    if (peak.x > 0 && peak.x < h.geometry.width - 1)
        refined.x += axis_offset(h.at(peak.y, peak.x - 1), h.at(peak.y, peak.x),
                                 h.at(peak.y, peak.x + 1));
    if (peak.y > 0 && peak.y < h.geometry.height - 1)
        refined.y += axis_offset(h.at(peak.y - 1, peak.x), h.at(peak.y, peak.x),
                                 h.at(peak.y + 1, peak.x));
    return refined;
}

struct ThresholdSummary {
    std::vector<bool> accepted;  // parallel to the input peaks
    std::int64_t n_accepted = 0;
    std::int64_t n_rejected = 0;
};

/// A peak passes when its confidence is strictly above tau.
inline ThresholdSummary threshold_detections(std::span<const PeakResult> peaks, double tau) {
    ThresholdSummary s;
    s.accepted.reserve(peaks.size());
    for (const PeakResult& p : peaks) {
        bool ok = p.confidence > tau;
        s.accepted.push_back(ok);
        ++(ok ? s.n_accepted : s.n_rejected);
    }
    return s;
}

/// Zero-padding plan that grows dimensions up to the next multiple; the
/// original raster is placed at (0, 0) and padding goes right/bottom.
struct PaddedGeometry {
    ImageGeometry padded;
    int offset_x = 0;
    int offset_y = 0;

    Point2 to_padded(const Point2& p) const {
        return {p.x + offset_x, p.y + offset_y};
    }
    Point2 to_original(const Point2& p) const {
        return {p.x - offset_x, p.y - offset_y};
    }
};

inline PaddedGeometry pad_to_multiple(const ImageGeometry& g, int multiple) {
    if (multiple < 1) throw ConfigError("pad multiple must be >= 1");
    auto round_up = [multiple](int v) { return ((v + multiple - 1) / multiple) * multiple; };
    PaddedGeometry pg;
    pg.padded = {round_up(g.width), round_up(g.height)};
    return pg;
}

/// Apply a padding plan to a rendered map (zeros right/bottom).
inline Heatmap pad_heatmap(const Heatmap& h, const PaddedGeometry& pg) {
    Heatmap out;
    out.geometry = pg.padded;
    out.values.assign(static_cast<std::size_t>(pg.padded.width) * pg.padded.height, 0.0f);
    for (int r = 0; r < h.geometry.height; ++r)
        std::memcpy(&out.at(r + pg.offset_y, pg.offset_x), &h.values[static_cast<std::size_t>(r) * h.geometry.width],
                    sizeof(float) * h.geometry.width);
    return out;
}

// ---------------------------------------------------------------------------
// VPHM container: 16-byte header, then row-major float32 little-endian.
//
//   offset  size  field
//   0       4     magic "VPHM"
//   4       1     version (1)
//   5       1     dtype (1 = float32 LE)
//   6       4     height, u32 LE
//   10      4     width, u32 LE
//   14      2     reserved (0)

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace detail

inline void write_heatmap(const Heatmap& h, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write heatmap '" + path + "'");
    std::string header = "VPHM";
    header.push_back(1);  // version
    header.push_back(1);  // dtype float32
    detail::put_u32le(header, static_cast<std::uint32_t>(h.geometry.height));
    detail::put_u32le(header, static_cast<std::uint32_t>(h.geometry.width));
    header.push_back(0);
    header.push_back(0);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(h.values.data()),
                  static_cast<std::streamsize>(h.values.size() * sizeof(float)));
    } else {
        for (float v : h.values) {
            auto bits = std::bit_cast<std::uint32_t>(v);
            char b[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                         static_cast<char>((bits >> 16) & 0xFF),
                         static_cast<char>((bits >> 24) & 0xFF)};
            out.write(b, 4);
        }
    }
    if (!out) throw IoError("short write on '" + path + "'");
}

inline Heatmap read_heatmap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open heatmap '" + path + "'");
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() != sizeof(header)) throw FormatError("truncated header in '" + path + "'");
    if (std::memcmp(header, "VPHM", 4) != 0) throw FormatError("bad magic in '" + path + "'");
    if (header[4] != 1) throw FormatError("unsupported version in '" + path + "'");
    if (header[5] != 1) throw FormatError("unsupported dtype in '" + path + "'");

    Heatmap h;
    h.geometry.height = static_cast<int>(detail::get_u32le(header + 6));
    h.geometry.width = static_cast<int>(detail::get_u32le(header + 10));
    if (!h.geometry.valid() ||
        static_cast<long long>(h.geometry.width) * h.geometry.height > (1ll << 28))
        throw FormatError("bad dimensions in '" + path + "'");
    const std::size_t count = static_cast<std::size_t>(h.geometry.width) * h.geometry.height;
    h.values.resize(count);
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError("truncated payload in '" + path + "'");
    for (std::size_t i = 0; i < count; ++i)
        h.values[i] = std::bit_cast<float>(detail::get_u32le(raw.data() + 4 * i));
    return h;
}

/// Lossy 8-bit graymap export for eyeballing maps; never fed back into
/// metrics.
inline void write_heatmap_pgm(const Heatmap& h, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P5\n" << h.geometry.width << ' ' << h.geometry.height << "\n255\n";
    for (float v : h.values) {
        long scaled = std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0);
        out.put(static_cast<char>(static_cast<unsigned char>(scaled)));
    }
}

}  // namespace lanevp
