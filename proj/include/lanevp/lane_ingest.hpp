#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lanevp/detail/text.hpp"
#include "lanevp/types.hpp"

namespace lanevp {

/// Parse the CULane lines format: one lane per line, whitespace-separated
/// "x y x y ..." decimals. Points are re-sorted by ascending y. Lines with
/// fewer than two points are dropped and counted in dropped_lanes.
inline FrameAnnotation parse_culane_lines(std::istream& in, const ImageGeometry& geometry,
                                          std::string frame_id = {}) {
    FrameAnnotation frame;
    frame.frame_id = std::move(frame_id);
    frame.geometry = geometry;

    std::string line;
    int line_no = 0;
    int next_lane_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::split_fields(line);
        if (tokens.empty()) continue;
        if (tokens.size() % 2 != 0)
            throw ParseError("line " + std::to_string(line_no) + ": odd coordinate count (" +
                             std::to_string(tokens.size()) + " values)");
        LanePolyline lane;
        for (std::size_t i = 0; i < tokens.size(); i += 2) {
            Point2 p;
            if (!detail::parse_double(tokens[i], p.x) || !detail::parse_double(tokens[i + 1], p.y) ||
                !std::isfinite(p.x) || !std::isfinite(p.y))
                throw ParseError("line " + std::to_string(line_no) + ": malformed coordinate '" +
                                 std::string(tokens[i]) + " " + std::string(tokens[i + 1]) + "'");
            lane.points.push_back(p);
        }
        if (lane.points.size() < 2) {
            ++frame.dropped_lanes;
            continue;
        }
        std::stable_sort(lane.points.begin(), lane.points.end(),
                         [](const Point2& a, const Point2& b) { return a.y < b.y; });
        lane.lane_id = next_lane_id++;
        frame.lanes.push_back(std::move(lane));
    }
    return frame;
}

inline FrameAnnotation parse_culane_lines(const std::string& text, const ImageGeometry& geometry,
                                          std::string frame_id = {}) {
    std::istringstream in(text);
    return parse_culane_lines(in, geometry, std::move(frame_id));
}

/// Inverse of parse_culane_lines on well-formed input: values are written
/// with enough digits to round-trip exactly.
inline void serialize_culane_lines(const FrameAnnotation& frame, std::ostream& out) {
    for (const LanePolyline& lane : frame.lanes) {
        for (std::size_t i = 0; i < lane.points.size(); ++i) {
            if (i) out << ' ';
            out << detail::format_double(lane.points[i].x) << ' '
                << detail::format_double(lane.points[i].y);
        }
        out << '\n';
    }
}

/// Read a frame list, one relative path per line. Blank lines are skipped,
/// duplicates and ordering are preserved.
inline std::vector<std::string> scan_manifest(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = detail::trim(line);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

inline std::vector<std::string> scan_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path + "'");
    return scan_manifest(in);
}

namespace detail {

inline int pnm_next_int(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comments between header tokens.
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw FormatError("truncated pnm header in '" + path + "'");
        if (c == '#') {
            std::string dummy;
            std::getline(in, dummy);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw FormatError("malformed pnm header in '" + path + "'");
    return value;
}

}  // namespace detail

/// Read a portable graymap (P5 binary or P2 ascii) as a lane-instance mask.
/// Pixel value is the instance id; 0 is background. maxval above 255 uses
/// two bytes per sample, most significant first.
inline SegMask read_pgm_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mask '" + path + "'");
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '2'))
        throw FormatError("'" + path + "' is not a P2/P5 portable graymap");
    const bool binary = m1 == '5';
    int width = detail::pnm_next_int(in, path);
    int height = detail::pnm_next_int(in, path);
    int maxval = detail::pnm_next_int(in, path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535 ||
        static_cast<long long>(width) * height > (1ll << 28))
        throw FormatError("bad pnm dimensions in '" + path + "'");

    SegMask mask;
    mask.geometry = {width, height};
    mask.labels.resize(static_cast<std::size_t>(width) * height);
    if (binary) {
        in.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(mask.labels.size() * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw FormatError("truncated pnm payload in '" + path + "'");
        for (std::size_t i = 0; i < mask.labels.size(); ++i)
            mask.labels[i] = bytes == 2
                                 ? static_cast<std::uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1])
                                 : raw[i];
    } else {
        for (auto& v : mask.labels) {
            int value = detail::pnm_next_int(in, path);
            v = static_cast<std::uint16_t>(value);
        }
    }
    return mask;
}

inline void write_pgm_mask(const SegMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write mask '" + path + "'");
    std::uint16_t maxval = 0;
    for (auto v : mask.labels) maxval = std::max(maxval, v);
    if (maxval == 0) maxval = 1;
    out << "P5\n" << mask.geometry.width << ' ' << mask.geometry.height << '\n' << maxval << '\n';
    if (maxval > 255) {
        for (auto v : mask.labels) {
            out.put(static_cast<char>(v >> 8));
            out.put(static_cast<char>(v & 0xFF));
        }
    } else {
        for (auto v : mask.labels) out.put(static_cast<char>(v));
    }
}

/// Extract one centerline polyline per lane-instance label. Every
/// `row_interval` rows, starting at the instance's own top row, the
/// midpoint of the leftmost and rightmost pixel of that label is emitted.
/// Instances whose vertical pixel extent (max row - min row) is below
/// `min_y_extent` are discarded.
inline FrameAnnotation mask_to_centerlines(const SegMask& mask, int row_interval = 5,
                                           double min_y_extent = 50.0, std::string frame_id = {}) {
    if (row_interval < 1) throw ConfigError("row_interval must be >= 1");
    if (min_y_extent < 0.0) throw ConfigError("min_y_extent must be >= 0");

    FrameAnnotation frame;
    frame.frame_id = std::move(frame_id);
    frame.geometry = mask.geometry;

    const int w = mask.geometry.width;
    const int h = mask.geometry.height;

    // Compact the label set first, so per-(label, row) storage scales with
    // the labels actually present rather than the largest id.
    std::uint16_t max_label = 0;
    for (auto v : mask.labels) max_label = std::max(max_label, v);
    if (max_label == 0) return frame;
    std::vector<int> dense(static_cast<std::size_t>(max_label) + 1, -1);
    std::vector<std::uint16_t> present;
    for (auto v : mask.labels) {
        if (v == 0 || dense[v] >= 0) continue;
        dense[v] = static_cast<int>(present.size());
        present.push_back(v);
    }

    struct RowSpan {
        int min_row = std::numeric_limits<int>::max();
        int max_row = -1;
    };
    std::vector<RowSpan> spans(present.size());
    // (dense label, row) -> [min_x, max_x]
    std::vector<int> row_min_x(present.size() * h, std::numeric_limits<int>::max());
    std::vector<int> row_max_x(present.size() * h, -1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::uint16_t label = mask.at(r, c);
            if (label == 0) continue;
            int d = dense[label];
            auto& span = spans[d];
            span.min_row = std::min(span.min_row, r);
            span.max_row = std::max(span.max_row, r);
            std::size_t idx = static_cast<std::size_t>(d) * h + r;
            row_min_x[idx] = std::min(row_min_x[idx], c);
            row_max_x[idx] = std::max(row_max_x[idx], c);
        }
    }

    // Lanes come out ordered by label id.
    std::vector<std::uint16_t> ordered = present;
    std::sort(ordered.begin(), ordered.end());
    for (std::uint16_t label : ordered) {
        const auto& span = spans[dense[label]];
        if (span.max_row - span.min_row < min_y_extent) continue;
        LanePolyline lane;
        lane.lane_id = label;
        for (int r = span.min_row; r <= span.max_row; r += row_interval) {
            std::size_t idx = static_cast<std::size_t>(dense[label]) * h + r;
            if (row_max_x[idx] < 0) continue;  // gap row
            lane.points.push_back({0.5 * (row_min_x[idx] + row_max_x[idx]), static_cast<double>(r)});
        }
        if (lane.points.size() < 2) {
            ++frame.dropped_lanes;
            continue;
        }
        frame.lanes.push_back(std::move(lane));
    }
    return frame;
}

}  // namespace lanevp
