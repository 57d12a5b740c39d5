#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lanevp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (lines files, manifests, prediction rows).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure: missing or unreadable path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Binary payload violates its format contract (bad magic, truncation).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient least-squares system.
class SingularFit : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2& a, const Point2& b) {
        return a.x == b.x && a.y == b.y;
    }
};

/// Pixel raster dimensions. Origin is top-left, x grows right, y grows down.
struct ImageGeometry {
    int width = 0;
    int height = 0;

    bool valid() const { return width > 0 && height > 0; }

    double diagonal() const {
        return std::sqrt(static_cast<double>(width) * width +
                         static_cast<double>(height) * height);
    }

    friend bool operator==(const ImageGeometry& a, const ImageGeometry& b) {
        return a.width == b.width && a.height == b.height;
    }
};

/// One lane marking as an ordered point sequence in image coordinates.
/// Points are kept sorted by ascending y (top of image first), so the
/// top-most annotation is always points.front(). Coordinates may fall
/// slightly outside the frame, as extrapolated annotations do.
struct LanePolyline {
    int lane_id = 0;
    std::vector<Point2> points;

    double min_y() const { return points.front().y; }
    double max_y() const { return points.back().y; }
};

/// All lane annotations of a single frame.
struct FrameAnnotation {
    std::string frame_id;
    ImageGeometry geometry;
    std::vector<LanePolyline> lanes;
    /// Input lines that held fewer than two points and were dropped.
    int dropped_lanes = 0;

    /// Labeling needs at least two lanes to intersect.
    bool labelable() const { return lanes.size() >= 2; }
};

/// Dense per-pixel lane-instance identifiers, 0 = background.
struct SegMask {
    ImageGeometry geometry;
    std::vector<std::uint16_t> labels;  // row-major, geometry.width * geometry.height

    std::uint16_t at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * geometry.width + col];
    }
};

}  // namespace lanevp
