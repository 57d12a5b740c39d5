#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "lanevp/rng.hpp"
#include "lanevp/types.hpp"
#include "lanevp/vp_labeler.hpp"

namespace lanevp {

/// Geometric augmentation parameters. The vertical shift re-draws the
/// relative VP row uniformly over [h_edge, 1 - h_edge]; there is no
/// horizontal shift, only the mirror flip.
struct ShiftSpec {
    double h_edge = 0.05;
    double flip_prob = 0.5;
    double shift_prob = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(h_edge >= 0.0) || h_edge >= 0.5)
            throw ConfigError("h_edge must satisfy 0 <= h_edge < 0.5");
        if (flip_prob < 0.0 || flip_prob > 1.0 || shift_prob < 0.0 || shift_prob > 1.0)
            throw ConfigError("probabilities must lie in [0, 1]");
    }
};

/// Draw a vertical shift (relative units) for a label whose relative VP row
/// is vp_y_rel. The shift is uniform over
/// [h_edge - vp_y_rel, 1 - vp_y_rel - h_edge], so the shifted row lands
/// uniformly in [h_edge, 1 - h_edge].
inline double sample_shift(double vp_y_rel, const ShiftSpec& spec, Rng& rng) {
    spec.validate();
    double target = spec.h_edge + rng.uniform() * (1.0 - 2.0 * spec.h_edge);
    double lo = spec.h_edge - vp_y_rel;
    double hi = 1.0 - vp_y_rel - spec.h_edge;
    return std::clamp(target - vp_y_rel, lo, hi);
}

/// Zero-fill rows an image consumer has to blank after a vertical shift.
struct FillRegion {
    int top_rows = 0;
    int bottom_rows = 0;
};

struct AugRecord {
    bool flipped = false;
    double shift_px = 0.0;
    Point2 vp;           // label position after augmentation
    bool shift_skipped = false;  // label outside (0, 1) relative, no shift drawn
};

/// Mirror the frame and label about the vertical axis:
/// x -> (width - 1) - x. Spreads and y coordinates are untouched.
inline std::pair<FrameAnnotation, VPLabel> apply_flip(FrameAnnotation frame, VPLabel label) {
    const double w1 = frame.geometry.width - 1.0;
    for (LanePolyline& lane : frame.lanes)
        for (Point2& p : lane.points) p.x = w1 - p.x;
    if (label.valid) label.vp.x = w1 - label.vp.x;
    return {std::move(frame), label};
}

struct ShiftResult {
    FrameAnnotation frame;
    VPLabel label;
    FillRegion fill;
};

/// Translate all y coordinates by shift_px. Target heatmaps are meant to be
/// re-rendered at the shifted label rather than pixel-shifted, so the
/// Gaussian is never truncated; the fill region tells image consumers which
/// rows to blank.
inline ShiftResult apply_shift(FrameAnnotation frame, VPLabel label, double shift_px) {
    for (LanePolyline& lane : frame.lanes)
        for (Point2& p : lane.points) p.y += shift_px;
    if (label.valid) label.vp.y += shift_px;

    ShiftResult res{std::move(frame), label, {}};
    if (shift_px > 0.0)
        res.fill.top_rows = static_cast<int>(std::ceil(shift_px));
    else if (shift_px < 0.0)
        res.fill.bottom_rows = static_cast<int>(std::ceil(-shift_px));
    return res;
}

struct AugmentResult {
    FrameAnnotation frame;
    VPLabel label;
    AugRecord record;
};

/// Full per-frame augmentation. Draw order is fixed: flip gate, shift gate,
/// then the shift value, so a stream is bit-reproducible for a given rng
/// state. Labels whose relative VP row falls outside (0, 1) skip the shift
/// and are flagged.
inline AugmentResult augment_frame(FrameAnnotation frame, VPLabel label, const ShiftSpec& spec,
                                   Rng& rng) {
    spec.validate();
    AugmentResult res{std::move(frame), label, {}};

    if (rng.bernoulli(spec.flip_prob)) {
        auto [f, l] = apply_flip(std::move(res.frame), res.label);
        res.frame = std::move(f);
        res.label = l;
        res.record.flipped = true;
    }

    const double height = res.frame.geometry.height;
    const bool want_shift = rng.bernoulli(spec.shift_prob);
    if (want_shift && res.label.valid) {
        double vp_y_rel = res.label.vp.y / height;
        if (vp_y_rel > 0.0 && vp_y_rel < 1.0) {
            double shift_rel = sample_shift(vp_y_rel, spec, rng);
            double shift_px = shift_rel * height;
            auto shifted = apply_shift(std::move(res.frame), res.label, shift_px);
            res.frame = std::move(shifted.frame);
            res.label = shifted.label;
            res.record.shift_px = shift_px;
            // Keep the landed row inside the closed band; the clamp only
            // ever moves it by one rounding step.
            res.label.vp.y = std::clamp(res.label.vp.y, spec.h_edge * height,
                                        (1.0 - spec.h_edge) * height);
        } else {
            res.record.shift_skipped = true;
        }
    }
    res.record.vp = res.label.vp;
    return res;
}

}  // namespace lanevp
