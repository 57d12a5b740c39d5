#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lanevp/detail/text.hpp"
#include "lanevp/heatmap.hpp"
#include "lanevp/types.hpp"
#include "lanevp/vp_labeler.hpp"

namespace lanevp {

/// Independent per-axis rescale between rasters of different resolution.
inline Point2 rescale_coords(const Point2& p, const ImageGeometry& from, const ImageGeometry& to) {
    return {p.x * (static_cast<double>(to.width) / from.width),
            p.y * (static_cast<double>(to.height) / from.height)};
}

/// Euclidean error divided by the image diagonal.
inline double norm_dist(const Point2& pred, const Point2& gt, const ImageGeometry& geometry) {
    double dx = pred.x - gt.x;
    double dy = pred.y - gt.y;
    return std::sqrt(dx * dx + dy * dy) / geometry.diagonal();
}

/// One frame's prediction-vs-label comparison at full resolution. A missing
/// prediction (detector failure) carries infinite normalized distance.
struct EvalRecord {
    std::string frame_id;
    std::optional<Point2> pred;
    Point2 gt;
    double confidence = 0.0;
    double norm_dist = std::numeric_limits<double>::infinity();
    double abs_err_x = 0.0;
    double abs_err_y = 0.0;
};

inline EvalRecord make_eval_record(std::string frame_id, std::optional<Point2> pred, Point2 gt,
                                   double confidence, const ImageGeometry& geometry) {
    EvalRecord rec;
    rec.frame_id = std::move(frame_id);
    rec.pred = pred;
    rec.gt = gt;
    rec.confidence = confidence;
    if (pred) {
        rec.norm_dist = norm_dist(*pred, gt, geometry);
        rec.abs_err_x = std::fabs(pred->x - gt.x);
        rec.abs_err_y = std::fabs(pred->y - gt.y);
    }
    return rec;
}

struct EvalReport {
    double mae_x = 0.0;  // over records with a prediction
    double mae_y = 0.0;
    double mean_norm_dist = 0.0;  // over finite records only
    std::vector<std::pair<double, double>> frac_under;  // threshold -> fraction of n_total
    std::int64_t n_total = 0;
    std::int64_t n_failed = 0;  // records without a prediction
    std::vector<std::pair<double, double>> cumulative;  // sorted (norm_dist, fraction)
};

/// Aggregate a record stream. Records are reduced in a canonical order
/// (sorted by frame id, then distance), so any permutation of the same
/// stream produces an identical report. Failed records count toward every
/// denominator and toward no frac_under numerator.
inline EvalReport evaluate(std::span<const EvalRecord> records,
                           std::span<const double> thresholds) {
    std::vector<const EvalRecord*> order;
    order.reserve(records.size());
    for (const EvalRecord& r : records) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const EvalRecord* a, const EvalRecord* b) {
        if (a->frame_id != b->frame_id) return a->frame_id < b->frame_id;
        if (a->norm_dist != b->norm_dist) return a->norm_dist < b->norm_dist;
        if (a->abs_err_x != b->abs_err_x) return a->abs_err_x < b->abs_err_x;
        if (a->abs_err_y != b->abs_err_y) return a->abs_err_y < b->abs_err_y;
        return a->confidence < b->confidence;
    });

    EvalReport rep;
    rep.n_total = static_cast<std::int64_t>(records.size());
    double sum_x = 0.0, sum_y = 0.0, sum_nd = 0.0;
    std::int64_t n_pred = 0;
    std::vector<double> finite;
    for (const EvalRecord* r : order) {
        if (!r->pred) {
            ++rep.n_failed;
            continue;
        }
        ++n_pred;
        sum_x += r->abs_err_x;
        sum_y += r->abs_err_y;
        if (std::isfinite(r->norm_dist)) {
            sum_nd += r->norm_dist;
            finite.push_back(r->norm_dist);
        }
    }
    if (n_pred) {
        rep.mae_x = sum_x / static_cast<double>(n_pred);
        rep.mae_y = sum_y / static_cast<double>(n_pred);
    }
    if (!finite.empty()) rep.mean_norm_dist = sum_nd / static_cast<double>(finite.size());

    std::sort(finite.begin(), finite.end());
    for (double tau : thresholds) {
        auto it = std::lower_bound(finite.begin(), finite.end(), tau);
        double frac = rep.n_total ? static_cast<double>(it - finite.begin()) /
                                        static_cast<double>(rep.n_total)
                                  : 0.0;
        rep.frac_under.emplace_back(tau, frac);
    }
    for (std::size_t i = 0; i < finite.size(); ++i)
        rep.cumulative.emplace_back(
            finite[i], static_cast<double>(i + 1) / static_cast<double>(rep.n_total));
    return rep;
}

/// The lane-detection-first route: fit and intersect whatever polylines the
/// detector produced. Nothing is returned when fewer than two usable lanes
/// intersect, which the caller scores as infinite distance.
inline std::optional<Point2> two_stage_vp(const FrameAnnotation& detected_lanes,
                                          const FitMethod& method) {
    FrameLabelResult res = label_frame(detected_lanes, method);
    if (!res.label.valid) return std::nullopt;
    return res.label.vp;
}

// ---------------------------------------------------------------------------
// Horizon estimation from accumulated peaks.

struct HorizonEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double angle_deg = 0.0;
    std::int64_t n_frames = 0;
    std::int64_t n_columns = 0;
};

/// Accumulate each peak's confidence at its pixel, take the row of the
/// column-wise maximum for every column that received mass, and fit a line
/// through those (column, row) pairs. Ties within a column break to the
/// smallest row. Scaling all confidences by a positive constant does not
/// change the result.
inline HorizonEstimate estimate_horizon(std::span<const PeakResult> peaks,
                                        const ImageGeometry& geometry) {
    if (!geometry.valid()) throw ConfigError("estimate_horizon: empty geometry");
    std::vector<double> acc(static_cast<std::size_t>(geometry.width) * geometry.height, 0.0);
    std::int64_t n_used = 0;
    for (const PeakResult& p : peaks) {
        if (p.x < 0 || p.x >= geometry.width || p.y < 0 || p.y >= geometry.height) continue;
        if (!(p.confidence > 0.0)) continue;
        acc[static_cast<std::size_t>(p.y) * geometry.width + p.x] += p.confidence;
        ++n_used;
    }

    std::vector<Point2> samples;
    for (int c = 0; c < geometry.width; ++c) {
        double best = 0.0;
        int best_row = -1;
        for (int r = 0; r < geometry.height; ++r) {
            double v = acc[static_cast<std::size_t>(r) * geometry.width + c];
            if (v > best) {
                best = v;
                best_row = r;
            }
        }
        if (best_row >= 0) samples.push_back({static_cast<double>(c), static_cast<double>(best_row)});
    }
    if (samples.size() < 2)
        throw Error("estimate_horizon: need accumulation in at least 2 columns, have " +
                    std::to_string(samples.size()));

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const Point2& s : samples) {
        sx += s.x;
        sy += s.y;
        sxx += s.x * s.x;
        sxy += s.x * s.y;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * sxx - sx * sx;
    HorizonEstimate est;
    est.slope = (n * sxy - sx * sy) / denom;
    est.intercept = (sy - est.slope * sx) / n;
    est.angle_deg = std::atan(est.slope) * 180.0 / 3.14159265358979323846;
    est.n_frames = n_used;
    est.n_columns = static_cast<std::int64_t>(samples.size());
    return est;
}

// ---------------------------------------------------------------------------
// Prediction rows: "frame_id x y confidence", or "frame_id NONE" when the
// upstream detector produced nothing for the frame.

struct PredictionRow {
    std::string frame_id;
    std::optional<Point2> pred;
    double confidence = 0.0;
};

inline std::vector<PredictionRow> parse_predictions(std::istream& in) {
    std::vector<PredictionRow> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = detail::split_fields(t);
        PredictionRow row;
        row.frame_id = std::string(fields[0]);
        if (fields.size() == 2 && fields[1] == "NONE") {
            out.push_back(std::move(row));
            continue;
        }
        if (fields.size() != 4)
            throw ParseError("prediction row " + std::to_string(line_no) +
                             ": expected 'frame_id x y confidence' or 'frame_id NONE'");
        Point2 p;
        if (!detail::parse_double(fields[1], p.x) || !detail::parse_double(fields[2], p.y) ||
            !detail::parse_double(fields[3], row.confidence))
            throw ParseError("prediction row " + std::to_string(line_no) + ": malformed number");
        row.pred = p;
        out.push_back(std::move(row));
    }
    return out;
}

inline void write_prediction_row(std::ostream& out, const PredictionRow& row) {
    out << row.frame_id;
    if (row.pred)
        out << ' ' << detail::format_double(row.pred->x) << ' ' << detail::format_double(row.pred->y)
            << ' ' << detail::format_double(row.confidence);
    else
        out << " NONE";
    out << '\n';
}

inline void write_eval_report(std::ostream& out, const EvalReport& rep) {
    out << "n_total\t" << rep.n_total << '\n';
    out << "n_failed\t" << rep.n_failed << '\n';
    out << "n_predicted\t" << rep.n_total - rep.n_failed << '\n';
    out << "mae_x\t" << detail::format_double(rep.mae_x) << '\n';
    out << "mae_y\t" << detail::format_double(rep.mae_y) << '\n';
    out << "mean_norm_dist\t" << detail::format_double(rep.mean_norm_dist) << '\n';
    for (const auto& [tau, frac] : rep.frac_under)
        out << "frac_under\t" << detail::format_double(tau) << '\t' << detail::format_double(frac)
            << '\n';
}

inline void write_cumulative_curve(std::ostream& out, const EvalReport& rep) {
    out << "#norm_dist\tfraction\n";
    for (const auto& [nd, frac] : rep.cumulative)
        out << detail::format_double(nd) << '\t' << detail::format_double(frac) << '\n';
}

}  // namespace lanevp
