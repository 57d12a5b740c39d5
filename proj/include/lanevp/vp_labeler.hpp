#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanevp/detail/text.hpp"
#include "lanevp/polyfit.hpp"
#include "lanevp/polyroots.hpp"
#include "lanevp/types.hpp"

namespace lanevp {

enum class Aggregation { kMedian, kMean };

inline const char* to_string(Aggregation a) {
    return a == Aggregation::kMedian ? "median" : "mean";
}

inline Aggregation parse_aggregation(std::string_view s) {
    if (s == "median") return Aggregation::kMedian;
    if (s == "mean") return Aggregation::kMean;
    throw ConfigError("unknown aggregation '" + std::string(s) + "' (expected median|mean)");
}

/// Pairwise intersections of the fitted lane curves of one frame.
struct IntersectionSet {
    std::vector<Point2> points;
    std::vector<std::pair<int, int>> pair_ids;  // lane ids, parallel to points
    int expected_count = 0;                     // C(usable_lanes, 2)
    int degenerate_pairs = 0;                   // coincident fits, excluded from points
};

/// Aggregated vanishing-point label with per-axis spread of the
/// intersection candidates. sigma is the population standard deviation,
/// so a single intersection yields sigma 0.
struct VPLabel {
    Point2 vp;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    int n_int = 0;
    Aggregation aggregation = Aggregation::kMedian;
    FitMethod method;
    bool valid = false;
};

struct LabelFilter {
    int min_n_int = 3;
    double max_sigma_y = 10.0;
    std::optional<double> max_sigma_x;

    void validate() const {
        if (min_n_int < 1) throw ConfigError("min_n_int must be >= 1");
        if (max_sigma_y < 0.0 || (max_sigma_x && *max_sigma_x < 0.0))
            throw ConfigError("filter thresholds must be >= 0");
    }
};

/// Difference polynomial f - g, ascending, padded to the longer degree.
inline std::vector<double> difference_coeffs(const PolyFit& f, const PolyFit& g) {
    std::vector<double> d(std::max(f.coeffs.size(), g.coeffs.size()), 0.0);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) d[i] += f.coeffs[i];
    for (std::size_t i = 0; i < g.coeffs.size(); ++i) d[i] -= g.coeffs[i];
    return d;
}

/// Two fits are treated as coincident when every difference coefficient is
/// below this bound; such pairs produce no intersection candidate.
constexpr double kCoincidentCoeffTol = 1e-12;

inline bool fits_coincident(const PolyFit& f, const PolyFit& g) {
    for (double c : difference_coeffs(f, g))
        if (std::fabs(c) >= kCoincidentCoeffTol) return false;
    return true;
}

/// Intersection of two fitted curves. Among the real roots of f - g that
/// fall in the plausibility band |y| <= geometry.height, the one closest
/// to the topmost annotation level min(f.y_min, g.y_min) is chosen; VPs sit
/// just above the highest annotated point, so that is where a meaningful
/// crossing lives. Returns nothing when no real root lies in the band
/// (parallel or divergent curves).
inline std::optional<Point2> intersect_pair(const PolyFit& f, const PolyFit& g,
                                            const ImageGeometry& geometry) {
    std::vector<double> diff = difference_coeffs(f, g);
    const double band = static_cast<double>(geometry.height);
    const double y_ref = std::min(f.y_min, g.y_min);

    std::vector<double> roots = real_roots(diff, std::max(band, std::fabs(y_ref)));
    std::optional<double> best;
    for (double y : roots) {
        if (y < -band || y > band) continue;
        if (!best || std::fabs(y - y_ref) < std::fabs(*best - y_ref) ||
            (std::fabs(y - y_ref) == std::fabs(*best - y_ref) && y < *best))
            best = y;
    }
    if (!best) return std::nullopt;
    // Symmetric in f and g, which keeps mirrored inputs exactly mirrored.
    double x = 0.5 * (eval_poly(f, *best) + eval_poly(g, *best));
    return Point2{x, *best};
}

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double population_stddev(const std::vector<double>& v) {
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace detail

struct FrameLabelResult {
    VPLabel label;
    IntersectionSet intersections;
    int usable_lanes = 0;
};

/// Fit every usable lane of the frame with the method, intersect all
/// pairs, and aggregate the crossings into a label. Lanes that keep fewer
/// than degree+1 points after close-range selection (or whose design is
/// rank deficient) are skipped; frames that end up with no intersection
/// yield valid = false rather than an error.
inline FrameLabelResult label_frame(const FrameAnnotation& frame, const FitMethod& method,
                                    Aggregation aggregation = Aggregation::kMedian) {
    method.validate();
    FrameLabelResult res;
    res.label.method = method;
    res.label.aggregation = aggregation;

    std::vector<PolyFit> fits;
    std::vector<int> ids;
    for (const LanePolyline& lane : frame.lanes) {
        std::vector<Point2> pts = select_fit_points(lane, method);
        if (!usable_for(pts, method.degree)) continue;
        try {
            fits.push_back(fit_lane(pts, method.degree));
        } catch (const SingularFit&) {
            continue;
        }
        ids.push_back(lane.lane_id);
    }
    res.usable_lanes = static_cast<int>(fits.size());

    const int n = static_cast<int>(fits.size());
    res.intersections.expected_count = n * (n - 1) / 2;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (fits_coincident(fits[i], fits[j])) {
                ++res.intersections.degenerate_pairs;
                continue;
            }
            if (auto p = intersect_pair(fits[i], fits[j], frame.geometry)) {
                res.intersections.points.push_back(*p);
                res.intersections.pair_ids.emplace_back(ids[i], ids[j]);
            }
        }
    }

    const auto& pts = res.intersections.points;
    res.label.n_int = static_cast<int>(pts.size());
    res.label.valid = !pts.empty();
    if (res.label.valid) {
        std::vector<double> xs, ys;
        xs.reserve(pts.size());
        ys.reserve(pts.size());
        for (const Point2& p : pts) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        if (aggregation == Aggregation::kMedian) {
            res.label.vp = {detail::median_of(xs), detail::median_of(ys)};
        } else {
            res.label.vp = {detail::mean_of(xs), detail::mean_of(ys)};
        }
        res.label.sigma_x = detail::population_stddev(xs);
        res.label.sigma_y = detail::population_stddev(ys);
    } else {
        res.label.vp = {std::nan(""), std::nan("")};
        res.label.sigma_x = res.label.sigma_y = std::nan("");
    }
    return res;
}

/// Quality gate: n_int and sigma thresholds (strict sigma inequalities).
inline bool apply_filter(const VPLabel& label, const LabelFilter& filter) {
    if (!label.valid) return false;
    if (label.n_int < filter.min_n_int) return false;
    if (!(label.sigma_y < filter.max_sigma_y)) return false;
    if (filter.max_sigma_x && !(label.sigma_x < *filter.max_sigma_x)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Label rows (external format) and dataset statistics.

/// One row of the label output format: frame_id, method tag, vp_x, vp_y,
/// sigma_x, sigma_y, n_int, valid.
struct LabelRecord {
    std::string frame_id;
    VPLabel label;
};

inline void write_label_header(std::ostream& out) {
    out << "#frame_id\tmethod\tvp_x\tvp_y\tsigma_x\tsigma_y\tn_int\tvalid\n";
}

inline void write_label_row(std::ostream& out, const LabelRecord& rec) {
    const VPLabel& l = rec.label;
    out << rec.frame_id << '\t' << l.method.tag() << '\t' << detail::format_double(l.vp.x) << '\t'
        << detail::format_double(l.vp.y) << '\t' << detail::format_double(l.sigma_x) << '\t'
        << detail::format_double(l.sigma_y) << '\t' << l.n_int << '\t' << (l.valid ? 1 : 0)
        << '\n';
}

inline std::vector<LabelRecord> parse_labels(std::istream& in) {
    std::vector<LabelRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = detail::split_fields(t);
        if (fields.size() != 8)
            throw ParseError("label row " + std::to_string(line_no) + ": expected 8 fields, got " +
                             std::to_string(fields.size()));
        LabelRecord rec;
        rec.frame_id = std::string(fields[0]);
        rec.label.method = FitMethod::parse(fields[1]);
        long long n_int = 0, valid = 0;
        if (!detail::parse_double(fields[2], rec.label.vp.x) ||
            !detail::parse_double(fields[3], rec.label.vp.y) ||
            !detail::parse_double(fields[4], rec.label.sigma_x) ||
            !detail::parse_double(fields[5], rec.label.sigma_y) ||
            !detail::parse_int(fields[6], n_int) || !detail::parse_int(fields[7], valid))
            throw ParseError("label row " + std::to_string(line_no) + ": malformed field");
        rec.label.n_int = static_cast<int>(n_int);
        rec.label.valid = valid != 0;
        out.push_back(std::move(rec));
    }
    return out;
}

/// Fixed-width histogram over [0, bin_width * counts.size()), values past
/// the end land in overflow. Bin layout never depends on the data, so
/// accumulators merge in any order.
struct RealHistogram {
    double bin_width = 1.0;
    std::vector<std::int64_t> counts = std::vector<std::int64_t>(100, 0);
    std::int64_t overflow = 0;

    void add(double v) {
        if (!(v >= 0.0)) return;  // nan guard; sigma is never negative
        auto bin = static_cast<std::size_t>(v / bin_width);
        if (bin < counts.size())
            ++counts[bin];
        else
            ++overflow;
    }

    void merge(const RealHistogram& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        overflow += o.overflow;
    }
};

/// Histogram over small non-negative integers (lane counts, n_int).
struct IntHistogram {
    std::vector<std::int64_t> counts;
    std::int64_t overflow = 0;

    explicit IntHistogram(std::size_t n_bins = 32) : counts(n_bins, 0) {}

    void add(int v) {
        if (v < 0) return;
        if (static_cast<std::size_t>(v) < counts.size())
            ++counts[v];
        else
            ++overflow;
    }

    void merge(const IntHistogram& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        overflow += o.overflow;
    }
};

struct StatsReport {
    IntHistogram lane_count_hist;
    IntHistogram n_int_hist;
    RealHistogram sigma_x_hist;
    RealHistogram sigma_y_hist;
    std::int64_t n_frames = 0;
    std::int64_t n_valid = 0;
    std::int64_t frames_ge2_lanes = 0;

    double frac_ge2_lanes() const {
        return n_frames ? static_cast<double>(frames_ge2_lanes) / static_cast<double>(n_frames)
                        : 0.0;
    }
};

/// Order-free reduction over frames: add() per frame, merge() across
/// workers, report() at the end.
class StatsAccumulator {
public:
    void add(const FrameAnnotation& frame, const VPLabel& label) {
        ++report_.n_frames;
        report_.lane_count_hist.add(static_cast<int>(frame.lanes.size()));
        if (frame.lanes.size() >= 2) ++report_.frames_ge2_lanes;
        report_.n_int_hist.add(label.n_int);
        if (label.valid) {
            ++report_.n_valid;
            report_.sigma_x_hist.add(label.sigma_x);
            report_.sigma_y_hist.add(label.sigma_y);
        }
    }

    void merge(const StatsAccumulator& o) {
        report_.lane_count_hist.merge(o.report_.lane_count_hist);
        report_.n_int_hist.merge(o.report_.n_int_hist);
        report_.sigma_x_hist.merge(o.report_.sigma_x_hist);
        report_.sigma_y_hist.merge(o.report_.sigma_y_hist);
        report_.n_frames += o.report_.n_frames;
        report_.n_valid += o.report_.n_valid;
        report_.frames_ge2_lanes += o.report_.frames_ge2_lanes;
    }

    const StatsReport& report() const { return report_; }

private:
    StatsReport report_;
};

/// Dataset-level statistics over labels and their source frames. The two
/// streams must be aligned by frame_id.
inline StatsReport dataset_label_stats(std::span<const LabelRecord> labels,
                                       std::span<const FrameAnnotation> frames) {
    if (labels.size() != frames.size())
        throw Error("label/frame streams differ in length (" + std::to_string(labels.size()) +
                    " vs " + std::to_string(frames.size()) + ")");
    StatsAccumulator acc;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].frame_id != frames[i].frame_id)
            throw Error("label/frame streams misaligned at index " + std::to_string(i) + ": '" +
                        labels[i].frame_id + "' vs '" + frames[i].frame_id + "'");
        acc.add(frames[i], labels[i].label);
    }
    return acc.report();
}

namespace detail {

inline void append_int_hist(std::string& out, const IntHistogram& h) {
    std::size_t last = h.counts.size();
    while (last > 1 && h.counts[last - 1] == 0) --last;
    out += "{\"counts\": [";
    for (std::size_t i = 0; i < last; ++i) {
        if (i) out += ", ";
        out += std::to_string(h.counts[i]);
    }
    out += "], \"overflow\": " + std::to_string(h.overflow) + "}";
}

inline void append_real_hist(std::string& out, const RealHistogram& h) {
    std::size_t last = h.counts.size();
    while (last > 1 && h.counts[last - 1] == 0) --last;
    out += "{\"bin_width\": " + format_double(h.bin_width) + ", \"counts\": [";
    for (std::size_t i = 0; i < last; ++i) {
        if (i) out += ", ";
        out += std::to_string(h.counts[i]);
    }
    out += "], \"overflow\": " + std::to_string(h.overflow) + "}";
}

}  // namespace detail

/// JSON serialization with fixed key order; reruns produce identical bytes.
inline std::string stats_to_json(const StatsReport& r) {
    std::string out = "{\n";
    out += "  \"lane_count_hist\": ";
    detail::append_int_hist(out, r.lane_count_hist);
    out += ",\n  \"n_int_hist\": ";
    detail::append_int_hist(out, r.n_int_hist);
    out += ",\n  \"sigma_x_hist\": ";
    detail::append_real_hist(out, r.sigma_x_hist);
    out += ",\n  \"sigma_y_hist\": ";
    detail::append_real_hist(out, r.sigma_y_hist);
    out += ",\n  \"frames_ge2_lanes\": {\"count\": " + std::to_string(r.frames_ge2_lanes) +
           ", \"fraction\": " + detail::format_double(r.frac_ge2_lanes()) + "},\n";
    out += "  \"n_frames\": " + std::to_string(r.n_frames) + ",\n";
    out += "  \"n_valid\": " + std::to_string(r.n_valid) + "\n";
    out += "}\n";
    return out;
}

}  // namespace lanevp
