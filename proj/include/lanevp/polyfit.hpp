#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lanevp/polyroots.hpp"
#include "lanevp/types.hpp"

namespace lanevp {

/// Fitting configuration: plain n-degree least squares, or degree-1 on the
/// close range only (points at least `close_band` pixels below the lane's
/// top-most annotation).
struct FitMethod {
    int degree = 3;
    bool close_range_only = false;
    double close_band = 100.0;

    static FitMethod linear() { return {1, false, 100.0}; }
    static FitMethod quadratic() { return {2, false, 100.0}; }
    static FitMethod cubic() { return {3, false, 100.0}; }
    static FitMethod linear_close(double band = 100.0) { return {1, true, band}; }

    void validate() const {
        if (degree < 1 || degree > 3) throw ConfigError("fit degree must be 1, 2 or 3");
        if (close_range_only && degree != 1)
            throw ConfigError("close-range fitting is defined for degree 1 only");
        if (close_band <= 0.0) throw ConfigError("close_band must be positive");
    }

    std::string tag() const {
        if (close_range_only) return "1d-close";
        switch (degree) {
            case 1: return "1d";
            case 2: return "2d";
            default: return "3d";
        }
    }

    static FitMethod parse(std::string_view s) {
        if (s == "1d") return linear();
        if (s == "1d-close") return linear_close();
        if (s == "2d") return quadratic();
        if (s == "3d") return cubic();
        throw ConfigError("unknown fit method '" + std::string(s) + "' (expected 1d|1d-close|2d|3d)");
    }

    friend bool operator==(const FitMethod& a, const FitMethod& b) {
        return a.degree == b.degree && a.close_range_only == b.close_range_only &&
               a.close_band == b.close_band;
    }
};

/// Fitted polynomial x = a_0 + a_1*y + ... + a_n*y^n with the y-range the
/// coefficients were estimated from. Coefficients are stored in the raw
/// pixel basis (ascending powers) no matter how the fit was parameterized
/// internally.
struct PolyFit {
    std::vector<double> coeffs;  // a0..an
    int degree = 0;
    double y_min = 0.0;
    double y_max = 0.0;
    double residual_rms = 0.0;
    int n_points = 0;
};

/// Points the method actually fits. Close-range selection keeps points at
/// least `close_band` below the lane's top-most annotation; the full set is
/// returned otherwise. A result with fewer than degree+1 points means the
/// lane is unusable for this method (not an error).
inline std::vector<Point2> select_fit_points(const LanePolyline& lane, const FitMethod& method) {
    std::vector<Point2> out;
    if (lane.points.empty()) return out;
    if (!method.close_range_only) {
        out = lane.points;
        return out;
    }
    const double cut = lane.min_y() + method.close_band;
    for (const Point2& p : lane.points)
        if (p.y >= cut) out.push_back(p);
    return out;
}

inline int count_distinct_y(std::span<const Point2> points) {
    std::vector<double> ys;
    ys.reserve(points.size());
    for (const Point2& p : points) ys.push_back(p.y);
    std::sort(ys.begin(), ys.end());
    return static_cast<int>(std::unique(ys.begin(), ys.end()) - ys.begin());
}

inline bool usable_for(std::span<const Point2> selected, int degree) {
    return static_cast<int>(selected.size()) >= degree + 1 &&
           count_distinct_y(selected) >= degree + 1;
}

namespace detail {

/// Least-squares solve of the Vandermonde system via Householder QR.
/// `ys` are already normalized to [0, 1]. Returns coefficients in the
/// normalized basis, ascending.
inline std::vector<double> vandermonde_qr_solve(std::span<const double> ys,
                                                std::span<const double> xs, int degree) {
    const int m = static_cast<int>(ys.size());
    const int n = degree + 1;

    std::vector<double> a(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i) {
        double pw = 1.0;
        for (int k = 0; k < n; ++k) {
            a[static_cast<std::size_t>(i) * n + k] = pw;
            pw *= ys[i];
        }
    }
    std::vector<double> rhs(xs.begin(), xs.end());

    for (int k = 0; k < n; ++k) {
        double norm = 0.0;
        for (int i = k; i < m; ++i) {
            double v = a[static_cast<std::size_t>(i) * n + k];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) throw SingularFit("rank-deficient design matrix");
        double akk = a[static_cast<std::size_t>(k) * n + k];
        double alpha = akk >= 0.0 ? -norm : norm;
        // Householder vector overwrites column k below the diagonal.
        a[static_cast<std::size_t>(k) * n + k] = akk - alpha;
        double vnorm2 = 0.0;
        for (int i = k; i < m; ++i) {
            double v = a[static_cast<std::size_t>(i) * n + k];
            vnorm2 += v * v;
        }
        if (vnorm2 == 0.0) throw SingularFit("rank-deficient design matrix");
        for (int j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (int i = k; i < m; ++i)
                dot += a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(i) * n + j];
            double f = 2.0 * dot / vnorm2;
            for (int i = k; i < m; ++i)
                a[static_cast<std::size_t>(i) * n + j] -= f * a[static_cast<std::size_t>(i) * n + k];
        }
        double dot = 0.0;
        for (int i = k; i < m; ++i) dot += a[static_cast<std::size_t>(i) * n + k] * rhs[i];
        double f = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) rhs[i] -= f * a[static_cast<std::size_t>(i) * n + k];
        a[static_cast<std::size_t>(k) * n + k] = alpha;  // diagonal of R
    }

    double rmax = 0.0;
    for (int k = 0; k < n; ++k)
        rmax = std::max(rmax, std::fabs(a[static_cast<std::size_t>(k) * n + k]));
    std::vector<double> sol(n);
    for (int k = n - 1; k >= 0; --k) {
        double rkk = a[static_cast<std::size_t>(k) * n + k];
        if (std::fabs(rkk) <= 1e-12 * rmax) throw SingularFit("rank-deficient design matrix");
        double acc = rhs[k];
        for (int j = k + 1; j < n; ++j) acc -= a[static_cast<std::size_t>(k) * n + j] * sol[j];
        sol[k] = acc / rkk;
    }
    return sol;
}

/// Rebase coefficients from the normalized variable u = (y - y_min)/span
/// to raw y, by Horner-composing with the affine map.
inline std::vector<double> rebase_coeffs(std::span<const double> normed, double y_min, double span) {
    const double s = 1.0 / span;
    const double t = -y_min / span;
    std::vector<double> out{normed.back()};
    for (std::size_t k = normed.size() - 1; k-- > 0;) {
        std::vector<double> next(out.size() + 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            next[i] += out[i] * t;
            next[i + 1] += out[i] * s;
        }
        next[0] += normed[k];
        out = std::move(next);
    }
    return out;
}

}  // namespace detail

/// Least-squares fit of x as a polynomial in y. The system is solved on
/// y normalized to [0, 1] (raw Vandermonde columns for pixel-scale y are
/// badly conditioned at degree 3) and the coefficients are converted back
/// to the raw basis before returning. Throws SingularFit when the design
/// is rank deficient: fewer points than coefficients, or fewer distinct
/// y values than coefficients.
inline PolyFit fit_lane(std::span<const Point2> points, int degree) {
    const int m = static_cast<int>(points.size());
    if (m < degree + 1) throw SingularFit("need at least degree+1 points");

    double y_min = points[0].y, y_max = points[0].y;
    for (const Point2& p : points) {
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    if (y_max <= y_min) throw SingularFit("all points share one y value");
    const double span = y_max - y_min;

    std::vector<double> ys(m), xs(m);
    for (int i = 0; i < m; ++i) {
        ys[i] = (points[i].y - y_min) / span;
        xs[i] = points[i].x;
    }
    std::vector<double> normed = detail::vandermonde_qr_solve(ys, xs, degree);

    PolyFit fit;
    fit.coeffs = detail::rebase_coeffs(normed, y_min, span);
    fit.degree = degree;
    fit.y_min = y_min;
    fit.y_max = y_max;
    fit.n_points = m;

    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = xs[i] - detail::horner(normed, ys[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / m);
    return fit;
}

/// Horner evaluation; extrapolation beyond [y_min, y_max] is the intended use.
inline double eval_poly(const PolyFit& fit, double y) {
    return detail::horner(fit.coeffs, y);
}

}  // namespace lanevp
