#include "lanevp/polyfit.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using lanevp::FitMethod;
using lanevp::LanePolyline;
using lanevp::Point2;
using lanevp::PolyFit;
using lanevp::SingularFit;

namespace {

std::vector<Point2> sample_poly(const std::vector<double>& coeffs, const std::vector<double>& ys) {
    std::vector<Point2> pts;
    for (double y : ys) {
        double x = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) x = x * y + coeffs[i];
        pts.push_back({x, y});
    }
    return pts;
}

// Direct normal-equations fit on raw y, solved by Gaussian elimination with
// partial pivoting. Fine as an oracle for low degrees and benign y ranges.
std::vector<double> normal_equations_fit(const std::vector<Point2>& pts, int degree) {
    const int n = degree + 1;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (const Point2& p : pts) {
        std::vector<double> pw(2 * degree + 1, 1.0);
        for (int k = 1; k < static_cast<int>(pw.size()); ++k) pw[k] = pw[k - 1] * p.y;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) a[r][c] += pw[r + c];
            a[r][n] += pw[r] * p.x;
        }
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> sol(n);
    for (int r = 0; r < n; ++r) sol[r] = a[r][n] / a[r][r];
    return sol;
}

}  // namespace

TEST(SelectFitPoints, CloseRangeKeepsPointsBelowBand) {
    LanePolyline lane;
    lane.points = {{0, 300}, {0, 350}, {0, 400}, {0, 450}};
    auto sel = lanevp::select_fit_points(lane, FitMethod::linear_close(100.0));
    ASSERT_EQ(sel.size(), 2u);
    EXPECT_DOUBLE_EQ(sel[0].y, 400.0);
    EXPECT_DOUBLE_EQ(sel[1].y, 450.0);
}

TEST(SelectFitPoints, FullRangeIsIdentity) {
    LanePolyline lane;
    lane.points = {{1, 300}, {2, 350}, {3, 400}};
    auto sel = lanevp::select_fit_points(lane, FitMethod::cubic());
    ASSERT_EQ(sel.size(), lane.points.size());
    for (std::size_t i = 0; i < sel.size(); ++i) EXPECT_EQ(sel[i], lane.points[i]);
}

TEST(SelectFitPoints, BandSwallowsShortLane) {
    LanePolyline lane;
    lane.points = {{0, 300}, {0, 350}};
    auto sel = lanevp::select_fit_points(lane, FitMethod::linear_close(100.0));
    EXPECT_TRUE(sel.empty());
    EXPECT_FALSE(lanevp::usable_for(sel, 1));
}

TEST(FitLane, ExactLine) {
    auto pts = sample_poly({3.0, 2.0}, {570, 580, 590});
    PolyFit fit = lanevp::fit_lane(pts, 1);
    ASSERT_EQ(fit.coeffs.size(), 2u);
    EXPECT_NEAR(fit.coeffs[0], 3.0, 1e-9);
    EXPECT_NEAR(fit.coeffs[1], 2.0, 1e-9);
    EXPECT_NEAR(fit.residual_rms, 0.0, 1e-9);
    EXPECT_EQ(fit.n_points, 3);
    EXPECT_DOUBLE_EQ(fit.y_min, 570.0);
    EXPECT_DOUBLE_EQ(fit.y_max, 590.0);
}

TEST(FitLane, ParabolaMatchesNormalEquationsOracle) {
    std::vector<double> ys;
    for (int i = 0; i < 10; ++i) ys.push_back(100.0 + 50.0 * i);
    auto pts = sample_poly({400.0, -1.0, 0.001}, ys);

    auto oracle = normal_equations_fit(pts, 2);
    PolyFit fit = lanevp::fit_lane(pts, 2);
    ASSERT_EQ(fit.coeffs.size(), 3u);
    for (int k = 0; k < 3; ++k) {
        double want = oracle[k];
        EXPECT_NEAR(fit.coeffs[k], want, 1e-6 * std::max(1.0, std::fabs(want))) << "coeff " << k;
    }
    EXPECT_NEAR(fit.coeffs[2], 0.001, 1e-9);
    EXPECT_NEAR(fit.coeffs[1], -1.0, 1e-6);
    EXPECT_NEAR(fit.coeffs[0], 400.0, 1e-4);
}

TEST(FitLane, CubicOnCollinearPointsIsDegenerateLine) {
    auto pts = sample_poly({10.0, 0.5}, {200, 300, 400, 500});
    PolyFit fit = lanevp::fit_lane(pts, 3);
    EXPECT_NEAR(fit.residual_rms, 0.0, 1e-7 * 10.0);
    EXPECT_LE(std::fabs(fit.coeffs[2]), 1e-7 * std::fabs(fit.coeffs[0]));
    EXPECT_LE(std::fabs(fit.coeffs[3]), 1e-7 * std::fabs(fit.coeffs[0]));
    // The fitted cubic must reproduce the line over the data range.
    for (double y : {200.0, 333.0, 450.0, 500.0})
        EXPECT_NEAR(lanevp::eval_poly(fit, y), 10.0 + 0.5 * y, 1e-6);
}

TEST(FitLane, RecoversExactPolynomialWithHigherDegree) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int true_deg = trial % 3;  // 0..2
        std::vector<double> c;
        for (int k = 0; k <= true_deg; ++k)
            c.push_back(coeff(gen) * std::pow(10.0, 2 - 2 * k));
        std::vector<double> ys;
        for (int i = 0; i < 12; ++i) ys.push_back(150.0 + 37.0 * i);
        auto pts = sample_poly(c, ys);
        double scale = 0.0;
        for (const Point2& p : pts) scale = std::max(scale, std::fabs(p.x));
        for (int fit_deg = true_deg; fit_deg <= 3; ++fit_deg) {
            PolyFit fit = lanevp::fit_lane(pts, fit_deg);
            EXPECT_LE(fit.residual_rms, 1e-7 * std::max(1.0, scale))
                << "trial " << trial << " fit_deg " << fit_deg;
        }
    }
}

TEST(FitLane, Degree1MatchesClosedFormRegression) {
    std::mt19937_64 gen(4242);
    std::normal_distribution<double> noise(0.0, 3.0);
    std::vector<Point2> pts;
    for (int i = 0; i < 25; ++i)
        pts.push_back({120.0 + 0.8 * (200.0 + 14.0 * i) + noise(gen), 200.0 + 14.0 * i});

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const Point2& p : pts) {
        sx += p.y;
        sy += p.x;
        sxx += p.y * p.y;
        sxy += p.y * p.x;
    }
    double n = static_cast<double>(pts.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;

    PolyFit fit = lanevp::fit_lane(pts, 1);
    EXPECT_NEAR(fit.coeffs[1], slope, 1e-9 * std::fabs(slope));
    EXPECT_NEAR(fit.coeffs[0], intercept, 1e-9 * std::fabs(intercept));
}

TEST(FitLane, ResidualInvariantUnderAffineReparameterization) {
    std::mt19937_64 gen(57);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> shift(-400.0, 400.0);
    std::uniform_real_distribution<double> scale_dist(0.2, 5.0);

    std::vector<Point2> pts;
    for (int i = 0; i < 20; ++i) {
        double y = 250.0 + 17.0 * i;
        pts.push_back({300.0 - 0.4 * y + 2e-4 * y * y + noise(gen), y});
    }
    PolyFit fit = lanevp::fit_lane(pts, 2);

    for (int trial = 0; trial < 20; ++trial) {
        double c = shift(gen), s = scale_dist(gen);
        std::vector<Point2> reparam;
        for (const Point2& p : pts) reparam.push_back({p.x, (p.y - c) / s});
        auto oracle = normal_equations_fit(reparam, 2);
        double ss = 0.0;
        for (const Point2& p : reparam) {
            double pred = oracle[0] + oracle[1] * p.y + oracle[2] * p.y * p.y;
            ss += (p.x - pred) * (p.x - pred);
        }
        double oracle_rms = std::sqrt(ss / reparam.size());
        EXPECT_NEAR(fit.residual_rms, oracle_rms, 1e-9 * std::max(1.0, oracle_rms));
    }

    // Raw-basis coefficients reproduce the fit's own predictions everywhere.
    auto oracle_raw = normal_equations_fit(pts, 2);
    std::uniform_real_distribution<double> yq(-600.0, 1200.0);
    for (int i = 0; i < 100; ++i) {
        double y = yq(gen);
        double direct = oracle_raw[0] + oracle_raw[1] * y + oracle_raw[2] * y * y;
        EXPECT_NEAR(lanevp::eval_poly(fit, y), direct, 1e-7 * std::max(1.0, std::fabs(direct)));
    }
}

TEST(FitLane, Deterministic) {
    auto pts = sample_poly({12.0, -0.3, 1e-3, -2e-6}, {210, 260, 330, 415, 470, 555});
    PolyFit a = lanevp::fit_lane(pts, 3);
    PolyFit b = lanevp::fit_lane(pts, 3);
    ASSERT_EQ(a.coeffs.size(), b.coeffs.size());
    EXPECT_EQ(std::memcmp(a.coeffs.data(), b.coeffs.data(), a.coeffs.size() * sizeof(double)), 0);
}

TEST(FitLane, SingularCases) {
    std::vector<Point2> same_y = {{1, 100}, {2, 100}, {3, 100}};
    EXPECT_THROW(lanevp::fit_lane(same_y, 1), SingularFit);

    std::vector<Point2> two_distinct = {{1, 100}, {2, 200}, {3, 100}};
    EXPECT_THROW(lanevp::fit_lane(two_distinct, 2), SingularFit);

    std::vector<Point2> too_few = {{1, 100}, {2, 200}};
    EXPECT_THROW(lanevp::fit_lane(too_few, 2), SingularFit);

    EXPECT_FALSE(lanevp::usable_for(two_distinct, 2));
    EXPECT_TRUE(lanevp::usable_for(two_distinct, 1));
}

TEST(EvalPoly, HornerBasics) {
    PolyFit line;
    line.coeffs = {3.0, 2.0};
    line.degree = 1;
    EXPECT_DOUBLE_EQ(lanevp::eval_poly(line, 10.0), 23.0);

    PolyFit cubic;
    cubic.coeffs = {0.0, 0.0, 0.0, 1.0};
    cubic.degree = 3;
    EXPECT_DOUBLE_EQ(lanevp::eval_poly(cubic, 2.0), 8.0);
}

TEST(EvalPoly, ValueAtRangeEdgeStaysNearSourcePoint) {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> noise(0.0, 1.5);
    std::vector<Point2> pts;
    for (int i = 0; i < 15; ++i) {
        double y = 300.0 + 20.0 * i;
        pts.push_back({500.0 - 0.3 * y + noise(gen), y});
    }
    PolyFit fit = lanevp::fit_lane(pts, 1);
    // At y_min the curve must sit within the worst-case residual of the
    // first source point.
    double max_resid = 0.0;
    for (const Point2& p : pts)
        max_resid = std::max(max_resid, std::fabs(lanevp::eval_poly(fit, p.y) - p.x));
    EXPECT_LE(std::fabs(lanevp::eval_poly(fit, fit.y_min) - pts.front().x), max_resid + 1e-9);
}

TEST(FitMethod, TagsAndParsing) {
    EXPECT_EQ(FitMethod::linear().tag(), "1d");
    EXPECT_EQ(FitMethod::quadratic().tag(), "2d");
    EXPECT_EQ(FitMethod::cubic().tag(), "3d");
    EXPECT_EQ(FitMethod::linear_close().tag(), "1d-close");
    EXPECT_EQ(FitMethod::parse("1d-close"), FitMethod::linear_close());
    EXPECT_EQ(FitMethod::parse("3d"), FitMethod::cubic());
    EXPECT_THROW(FitMethod::parse("4d"), lanevp::ConfigError);

    FitMethod bad{2, true, 100.0};
    EXPECT_THROW(bad.validate(), lanevp::ConfigError);
}
