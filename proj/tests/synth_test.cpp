#include "lanevp/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lanevp/vp_labeler.hpp"

using lanevp::FitMethod;
using lanevp::Point2;
using lanevp::SceneSpec;
using lanevp::SceneTruth;

namespace {

double vp_error(const SceneTruth& truth, const FitMethod& method) {
    auto res = lanevp::label_frame(truth.lanes, method);
    if (!res.label.valid) return 1e9;
    return std::hypot(res.label.vp.x - truth.vp_true.x, res.label.vp.y - truth.vp_true.y);
}

}  // namespace

TEST(RenderScene, LevelCameraPutsVpAtPrincipalPoint) {
    SceneSpec spec;
    spec.lane_offsets_m = {-1.8, 1.8};
    auto truth = lanevp::render_scene(spec);
    Point2 pp = spec.principal_point();
    EXPECT_NEAR(truth.vp_true.x, pp.x, 1e-12);
    EXPECT_NEAR(truth.vp_true.y, pp.y, 1e-12);
}

TEST(RenderScene, VpMatchesIndependentCameraFormula) {
    // For yaw psi and pitch theta the travel direction projects to
    // (cx - f*tan(psi)/cos(theta), cy - f*tan(theta)).
    for (double pitch : {-0.08, 0.0, 0.05, 0.2}) {
        for (double yaw : {-0.04, 0.0, 0.03}) {
            SceneSpec spec;
            spec.pitch_rad = pitch;
            spec.yaw_rad = yaw;
            spec.far_distance_m = 800.0;
            auto truth = lanevp::render_scene(spec);
            Point2 pp = spec.principal_point();
            double want_x = pp.x - spec.focal_px * std::tan(yaw) / std::cos(pitch);
            double want_y = pp.y - spec.focal_px * std::tan(pitch);
            EXPECT_NEAR(truth.vp_true.x, want_x, 1e-9) << pitch << " " << yaw;
            EXPECT_NEAR(truth.vp_true.y, want_y, 1e-9) << pitch << " " << yaw;
        }
    }
}

TEST(RenderScene, CleanStraightLanesAreCollinearThroughVp) {
    SceneSpec spec;
    spec.pitch_rad = 0.047;
    spec.lane_offsets_m = {-3.6, 0.0, 3.6};
    auto truth = lanevp::render_scene(spec);
    ASSERT_EQ(truth.lanes.lanes.size(), 3u);
    for (const auto& lane : truth.lanes.lanes) {
        ASSERT_GE(lane.points.size(), 2u);
        auto fit = lanevp::fit_lane(lane.points, 1);
        // The fitted line extrapolates through the true VP.
        EXPECT_NEAR(lanevp::eval_poly(fit, truth.vp_true.y), truth.vp_true.x, 1e-9);
        EXPECT_LE(fit.residual_rms, 1e-9);
    }
}

TEST(RenderScene, LabelerRecoversTruthOnCleanScenes) {
    SceneSpec spec;
    spec.pitch_rad = 0.05;
    spec.yaw_rad = 0.01;
    spec.lane_offsets_m = {-5.4, -1.8, 1.8};
    spec.n_points_per_lane = 14;
    auto truth = lanevp::render_scene(spec);
    for (auto method : {FitMethod::linear(), FitMethod::quadratic(), FitMethod::cubic(),
                        FitMethod::linear_close()})
        EXPECT_LT(vp_error(truth, method), 1e-6) << method.tag();
}

TEST(RenderScene, NoisyScenesStayNearTruth) {
    SceneSpec spec;
    spec.pitch_rad = 0.05;
    spec.lane_offsets_m = {-3.6, 0.0, 3.6};
    spec.point_noise_sigma_px = 1.0;
    spec.seed = 77;
    auto truth = lanevp::render_scene(spec);
    EXPECT_LT(vp_error(truth, FitMethod::linear()), 10.0);
}

TEST(RenderScene, NoiseChangesWithSeedOnly) {
    SceneSpec spec;
    spec.point_noise_sigma_px = 0.8;
    spec.seed = 5;
    auto a = lanevp::render_scene(spec);
    auto b = lanevp::render_scene(spec);
    spec.seed = 6;
    auto c = lanevp::render_scene(spec);

    ASSERT_EQ(a.lanes.lanes.size(), b.lanes.lanes.size());
    bool identical_ab = true, identical_ac = true;
    for (std::size_t l = 0; l < a.lanes.lanes.size(); ++l)
        for (std::size_t p = 0; p < a.lanes.lanes[l].points.size(); ++p) {
            identical_ab &= a.lanes.lanes[l].points[p] == b.lanes.lanes[l].points[p];
            identical_ac &= a.lanes.lanes[l].points[p] == c.lanes.lanes[l].points[p];
        }
    EXPECT_TRUE(identical_ab);
    EXPECT_FALSE(identical_ac);
}

TEST(RenderScene, CloseRangeFittingConvergesOnCurvedLanes) {
    SceneSpec spec;
    spec.pitch_rad = 0.05;
    spec.lane_offsets_m = {-3.6, 0.0, 3.6};
    spec.curvature_inv_m = 0.004;
    spec.n_points_per_lane = 24;
    auto truth = lanevp::render_scene(spec);

    // Wider close bands keep only points nearer the ego vehicle, where the
    // arc is closer to its straight tangent, so the error shrinks.
    double e_all = vp_error(truth, FitMethod::linear());
    double e_mid = vp_error(truth, FitMethod::linear_close(60.0));
    double e_near = vp_error(truth, FitMethod::linear_close(140.0));
    EXPECT_GT(e_all, e_mid);
    EXPECT_GT(e_mid, e_near);
}

TEST(RenderScene, MirroredSceneEqualsMirroredRendering) {
    SceneSpec spec;
    spec.pitch_rad = 0.06;
    spec.yaw_rad = 0.02;
    spec.lane_offsets_m = {-5.4, -1.8, 1.8, 5.4};
    spec.curvature_inv_m = 0.002;
    auto base = lanevp::render_scene(spec);

    SceneSpec mirrored = spec;
    mirrored.yaw_rad = -spec.yaw_rad;
    mirrored.curvature_inv_m = -spec.curvature_inv_m;
    mirrored.lane_offsets_m.clear();
    for (auto it = spec.lane_offsets_m.rbegin(); it != spec.lane_offsets_m.rend(); ++it)
        mirrored.lane_offsets_m.push_back(-*it);
    auto mirror = lanevp::render_scene(mirrored);

    const double w1 = spec.geometry.width - 1.0;
    EXPECT_NEAR(mirror.vp_true.x, w1 - base.vp_true.x, 1e-9);
    EXPECT_NEAR(mirror.vp_true.y, base.vp_true.y, 1e-9);
    ASSERT_EQ(mirror.lanes.lanes.size(), base.lanes.lanes.size());
    const std::size_t n = base.lanes.lanes.size();
    for (std::size_t l = 0; l < n; ++l) {
        const auto& a = base.lanes.lanes[n - 1 - l].points;
        const auto& b = mirror.lanes.lanes[l].points;
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t p = 0; p < a.size(); ++p) {
            EXPECT_NEAR(b[p].x, w1 - a[p].x, 1e-9);
            EXPECT_NEAR(b[p].y, a[p].y, 1e-9);
        }
    }
}

TEST(RenderScene, CameraLookingAwayIsError) {
    SceneSpec spec;
    spec.yaw_rad = 2.5;  // almost backwards
    EXPECT_THROW(lanevp::render_scene(spec), lanevp::Error);
}

TEST(RenderScene, BadSpecsRejected) {
    SceneSpec spec;
    spec.lane_offsets_m = {0.0};
    EXPECT_THROW(lanevp::render_scene(spec), lanevp::ConfigError);
    spec = SceneSpec{};
    spec.focal_px = -1.0;
    EXPECT_THROW(lanevp::render_scene(spec), lanevp::ConfigError);
    spec = SceneSpec{};
    spec.n_points_per_lane = 1;
    EXPECT_THROW(lanevp::render_scene(spec), lanevp::ConfigError);
}

TEST(SceneSuite, CoversTheGridDeterministically) {
    auto suite = lanevp::scene_suite(42);
    EXPECT_GE(suite.size(), 24u);

    auto again = lanevp::scene_suite(42);
    ASSERT_EQ(again.size(), suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) {
        EXPECT_EQ(suite[i].second.vp_true, again[i].second.vp_true);
        ASSERT_EQ(suite[i].second.lanes.lanes.size(), again[i].second.lanes.lanes.size());
        for (std::size_t l = 0; l < suite[i].second.lanes.lanes.size(); ++l)
            for (std::size_t p = 0; p < suite[i].second.lanes.lanes[l].points.size(); ++p)
                EXPECT_EQ(suite[i].second.lanes.lanes[l].points[p],
                          again[i].second.lanes.lanes[l].points[p]);
    }

    int lane_counts[5] = {0};
    int curved = 0, noisy = 0, above_top = 0;
    for (const auto& [spec, truth] : suite) {
        ++lane_counts[spec.lane_offsets_m.size()];
        curved += spec.curvature_inv_m != 0.0;
        noisy += spec.point_noise_sigma_px > 0.0;
        above_top += truth.vp_true.y < 0.0;
    }
    EXPECT_GT(lane_counts[2], 0);
    EXPECT_GT(lane_counts[3], 0);
    EXPECT_GT(lane_counts[4], 0);
    EXPECT_EQ(curved, static_cast<int>(suite.size()) / 2);
    EXPECT_EQ(noisy, static_cast<int>(suite.size()) / 2);
    EXPECT_EQ(above_top, static_cast<int>(suite.size()) / 2);
}

TEST(SceneSuite, CleanStraightScenesLabelWithZeroSpread) {
    for (const auto& [spec, truth] : lanevp::scene_suite(42)) {
        if (spec.curvature_inv_m != 0.0 || spec.point_noise_sigma_px > 0.0) continue;
        auto res = lanevp::label_frame(truth.lanes, FitMethod::linear());
        ASSERT_TRUE(res.label.valid);
        EXPECT_LE(res.label.sigma_x, 1e-9);
        EXPECT_LE(res.label.sigma_y, 1e-9);
    }
}

TEST(SceneSuite, NoiseMonotonicallyDegradesRecovery) {
    auto mean_error_at = [](double noise_sigma) {
        double total = 0.0;
        int n = 0;
        for (int seed = 0; seed < 100; ++seed) {
            SceneSpec spec;
            spec.pitch_rad = 0.05;
            spec.lane_offsets_m = {-3.6, 0.0, 3.6};
            spec.point_noise_sigma_px = noise_sigma;
            spec.seed = static_cast<std::uint64_t>(seed);
            auto truth = lanevp::render_scene(spec);
            auto res = lanevp::label_frame(truth.lanes, FitMethod::linear());
            if (!res.label.valid) continue;
            total += std::hypot(res.label.vp.x - truth.vp_true.x,
                                res.label.vp.y - truth.vp_true.y);
            ++n;
        }
        return total / n;
    };
    double e_small = mean_error_at(0.3);
    double e_large = mean_error_at(2.0);
    EXPECT_LT(e_small, e_large);
}
