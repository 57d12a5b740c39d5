#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanevp/rng.hpp"
#include "lanevp/types.hpp"

namespace lanevp {

/// Pinhole road scene with an analytically known vanishing point.
/// World frame: X right, Y forward (travel direction), Z up; the camera
/// sits at (0, 0, camera_height_m). Positive pitch tilts the camera down,
/// positive yaw pans it toward +X. Lanes are ground-plane centerlines at
/// the given lateral offsets, straight or constant-curvature arcs.
struct SceneSpec {
    ImageGeometry geometry{1640, 590};
    double focal_px = 1000.0;
    std::optional<Point2> principal;  // defaults to the raster center
    double pitch_rad = 0.0;
    double yaw_rad = 0.0;
    double camera_height_m = 1.5;
    std::vector<double> lane_offsets_m{-1.8, 1.8};
    double curvature_inv_m = 0.0;  // signed; 0 = straight
    double point_noise_sigma_px = 0.0;
    int n_points_per_lane = 12;
    double near_distance_m = 5.0;
    double far_distance_m = 300.0;
    std::uint64_t seed = 0;

    Point2 principal_point() const {
        if (principal) return *principal;
        return {(geometry.width - 1) / 2.0, (geometry.height - 1) / 2.0};
    }

    void validate() const {
        if (!geometry.valid()) throw ConfigError("scene geometry must be positive");
        if (focal_px <= 0.0) throw ConfigError("focal length must be positive");
        if (camera_height_m <= 0.0) throw ConfigError("camera must sit above the ground plane");
        if (lane_offsets_m.size() < 2) throw ConfigError("a scene needs at least 2 lanes");
        if (n_points_per_lane < 2) throw ConfigError("need at least 2 points per lane");
        if (!(near_distance_m > 0.0) || far_distance_m <= near_distance_m)
            throw ConfigError("need 0 < near_distance < far_distance");
    }
};

struct SceneTruth {
    Point2 vp_true;  // image of the straight travel direction
    FrameAnnotation lanes;
};

namespace detail {

struct Vec3 {
    double x, y, z;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

struct CameraFrame {
    Vec3 right, down, forward;
    Vec3 center;
    double focal;
    Point2 principal;

    std::optional<Point2> project(const Vec3& p) const {
        Vec3 d{p.x - center.x, p.y - center.y, p.z - center.z};
        double w = dot(d, forward);
        if (w <= 1e-9) return std::nullopt;
        return Point2{principal.x + focal * dot(d, right) / w,
                      principal.y + focal * dot(d, down) / w};
    }

    std::optional<Point2> vanishing_point(const Vec3& dir) const {
        double w = dot(dir, forward);
        if (w <= 1e-12) return std::nullopt;
        return Point2{principal.x + focal * dot(dir, right) / w,
                      principal.y + focal * dot(dir, down) / w};
    }
};

inline CameraFrame make_camera(const SceneSpec& spec) {
    const double cp = std::cos(spec.pitch_rad), sp = std::sin(spec.pitch_rad);
    const double cy = std::cos(spec.yaw_rad), sy = std::sin(spec.yaw_rad);
    Vec3 forward0{sy, cy, 0.0};
    Vec3 right0{cy, -sy, 0.0};
    Vec3 up0{0.0, 0.0, 1.0};
    // Pitch rotates in the (forward, up) plane, positive toward the ground.
    Vec3 forward{cp * forward0.x - sp * up0.x, cp * forward0.y - sp * up0.y,
                 cp * forward0.z - sp * up0.z};
    Vec3 up{sp * forward0.x + cp * up0.x, sp * forward0.y + cp * up0.y,
            sp * forward0.z + cp * up0.z};
    CameraFrame cam;
    cam.right = right0;
    cam.down = {-up.x, -up.y, -up.z};
    cam.forward = forward;
    cam.center = {0.0, 0.0, spec.camera_height_m};
    cam.focal = spec.focal_px;
    cam.principal = spec.principal_point();
    return cam;
}

/// Ground-plane centerline point at arc length t for a lane starting at
/// lateral offset `offset`, heading +Y, with constant curvature.
inline Vec3 lane_point(double offset, double curvature, double t) {
    if (curvature == 0.0) return {offset, t, 0.0};
    return {offset + (1.0 - std::cos(curvature * t)) / curvature,
            std::sin(curvature * t) / curvature, 0.0};
}

}  // namespace detail

/// Render the scene: project each lane centerline, keep in-frame samples,
/// thin them to n_points_per_lane, apply pixel noise, and report the
/// analytic VP of the straight travel direction. Lanes with fewer than two
/// visible samples are dropped; a frame with no visible lane is an error.
inline SceneTruth render_scene(const SceneSpec& spec) {
    spec.validate();
    const detail::CameraFrame cam = detail::make_camera(spec);

    auto vp = cam.vanishing_point({0.0, 1.0, 0.0});
    if (!vp) throw Error("render_scene: camera looks away from the travel direction");

    SceneTruth truth;
    truth.vp_true = *vp;
    truth.lanes.geometry = spec.geometry;

    Rng rng(spec.seed);
    const int kSweepSteps = 512;
    const double log_near = std::log(spec.near_distance_m);
    const double log_far = std::log(spec.far_distance_m);

    int next_id = 0;
    for (std::size_t li = 0; li < spec.lane_offsets_m.size(); ++li) {
        std::vector<Point2> visible;
        for (int i = 0; i < kSweepSteps; ++i) {
            double t = std::exp(log_near + (log_far - log_near) * i / (kSweepSteps - 1));
            auto img = cam.project(detail::lane_point(spec.lane_offsets_m[li],
                                                      spec.curvature_inv_m, t));
            if (!img) continue;
            if (img->x < 0.0 || img->x > spec.geometry.width - 1.0 || img->y < 0.0 ||
                img->y > spec.geometry.height - 1.0)
                continue;
            visible.push_back(*img);
        }
        if (visible.size() < 2) continue;

        LanePolyline lane;
        lane.lane_id = next_id;
        const int n = std::min<int>(spec.n_points_per_lane, static_cast<int>(visible.size()));
        Rng lane_rng = rng.derive(li);
        for (int i = 0; i < n; ++i) {
            std::size_t idx = (static_cast<std::size_t>(i) * (visible.size() - 1)) / (n - 1);
            Point2 p = visible[idx];
            if (spec.point_noise_sigma_px > 0.0) {
                p.x += spec.point_noise_sigma_px * lane_rng.gaussian();
                p.y += spec.point_noise_sigma_px * lane_rng.gaussian();
            }
            lane.points.push_back(p);
        }
        std::stable_sort(lane.points.begin(), lane.points.end(),
                         [](const Point2& a, const Point2& b) { return a.y < b.y; });
        ++next_id;
        truth.lanes.lanes.push_back(std::move(lane));
    }
    if (truth.lanes.lanes.empty()) throw Error("render_scene: no lane visible in the frame");
    return truth;
}

/// Deterministic battery of scenes: 2/3/4 lanes, straight and curved,
/// clean and noisy, VP near the image top and above it. Identical seeds
/// produce identical suites.
inline std::vector<std::pair<SceneSpec, SceneTruth>> scene_suite(std::uint64_t seed) {
    std::vector<std::pair<SceneSpec, SceneTruth>> suite;
    Rng master(seed);

    const ImageGeometry geom{1640, 590};
    const double focal = 1000.0;
    const Point2 pp{(geom.width - 1) / 2.0, (geom.height - 1) / 2.0};
    int k = 0;
    for (int n_lanes : {2, 3, 4}) {
        for (bool curved : {false, true}) {
            for (bool noisy : {false, true}) {
                for (bool vp_above_top : {false, true}) {
                    SceneSpec spec;
                    spec.geometry = geom;
                    spec.focal_px = focal;
                    spec.camera_height_m = 1.5;
                    // Place the straight-direction VP near the top of the
                    // frame, or above it.
                    double target_y = vp_above_top ? -0.07 * geom.height : 0.12 * geom.height;
                    spec.pitch_rad = std::atan((pp.y - target_y) / focal);
                    spec.yaw_rad = (k % 2 == 0) ? 0.0 : 0.015;
                    if (n_lanes == 2)
                        spec.lane_offsets_m = {-1.8, 1.8};
                    else if (n_lanes == 3)
                        spec.lane_offsets_m = {-3.6, 0.0, 3.6};
                    else
                        spec.lane_offsets_m = {-5.4, -1.8, 1.8, 5.4};
                    spec.curvature_inv_m = curved ? 0.003 : 0.0;
                    spec.point_noise_sigma_px = noisy ? 1.0 : 0.0;
                    spec.n_points_per_lane = 14;
                    spec.seed = master.derive(static_cast<std::uint64_t>(k)).next_u64();
                    suite.emplace_back(spec, render_scene(spec));
                    ++k;
                }
            }
        }
    }
    return suite;
}

}  // namespace lanevp
