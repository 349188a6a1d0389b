#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "v2icalib/affinity.hpp"
#include "v2icalib/errors.hpp"
#include "v2icalib/matching.hpp"

using namespace v2icalib;

namespace {

constexpr double kPi = std::numbers::pi;

Box3D car(double x, double y, double yaw, double l = 4.2, double w = 1.9,
          double h = 1.6) {
  return Box3D(Category::kCar, Eigen::Vector3d(x, y, 0.8),
               Eigen::Vector3d(l, w, h), yaw);
}

/// Applies a yaw-only rigid transform to every box of a scene.
Scene transform_scene(const Scene& scene, double yaw,
                      const Eigen::Vector3d& translation) {
  const Eigen::Matrix3d r = rot_z(yaw);
  Scene out;
  out.frame_id = scene.frame_id;
  for (const Box3D& b : scene.boxes) {
    out.boxes.emplace_back(b.category, r * b.center + translation, b.size,
                           normalize_angle(b.yaw + yaw), b.confidence,
                           b.track_id);
  }
  return out;
}

std::vector<OrientedBox> oriented(const Scene& scene) {
  std::vector<OrientedBox> out;
  for (const Box3D& b : scene.boxes) out.push_back(OrientedBox::from_box(b));
  return out;
}

}  // namespace

TEST_SUITE("affinity") {
  TEST_CASE("overall_iou of a disjoint scene against itself is 1") {
    Scene s;
    s.boxes = {car(0, 0, 0.3), car(20, 5, -1.1), car(-15, 30, 2.0)};
    const auto boxes = oriented(s);
    CHECK(overall_iou(boxes, boxes) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("overall_iou of non-overlapping scenes is 0") {
    Scene a, b;
    a.boxes = {car(0, 0, 0), car(10, 0, 0)};
    b.boxes = {car(500, 500, 0), car(510, 500, 0)};
    CHECK(overall_iou(oriented(a), oriented(b)) == 0.0);
  }

  TEST_CASE("overall_iou normalizes by the larger side") {
    // m=2, n=1: one infra box identical to the vehicle box, one disjoint.
    Scene infra, veh;
    infra.boxes = {car(0, 0, 0.4), car(100, 100, 0.0)};
    veh.boxes = {car(0, 0, 0.4)};
    CHECK(overall_iou(oriented(infra), oriented(veh)) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("overall_iou of empty input is 0") {
    Scene s;
    s.boxes = {car(0, 0, 0)};
    const std::vector<OrientedBox> empty;
    CHECK(overall_iou(empty, oriented(s)) == 0.0);
    CHECK(overall_iou(oriented(s), empty) == 0.0);
  }

  TEST_CASE("overall_iou is invariant under a common rigid transform") {
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<OrientedBox> a, b;
      for (int k = 0; k < 4; ++k) {
        a.push_back(testing::random_box(rng, 12.0));
        b.push_back(testing::random_box(rng, 12.0));
      }
      const double base = overall_iou(a, b);

      const RigidTransform g = testing::random_transform(rng, 40.0);
      std::vector<OrientedBox> ga, gb;
      for (const OrientedBox& x : a) ga.push_back(apply_transform(g, x));
      for (const OrientedBox& x : b) gb.push_back(apply_transform(g, x));
      CHECK(overall_iou(ga, gb) == doctest::Approx(base).epsilon(1e-6));
    }
  }

  TEST_CASE("overall_iou stays within [0, min/max]") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> count(1, 5);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<OrientedBox> a, b;
      const int m = count(rng), n = count(rng);
      for (int k = 0; k < m; ++k) a.push_back(testing::random_box(rng, 6.0));
      for (int k = 0; k < n; ++k) b.push_back(testing::random_box(rng, 6.0));
      const double v = overall_iou(a, b);
      CHECK(v >= 0.0);
      CHECK(v <= static_cast<double>(std::min(m, n)) /
                    static_cast<double>(std::max(m, n)) +
                1e-12);
    }
  }

  TEST_CASE("hypothesis_extrinsics: identical boxes give identity and flip") {
    const Box3D b = car(3.0, -2.0, 0.9);
    const auto candidates = hypothesis_extrinsics(b, b);
    REQUIRE(candidates.size() == 2);

    CHECK((candidates[0].rotation - Eigen::Matrix3d::Identity()).norm() <
          1e-12);
    CHECK(candidates[0].translation.norm() < 1e-12);

    // Second candidate flips heading by pi about the shared center.
    const Eigen::Matrix3d flip = rot_z(kPi);
    CHECK((candidates[1].rotation - flip).norm() < 1e-9);
    CHECK((candidates[1].translation - (b.center - flip * b.center)).norm() <
          1e-9);
  }

  TEST_CASE("hypothesis_extrinsics: every candidate maps the box onto the target") {
    // A pi heading flip (or quarter turn on a square footprint) maps a box
    // onto itself, so all candidates must align the pair at IoU ~ 1.
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Box3D b_inf = car(10 * unit(rng), 10 * unit(rng), kPi * unit(rng));
      const double yaw = kPi * unit(rng);
      const Eigen::Vector3d t(20 * unit(rng), 20 * unit(rng), 2 * unit(rng));
      Scene tmp;
      tmp.boxes = {b_inf};
      const Box3D b_veh = transform_scene(tmp, yaw, t).boxes[0];

      for (const RigidTransform& cand : hypothesis_extrinsics(b_inf, b_veh)) {
        const OrientedBox moved = apply_transform(cand, b_inf);
        CHECK(iou_3d(moved, OrientedBox::from_box(b_veh)) >= 1.0 - 1e-6);
      }
    }
  }

  TEST_CASE("hypothesis_extrinsics recovers a constructed yaw-only transform") {
    const Box3D b_inf = car(4.0, 7.0, -0.6);
    const double yaw = 0.7;
    const Eigen::Vector3d t(5.0, -3.0, 0.4);
    Scene tmp;
    tmp.boxes = {b_inf};
    const Box3D b_veh = transform_scene(tmp, yaw, t).boxes[0];

    const Eigen::Matrix3d r_true = rot_z(yaw);
    double best = std::numeric_limits<double>::infinity();
    for (const RigidTransform& cand : hypothesis_extrinsics(b_inf, b_veh)) {
      best = std::min(best, (cand.rotation - r_true).norm() +
                                (cand.translation - t).norm());
    }
    CHECK(best < 1e-9);
  }

  TEST_CASE("hypothesis_extrinsics: square footprints add quarter turns") {
    const Box3D square(Category::kOther, Eigen::Vector3d(1, 2, 0.5),
                       Eigen::Vector3d(2.0, 2.0, 1.0), 0.3);
    CHECK(hypothesis_extrinsics(square, square).size() == 4);

    const Box3D elongated = car(0, 0, 0.0);
    CHECK(hypothesis_extrinsics(elongated, elongated).size() == 2);
  }

  TEST_CASE("core_affinity: single matching pair scores 1 with the true transform") {
    Scene infra;
    infra.frame_id = "inf";
    infra.boxes = {car(12.0, -4.0, 1.2)};
    const double yaw = -0.8;
    const Eigen::Vector3d t(30.0, 12.0, 0.6);
    const Scene veh = transform_scene(infra, yaw, t);

    const AffinityMatrix a = core_affinity(infra, veh, StrategyConfig{});
    REQUIRE(a.rows() == 1);
    REQUIRE(a.cols() == 1);
    CHECK(a.values(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(a.hypothesis(0, 0).has_value());
    CHECK((a.hypothesis(0, 0)->rotation - rot_z(yaw)).norm() < 1e-9);
    CHECK((a.hypothesis(0, 0)->translation - t).norm() < 1e-9);
  }

  TEST_CASE("core_affinity masks mismatched categories") {
    Scene infra, veh;
    infra.boxes = {car(0, 0, 0)};
    veh.boxes = {Box3D(Category::kPedestrian, Eigen::Vector3d(0, 0, 0.9),
                       Eigen::Vector3d(0.6, 0.7, 1.8), 0.0)};
    const AffinityMatrix a = core_affinity(infra, veh, StrategyConfig{});
    CHECK(a.values(0, 0) == 0.0);
    CHECK_FALSE(a.hypothesis(0, 0).has_value());

    StrategyConfig unmasked;
    unmasked.affinity_kind = AffinityKind::kCoreOnly;
    const AffinityMatrix b = core_affinity(infra, veh, unmasked);
    CHECK(b.hypothesis(0, 0).has_value());
  }

  TEST_CASE("core_affinity: identical scene has unit diagonal, weaker off-diagonal") {
    Scene s;
    s.frame_id = "both";
    s.boxes = {car(0, 0, 0.2), car(18, 6, 1.4), car(-12, 25, -2.3)};
    const AffinityMatrix a = core_affinity(s, s, StrategyConfig{});
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        if (i == j) {
          CHECK(a.values(i, j) == doctest::Approx(1.0).epsilon(1e-9));
        } else {
          CHECK(a.values(i, j) < 0.999);
        }
        CHECK(a.values(i, j) >= 0.0);
        CHECK(a.values(i, j) <= 1.0 + 1e-12);
      }
    }
  }

  TEST_CASE("core_affinity: row argmax recovers the true correspondence") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> length(3.5, 5.0);
    std::uniform_real_distribution<double> width(1.6, 2.1);
    for (int trial = 0; trial < 8; ++trial) {
      Scene infra;
      infra.frame_id = "inf";
      for (int k = 0; k < 5; ++k) {
        // Grid placement keeps boxes pairwise disjoint; elongated
        // footprints keep the heading unambiguous.
        infra.boxes.push_back(car(15.0 * k + 3.0 * unit(rng),
                                  11.0 * (k % 2) + 3.0 * unit(rng),
                                  kPi * unit(rng), length(rng), width(rng)));
      }
      const double yaw = kPi * unit(rng);
      const Eigen::Vector3d t(40 * unit(rng), 40 * unit(rng), unit(rng));
      Scene veh = transform_scene(infra, yaw, t);

      // Rotate the vehicle list so the correspondence is not the identity.
      std::rotate(veh.boxes.begin(), veh.boxes.begin() + 2, veh.boxes.end());
      const auto expected_col = [](Eigen::Index i) {
        return (i + 3) % 5;  // inverse of rotating left by 2
      };

      const AffinityMatrix a = core_affinity(infra, veh, StrategyConfig{});
      for (Eigen::Index i = 0; i < 5; ++i) {
        Eigen::Index argmax = -1;
        a.values.row(i).maxCoeff(&argmax);
        CHECK(argmax == expected_col(i));
      }
    }
  }

  TEST_CASE("core_affinity applies confidence weighting when asked") {
    Scene infra;
    infra.boxes = {Box3D(Category::kCar, Eigen::Vector3d::Zero(),
                         Eigen::Vector3d(4.2, 1.9, 1.6), 0.0, 0.8)};
    Scene veh;
    veh.boxes = {Box3D(Category::kCar, Eigen::Vector3d::Zero(),
                       Eigen::Vector3d(4.2, 1.9, 1.6), 0.0, 0.5)};

    StrategyConfig weighted;
    weighted.use_confidence_weighting = true;
    const AffinityMatrix a = core_affinity(infra, veh, weighted);
    CHECK(a.values(0, 0) == doctest::Approx(0.4).epsilon(1e-9));
  }

  TEST_CASE("core_affinity rejects empty scenes") {
    Scene empty, full;
    full.boxes = {car(0, 0, 0)};
    CHECK_THROWS_AS(core_affinity(empty, full, StrategyConfig{}), EmptyScene);
    CHECK_THROWS_AS(core_affinity(full, empty, StrategyConfig{}), EmptyScene);
  }

  TEST_CASE("edge affinities are 1 across a rigid pair") {
    Scene infra;
    infra.boxes = {car(0, 0, 0.1), car(14, 3, 1.0), car(-8, 20, -2.0)};
    const Scene veh = transform_scene(infra, 1.3, {25, -40, 0.2});

    const EdgeAffinity len = length_affinity(infra, veh);
    const EdgeAffinity ang = angle_affinity(infra, veh);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        if (i == j) continue;
        CHECK(len(i, j, i, j) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ang(i, j, i, j) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("length affinity: 10 m vs 12 m at sigma 2 gives exp(-1)") {
    Scene infra, veh;
    infra.boxes = {car(0, 0, 0), car(10, 0, 0)};
    veh.boxes = {car(0, 0, 0), car(12, 0, 0)};
    const EdgeAffinity len = length_affinity(infra, veh, 2.0);
    CHECK(len(0, 1, 0, 1) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-12));
  }

  TEST_CASE("angle affinity compares relative yaw on the circle") {
    Scene infra, veh;
    infra.boxes = {car(0, 0, -3.0), car(10, 0, 3.0)};  // relative yaw wraps
    veh.boxes = {car(0, 0, 0.0), car(10, 0, normalize_angle(6.0))};
    const EdgeAffinity ang = angle_affinity(infra, veh, 0.2);
    CHECK(ang(0, 1, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));

    Scene veh2;
    veh2.boxes = {car(0, 0, 0.0), car(10, 0, normalize_angle(6.0) + 0.2)};
    const EdgeAffinity ang2 = angle_affinity(infra, veh2, 0.2);
    CHECK(ang2(0, 1, 0, 1) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-9));
  }

  TEST_CASE("edge affinities require two boxes per side") {
    Scene one, two;
    one.boxes = {car(0, 0, 0)};
    two.boxes = {car(0, 0, 0), car(10, 0, 0)};
    CHECK_THROWS_AS(length_affinity(one, two), InsufficientBoxes);
    CHECK_THROWS_AS(angle_affinity(two, one), InsufficientBoxes);
  }

  TEST_CASE("fuse_affinity with weight 0 returns K_p unchanged") {
    Scene infra;
    infra.boxes = {car(0, 0, 0.1), car(14, 3, 1.0)};
    const Scene veh = transform_scene(infra, 0.4, {10, 5, 0});
    const StrategyConfig config;  // edge_fusion_weight = 0

    const AffinityMatrix k_p = core_affinity(infra, veh, config);
    const EdgeAffinity k_q = length_affinity(infra, veh);
    const AffinityMatrix fused = fuse_affinity(k_p, k_q, config);
    CHECK((fused.values - k_p.values).norm() == 0.0);
  }

  TEST_CASE("fuse_affinity with weight 1 and perfect edges gives 1") {
    Scene infra;
    infra.boxes = {car(0, 0, 0.0), car(14, 3, 0.0)};
    const Scene veh = transform_scene(infra, 0.0, {3, 1, 0});

    StrategyConfig config;
    config.edge_fusion_weight = 1.0;
    const AffinityMatrix k_p = category_affinity(infra, veh, config);
    const EdgeAffinity k_q = length_affinity(infra, veh);
    const AffinityMatrix fused = fuse_affinity(k_p, k_q, config);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j)
        CHECK(fused.values(i, j) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("fuse_affinity hand example: 0.5*0.8 + 0.5*0.6 = 0.7") {
    // Two-box scenes: the only endpoint-consistent edge pair for entry
    // (0,0) is ((0,1),(0,1)). Pick distances so its affinity is 0.6.
    const double delta = -2.0 * std::log(0.6);
    Scene infra, veh;
    infra.boxes = {car(0, 0, 0), car(10, 0, 0)};
    veh.boxes = {car(0, 0, 0), car(10 + delta, 0, 0)};

    StrategyConfig config;
    config.edge_fusion_weight = 0.5;
    AffinityMatrix k_p = category_affinity(infra, veh, config);
    k_p.values.setConstant(0.8);
    const EdgeAffinity k_q = length_affinity(infra, veh, 2.0);
    const AffinityMatrix fused = fuse_affinity(k_p, k_q, config);
    CHECK(fused.values(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
  }

  TEST_CASE("fuse_affinity keeps category-masked entries at exactly 0") {
    Scene infra, veh;
    infra.boxes = {car(0, 0, 0),
                   Box3D(Category::kPedestrian, Eigen::Vector3d(8, 0, 0.9),
                         Eigen::Vector3d(0.6, 0.7, 1.8), 0.0)};
    veh.boxes = {car(1, 0, 0),
                 Box3D(Category::kPedestrian, Eigen::Vector3d(9, 0, 0.9),
                       Eigen::Vector3d(0.6, 0.7, 1.8), 0.0)};

    StrategyConfig config;
    config.edge_fusion_weight = 1.0;
    const AffinityMatrix k_p = category_affinity(infra, veh, config);
    const EdgeAffinity k_q = length_affinity(infra, veh);
    const AffinityMatrix fused = fuse_affinity(k_p, k_q, config);
    CHECK(fused.values(0, 1) == 0.0);
    CHECK(fused.values(1, 0) == 0.0);
    CHECK_FALSE(fused.hypothesis(0, 1).has_value());
    CHECK(fused.values(0, 0) > 0.9);
  }

  TEST_CASE("fuse_affinity rejects inconsistent dimensions") {
    Scene infra, veh, other;
    infra.boxes = {car(0, 0, 0), car(10, 0, 0)};
    veh.boxes = {car(0, 0, 0), car(10, 0, 0)};
    other.boxes = {car(0, 0, 0), car(10, 0, 0), car(20, 0, 0)};

    const AffinityMatrix k_p = category_affinity(infra, veh, StrategyConfig{});
    const EdgeAffinity k_q = length_affinity(infra, other);
    CHECK_THROWS_AS(fuse_affinity(k_p, k_q, StrategyConfig{}),
                    DimensionMismatch);
  }

  TEST_CASE("scaled affinities keep the same assignment argmax") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Scene infra;
    for (int k = 0; k < 4; ++k)
      infra.boxes.push_back(car(16.0 * k, 7.0 * (k % 2), kPi * unit(rng)));
    const Scene veh = transform_scene(infra, 0.9, {12, -6, 0.3});

    AffinityMatrix a = core_affinity(infra, veh, StrategyConfig{});
    const auto base = solve_assignment(a.values);
    CHECK(solve_assignment(0.125 * a.values) == base);
    CHECK(solve_assignment(40.0 * a.values) == base);
  }
}
