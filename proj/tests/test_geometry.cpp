#include "v2icalib/geometry.hpp"

#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "v2icalib/types.hpp"

using namespace v2icalib;

namespace {

Box3D make_box(double cx, double cy, double cz, double l, double w, double h,
               double yaw, Category cat = Category::kCar) {
  return Box3D(cat, {cx, cy, cz}, {l, w, h}, yaw);
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("box_vertices: unit cube at origin follows the canonical order") {
  const auto v = box_vertices(make_box(0, 0, 0, 1, 1, 1, 0));
  const double expected[8][3] = {
      {+0.5, +0.5, -0.5}, {+0.5, -0.5, -0.5}, {-0.5, -0.5, -0.5},
      {-0.5, +0.5, -0.5}, {+0.5, +0.5, +0.5}, {+0.5, -0.5, +0.5},
      {-0.5, -0.5, +0.5}, {-0.5, +0.5, +0.5},
  };
  for (int k = 0; k < 8; ++k) {
    CHECK(v[k].x() == doctest::Approx(expected[k][0]).epsilon(1e-12));
    CHECK(v[k].y() == doctest::Approx(expected[k][1]).epsilon(1e-12));
    CHECK(v[k].z() == doctest::Approx(expected[k][2]).epsilon(1e-12));
  }
}

TEST_CASE("box_vertices: yaw pi/2 rotates footprint, keeps heights") {
  const auto v0 = box_vertices(make_box(0, 0, 0, 1, 1, 1, 0));
  const auto v = box_vertices(make_box(0, 0, 0, 1, 1, 1, M_PI / 2));
  for (int k = 0; k < 8; ++k) {
    // (x, y) -> (-y, x)
    CHECK(v[k].x() == doctest::Approx(-v0[k].y()).epsilon(1e-12));
    CHECK(v[k].y() == doctest::Approx(v0[k].x()).epsilon(1e-12));
    CHECK(v[k].z() == doctest::Approx(v0[k].z()).epsilon(1e-12));
  }
}

TEST_CASE("box_vertices: axis-aligned box spans center +- half sizes") {
  const auto v = box_vertices(make_box(10, 0, 1, 4, 2, 1.5, 0));
  for (const auto& p : v) {
    CHECK(std::abs(std::abs(p.x() - 10.0) - 2.0) < 1e-12);
    CHECK(std::abs(std::abs(p.y()) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(p.z() - 1.0) - 0.75) < 1e-12);
  }
}

TEST_CASE("heading permutations relabel the same physical corners") {
  const Box3D box = make_box(3, -2, 0.8, 4.2, 1.8, 1.5, 0.7);
  const auto base = box_vertices(box);

  Box3D flipped = box;
  flipped.yaw = normalize_angle(box.yaw + M_PI);
  const auto fv = box_vertices(flipped);
  for (int k = 0; k < 8; ++k) {
    CHECK((fv[k] - base[kVertexPermYawPi[k]]).norm() < 1e-12);
  }

  // Quarter turns are only valid relabelings for square footprints.
  Box3D square = make_box(1, 1, 0, 2, 2, 1, 0.3);
  const auto sq = box_vertices(square);
  Box3D quarter = square;
  quarter.yaw = normalize_angle(square.yaw + M_PI / 2);
  const auto qv = box_vertices(quarter);
  for (int k = 0; k < 8; ++k) {
    CHECK((qv[k] - sq[kVertexPermYawHalfPi[k]]).norm() < 1e-12);
  }
  Box3D neg_quarter = square;
  neg_quarter.yaw = normalize_angle(square.yaw - M_PI / 2);
  const auto nv = box_vertices(neg_quarter);
  for (int k = 0; k < 8; ++k) {
    CHECK((nv[k] - sq[kVertexPermYawNegHalfPi[k]]).norm() < 1e-12);
  }
}

TEST_CASE("apply_transform: identity keeps vertices") {
  const Box3D box = make_box(1, 2, 3, 4, 2, 1.5, 0.4);
  const auto ob = apply_transform(RigidTransform::identity(), box);
  const auto va = box_vertices(box);
  const auto vb = box_vertices(ob);
  for (int k = 0; k < 8; ++k) CHECK((va[k] - vb[k]).norm() < 1e-12);
}

TEST_CASE("apply_transform: pure translation shifts the center only") {
  const Box3D box = make_box(1, 2, 3, 4, 2, 1.5, 0.4);
  RigidTransform t;
  t.translation = {1, 2, 3};
  const auto ob = apply_transform(t, box);
  CHECK((ob.center - Eigen::Vector3d(2, 4, 6)).norm() < 1e-12);
  CHECK((ob.rotation - rot_z(box.yaw)).norm() < 1e-12);
}

TEST_CASE("apply_transform: 90 degree yaw moves and turns the box") {
  const Box3D box = make_box(1, 0, 0, 4, 2, 1.5, 0.2);
  const auto ob = apply_transform(rotation_z(M_PI / 2), box);
  CHECK((ob.center - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  CHECK((ob.rotation - rot_z(box.yaw + M_PI / 2)).norm() < 1e-12);
}

TEST_CASE("vertices commute with transforms, order preserved") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_transform(gen);
    const Box3D box = make_box(2, -1, 0.5, 4.4, 1.9, 1.6, 1.2);
    const auto direct = box_vertices(apply_transform(t, box));
    const auto base = box_vertices(box);
    for (int k = 0; k < 8; ++k) {
      CHECK((direct[k] - t.apply(base[k])).norm() < 1e-9);
    }
  }
}

TEST_CASE("iou_3d: identical boxes give 1") {
  const Box3D box = make_box(0, 0, 0, 1, 1, 1, 0);
  CHECK(iou_3d(box, box) == doctest::Approx(1.0).epsilon(1e-9));
  const Box3D yawed = make_box(5, 3, 1, 4.3, 1.8, 1.5, 0.9);
  CHECK(iou_3d(yawed, yawed) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("iou_3d: unit cubes offset by 0.5 along x give 1/3") {
  const Box3D a = make_box(0, 0, 0, 1, 1, 1, 0);
  const Box3D b = make_box(0.5, 0, 0, 1, 1, 1, 0);
  CHECK(iou_3d(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("iou_3d: concentric unit cubes at 45 degrees give 1/sqrt(2)") {
  const Box3D a = make_box(0, 0, 0, 1, 1, 1, 0);
  const Box3D b = make_box(0, 0, 0, 1, 1, 1, M_PI / 4);
  // Octagonal footprint: intersection area 2(sqrt(2)-1), full height overlap,
  // so IoU = 1/sqrt(2). Cross-checked by Monte-Carlo below.
  const double expected = 1.0 / std::sqrt(2.0);
  const double got = iou_3d(a, b);
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));
  const double mc = testing::mc_iou(OrientedBox::from_box(a),
                                    OrientedBox::from_box(b), 10'000'000, 7);
  CHECK(std::abs(got - mc) < 1e-3);
}

TEST_CASE("iou_3d: disjoint boxes give 0") {
  const Box3D a = make_box(0, 0, 0, 1, 1, 1, 0);
  const Box3D b = make_box(10, 0, 0, 1, 1, 1, 0.3);
  CHECK(iou_3d(a, b) == 0.0);
  // Touching faces share zero volume.
  const Box3D c = make_box(1, 0, 0, 1, 1, 1, 0);
  CHECK(iou_3d(a, c) == 0.0);
}

TEST_CASE("iou_3d: symmetry, range and rigid invariance") {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = testing::random_box(gen, 2.0);
    const auto b = testing::random_box(gen, 2.0);
    const double ab = iou_3d(a, b);
    const double ba = iou_3d(b, a);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));

    const auto g = testing::random_transform(gen, 50.0);
    const double moved = iou_3d(apply_transform(g, a), apply_transform(g, b));
    CHECK(moved == doctest::Approx(ab).epsilon(1e-6));
  }
}

TEST_CASE("iou_3d agrees with the Monte-Carlo volume oracle") {
  std::mt19937_64 gen(2024);
  int nonzero = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = testing::random_box(gen, 1.5);
    const auto b = testing::random_box(gen, 1.5);
    const double exact = iou_3d(a, b);
    const double mc = testing::mc_iou(a, b, 1'000'000, 1000 + trial);
    CHECK(std::abs(exact - mc) < 1e-2);
    if (exact > 0.0) ++nonzero;
  }
  CHECK(nonzero > 10);  // the sampling spread must actually exercise overlap
}

TEST_CASE("compose and inverse behave as SE(3) group operations") {
  std::mt19937_64 gen(9);
  const auto t = testing::random_transform(gen);
  const auto id = RigidTransform::identity();

  SUBCASE("compose with identity") {
    const auto c = compose(id, t);
    CHECK((c.rotation - t.rotation).norm() < 1e-12);
    CHECK((c.translation - t.translation).norm() < 1e-12);
  }
  SUBCASE("inverse of a pure translation negates it") {
    RigidTransform tr;
    tr.translation = {1, 2, 3};
    const auto inv = tr.inverse();
    CHECK((inv.translation - Eigen::Vector3d(-1, -2, -3)).norm() < 1e-12);
  }
  SUBCASE("compose(T, inverse(T)) is the identity") {
    const auto c = compose(t, t.inverse());
    CHECK((c.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK(c.translation.norm() < 1e-9);
  }
  SUBCASE("compose matches the homogeneous 4x4 product") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = testing::random_transform(gen);
      const auto b = testing::random_transform(gen);
      const Eigen::Matrix4d expected = a.matrix() * b.matrix();
      CHECK((compose(a, b).matrix() - expected).norm() < 1e-12);
    }
  }
}

TEST_CASE("Box3D constructor enforces invariants") {
  CHECK_THROWS_AS(make_box(0, 0, 0, -1, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Box3D(Category::kCar, {0, 0, 0}, {1, 1, 1}, 0, 1.5),
                  std::invalid_argument);
  const Box3D b = make_box(0, 0, 0, 1, 1, 1, 3 * M_PI);
  CHECK(b.yaw == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
}

TEST_SUITE_END();
