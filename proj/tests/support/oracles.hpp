// Independent oracles used by the test suites. Everything here recomputes
// expected values through a different route than the library code under test.
#ifndef V2ICALIB_TESTS_ORACLES_HPP
#define V2ICALIB_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "v2icalib/geometry.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib::testing {

/// Monte-Carlo IoU: sample uniformly inside box a, count hits in box b.
/// Intersection volume = Vol(a) * hit fraction.
inline double mc_iou(const OrientedBox& a, const OrientedBox& b,
                     std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Eigen::Vector3d local(unit(gen) * a.size.x(), unit(gen) * a.size.y(),
                                unit(gen) * a.size.z());
    if (contains(b, a.rotation * local + a.center)) ++hits;
  }
  const double va = a.volume();
  const double vb = b.volume();
  const double vi = va * static_cast<double>(hits) / samples;
  if (vi <= 0.0) return 0.0;
  return vi / (va + vb - vi);
}

/// Maximum assignment weight by brute force over all injections of the
/// smaller side into the larger one.
inline double brute_force_assignment_weight(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const bool rows_small = m <= n;
  const int small = rows_small ? m : n;
  const int large = rows_small ? n : m;
  std::vector<int> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double w = 0.0;
    for (int i = 0; i < small; ++i) {
      w += rows_small ? a(i, perm[i]) : a(perm[i], i);
    }
    best = std::max(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Geodesic angle between rotations via the quaternion route, in degrees.
/// atan2 of the relative quaternion keeps full precision at tiny angles,
/// where the acos-of-dot form bottoms out near 1e-6 degrees.
inline double quaternion_angle_deg(const Eigen::Matrix3d& r_true,
                                   const Eigen::Matrix3d& r_est) {
  const Eigen::Quaterniond qa(r_true);
  const Eigen::Quaterniond qb(r_est);
  const Eigen::Quaterniond qe = qa.conjugate() * qb;
  return 2.0 * std::atan2(qe.vec().norm(), std::abs(qe.w())) * 180.0 / M_PI;
}

/// Uniform random proper rotation (Shoemake quaternion sampling).
inline Eigen::Matrix3d random_rotation(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(gen), u2 = unit(gen), u3 = unit(gen);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(a * std::sin(2 * M_PI * u2),
                             a * std::cos(2 * M_PI * u2),
                             b * std::sin(2 * M_PI * u3),
                             b * std::cos(2 * M_PI * u3));
  return q.normalized().toRotationMatrix();
}

inline RigidTransform random_transform(std::mt19937_64& gen,
                                       double translation_scale = 10.0) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RigidTransform t;
  t.rotation = random_rotation(gen);
  t.translation = translation_scale * Eigen::Vector3d(unit(gen), unit(gen),
                                                      unit(gen));
  return t;
}

inline OrientedBox random_box(std::mt19937_64& gen, double center_spread,
                              bool full_rotation = true) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> size_dist(0.5, 5.0);
  OrientedBox b;
  b.center = center_spread * Eigen::Vector3d(unit(gen), unit(gen), unit(gen));
  b.size = Eigen::Vector3d(size_dist(gen), size_dist(gen), size_dist(gen));
  b.rotation = full_rotation
                   ? random_rotation(gen)
                   : rot_z(M_PI * std::uniform_real_distribution<double>(
                               -1.0, 1.0)(gen));
  return b;
}

}  // namespace v2icalib::testing

#endif  // V2ICALIB_TESTS_ORACLES_HPP
