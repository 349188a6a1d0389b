#ifndef V2ICALIB_AFFINITY_HPP
#define V2ICALIB_AFFINITY_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "v2icalib/geometry.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

/// Which affinities feed the vehicle-infrastructure matrix.
enum class AffinityKind {
  kCoreCategory,         // oIoU-scored hypothesis pairs, category-masked
  kCoreOnly,             // same, but every pair is hypothesized
  kAngleCategory,        // relative-yaw edge affinity, category-masked
  kLengthCategory,       // inter-center distance edge affinity, masked
  kLengthAngleCategory,  // product of the two edge affinities, masked
};

std::string_view to_string(AffinityKind kind);
AffinityKind affinity_kind_from_string(std::string_view name);

/// Everything a calibration run needs to know about strategy choices.
/// Presets v1/v2/v3 (see pipeline.hpp) are prefilled instances of this.
struct StrategyConfig {
  AffinityKind affinity_kind = AffinityKind::kCoreCategory;
  bool use_confidence_weighting = false;
  double oiou_gate = 0.3;          // match acceptance threshold
  double edge_fusion_weight = 0.0; // w in A = (1-w) Kp + w mean(Kq)
  double sigma_length = 2.0;       // meters
  double sigma_angle = 0.2;        // radians
  bool use_refinement = true;
  int refine_max_iterations = 30;
  double refine_convergence_tol = 1e-4;  // meters
};

/**
 * @brief m x n pairwise affinity between infrastructure boxes (rows) and
 * vehicle boxes (columns), plus the best hypothesis transform per entry.
 *
 * Category-mismatched entries are exactly 0 and carry no hypothesis.
 */
struct AffinityMatrix {
  Eigen::MatrixXd values;
  std::vector<std::optional<RigidTransform>> hypotheses;  // row-major m*n

  AffinityMatrix() = default;
  AffinityMatrix(Eigen::Index rows, Eigen::Index cols)
      : values(Eigen::MatrixXd::Zero(rows, cols)),
        hypotheses(static_cast<std::size_t>(rows * cols)) {}

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  std::optional<RigidTransform>& hypothesis(Eigen::Index i, Eigen::Index j) {
    return hypotheses[static_cast<std::size_t>(i * values.cols() + j)];
  }
  const std::optional<RigidTransform>& hypothesis(Eigen::Index i,
                                                  Eigen::Index j) const {
    return hypotheses[static_cast<std::size_t>(i * values.cols() + j)];
  }
};

/**
 * @brief Scene-consistency score: the sum of all pairwise 3D IoUs between
 * the two box lists, normalized by max(m, n).
 *
 * The infrastructure boxes are expected to already be expressed in the
 * vehicle frame. Returns 0 if either list is empty. Value 1 is reached
 * only when m = n and the boxes pair up perfectly with vanishing cross
 * terms.
 */
double overall_iou(std::span<const OrientedBox> infra_in_vehicle_frame,
                   std::span<const OrientedBox> vehicle_boxes);
double overall_iou(std::span<const OrientedBox> infra_in_vehicle_frame,
                   std::span<const Box3D> vehicle_boxes);

/**
 * @brief Candidate extrinsics that map @p b_inf exactly onto @p b_veh.
 *
 * Yaw-only boxes admit two aligning rotations (delta yaw and delta yaw + pi);
 * near-square footprints (|l - w| < 0.05 m on either box) additionally get
 * the two quarter-turn candidates. Whole-scene oIoU scoring downstream
 * picks the physically consistent one.
 */
std::vector<RigidTransform> hypothesis_extrinsics(const Box3D& b_inf,
                                                  const Box3D& b_veh);

/**
 * @brief Core affinity: each candidate pair is assumed matched, its implied
 * extrinsic transforms the whole infrastructure scene into the vehicle
 * frame, and the entry gets the best whole-scene oIoU over the candidates.
 *
 * Pairs of mismatched categories stay 0 without a hypothesis unless the
 * strategy is kCoreOnly. Throws EmptyScene on an empty input scene.
 */
AffinityMatrix core_affinity(const Scene& scene_inf, const Scene& scene_veh,
                             const StrategyConfig& config);

/// Category-match indicator matrix (the paper's category affinity), with
/// optional confidence weighting. Used as K_p for the edge-based strategies.
AffinityMatrix category_affinity(const Scene& scene_inf,
                                 const Scene& scene_veh,
                                 const StrategyConfig& config);

/**
 * @brief Edge-affinity lookup K_q for VIPS-style strategies.
 *
 * An edge u = (i, i') joins two boxes of one scene. Affinity between edges
 * compares rigid-invariant edge features: inter-center distance (length)
 * and relative yaw (angle), via exp(-|delta| / sigma). Construction throws
 * InsufficientBoxes if a side has fewer than 2 boxes.
 */
class EdgeAffinity {
 public:
  enum class Feature { kLength, kAngle, kLengthAngle };

  EdgeAffinity(const Scene& scene_inf, const Scene& scene_veh,
               Feature feature, double sigma_length, double sigma_angle);

  /// K_q((i,i'), (j,j')) with i,i' infrastructure and j,j' vehicle indices.
  double operator()(Eigen::Index i, Eigen::Index i2, Eigen::Index j,
                    Eigen::Index j2) const;

  Eigen::Index infra_count() const { return infra_dist_.rows(); }
  Eigen::Index vehicle_count() const { return veh_dist_.rows(); }
  Category infra_category(Eigen::Index i) const { return infra_cats_[i]; }
  Category vehicle_category(Eigen::Index j) const { return veh_cats_[j]; }

 private:
  Feature feature_;
  double sigma_length_;
  double sigma_angle_;
  Eigen::MatrixXd infra_dist_, veh_dist_;      // pairwise center distances
  Eigen::MatrixXd infra_relyaw_, veh_relyaw_;  // pairwise relative yaws
  std::vector<Category> infra_cats_, veh_cats_;
};

EdgeAffinity length_affinity(const Scene& scene_inf, const Scene& scene_veh,
                             double sigma_length = 2.0);
EdgeAffinity angle_affinity(const Scene& scene_inf, const Scene& scene_veh,
                            double sigma_angle = 0.2);

/**
 * @brief Fuses vertex affinities K_p with edge affinities K_q:
 *   A(i,j) = (1-w) Kp(i,j) + w mean{ Kq(u,v) } over endpoint-consistent
 * edge pairs (the non-shared endpoints must agree in category).
 *
 * Entries that are category-masked in K_p stay exactly 0. With w = 0 the
 * result is K_p unchanged. Throws DimensionMismatch on inconsistent sizes.
 */
AffinityMatrix fuse_affinity(const AffinityMatrix& k_p, const EdgeAffinity& k_q,
                             const StrategyConfig& config);

}  // namespace v2icalib

#endif  // V2ICALIB_AFFINITY_HPP
