#ifndef V2ICALIB_EXTRINSICS_HPP
#define V2ICALIB_EXTRINSICS_HPP

#include <span>
#include <utility>

#include "v2icalib/affinity.hpp"
#include "v2icalib/matching.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

/// Group-restricted ICP settings. Correspondence search never leaves the
/// 8-vertex group of the matched box pair, and within a group only the
/// cuboid's symmetry reorderings are admissible.
struct RefinementParams {
  int max_iterations = 30;
  double convergence_tol = 1e-4;  // meters, mean-residual change
};

/**
 * @brief Closed-form least-squares rigid fit (SVD with reflection
 * correction): minimizes sum of w_k * |R p_src_k + t - p_dst_k|^2.
 *
 * @p weights may be empty (equal weights) or one entry per point.
 * Throws DimensionMismatch on length mismatch and DegenerateGeometry when
 * the source points are collinear (scatter rank < 2) or fewer than 3.
 */
RigidTransform svd_fit(const VertexCloud& src, const VertexCloud& dst,
                       std::span<const double> weights = {});

/**
 * @brief Builds index-corresponded vertex clouds for the matched pairs,
 * resolving the unknown intra-box vertex ordering.
 *
 * Vehicle boxes keep canonical vertex order. Infrastructure boxes are
 * reordered: one scene-wide heading decision (identity vs pi flip, chosen
 * by fit residual) applies to every box, then each near-square box
 * (|l - w| < 0.05 m) greedily tries its quarter-turn reorderings. The
 * returned residual is never worse than the naive canonical ordering.
 *
 * A single matched pair is the exception: a lone cuboid is symmetric under
 * its own heading flip, so the residual carries no signal there. That case
 * picks the ordering whose fitted transform maximizes whole-scene oIoU,
 * keeping the reported headings on ties.
 */
std::pair<VertexCloud, VertexCloud> resolve_correspondence(
    const MatchSet& matches, const Scene& scene_inf, const Scene& scene_veh);

/**
 * @brief Iterative refinement of @p initial: each sweep re-corresponds
 * every matched 8-vertex group to its best admissible reordering (heading
 * flip, quarter turns) under the current transform, then re-fits. Accepted
 * iterations never increase the mean residual; on failure the best
 * transform so far is returned.
 */
RigidTransform refine(const RigidTransform& initial, const VertexCloud& p_inf,
                      const VertexCloud& p_veh, const RefinementParams& params,
                      std::span<const double> weights = {});

/**
 * @brief Full extrinsic estimation: resolve_correspondence -> svd_fit ->
 * optional group-restricted ICP, per @p config.
 *
 * Confidence weighting (when enabled) weights every vertex by the product
 * of its box pair's confidences. Throws NoMatches on an empty match set
 * and DegenerateGeometry on collinear geometry.
 */
RigidTransform estimate_extrinsic(const MatchSet& matches,
                                  const Scene& scene_inf,
                                  const Scene& scene_veh,
                                  const StrategyConfig& config);

}  // namespace v2icalib

#endif  // V2ICALIB_EXTRINSICS_HPP
