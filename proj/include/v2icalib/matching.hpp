#ifndef V2ICALIB_MATCHING_HPP
#define V2ICALIB_MATCHING_HPP

#include <optional>
#include <vector>

#include "v2icalib/affinity.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

/// One accepted infrastructure-vehicle box correspondence.
struct Match {
  Eigen::Index infra_index = -1;
  Eigen::Index vehicle_index = -1;
  double affinity = 0.0;
  std::optional<RigidTransform> hypothesis;  // transform behind the entry
};

/// Filtered assignment result. Indices are unique per side and every
/// retained affinity satisfies value >= threshold_used and value > 0.
struct MatchSet {
  std::vector<Match> pairs;
  double threshold_used = 0.0;
};

/**
 * @brief One-to-one assignment over @p values maximizing total affinity.
 *
 * Returns assignment[i] = matched column of row i, or -1 when the row is
 * left unmatched (rectangular input). Rectangular matrices are padded to
 * square with zero affinity internally; padded pairs are dropped. Ties are
 * broken deterministically (lowest index scanned first), so equal inputs
 * give bit-identical assignments. Throws DimensionMismatch on an empty or
 * non-finite matrix.
 */
std::vector<Eigen::Index> solve_assignment(const Eigen::MatrixXd& values);

/**
 * @brief Keeps assigned pairs whose affinity clears max(gate, 0+): pairs
 * with zero affinity never survive, even at gate 0.
 *
 * Throws NoMatches when nothing survives.
 */
MatchSet filter_matches(const AffinityMatrix& affinity,
                        const std::vector<Eigen::Index>& assignment,
                        double gate);

/// Convenience: solve + filter in one step.
MatchSet match_scenes(const AffinityMatrix& affinity, double gate);

}  // namespace v2icalib

#endif  // V2ICALIB_MATCHING_HPP
