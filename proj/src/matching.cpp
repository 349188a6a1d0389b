#include "v2icalib/matching.hpp"

#include <cmath>
#include <limits>

#include "v2icalib/errors.hpp"

namespace v2icalib {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Jonker-Volgenant shortest augmenting path solver, minimizing over a
 * square cost matrix. Columns are scanned in ascending order with strict
 * improvement tests, so ties resolve to the lowest index and repeated runs
 * are bit-identical.
 */
std::vector<Eigen::Index> solve_square_min(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  std::vector<Eigen::Index> col4row(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> row4col(static_cast<std::size_t>(n), -1);
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);

  std::vector<double> shortest(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> path(static_cast<std::size_t>(n));
  std::vector<bool> done_col(static_cast<std::size_t>(n));
  std::vector<bool> in_tree_row(static_cast<std::size_t>(n));

  for (Eigen::Index cur = 0; cur < n; ++cur) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(path.begin(), path.end(), Eigen::Index{-1});
    std::fill(done_col.begin(), done_col.end(), false);
    std::fill(in_tree_row.begin(), in_tree_row.end(), false);

    double min_val = 0.0;
    Eigen::Index i = cur;
    Eigen::Index sink = -1;
    while (sink == -1) {
      in_tree_row[static_cast<std::size_t>(i)] = true;
      double lowest = kInf;
      Eigen::Index j_low = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (done_col[static_cast<std::size_t>(j)]) continue;
        const double reduced = min_val + cost(i, j) -
                               u[static_cast<std::size_t>(i)] -
                               v[static_cast<std::size_t>(j)];
        if (reduced < shortest[static_cast<std::size_t>(j)]) {
          shortest[static_cast<std::size_t>(j)] = reduced;
          path[static_cast<std::size_t>(j)] = i;
        }
        if (shortest[static_cast<std::size_t>(j)] < lowest) {
          lowest = shortest[static_cast<std::size_t>(j)];
          j_low = j;
        }
      }
      min_val = lowest;
      done_col[static_cast<std::size_t>(j_low)] = true;
      if (row4col[static_cast<std::size_t>(j_low)] == -1) {
        sink = j_low;
      } else {
        i = row4col[static_cast<std::size_t>(j_low)];
      }
    }

    u[static_cast<std::size_t>(cur)] += min_val;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!in_tree_row[static_cast<std::size_t>(r)] || r == cur) continue;
      u[static_cast<std::size_t>(r)] +=
          min_val -
          shortest[static_cast<std::size_t>(col4row[static_cast<std::size_t>(r)])];
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!done_col[static_cast<std::size_t>(j)]) continue;
      v[static_cast<std::size_t>(j)] -=
          min_val - shortest[static_cast<std::size_t>(j)];
    }

    Eigen::Index j = sink;
    while (true) {
      const Eigen::Index r = path[static_cast<std::size_t>(j)];
      row4col[static_cast<std::size_t>(j)] = r;
      std::swap(col4row[static_cast<std::size_t>(r)], j);
      if (r == cur) break;
    }
  }
  return col4row;
}

}  // namespace

std::vector<Eigen::Index> solve_assignment(const Eigen::MatrixXd& values) {
  const Eigen::Index m = values.rows();
  const Eigen::Index n = values.cols();
  if (m == 0 || n == 0) throw DimensionMismatch("empty affinity matrix");
  if (!values.allFinite())
    throw DimensionMismatch("affinity matrix has non-finite entries");

  // Pad to square with zero affinity; maximize by negating the cost.
  const Eigen::Index k = std::max(m, n);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  cost.topLeftCorner(m, n) = -values;

  const std::vector<Eigen::Index> col4row = solve_square_min(cost);
  std::vector<Eigen::Index> out(static_cast<std::size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = col4row[static_cast<std::size_t>(i)];
    if (j < n) out[static_cast<std::size_t>(i)] = j;
  }
  return out;
}

MatchSet filter_matches(const AffinityMatrix& affinity,
                        const std::vector<Eigen::Index>& assignment,
                        double gate) {
  if (static_cast<Eigen::Index>(assignment.size()) != affinity.rows())
    throw DimensionMismatch("assignment length does not match matrix rows");

  MatchSet out;
  out.threshold_used = gate;
  for (Eigen::Index i = 0; i < affinity.rows(); ++i) {
    const Eigen::Index j = assignment[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    const double value = affinity.values(i, j);
    // Zero affinity means "no evidence at all"; never accept it.
    if (value < gate || value <= 0.0) continue;
    out.pairs.push_back(Match{i, j, value, affinity.hypothesis(i, j)});
  }
  if (out.pairs.empty())
    throw NoMatches("no assigned pair cleared the affinity gate");
  return out;
}

MatchSet match_scenes(const AffinityMatrix& affinity, double gate) {
  return filter_matches(affinity, solve_assignment(affinity.values), gate);
}

}  // namespace v2icalib
