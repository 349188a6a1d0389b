#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "v2icalib/errors.hpp"
#include "v2icalib/matching.hpp"

using namespace v2icalib;

namespace {

Eigen::MatrixXd random_affinity(std::mt19937_64& rng, Eigen::Index rows,
                                Eigen::Index cols) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = unit(rng);
  return a;
}

double assignment_weight(const Eigen::MatrixXd& a,
                         const std::vector<Eigen::Index>& assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Eigen::Index j = assignment[static_cast<std::size_t>(i)];
    if (j >= 0) total += a(i, j);
  }
  return total;
}

AffinityMatrix wrap(const Eigen::MatrixXd& values) {
  AffinityMatrix m(values.rows(), values.cols());
  m.values = values;
  return m;
}

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("identity-like matrix matches the diagonal") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, 0, 1;
    const auto assignment = solve_assignment(a);
    CHECK(assignment[0] == 0);
    CHECK(assignment[1] == 1);
  }

  TEST_CASE("4x4 weight equals the exhaustive permutation maximum") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd a = random_affinity(rng, 4, 4);
    const auto assignment = solve_assignment(a);
    CHECK(assignment_weight(a, assignment) ==
          doctest::Approx(testing::brute_force_assignment_weight(a))
              .epsilon(1e-12));
  }

  TEST_CASE("3x2 rectangular matrix assigns exactly two pairs") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd a = random_affinity(rng, 3, 2);
    const auto assignment = solve_assignment(a);
    int matched = 0;
    for (Eigen::Index j : assignment)
      if (j >= 0) ++matched;
    CHECK(matched == 2);
    CHECK(assignment_weight(a, assignment) ==
          doctest::Approx(testing::brute_force_assignment_weight(a))
              .epsilon(1e-12));
  }

  TEST_CASE("property: weight matches brute force up to 7x7") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 7);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index m = dim(rng);
      const Eigen::Index n = dim(rng);
      const Eigen::MatrixXd a = random_affinity(rng, m, n);
      const auto assignment = solve_assignment(a);

      int matched = 0;
      std::vector<bool> col_used(static_cast<std::size_t>(n), false);
      for (Eigen::Index j : assignment) {
        if (j < 0) continue;
        ++matched;
        CHECK_FALSE(col_used[static_cast<std::size_t>(j)]);
        col_used[static_cast<std::size_t>(j)] = true;
      }
      CHECK(matched == std::min(m, n));
      CHECK(assignment_weight(a, assignment) ==
            doctest::Approx(testing::brute_force_assignment_weight(a))
                .epsilon(1e-10));
    }
  }

  TEST_CASE("positive scaling leaves the assignment unchanged") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd a = random_affinity(rng, 5, 5);
      const auto base = solve_assignment(a);
      for (double scale : {0.25, 3.0, 1e6}) {
        CHECK(solve_assignment(scale * a) == base);
      }
    }
  }

  TEST_CASE("row permutation permutes matched infra indices identically") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = 6;
      const Eigen::MatrixXd a = random_affinity(rng, n, n);

      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i)
        perm[static_cast<std::size_t>(i)] = i;
      for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto k = static_cast<Eigen::Index>(
            rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(k)]);
      }

      Eigen::MatrixXd permuted(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        permuted.row(perm[static_cast<std::size_t>(i)]) = a.row(i);

      const auto base = solve_assignment(a);
      const auto shuffled = solve_assignment(permuted);
      for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(shuffled[static_cast<std::size_t>(
                  perm[static_cast<std::size_t>(i)])] ==
              base[static_cast<std::size_t>(i)]);
      }
    }
  }

  TEST_CASE("repeated solves are bit-identical") {
    std::mt19937_64 rng(93);
    const Eigen::MatrixXd a = random_affinity(rng, 7, 7);
    const auto first = solve_assignment(a);
    for (int rep = 0; rep < 5; ++rep) CHECK(solve_assignment(a) == first);
  }

  TEST_CASE("filter: all-zero matrix raises NoMatches") {
    const AffinityMatrix a = wrap(Eigen::MatrixXd::Zero(3, 3));
    const auto assignment = solve_assignment(a.values);
    CHECK_THROWS_AS(filter_matches(a, assignment, 0.3), NoMatches);
  }

  TEST_CASE("filter: threshold drops the weak pair") {
    Eigen::MatrixXd values(2, 2);
    values << 0.9, 0.0, 0.0, 0.25;
    const AffinityMatrix a = wrap(values);
    const MatchSet set = filter_matches(a, solve_assignment(a.values), 0.3);
    REQUIRE(set.pairs.size() == 1);
    CHECK(set.pairs[0].infra_index == 0);
    CHECK(set.pairs[0].vehicle_index == 0);
    CHECK(set.pairs[0].affinity == doctest::Approx(0.9));
    CHECK(set.threshold_used == doctest::Approx(0.3));
  }

  TEST_CASE("filter: zero threshold keeps all positive pairs") {
    Eigen::MatrixXd values(3, 3);
    values << 0.9, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.7;
    const AffinityMatrix a = wrap(values);
    const MatchSet set = filter_matches(a, solve_assignment(a.values), 0.0);
    CHECK(set.pairs.size() == 3);
  }

  TEST_CASE("filter: zero affinity never survives, even at gate zero") {
    Eigen::MatrixXd values(2, 2);
    values << 0.6, 0.0, 0.0, 0.0;
    const AffinityMatrix a = wrap(values);
    const MatchSet set = filter_matches(a, solve_assignment(a.values), 0.0);
    REQUIRE(set.pairs.size() == 1);
    CHECK(set.pairs[0].infra_index == 0);
  }

  TEST_CASE("match set indices are one-to-one") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 30; ++trial) {
      const AffinityMatrix a = wrap(random_affinity(rng, 6, 4));
      const MatchSet set = match_scenes(a, 0.0);
      std::vector<Eigen::Index> infra, veh;
      for (const Match& p : set.pairs) {
        infra.push_back(p.infra_index);
        veh.push_back(p.vehicle_index);
      }
      std::sort(infra.begin(), infra.end());
      std::sort(veh.begin(), veh.end());
      CHECK(std::adjacent_find(infra.begin(), infra.end()) == infra.end());
      CHECK(std::adjacent_find(veh.begin(), veh.end()) == veh.end());
    }
  }

  TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(solve_assignment(Eigen::MatrixXd(0, 0)),
                    DimensionMismatch);
    Eigen::MatrixXd bad(1, 1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_assignment(bad), DimensionMismatch);
  }
}
