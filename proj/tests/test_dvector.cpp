#include <doctest.h>

#include <fstream>

#include "clusterdv/dvector.hpp"
#include "clusterdv/explorer.hpp"

using namespace clusterdv;

namespace {

DVector D(std::initializer_list<Integer> v) {
  DVector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) d(i++) = x;
  return d;
}

IntMatrix from_rows(const nlohmann::json& rows) {
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<Integer>();
  return m;
}

}  // namespace

TEST_CASE("dvec_from_expansion") {
  CHECK(dvec_from_expansion(parse_laurent("x1^-1 + x1^-1*x2", 2), 2) == D({1, 0}));
  CHECK(dvec_from_expansion(parse_laurent("x1", 2), 2) == D({-1, 0}));
  CHECK(dvec_from_expansion(parse_laurent("x1^-1*x2^-1 + x1^-1 + x2^-1", 2), 2) == D({1, 1}));
  // frozen x3 is ignored
  CHECK(dvec_from_expansion(parse_laurent("x1^-1*x3^-4 + x2^2", 3), 2) == D({1, 0}));
  CHECK_THROWS_AS(dvec_from_expansion(LaurentPolynomial::zero(2), 2), ZeroPolynomial);
}

TEST_CASE("initial conditions and one step") {
  const auto init = initial_dvectors(3);
  CHECK(init.size() == 3);
  CHECK(init[1] == D({0, -1, 0}));

  IntMatrix b(2, 2);
  b << 0, 1, -1, 0;
  CHECK(dvec_recurrence_step(initial_dvectors(2), b, 0) == D({1, 0}));
  std::vector<DVector> cur{D({1, 0}), D({0, -1})};
  IntMatrix b1(2, 2);
  b1 << 0, -1, 1, 0;
  CHECK(dvec_recurrence_step(cur, b1, 1) == D({1, 1}));
  CHECK_THROWS_AS(dvec_recurrence_step(cur, b1, 2), IndexOutOfRange);
}

TEST_CASE("d-vectors match the symbolic oracle") {
  std::ifstream in(CLUSTERDV_FIXTURE_DIR "/expansions.json");
  REQUIRE(in.good());
  const auto fixtures = nlohmann::json::parse(in);
  for (const auto& c : fixtures["cases"]) {
    CAPTURE(c["name"].get<std::string>());
    const IntMatrix b = from_rows(c["B"]);
    const Eigen::Index n = b.cols();
    const ExchangeMatrix m(b.topRows(n), b.bottomRows(b.rows() - n));
    std::vector<int> dirs;
    for (int k : c["walk"]) dirs.push_back(k - 1);
    std::size_t vertex = 0;
    apply_walk(Seed::root(m), MutationWalk(dirs), {}, [&](const Seed& s) {
      const auto& want = c["vertices"][vertex++];
      const auto rec = dvec_along_walk(n, m, s.path());
      for (Eigen::Index l = 0; l < n; ++l) {
        DVector d(n);
        for (Eigen::Index j = 0; j < n; ++j) d(j) = want["dvectors"][l][j].get<Integer>();
        CHECK(dvec_from_expansion(s.var(l), n) == d);
        CHECK(rec[static_cast<std::size_t>(l)] == d);
      }
    });
  }
}

TEST_CASE("recurrence undoes itself on a double step") {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(rng.uniform(2, 5));
    const auto mode = trial % 2 ? MatrixMode::skew_symmetric : MatrixMode::skew_symmetrizable;
    const ExchangeMatrix m(gen_matrix(n, 3, mode, rng));
    const MutationWalk w = random_walk(n, static_cast<int>(rng.uniform(0, 5)), rng);
    ExchangeMatrix at = m;
    for (int k : w.directions()) at = matrix_mutate(at, k);
    auto d = dvec_along_walk(n, m, w);
    const auto k = static_cast<Eigen::Index>(rng.uniform(0, n - 1));
    auto there = d;
    there[static_cast<std::size_t>(k)] = dvec_recurrence_step(d, at.exchange(), k);
    const ExchangeMatrix next = matrix_mutate(at, k);
    CHECK(dvec_recurrence_step(there, next.exchange(), k) == d[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("expansion and recurrence agree on rank 2") {
  // Rank 2 walks stay within the two-term alternating pattern; small b keeps them cheap.
  for (const auto& [b12, b21] : std::vector<std::pair<int, int>>{{1, -1}, {1, -2}, {2, -1}, {1, -3}, {2, -2}, {3, -1}}) {
    IntMatrix b(2, 2);
    b << 0, b12, b21, 0;
    const ExchangeMatrix m(b);
    for (int first = 0; first < 2; ++first) {
      std::vector<int> dirs;
      for (int i = 0; i < 7; ++i) dirs.push_back((first + i) % 2);
      apply_walk(Seed::root(m), MutationWalk(dirs), {}, [&](const Seed& s) {
        const auto rec = dvec_along_walk(2, m, s.path());
        for (Eigen::Index l = 0; l < 2; ++l) CHECK(dvec_from_expansion(s.var(l), 2) == rec[static_cast<std::size_t>(l)]);
      });
    }
  }
}
