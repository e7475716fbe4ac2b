#include "ncsagree/agreement.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ncsagree/errors.hpp"
#include "ncsagree/rng.hpp"
#include "oracles.hpp"

using namespace ncsagree::agreement;
using ncsagree::rng::engine;
using ncsagree::rng::uniform01;
using ncsagree::rng::uniform_below;

namespace {

ContingencyTable from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  ContingencyTable t;
  t.k = static_cast<int>(rows.size());
  t.counts.assign(t.k * t.k, 0);
  for (int i = 0; i < t.k; ++i)
    for (int j = 0; j < t.k; ++j) t.at(i, j) = rows[i][j];
  return t;
}

std::vector<std::vector<std::int64_t>> to_rows(const ContingencyTable& t) {
  std::vector<std::vector<std::int64_t>> rows(t.k,
                                              std::vector<std::int64_t>(t.k));
  for (int i = 0; i < t.k; ++i)
    for (int j = 0; j < t.k; ++j) rows[i][j] = t.at(i, j);
  return rows;
}

}  // namespace

TEST_CASE("contingency: identity and hand tabulation") {
  const std::vector<int> a{1, 2, 3, 4};
  const auto t = contingency(a, a, 4);
  CHECK(t.total() == 4);
  CHECK(t.trace() == 4);
  for (int i = 0; i < 4; ++i) CHECK(t.at(i, i) == 1);

  const std::vector<int> u{1, 1, 2, 3};
  const std::vector<int> v{1, 2, 2, 4};
  const auto h = contingency(u, v, 4);
  CHECK(h.at(0, 0) == 1);
  CHECK(h.at(0, 1) == 1);
  CHECK(h.at(1, 1) == 1);
  CHECK(h.at(2, 3) == 1);
  CHECK(h.total() == 4);
}

TEST_CASE("contingency: precondition violations are fatal") {
  CHECK_THROWS_AS(contingency(std::vector<int>{}, std::vector<int>{}, 4),
                  ncsagree::Error);
  CHECK_THROWS_AS(
      contingency(std::vector<int>{1, 2}, std::vector<int>{1}, 4),
      ncsagree::Error);
  CHECK_THROWS_AS(
      contingency(std::vector<int>{1, 5}, std::vector<int>{1, 2}, 4),
      ncsagree::Error);
  CHECK_THROWS_AS(
      contingency(std::vector<int>{0, 1}, std::vector<int>{1, 2}, 4),
      ncsagree::Error);
}

TEST_CASE("contingency: transpose swaps labels, keeps symmetric stats") {
  const std::vector<int> u{1, 1, 2, 3, 4, 2};
  const std::vector<int> v{1, 2, 2, 4, 4, 1};
  auto t = contingency(u, v, 4, "A", "B");
  auto tt = t.transposed();
  CHECK(tt.row_system == "B");
  CHECK(tt.col_system == "A");
  CHECK(tt.total() == t.total());
  CHECK(tt.trace() == t.trace());
  CHECK(percent_agreement(tt) == percent_agreement(t));
  const auto w = WeightMatrix::linear(4);
  CHECK(weighted_kappa_point(tt, w) ==
        doctest::Approx(weighted_kappa_point(t, w)).epsilon(1e-15));
}

TEST_CASE("percent agreement") {
  const std::vector<int> a{1, 2, 3, 4};
  CHECK(percent_agreement(contingency(a, a, 4)) == 1.0);

  const std::vector<int> u{1, 1, 2, 3};
  const std::vector<int> v{1, 2, 2, 4};
  CHECK(percent_agreement(contingency(u, v, 4)) == 0.5);

  auto uniform = from_rows({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1},
                            {1, 1, 1, 1}});
  CHECK(percent_agreement(uniform) == 0.25);

  ContingencyTable zero;
  zero.k = 4;
  zero.counts.assign(16, 0);
  CHECK_THROWS_AS(percent_agreement(zero), ncsagree::Error);
}

TEST_CASE("weight matrix: the 4-level linear scheme") {
  const auto w = WeightMatrix::linear(4);
  const auto ref = oracle::table1_weights();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(w.at(i, j) == ref[i][j]);
}

TEST_CASE("weighted kappa: perfect agreement") {
  auto diag = from_rows({{25, 0, 0, 0}, {0, 25, 0, 0}, {0, 0, 25, 0},
                         {0, 0, 0, 25}});
  CHECK(weighted_kappa_point(diag, WeightMatrix::linear(4)) == 1.0);
  CHECK(percent_agreement(diag) == 1.0);
}

TEST_CASE("weighted kappa: independence gives zero") {
  auto uniform = from_rows({{5, 5, 5, 5}, {5, 5, 5, 5}, {5, 5, 5, 5},
                            {5, 5, 5, 5}});
  CHECK(weighted_kappa_point(uniform, WeightMatrix::linear(4)) == 0.0);

  // any outer-product table is independent
  const std::vector<std::int64_t> row{3, 7, 2, 8};
  const std::vector<std::int64_t> col{5, 1, 4, 10};
  ContingencyTable t;
  t.k = 4;
  t.counts.assign(16, 0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t.at(i, j) = row[i] * col[j];
  CHECK(weighted_kappa_point(t, WeightMatrix::linear(4)) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("weighted kappa: fixed fixture matches the direct evaluation") {
  const std::vector<std::vector<std::int64_t>> rows{
      {12, 5, 3, 1}, {4, 18, 6, 2}, {2, 7, 22, 5}, {1, 3, 8, 15}};
  const auto t = from_rows(rows);
  const double got = weighted_kappa_point(t, WeightMatrix::linear(4));
  const double want = oracle::weighted_kappa(rows, oracle::table1_weights());
  CHECK(std::abs(got - want) < 1e-12);
  // 1284/2443, evaluated independently
  CHECK(got == doctest::Approx(0.5255832992222677).epsilon(1e-13));
}

TEST_CASE("weighted kappa: seeded random tables match the oracle") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto g = engine(ncsagree::rng::mix(seed));
    std::vector<std::vector<std::int64_t>> rows(4, std::vector<std::int64_t>(4));
    for (auto& r : rows)
      for (auto& c : r) c = static_cast<std::int64_t>(uniform_below(g, 50));
    rows[0][0] += 1;  // non-empty
    const double got =
        weighted_kappa_point(from_rows(rows), WeightMatrix::linear(4));
    const double want = oracle::weighted_kappa(rows, oracle::table1_weights());
    CHECK(std::abs(got - want) < 1e-12);
    CHECK(got >= -1.0 - 1e-12);
    CHECK(got <= 1.0 + 1e-12);
  }
}

TEST_CASE("weighted kappa: single-cell degeneracy") {
  auto t = from_rows({{9, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK(weighted_kappa_point(t, WeightMatrix::linear(4)) == 1.0);
}

TEST_CASE("weighted kappa: bootstrap CI is seeded and contains the estimate") {
  const std::vector<std::vector<std::int64_t>> rows{
      {30, 9, 3, 1}, {8, 25, 7, 2}, {3, 8, 28, 6}, {1, 2, 7, 20}};
  const auto t = from_rows(rows);
  BootstrapSpec boot{.seed = 123, .replicates = 500, .workers = 2, .stream = 0};
  const auto e1 = weighted_kappa(t, WeightMatrix::linear(4), boot);
  const auto e2 = weighted_kappa(t, WeightMatrix::linear(4), boot);
  CHECK(e1.value == e2.value);
  CHECK(e1.ci_low == e2.ci_low);
  CHECK(e1.ci_high == e2.ci_high);
  CHECK(e1.has_ci());
  CHECK(e1.ci_low <= e1.value);
  CHECK(e1.value <= e1.ci_high);
  CHECK(e1.ci_high - e1.ci_low < 0.5);

  boot.workers = 1;  // worker count must not change the result
  const auto e3 = weighted_kappa(t, WeightMatrix::linear(4), boot);
  CHECK(e3.ci_low == e1.ci_low);
  CHECK(e3.ci_high == e1.ci_high);

  boot.seed = 124;  // a different seed moves the interval
  const auto e4 = weighted_kappa(t, WeightMatrix::linear(4), boot);
  CHECK((e4.ci_low != e1.ci_low || e4.ci_high != e1.ci_high));
}

TEST_CASE("lin ccc: the shifted-decade example") {
  std::vector<double> x(10), y(10);
  for (int i = 0; i < 10; ++i) {
    x[i] = i + 1;
    y[i] = i + 11;
  }
  const double v = lin_ccc_point(x, y);
  CHECK(v == doctest::Approx(16.5 / 116.5).epsilon(1e-14));
  CHECK(std::abs(v - 0.142) < 0.0005);
  CHECK(v == oracle::lin_ccc(x, y));

  const auto est = lin_ccc(x, y);
  CHECK(est.value == v);
  CHECK(est.has_ci());
  CHECK(est.ci_low <= est.value);
  CHECK(est.value <= est.ci_high);
}

TEST_CASE("lin ccc: identity and hand examples") {
  std::vector<double> x{0.3, 1.5, 2.2, 4.4, 0.9};
  CHECK(lin_ccc_point(x, x) == 1.0);
  const auto est = lin_ccc(x, x);
  CHECK(est.value == 1.0);
  CHECK(est.ci_low <= 1.0);
  CHECK(est.ci_high >= 1.0);

  const std::vector<double> a{0.0, 1.0};
  const std::vector<double> b{0.0, 2.0};
  CHECK(lin_ccc_point(a, b) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("lin ccc: degeneracy and shape errors") {
  const std::vector<double> c{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(lin_ccc_point(c, c), ncsagree::Error);
  CHECK_THROWS_AS(
      lin_ccc_point(std::vector<double>{1.0}, std::vector<double>{1.0}),
      ncsagree::Error);
  CHECK_THROWS_AS(lin_ccc_point(std::vector<double>{1.0, 2.0},
                                std::vector<double>{1.0, 2.0, 3.0}),
                  ncsagree::Error);
}

TEST_CASE("lin ccc: agreement, not correlation") {
  auto g = engine(31337);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 5 + uniform_below(g, 200);
    std::vector<double> x(n), y(n);
    const double c = (uniform01(g) < 0.5 ? -1.0 : 1.0) *
                     (0.1 + 4.9 * uniform01(g));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 10.0 * uniform01(g);
      y[i] = x[i] + c;
    }
    const double lcc = lin_ccc_point(x, y);
    const double r = oracle::pearson_r(x, y);
    CHECK(lcc < 1.0);
    CHECK(std::abs(r - 1.0) < 1e-9);
    CHECK(std::abs(lcc) <= std::abs(r) + 1e-12);
  }
}

TEST_CASE("lin ccc: bounded by Pearson in magnitude") {
  auto g = engine(777);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + uniform_below(g, 100);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 10.0 * uniform01(g) - 5.0;
      y[i] = 10.0 * uniform01(g) - 5.0 + 0.5 * x[i];
    }
    const double lcc = lin_ccc_point(x, y);
    const double r = oracle::pearson_r(x, y);
    CHECK(std::abs(lcc) <= std::abs(r) + 1e-12);
  }
}

TEST_CASE("lin ccc: symmetric in its arguments") {
  auto g = engine(2024);
  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = uniform01(g) * 3.0;
    y[i] = uniform01(g) * 2.0 + 0.3 * x[i];
  }
  CHECK(lin_ccc_point(x, y) == lin_ccc_point(y, x));
}

TEST_CASE("lin ccc: bootstrap CI is deterministic for a seed") {
  std::vector<double> x(40), y(40);
  auto g = engine(8);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = uniform01(g);
    y[i] = 0.5 * x[i] + 0.5 * uniform01(g);
  }
  BootstrapSpec boot{.seed = 9, .replicates = 400, .workers = 2, .stream = 3};
  const auto e1 = lin_ccc_bootstrap(x, y, boot);
  const auto e2 = lin_ccc_bootstrap(x, y, boot);
  CHECK(e1.ci_low == e2.ci_low);
  CHECK(e1.ci_high == e2.ci_high);
  CHECK(e1.ci_low <= e1.value);
  CHECK(e1.value <= e1.ci_high);
}

TEST_CASE("kappa interpretation bands") {
  CHECK(interpret_kappa(-0.1) == "poor");
  CHECK(interpret_kappa(-1.0) == "poor");
  CHECK(interpret_kappa(0.0) == "slight");
  CHECK(interpret_kappa(0.1) == "slight");
  CHECK(interpret_kappa(0.20) == "slight");
  CHECK(interpret_kappa(0.21) == "fair");
  CHECK(interpret_kappa(0.3) == "fair");
  CHECK(interpret_kappa(0.40) == "fair");
  CHECK(interpret_kappa(0.5) == "moderate");
  CHECK(interpret_kappa(0.60) == "moderate");
  CHECK(interpret_kappa(0.66) == "substantial");
  CHECK(interpret_kappa(0.80) == "substantial");
  CHECK(interpret_kappa(0.85) == "almost perfect");
  CHECK(interpret_kappa(1.0) == "almost perfect");
  // banding happens after two-decimal rounding
  CHECK(interpret_kappa(0.204) == "slight");
  CHECK(interpret_kappa(0.205) == "fair");
  CHECK(interpret_kappa(-0.004) == "slight");
}

TEST_CASE("pairwise compare: counts, self-agreement, symmetry") {
  auto g = engine(5150);
  const std::size_t n = 400;
  std::vector<SystemScores> systems;
  for (int s = 0; s < 6; ++s) {
    SystemScores sys;
    sys.system_id = "sys" + std::to_string(s);
    sys.scores.resize(n);
    for (auto& v : sys.scores)
      v = -std::log(1.0 - uniform01(g)) * (0.5 + uniform01(g));
    systems.push_back(std::move(sys));
  }

  CompareOptions opts;
  opts.seed = 11;
  opts.bootstrap_replicates = 50;
  const auto results = pairwise_compare(systems, opts);
  CHECK(results.size() == 15);
  for (const auto& r : results) {
    CHECK(r.kappa_band == interpret_kappa(r.kappa.value));
    CHECK(r.kappa.ci_low <= r.kappa.value);
    CHECK(r.kappa.value <= r.kappa.ci_high);
    CHECK(r.lcc.ci_low <= r.lcc.value);
    CHECK(r.lcc.value <= r.lcc.ci_high);
    CHECK(r.table.total() == r.n);
  }

  const std::vector<SystemScores> two{systems[0], systems[1]};
  CHECK(pairwise_compare(two, opts).size() == 1);

  // a system against itself
  const std::vector<SystemScores> self{systems[2], systems[2]};
  const auto r = pairwise_compare(self, opts).front();
  CHECK(r.percent == 1.0);
  CHECK(r.kappa.value == 1.0);
  CHECK(r.lcc.value == 1.0);

  // swapping the pair flips labels but not statistics
  const auto ab =
      compare_pair(systems[0], systems[1], opts, /*pair_stream=*/0);
  const auto ba =
      compare_pair(systems[1], systems[0], opts, /*pair_stream=*/0);
  CHECK(ab.percent == ba.percent);
  CHECK(ab.kappa.value == doctest::Approx(ba.kappa.value).epsilon(1e-15));
  CHECK(ab.lcc.value == ba.lcc.value);
  CHECK(to_rows(ab.table) == to_rows(ba.table.transposed()));
  CHECK(ab.kappa_band == ba.kappa_band);
}

TEST_CASE("pairwise compare: fixed thresholds override") {
  auto g = engine(6);
  const std::size_t n = 200;
  std::vector<SystemScores> systems(2);
  systems[0].system_id = "a";
  systems[1].system_id = "b";
  systems[0].scores.resize(n);
  systems[1].scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    systems[0].scores[i] = 2.0 * uniform01(g);
    systems[1].scores[i] = systems[0].scores[i] + 0.2 * uniform01(g);
  }
  CompareOptions opts;
  opts.seed = 3;
  opts.bootstrap_replicates = 0;

  std::vector<ncsagree::css::CssThresholds> fixed{
      ncsagree::css::CssThresholds{{0.5, 1.0, 1.5}},
      ncsagree::css::CssThresholds{{0.5, 1.0, 1.5}}};
  opts.fixed_thresholds = &fixed;
  const auto r = pairwise_compare(systems, opts).front();
  CHECK(r.n == static_cast<std::int64_t>(n));
  CHECK(!r.kappa.has_ci());  // bootstrap disabled

  // recompute expected table directly from the fixed thresholds
  const auto ca = ncsagree::css::assign_classes(systems[0].scores, fixed[0]);
  const auto cb = ncsagree::css::assign_classes(systems[1].scores, fixed[1]);
  const auto expect = contingency(ca, cb, 4);
  CHECK(to_rows(r.table) == to_rows(expect));
}
