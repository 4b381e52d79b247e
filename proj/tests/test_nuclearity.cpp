// Finite-rank maps: nuclear norms, ball-image content, orthonormalized
// decompositions and the admissible exponent windows.

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include <scalelab/nuclearity.hpp>

namespace {

using namespace scalelab;
using nuclearity::ContentMethod;
using nuclearity::DomainDesc;
using nuclearity::EpsContentOptions;
using nuclearity::FiniteRankMap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

FiniteRankMap diag_map(const std::vector<double>& d) {
  int n = static_cast<int>(d.size());
  std::vector<std::pair<VectorXd, VectorXd>> fy;
  for (int i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(n);
    e[i] = 1.0;
    fy.push_back({e, d[i] * e});
  }
  return FiniteRankMap::hilbert(n, n, fy);
}

FiniteRankMap random_map(std::mt19937& rng, int dom, int tgt, int terms) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<VectorXd, VectorXd>> fy;
  for (int k = 0; k < terms; ++k) {
    VectorXd f(dom), y(tgt);
    for (int i = 0; i < dom; ++i) f[i] = g(rng);
    for (int i = 0; i < tgt; ++i) y[i] = g(rng);
    fy.push_back({f, y});
  }
  return FiniteRankMap::hilbert(dom, tgt, fy);
}

}  // namespace

TEST_CASE("p-nuclear norms of a diagonal map match the Schatten values") {
  FiniteRankMap T = diag_map({1.0, 0.5, 0.25});

  auto n1 = nuclearity::p_nuclear_norm(T, 1.0);
  REQUIRE(n1.schatten.has_value());
  CHECK(n1.exact);
  CHECK(*n1.schatten == Catch::Approx(1.75).epsilon(1e-12));
  CHECK(n1.best() == *n1.schatten);
  CHECK(n1.decomposition_bound == Catch::Approx(1.75).epsilon(1e-12));

  auto nh = nuclearity::p_nuclear_norm(T, 0.5);
  double expect = std::pow(1.0 + std::sqrt(0.5) + 0.5, 2.0);
  CHECK(*nh.schatten == Catch::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(nuclearity::p_nuclear_norm(T, 0.0), ValidationError);
  CHECK_THROWS_AS(nuclearity::p_nuclear_norm(T, 1.5), ValidationError);
}

TEST_CASE("redundant decompositions only increase the decomposition bound") {
  // Same operator written with an extra cancelling pair of terms.
  std::vector<std::pair<VectorXd, VectorXd>> fy = {
      {vec({1.0, 0.0}), vec({1.0, 0.0})},
      {vec({0.0, 1.0}), vec({0.0, 0.5})},
      {vec({1.0, 1.0}), vec({0.3, -0.3})},
      {vec({1.0, 1.0}), vec({-0.3, 0.3})}};
  FiniteRankMap T = FiniteRankMap::hilbert(2, 2, fy);
  auto n = nuclearity::p_nuclear_norm(T, 1.0);
  CHECK(*n.schatten == Catch::Approx(1.5).epsilon(1e-12));
  CHECK(n.decomposition_bound > *n.schatten);
  CHECK(n.best() == *n.schatten);
}

TEST_CASE("operator norms: exact on Hilbert domains and rank-one matrices") {
  FiniteRankMap T = diag_map({2.0, 0.7});
  auto on = T.op_norm();
  CHECK(on.exact);
  CHECK(on.value == Catch::Approx(2.0).epsilon(1e-12));

  MatrixXd F(2, 2);
  F << 1.0, 0.4, -0.2, 0.9;
  FiniteRankMap M1 =
      FiniteRankMap::matrix_domain(2, 2, 2, {{F, vec({0.0, 1.5})}});
  auto om = M1.op_norm();
  CHECK(om.exact);
  Eigen::JacobiSVD<MatrixXd> svd(F);
  CHECK(om.value ==
        Catch::Approx(1.5 * svd.singularValues().sum()).epsilon(1e-12));

  // The trace-norm extremizer X = U V^T attains the bound.
  Eigen::JacobiSVD<MatrixXd> svduv(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  MatrixXd X = svduv.matrixU() * svduv.matrixV().transpose();
  VectorXd x = Eigen::Map<const VectorXd>(X.data(), 4);
  CHECK(M1.apply(x).norm() == Catch::Approx(om.value).epsilon(1e-10));

  FiniteRankMap M2 = FiniteRankMap::matrix_domain(
      2, 2, 2, {{F, vec({0.0, 1.5})}, {MatrixXd::Identity(2, 2), vec({1.0, 0.0})}});
  CHECK_FALSE(M2.op_norm().exact);
}

TEST_CASE("operator norm is dominated by every q-nuclear norm") {
  std::mt19937 rng(913);
  for (int trial = 0; trial < 40; ++trial) {
    int dom = 2 + trial % 5, tgt = 2 + (trial / 2) % 4;
    FiniteRankMap T = random_map(rng, dom, tgt, 1 + trial % 6);
    double op = T.op_norm().value;
    for (double q : {0.5, 1.0})
      CHECK(op <= nuclearity::p_nuclear_norm(T, q).best() * (1.0 + 1e-12));
  }
}

TEST_CASE("epsilon content: exact segment counts and certified lower bounds") {
  FiniteRankMap seg = diag_map({1.0});  // image = [-1, 1]

  auto big = nuclearity::eps_content(seg, 2.5);
  CHECK(big.value == 1);
  CHECK(big.exact);
  CHECK(big.method == "diameter");

  auto exact = nuclearity::eps_content(seg, 0.4);
  CHECK(exact.exact);
  CHECK(exact.method == "rank_one_exact");
  // independent count: most points on a length-2 segment pairwise > 0.4 apart
  long long n = 1;
  while (double(n) * 0.4 < 2.0) ++n;
  CHECK(exact.value == n);
  CHECK(exact.value == 5);

  auto greedy =
      nuclearity::eps_content(seg, 0.4, ContentMethod::GreedyPacking);
  CHECK_FALSE(greedy.exact);
  CHECK(greedy.value <= exact.value);
  CHECK(greedy.value >= 3);

  // near-rank-one detection: a second singular value at rounding level
  FiniteRankMap near = FiniteRankMap::hilbert(
      2, 2,
      {{vec({1.0, 0.0}), vec({1.0, 0.0})},
       {vec({1.0, 1e-15}), vec({-0.5, 0.0})}});
  CHECK(nuclearity::eps_content(near, 0.3).method == "rank_one_exact");

  FiniteRankMap disk = diag_map({1.0, 0.3});
  EpsContentOptions gopt;
  gopt.pitch = 0.09;
  auto grid =
      nuclearity::eps_content(disk, 0.4, ContentMethod::ExhaustiveGrid, gopt);
  CHECK_FALSE(grid.exact);
  CHECK(grid.value >= 5);
  auto packed = nuclearity::eps_content(disk, 0.4);
  CHECK(packed.value >= 5);
}

TEST_CASE("epsilon content rejects unusable requests") {
  FiniteRankMap disk = diag_map({1.0, 0.3});
  CHECK_THROWS_AS(nuclearity::eps_content(disk, 0.0), ValidationError);
  CHECK_THROWS_AS(
      nuclearity::eps_content(disk, 0.4, ContentMethod::RankOneExact),
      ValidationError);

  EpsContentOptions bad;
  bad.pitch = 0.0;
  CHECK_THROWS_AS(
      nuclearity::eps_content(disk, 0.4, ContentMethod::ExhaustiveGrid, bad),
      ValidationError);
  bad.pitch = 0.2;  // >= eps/4
  CHECK_THROWS_AS(
      nuclearity::eps_content(disk, 0.4, ContentMethod::ExhaustiveGrid, bad),
      ValidationError);

  FiniteRankMap big4 = diag_map({1.0, 0.9, 0.8, 0.7});
  EpsContentOptions ok;
  ok.pitch = 0.05;
  CHECK_THROWS_AS(
      nuclearity::eps_content(big4, 0.4, ContentMethod::ExhaustiveGrid, ok),
      ValidationError);

  FiniteRankMap seg = diag_map({1.0});
  CHECK_THROWS_AS(nuclearity::eps_content(seg, 1e-9), ValidationError);
}

TEST_CASE("content constant stays bounded and counts fall with epsilon") {
  FiniteRankMap seg = diag_map({1.0});
  CHECK_THROWS_AS(
      nuclearity::content_constant_check(seg, 0.5, 1.0, {0.4}),
      ValidationError);  // q must exceed p/(1-p) = 1
  CHECK_THROWS_AS(
      nuclearity::content_constant_check(seg, 0.2, 0.2, {0.4}),
      ValidationError);
  CHECK_THROWS_AS(nuclearity::content_constant_check(seg, 0.2, 0.5, {}),
                  ValidationError);

  auto rep = nuclearity::content_constant_check(seg, 0.2, 0.5,
                                                {0.4, 0.8, 1.2, 1.9});
  CHECK(rep.p_norm_exact);
  CHECK(rep.p_norm == Catch::Approx(1.0));
  REQUIRE(rep.rows.size() == 4);
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].content <= rep.rows[i - 1].content);
  CHECK(rep.rows[0].content == 5);
  CHECK(rep.c_max > 0.0);
  CHECK(rep.c_max < 10.0);
}

TEST_CASE("tensor products multiply Schatten norms and term bounds") {
  FiniteRankMap A = diag_map({1.0, 0.5});
  FiniteRankMap B = diag_map({1.0, 1.0 / 3.0});
  FiniteRankMap AB = nuclearity::tensor_product(A, B);
  CHECK(AB.domain().coord_dim() == 4);

  for (double p : {0.5, 1.0}) {
    auto na = nuclearity::p_nuclear_norm(A, p);
    auto nb = nuclearity::p_nuclear_norm(B, p);
    auto nab = nuclearity::p_nuclear_norm(AB, p);
    CHECK(*nab.schatten ==
          Catch::Approx(*na.schatten * *nb.schatten).epsilon(1e-12));
    CHECK(nab.decomposition_bound ==
          Catch::Approx(na.decomposition_bound * nb.decomposition_bound)
              .epsilon(1e-12));
  }
  CHECK(*nuclearity::p_nuclear_norm(AB, 1.0).schatten ==
        Catch::Approx(2.0).epsilon(1e-12));

  MatrixXd F = MatrixXd::Identity(2, 2);
  FiniteRankMap M =
      FiniteRankMap::matrix_domain(2, 2, 1, {{F, vec({1.0})}});
  CHECK_THROWS_AS(nuclearity::tensor_product(A, M), ValidationError);
}

TEST_CASE("orthonormalization reproduces orthogonal input and flags skips") {
  FiniteRankMap T = FiniteRankMap::hilbert(
      3, 3,
      {{vec({1.0, 0.0, 0.0}), vec({1.0, 0.0, 0.0})},
       {vec({0.0, 1.0, 0.0}), vec({0.0, 0.5, 0.0})}});
  auto d = nuclearity::orthonormalize_decomposition(T, 0.5);
  CHECK(d.rank == 2);
  CHECK(d.skipped.empty());
  CHECK(d.sum_norms_q == Catch::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-12));
  CHECK(d.sum_norms_q <= d.majorant * (1.0 + 1e-9));
  CHECK(nuclearity::reconstruction_defect(T, d) < 1e-14);

  FiniteRankMap dep = FiniteRankMap::hilbert(
      2, 2,
      {{vec({1.0, 0.0}), vec({0.0, 1.0})},
       {vec({0.0, 1.0}), vec({0.0, 2.0})}});
  auto dd = nuclearity::orthonormalize_decomposition(dep, 1.0);
  CHECK(dd.rank == 1);
  REQUIRE(dd.skipped.size() == 1);
  CHECK(nuclearity::reconstruction_defect(dep, dd) < 1e-12);

  CHECK_THROWS_AS(nuclearity::orthonormalize_decomposition(T, 0.0),
                  ValidationError);
  CHECK_THROWS_AS(nuclearity::orthonormalize_decomposition(T, 1.1),
                  ValidationError);
}

TEST_CASE("orthonormalization: random maps reconstruct within tolerance") {
  std::mt19937 rng(4711);
  for (int trial = 0; trial < 30; ++trial) {
    int dom = 2 + trial % 6, tgt = 2 + (trial / 3) % 5;
    FiniteRankMap T = random_map(rng, dom, tgt, 1 + trial % 6);
    double q = 0.3 + 0.7 * (trial % 8) / 7.0;
    auto d = nuclearity::orthonormalize_decomposition(T, q);

    double scale = 0.0;
    for (const auto& t : T.terms())
      scale = std::max(scale, t.dual_norm * t.target.norm());
    CHECK(nuclearity::reconstruction_defect(T, d) <= 1e-9 * std::max(1.0, scale));
    for (std::size_t i = 0; i < d.xi.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double ip = d.xi[i].dot(d.xi[j]);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    CHECK(d.sum_norms_q <= d.majorant * (1.0 + 1e-9));
  }
}

TEST_CASE("matrix-domain functionals use the trace dual norm") {
  MatrixXd F(2, 2);
  F << 0.8, -0.3, 0.1, 0.6;
  FiniteRankMap M =
      FiniteRankMap::matrix_domain(2, 2, 2, {{F, vec({1.0, 2.0})}});
  Eigen::JacobiSVD<MatrixXd> svd(F);
  CHECK(M.terms()[0].dual_norm ==
        Catch::Approx(svd.singularValues().sum()).epsilon(1e-12));
  CHECK_THROWS_AS(
      FiniteRankMap::matrix_domain(2, 2, 1, {{MatrixXd::Zero(3, 2), vec({1.0})}}),
      ValidationError);
}

TEST_CASE("exponent windows reproduce the frozen thresholds at p = 0.1") {
  auto w = nuclearity::exponent_windows(0.1);
  CHECK(w.limit_maps.admissible);
  CHECK(w.limit_maps.q_min == Catch::Approx(2.0 / 17.0).margin(1e-15));
  CHECK(w.damped_tail.admissible);
  CHECK(w.damped_tail.q_min == Catch::Approx(2.0 / 9.0).margin(1e-15));
  CHECK(w.charged_tail.admissible);
  CHECK(w.charged_tail.q_min == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(w.orthonormalization.admissible);
  CHECK(w.orthonormalization.q_min == Catch::Approx(4.0 / 21.0).margin(1e-15));
  CHECK(w.content_premise.admissible);
  CHECK(w.content_premise.q_min == Catch::Approx(1.0 / 9.0).margin(1e-15));
}

TEST_CASE("exponent windows close in the documented order") {
  auto w6 = nuclearity::exponent_windows(1.0 / 6.0);
  CHECK_FALSE(w6.charged_tail.admissible);
  CHECK(std::isnan(w6.charged_tail.q_min));
  CHECK(w6.limit_maps.admissible);
  CHECK(w6.damped_tail.admissible);

  auto w4 = nuclearity::exponent_windows(0.4);
  CHECK_FALSE(w4.limit_maps.admissible);
  CHECK_FALSE(w4.damped_tail.admissible);
  CHECK_FALSE(w4.charged_tail.admissible);
  CHECK(w4.orthonormalization.admissible);
  CHECK(w4.content_premise.admissible);

  auto w7 = nuclearity::exponent_windows(0.7);
  CHECK_FALSE(w7.orthonormalization.admissible);
  CHECK_FALSE(w7.content_premise.admissible);
  CHECK(w7.content_premise.q_min > 1.0);  // window exists but is empty

  auto w1 = nuclearity::exponent_windows(1.0);
  CHECK_FALSE(w1.limit_maps.admissible);
  CHECK_FALSE(w1.orthonormalization.admissible);
  CHECK(std::isnan(w1.content_premise.q_min));

  CHECK_THROWS_AS(nuclearity::exponent_windows(0.0), ValidationError);
  CHECK_THROWS_AS(nuclearity::exponent_windows(-0.1), ValidationError);
  CHECK_THROWS_AS(nuclearity::exponent_windows(1.2), ValidationError);
}
