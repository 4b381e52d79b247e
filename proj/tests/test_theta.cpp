// Damped-inclusion spectra. Frozen anchors come from an independent
// dense-quadrature implementation of the whitened Gram construction.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <vector>

#include <scalelab/theta.hpp>

namespace {

using namespace scalelab;

TestFunction probe(double w) {
  GaussianSpec g;
  g.width = w;
  return TestFunction::gaussian({3}, Domain::Spacetime, g);
}

std::shared_ptr<sectors::FiniteGroup> shared_group(sectors::FiniteGroup g) {
  return std::make_shared<sectors::FiniteGroup>(std::move(g));
}

FreeMultipletFactor singleton_factor(double mass) {
  auto G = shared_group(sectors::FiniteGroup::cyclic(1));
  auto reps = sectors::irreps(*G);
  return build_free_factor({3}, G, reps, {0}, {{0, mass}});
}

GeneratorFamily free_family() {
  return make_generator_family(singleton_factor(1.0),
                               {probe(0.12), probe(0.16), probe(0.2)});
}

GeneratorFamily damped_family() {
  return make_generator_family(
      build_damped_factor({3}, NSchedule::log2_squared(), 0, 1), {probe(0.2)});
}

}  // namespace

TEST_CASE("free-factor spectra hit the frozen p-norms and stay bounded") {
  GeneratorFamily gen = free_family();
  std::map<double, std::map<double, double>> norms;  // p -> lam -> value
  for (double lam : {1.0, 0.1, 0.01}) {
    NuclearitySpectrum s = theta_spectrum(gen, lam, 1.0);
    CHECK(s.n_states == 3);
    CHECK(s.n_components == 1);
    CHECK(s.proxy);
    for (double p : {0.5, 1.0}) norms[p][lam] = s.p_norms.at(p);
  }
  CHECK(norms[0.5][1.0] == Catch::Approx(1.742983e-01).epsilon(1e-4));
  CHECK(norms[1.0][1.0] == Catch::Approx(1.121750e-01).epsilon(1e-4));

  for (double p : {0.5, 1.0}) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto& [lam, v] : norms[p]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double expect = p == 0.5 ? 1.6216 : 1.7023;
    CHECK(hi / lo == Catch::Approx(expect).epsilon(2e-3));
    CHECK(hi / lo <= 2.0);
  }
}

TEST_CASE("damped-factor top values collapse along the frozen sequence") {
  GeneratorFamily gen = damped_family();
  const std::pair<double, double> expect[] = {{1.0, 4.5290971287e-02},
                                              {0.1, 7.1997140526e-12},
                                              {0.01, 5.5195855934e-21},
                                              {0.001, 3.6827437898e-30}};
  for (auto [lam, top] : expect) {
    NuclearitySpectrum s = theta_spectrum(gen, lam, 1.0);
    REQUIRE(s.sv.size() >= 1);
    CHECK(s.sv[0] == Catch::Approx(top).epsilon(1e-6));
  }
}

TEST_CASE("decay report certifies per-decade collapse and beta monotonicity") {
  GeneratorFamily gen = damped_family();
  SpectrumDecayReport rep = damped_spectrum_decay(gen, {1.0, 0.1, 0.01}, 1.0);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].n_box == 0);
  CHECK(rep.rows[1].n_box == 16);
  CHECK(rep.rows[2].n_box == 49);
  CHECK(rep.decade_decreasing);
  CHECK(rep.max_decade_ratio < 1e-8);
  CHECK(rep.beta_monotone);
  CHECK(rep.beta_check_top <= rep.rows.back().top);

  CHECK_THROWS_AS(damped_spectrum_decay(free_family(), {1.0, 0.1}, 1.0),
                  ValidationError);
}

TEST_CASE("single-beta spectrum shrinks when beta doubles") {
  GeneratorFamily gen = free_family();
  NuclearitySpectrum s1 = theta_spectrum(gen, 1.0, 1.0);
  NuclearitySpectrum s2 = theta_spectrum(gen, 1.0, 2.0);
  REQUIRE(s1.sv.size() == s2.sv.size());
  CHECK(s2.sv[0] < s1.sv[0]);
  CHECK(p_norm(s2, 1.0) < p_norm(s1, 1.0));
}

TEST_CASE("generalized evaluation reduces exactly to the single-beta case") {
  GeneratorFamily gen = free_family();
  double beta = 0.7, lam = 0.3;
  NuclearitySpectrum a = theta_spectrum(gen, lam, beta);
  NuclearitySpectrum b = generalized_theta(
      gen, lam,
      [beta](double p0, double) {
        return std::complex<double>(std::exp(-beta * p0), 0.0);
      },
      beta, GaugeWeights::identity());
  REQUIRE(a.sv.size() == b.sv.size());
  for (int i = 0; i < a.sv.size(); ++i) CHECK(a.sv[i] == b.sv[i]);
  CHECK(a.rule_fingerprint == b.rule_fingerprint);
  CHECK(b.beta == 0.0);  // custom damping does not claim a beta
  CHECK(a.beta == beta);
}

TEST_CASE("gauge averaging acts blockwise through the character scalars") {
  auto G = shared_group(sectors::FiniteGroup::cyclic(4));
  auto reps = sectors::irreps(*G);
  int i1 = -1, i3 = -1;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].name == "chi1") i1 = static_cast<int>(i);
    if (reps[i].name == "chi3") i3 = static_cast<int>(i);
  }
  REQUIRE(i1 >= 0);
  REQUIRE(i3 >= 0);
  FreeMultipletFactor charged =
      build_free_factor({3}, G, reps, {i1, i3}, {{i1, 1.0}, {i3, 1.0}});
  GeneratorFamily gen = make_generator_family(charged, {probe(0.2)});

  ThetaOptions plain;
  NuclearitySpectrum id = theta_spectrum(gen, 1.0, 1.0, plain);
  CHECK(id.n_components == 2);
  CHECK(id.n_states == 2);

  // Haar average kills every nontrivial charge.
  ThetaOptions haar;
  haar.gauge = GaugeWeights::uniform(*G);
  NuclearitySpectrum dead = theta_spectrum(gen, 1.0, 1.0, haar);
  CHECK(dead.sv[0] < 1e-8);

  // The chi1 projector keeps exactly the chi1 block with unit weight.
  ThetaOptions proj;
  proj.gauge = GaugeWeights::character_projector(*G, reps[i1]);
  NuclearitySpectrum kept = theta_spectrum(gen, 1.0, 1.0, proj);
  NuclearitySpectrum lone =
      theta_spectrum(make_generator_family(singleton_factor(1.0),
                                           {probe(0.2)}),
                     1.0, 1.0);
  CHECK(kept.sv[0] == Catch::Approx(lone.sv[0]).epsilon(1e-9));
  CHECK(kept.eff_rank == 1);
  CHECK(id.eff_rank == 2);

  // Projector weights are 0/1, so applying the scalar twice changes nothing.
  std::complex<double> c1 =
      detail::gauge_scalar(gen, proj.gauge, gen.label(0));
  CHECK(std::abs(c1 * c1 - c1) < 1e-12);

  // Damped factors carry no gauge action to average over.
  ThetaOptions bad;
  bad.gauge = GaugeWeights::uniform(*G);
  CHECK_THROWS_AS(theta_spectrum(damped_family(), 1.0, 1.0, bad),
                  ValidationError);
}

TEST_CASE("custom damping must respect the declared domination bound") {
  GeneratorFamily gen = free_family();
  CHECK_THROWS_AS(
      generalized_theta(
          gen, 1.0,
          [](double p0, double) {
            return std::complex<double>(std::exp(0.1 * p0), 0.0);
          },
          0.5, GaugeWeights::identity()),
      ValidationError);
}

TEST_CASE("linearly dependent generator sets are rejected as degenerate") {
  GeneratorFamily gen = make_generator_family(
      singleton_factor(1.0), {probe(0.2), probe(0.2), probe(0.2)});
  CHECK_THROWS_AS(theta_spectrum(gen, 1.0, 1.0), ValidationError);
}

TEST_CASE("family construction validates localization and content") {
  FreeMultipletFactor F = singleton_factor(1.0);
  CHECK_THROWS_AS(make_generator_family(F, {}), ValidationError);
  CHECK_THROWS_AS(make_generator_family(F, {probe(0.2)}, -1.0),
                  ValidationError);
  CHECK_THROWS_AS(
      make_generator_family(F, {TestFunction::zero({3}, Domain::Spacetime)}),
      ValidationError);
  CHECK_THROWS_AS(
      make_generator_family(
          F, {TestFunction::gaussian({3}, Domain::Spatial, {})}),
      ValidationError);
  // width 1 has effective support ~ 4.7, far outside the unit region
  CHECK_THROWS_AS(make_generator_family(F, {probe(1.0)}), ValidationError);
  CHECK_NOTHROW(make_generator_family(F, {probe(1.0)}, 6.0));
}

TEST_CASE("truncation tails shrink monotonically and ranks are stable") {
  GeneratorFamily gen = free_family();
  NuclearitySpectrum s = theta_spectrum(gen, 1.0, 1.0);

  CHECK(truncation_tail(s, 0, 1.0) == Catch::Approx(p_norm(s, 1.0)));
  double prev = truncation_tail(s, 0, 0.5);
  for (int n = 1; n <= s.sv.size(); ++n) {
    double t = truncation_tail(s, n, 0.5);
    CHECK(t <= prev);
    prev = t;
  }
  CHECK(truncation_tail(s, static_cast<int>(s.sv.size()), 1.0) == 0.0);

  double tol = 0.5 * s.sv[0];
  int r1 = truncation_rank(s, tol, 1.0);
  CHECK(r1 >= 1);

  ThetaOptions fine;
  fine.quad.radial_per_panel = 48;
  NuclearitySpectrum sf = theta_spectrum(gen, 1.0, 1.0, fine);
  CHECK(std::abs(truncation_rank(sf, tol, 1.0) - r1) <= 1);
  CHECK(sf.sv[0] == Catch::Approx(s.sv[0]).epsilon(1e-8));

  CHECK_THROWS_AS(p_norm(s, 0.0), ValidationError);
  CHECK_THROWS_AS(p_norm(s, 1.5), ValidationError);
  CHECK_THROWS_AS(truncation_tail(s, -1, 1.0), ValidationError);
  CHECK_THROWS_AS(truncation_tail(s, 0, 2.0), ValidationError);
  CHECK_THROWS_AS(theta_spectrum(gen, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(theta_spectrum(gen, 1.0, -1.0), ValidationError);
}
