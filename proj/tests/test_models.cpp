// Product-model factors: schedules, charged states, energy diagnostics and
// the preservation proxy. Numeric anchors are frozen values computed with an
// independent high-precision integrator.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include <scalelab/models.hpp>

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

int find_irrep(const std::vector<sectors::Irrep>& reps,
               const std::string& name) {
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (reps[i].name == name) return static_cast<int>(i);
  throw std::runtime_error("irrep not found: " + name);
}

FreeMultipletFactor singleton_factor(double mass) {
  auto G = shared_group(sectors::FiniteGroup::cyclic(1));
  auto reps = sectors::irreps(*G);
  return build_free_factor({3}, G, reps, {0}, {{0, mass}});
}

std::vector<double> quarter_decade_grid(int k_max) {
  std::vector<double> g;
  for (int k = 0; k <= k_max; ++k) g.push_back(std::pow(10.0, -k / 4.0));
  return g;
}

}  // namespace

TEST_CASE("damping schedules take the advertised integer values") {
  NSchedule lin = NSchedule::log2_linear();
  CHECK(lin(1.0) == 0);
  CHECK(lin(2.0) == 0);
  CHECK(lin(0.5) == 1);
  CHECK(lin(0.25) == 2);
  CHECK(lin(0.3) == 2);

  NSchedule sq = NSchedule::log2_squared();
  CHECK(sq(1.0) == 0);
  CHECK(sq(0.5) == 1);
  CHECK(sq(0.1) == 16);
  CHECK(sq(0.01) == 49);
  CHECK(sq(0.001) == 100);

  NSchedule half = NSchedule::log2_squared(0.5);
  CHECK(half(0.7) == 0);
  CHECK(half(0.25) == 1);

  CHECK(NSchedule::zero()(1e-6) == 0);
  CHECK_THROWS_AS(lin(0.0), ValidationError);
  CHECK_THROWS_AS(NSchedule::log2_squared(0.0), ValidationError);

  std::vector<double> grid = {1.0, 0.5, 0.1, 0.01, 0.001};
  CHECK_NOTHROW(lin.validate_on(grid));
  CHECK_NOTHROW(sq.validate_on(grid));

  NSchedule bad;
  bad.lambda0 = 1.0;
  bad.name = "bad";
  bad.fn = [](double lam) { return lam < 0.2 ? 1 : (lam < 0.6 ? 3 : 0); };
  CHECK_THROWS_AS(bad.validate_on(grid), ValidationError);
  NSchedule neg;
  neg.fn = [](double) { return -2; };
  CHECK_THROWS_AS(neg(0.5), ValidationError);
}

TEST_CASE("damped norm logs track the frozen reference sequence") {
  // ln ||u(lambda)||^2 for the width-0.2 probe under the squared-octave
  // schedule; reference values from an external adaptive integrator.
  const double expect[] = {-6.218247, -1.251257, 39.974097,  138.040611,
                           310.018732, 572.015746, 626.702142, 1019.641148,
                           1538.069385, 2197.033317, 3011.415205, 3995.971782,
                           4223.352060};
  DampedFactor F = build_damped_factor({3}, NSchedule::log2_squared(), 0, 1);
  TestFunction f = probe(0.2);
  auto grid = quarter_decade_grid(12);
  std::vector<double> lnv;
  for (double lam : grid) {
    OneParticleVector u = charged_one_particle_state(F, 0, f, lam);
    lnv.push_back(u.norm2_log());
  }
  for (std::size_t k = 0; k < lnv.size(); ++k)
    CHECK(lnv[k] == Catch::Approx(expect[k]).margin(2e-3));
  // Strict blow-up along the grid with a uniform margin.
  for (std::size_t k = 1; k < lnv.size(); ++k) CHECK(lnv[k] - lnv[k - 1] > 3.0);
}

TEST_CASE("free-factor lambda*energy depends only on lambda*mass") {
  TestFunction f = probe(0.2);
  auto at = [&](double mass, double lam) {
    FreeMultipletFactor F = singleton_factor(mass);
    return charge_energy_diagnostic(F, 0, f, {lam}).rows[0].lamH;
  };
  CHECK(at(1.0, 0.5) == Catch::Approx(at(0.5, 1.0)).epsilon(1e-8));
  CHECK(at(2.0, 0.25) == Catch::Approx(at(0.5, 1.0)).epsilon(1e-8));
  CHECK(at(2.0, 0.125) == Catch::Approx(at(1.0, 0.25)).epsilon(1e-8));

  // Bounded spread across masses and scales (frozen max ratio 1.3035).
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  auto grid = quarter_decade_grid(12);
  for (double mass : {0.5, 1.0, 2.0}) {
    FreeMultipletFactor F = singleton_factor(mass);
    ChargeEnergyTable t = charge_energy_diagnostic(F, 0, f, grid);
    for (const auto& row : t.rows) {
      lo = std::min(lo, row.lamH);
      hi = std::max(hi, row.lamH);
    }
  }
  CHECK(hi / lo == Catch::Approx(1.3035).epsilon(2e-3));
  CHECK(hi / lo < 1.5);
}

TEST_CASE("damped lambda*energy grows by the frozen factor over two decades") {
  DampedFactor F = build_damped_factor({3}, NSchedule::log2_squared(), 0, 1);
  ChargeEnergyTable t =
      charge_energy_diagnostic(F, 0, probe(0.2), {1.0, 0.1, 0.01});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].n_box == 0);
  CHECK(t.rows[2].n_box == 49);
  double growth = t.rows[2].lamH / t.rows[0].lamH;
  CHECK(growth == Catch::Approx(11.2759).epsilon(1e-3));
  CHECK(growth > 10.0);
}

TEST_CASE("preservation proxy: own orbit is exact, fixed orbit separates") {
  DampedFactor F = build_damped_factor({3}, NSchedule::log2_squared(), 0, 1);
  TestFunction f = probe(0.2);
  std::vector<double> grid = {1.0, 0.1, 0.01, 0.001};

  CandidateOrbit own{f, F.schedule.fn, std::nullopt};
  PreservationProxy self = preservation_proxy(F, 0, f, own, grid);
  REQUIRE(self.distance.size() == 4);
  for (double d : self.distance) CHECK(d == 0.0);
  CHECK(self.tail_sup == 0.0);
  CHECK(self.proxy);

  CandidateOrbit fixed{f, [](double) { return 0; }, std::nullopt};
  PreservationProxy sep = preservation_proxy(F, 0, f, fixed, grid);
  CHECK(sep.distance.front() == 0.0);  // schedules agree at lambda = 1
  CHECK(sep.distance.back() > 1.41);   // orthogonal up to a ~1e-31 overlap
  CHECK(sep.tail_sup > 1.41);

  CandidateOrbit wrong{f, F.schedule.fn, ChargeLabel{5, 0, "other"}};
  CHECK_THROWS_AS(preservation_proxy(F, 0, f, wrong, grid), ValidationError);
}

TEST_CASE("free factor construction enforces conjugation symmetry") {
  auto G = shared_group(sectors::FiniteGroup::cyclic(4));
  auto reps = sectors::irreps(*G);
  REQUIRE(reps.size() == 4);
  int i1 = find_irrep(reps, "chi1");
  int i3 = find_irrep(reps, "chi3");

  CHECK_THROWS_AS(build_free_factor({3}, G, reps, {i1}, {{i1, 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS(
      build_free_factor({3}, G, reps, {i1, i3}, {{i1, 1.0}, {i3, 2.0}}),
      ValidationError);
  CHECK_THROWS_AS(build_free_factor({3}, G, reps, {}, {}), ValidationError);
  CHECK_THROWS_AS(build_free_factor({3}, nullptr, reps, {0}, {{0, 1.0}}),
                  ValidationError);

  FreeMultipletFactor F =
      build_free_factor({3}, G, reps, {i1, i3}, {{i1, 1.0}, {i3, 1.0}});
  CHECK(F.components() == 2);
  CHECK(F.masses == std::vector<double>{1.0, 1.0});
  CHECK(F.labels[0].irrep != F.labels[1].irrep);

  ModelContext ctx = context_for(F, 0);
  CHECK(ctx.measure.is_point());
  CHECK(ctx.measure.mass == 1.0);
  CHECK_THROWS_AS(context_for(F, 2), ValidationError);
}

TEST_CASE("torus free factors pair weights with their negatives") {
  sectors::TorusGroup T{1};
  sectors::TorusIrrep plus{{3}, "w+3"}, minus{{-3}, "w-3"}, zero{{0}, "w0"};

  FreeMultipletFactor F =
      build_free_factor_torus({3}, T, {plus, minus, zero}, {1.0, 1.0, 0.5});
  CHECK(F.components() == 3);

  CHECK_THROWS_AS(build_free_factor_torus({3}, T, {plus}, {1.0}),
                  ValidationError);
  CHECK_THROWS_AS(
      build_free_factor_torus({3}, T, {plus, minus}, {1.0, 2.0}),
      ValidationError);
  CHECK_THROWS_AS(build_free_factor_torus({3}, T, {}, {}), ValidationError);
}

TEST_CASE("damped factor construction and charge bookkeeping") {
  CHECK_THROWS_AS(build_damped_factor({3}, NSchedule::zero(), 0, 0),
                  ValidationError);
  DampedFactor F = build_damped_factor({3}, NSchedule::zero(), 1, 1);
  CHECK(F.components() == 3);
  CHECK(F.labels[0].irrep == F.labels[1].irrep);
  CHECK(F.labels[0].component != F.labels[1].component);
  CHECK(F.labels[2].irrep == 1);

  // Irrep-driven construction: one conjugate pair from Z4's chi1/chi3.
  auto G = shared_group(sectors::FiniteGroup::cyclic(4));
  auto reps = sectors::irreps(*G);
  DampedFactor Fz = build_damped_factor(
      {3}, NSchedule::zero(), reps,
      {find_irrep(reps, "chi1"), find_irrep(reps, "chi3")});
  CHECK(Fz.m1 == 1);
  CHECK(Fz.p1 == 0);
  CHECK(Fz.components() == 2);

  ModelContext ctx = context_for(Fz);
  CHECK_FALSE(ctx.measure.is_point());

  CHECK_THROWS_AS(
      charged_one_particle_state(Fz, 7, probe(0.2), 1.0), ValidationError);
  TestFunction spat = TestFunction::gaussian({3}, Domain::Spatial, {});
  CHECK_THROWS_AS(charged_one_particle_state(Fz, 0, spat, 1.0),
                  ValidationError);
}

TEST_CASE("diagnostic grids are validated") {
  FreeMultipletFactor F = singleton_factor(1.0);
  TestFunction f = probe(0.2);
  CHECK_THROWS_AS(charge_energy_diagnostic(F, 0, f, {}), ValidationError);
  CHECK_THROWS_AS(charge_energy_diagnostic(F, 0, f, {1.0, -0.5}),
                  ValidationError);
  ChargeEnergyTable t = charge_energy_diagnostic(F, 0, f, {0.25, 1.0, 0.5});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].lam == 1.0);  // sorted descending on entry
  CHECK(t.rows[2].lam == 0.25);
  CHECK(t.rows[0].lamH == t.rows[0].lam * t.rows[0].H);
}
