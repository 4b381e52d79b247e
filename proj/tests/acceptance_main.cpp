// Acceptance gate: every numbered release criterion checked at its stated
// tolerance, one [PASS]/[FAIL] line per criterion. Usage:
//
//   scalelab_acceptance <path-to-scalelab-cli> <path-to-config.json>
//
// The CLI binary and config are needed by the determinism criterion, which
// runs the full pipeline twice and byte-compares the artifacts. Exits 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <scalelab.hpp>

namespace {

using namespace scalelab;
namespace fs = std::filesystem;
using clock_t_ = std::chrono::steady_clock;

constexpr double kAmp = 0.063493635934240969;  // (2 pi)^(-3/2)

int g_failures = 0;

void line(int id, const char* name, bool pass, const std::string& details) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name,
              details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

template <class F>
void criterion(int id, const char* name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    line(id, name, false, std::string("error: ") + e.what());
  }
}

CauchyDatum gaussian_probe(double wg, double wh) {
  Dims d{3};
  GaussianSpec gs;
  gs.amplitude = kAmp;
  gs.width = wg;
  GaussianSpec hs;
  hs.amplitude = 0.5 * kAmp;
  hs.width = wh;
  return CauchyDatum::make(TestFunction::gaussian(d, Domain::Spatial, gs),
                           TestFunction::gaussian(d, Domain::Spatial, hs));
}

TestFunction local_probe(double width) {
  GaussianSpec s;
  s.amplitude = kAmp;
  s.width = width;
  return TestFunction::gaussian(Dims{3}, Domain::Spacetime, s);
}

std::shared_ptr<const sectors::FiniteGroup> trivial_group() {
  return std::make_shared<sectors::FiniteGroup>(sectors::FiniteGroup::cyclic(1));
}

FreeMultipletFactor singleton_factor(double mass) {
  auto g = trivial_group();
  auto reps = sectors::irreps(*g);
  return build_free_factor(Dims{3}, g, reps, {0}, {{0, mass}});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr,
                 "usage: scalelab_acceptance <cli-binary> <config.json>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::string config = argv[2];

  const std::vector<double> grid = harness::ScaleGrid{}.points();
  const std::vector<double> masses = {0.5, 1.0, 2.0};
  const CauchyDatum probe = gaussian_probe(1.0, 0.8);

  // ------------------------------------------------------------------ 1
  criterion(1, "mass-scaling covariance", [&] {
    auto t0 = clock_t_::now();
    double worst = 0.0;
    for (double m : masses)
      for (double lam : grid) {
        double lhs = vacuum_form(probe.dilated(lam), m).q;
        double rhs = vacuum_form(probe, lam * m).q;
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
      }
    double dt = seconds_since(t0);
    line(1, "mass-scaling covariance", worst < 1e-6 && dt < 10.0,
         "max rel deviation " + fmt(worst) + " (tol 1e-06) over " +
             std::to_string(grid.size()) + " scales x 3 masses in " +
             fmt(dt) + " s (limit 10 s)");
  });

  // ------------------------------------------------------------------ 2
  criterion(2, "massless dilation invariance", [&] {
    double q0 = vacuum_form(probe, 0.0).q;
    double worst = 0.0;
    for (double lam : grid) {
      double q = vacuum_form(probe.dilated(lam), 0.0).q;
      worst = std::max(worst, std::abs(q - q0) / q0);
    }
    line(2, "massless dilation invariance", worst < 1e-8,
         "max rel deviation " + fmt(worst) + " (tol 1e-08)");
  });

  // ------------------------------------------------------------------ 3
  criterion(3, "scaling-limit convergence", [&] {
    ScalingFamily F = ScalingFamily::cauchy_orbit(probe);
    double target = vacuum_form(probe, 0.0).weyl();
    const std::vector<double> decades = {1.0, 0.1, 0.01, 1e-3};
    bool pass = true;
    double worst_ratio = 0.0;
    for (double m : masses) {
      ModelContext ctx{Dims{3}, MassMeasure::point(m), {}};
      std::vector<double> gap;
      for (double lam : decades)
        gap.push_back(std::abs(weyl_at_scale(F, lam, ctx).modulus - target));
      for (std::size_t k = 1; k < gap.size(); ++k)
        if (!(gap[k] < gap[k - 1])) pass = false;
      double ratio = gap.back() / gap.front();
      worst_ratio = std::max(worst_ratio, ratio);
      if (!(ratio < 1e-2)) pass = false;
    }
    line(3, "scaling-limit convergence", pass,
         "gap(1e-3)/gap(1) max " + fmt(worst_ratio) +
             " (tol 1e-02), decade-monotone for all masses");
  });

  // ------------------------------------------------------------------ 4
  criterion(4, "product factorization", [&] {
    CauchyDatum a = gaussian_probe(0.6, 0.5);
    ScalingFamily FA = ScalingFamily::cauchy_orbit(probe);
    ScalingFamily FB = ScalingFamily::cauchy_orbit(a);
    double worst = 0.0;
    int pairs = 0;
    for (double mA : {1.0, 0.0})
      for (double mB : {0.5, 2.0})
        for (double lam : {1.0, 0.1, 0.01}) {
          ModelContext ctxA{Dims{3}, MassMeasure::point(mA), {}};
          ModelContext ctxB{Dims{3}, MassMeasure::point(mB), {}};
          FactorizationCheck c =
              product_factorization(ctxA, ctxB, FA, FB, lam);
          worst = std::max(worst, c.defect);
          ++pairs;
        }
    line(4, "product factorization", worst < 1e-12,
         "max defect " + fmt(worst) + " (tol 1e-12) over " +
             std::to_string(pairs) + " pairs");
  });

  // ------------------------------------------------------------------ 5
  criterion(5, "asymptotic nuclearity trend", [&] {
    auto t0 = clock_t_::now();
    std::vector<TestFunction> fam_fns;
    for (double w : {0.12, 0.16, 0.2}) fam_fns.push_back(local_probe(w));
    GeneratorFamily free_gen =
        make_generator_family(singleton_factor(1.0), fam_fns, 2.0);
    std::map<double, double> base;
    bool pass = true;
    double worst_ratio = 0.0;
    for (double lam : grid) {
      NuclearitySpectrum s = theta_spectrum(free_gen, lam, 1.0);
      for (double p : {0.5, 1.0}) {
        double v = p_norm(s, p);
        if (lam == grid.front()) base[p] = v;
        double r = v / base[p];
        worst_ratio = std::max(worst_ratio, r);
        if (!(r <= 2.0)) pass = false;
      }
    }

    DampedFactor damped =
        build_damped_factor(Dims{3}, NSchedule::log2_squared(1.0), 0, 1);
    GeneratorFamily damped_gen =
        make_generator_family(damped, {local_probe(0.2)}, 2.0);
    double top_1 = theta_spectrum(damped_gen, 1.0, 1.0).sv[0];
    double top_2 = theta_spectrum(damped_gen, 0.01, 1.0).sv[0];
    if (!(top_2 < 0.1 * top_1)) pass = false;
    double dt = seconds_since(t0);
    if (!(dt < 60.0)) pass = false;
    line(5, "asymptotic nuclearity trend", pass,
         "free p-norm ratio max " + fmt(worst_ratio) +
             " (bound 2), damped top " + fmt(top_2) + " vs " + fmt(top_1) +
             " at the orbit start (bound 0.1x) in " + fmt(dt) +
             " s (limit 60 s)");
  });

  // ------------------------------------------------------------------ 6
  criterion(6, "preservation dichotomy", [&] {
    TestFunction f = local_probe(0.2);
    bool pass = true;

    double worst_free = 0.0;
    for (double m : {0.0, 0.5, 1.0, 2.0}) {
      ChargeEnergyTable t =
          charge_energy_diagnostic(singleton_factor(m), 0, f, grid);
      double lo = t.rows.front().lamH, hi = t.rows.front().lamH;
      for (const auto& r : t.rows) {
        lo = std::min(lo, r.lamH);
        hi = std::max(hi, r.lamH);
      }
      worst_free = std::max(worst_free, hi / lo);
    }
    if (!(worst_free < 1.5)) pass = false;

    DampedFactor damped =
        build_damped_factor(Dims{3}, NSchedule::log2_squared(1.0), 0, 1);
    ChargeEnergyTable dt =
        charge_energy_diagnostic(damped, 0, f, {1.0, 0.1, 0.01});
    double growth = dt.rows.back().lamH / dt.rows.front().lamH;
    if (!(growth > 10.0)) pass = false;

    const std::vector<double> proxy_grid = {1.0, 0.1, 0.01, 1e-3};
    CandidateOrbit own{f, [](double) { return 0; }, std::nullopt};
    PreservationProxy self =
        preservation_proxy(singleton_factor(1.0), 0, f, own, proxy_grid);
    double own_sup = 0.0;
    for (double d : self.distance) own_sup = std::max(own_sup, d);
    if (!(own_sup < 1e-10)) pass = false;

    PreservationProxy fixed =
        preservation_proxy(damped, 0, f, own, proxy_grid);
    double at_small = fixed.distance.back();
    if (!(at_small > 0.9)) pass = false;

    line(6, "preservation dichotomy", pass,
         "free lamH ratio max " + fmt(worst_free) +
             " (bound 1.5), damped growth " + fmt(growth) +
             " (bound 10), own-family distance " + fmt(own_sup) +
             " (tol 1e-10), fixed-candidate distance " + fmt(at_small) +
             " at 1e-3 (bound 0.9)");
  });

  // ------------------------------------------------------------------ 7
  criterion(7, "finite-rank calculus suite", [&] {
    using namespace nuclearity;
    auto t0 = clock_t_::now();
    bool pass = true;

    std::mt19937_64 rng(20260823u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_rec = 0.0, worst_orth = 0.0;
    for (int k = 0; k < 200; ++k) {
      int dd = 2 + static_cast<int>(rng() % 7);
      int dt_ = 2 + static_cast<int>(rng() % 7);
      int terms = 1 + static_cast<int>(rng() % 6);
      std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fy;
      for (int s = 0; s < terms; ++s) {
        Eigen::VectorXd fv(dd), yv(dt_);
        for (int i = 0; i < dd; ++i) fv[i] = gauss(rng);
        for (int i = 0; i < dt_; ++i) yv[i] = gauss(rng);
        fy.push_back({fv, yv});
      }
      if (k % 3 == 0)  // force a linearly dependent target
        fy.push_back({fy.front().first.reverse().eval(),
                      (0.5 * fy.front().second).eval()});
      FiniteRankMap T = FiniteRankMap::hilbert(dd, dt_, fy);
      double q = 0.3 + 0.7 * double(k % 8) / 7.0;
      OrthonormalizedDecomposition dec = orthonormalize_decomposition(T, q);
      worst_rec = std::max(worst_rec, reconstruction_defect(T, dec));
      for (std::size_t a = 0; a < dec.xi.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          double want = a == b ? 1.0 : 0.0;
          worst_orth = std::max(worst_orth,
                                std::abs(dec.xi[a].dot(dec.xi[b]) - want));
        }
    }
    if (!(worst_rec < 1e-9 && worst_orth < 1e-10)) pass = false;

    double worst_tensor = 0.0;
    for (int k = 0; k < 50; ++k) {
      auto rand_map = [&](int dd, int dt_) {
        std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fy;
        int terms = 1 + static_cast<int>(rng() % 3);
        for (int s = 0; s < terms; ++s) {
          Eigen::VectorXd fv(dd), yv(dt_);
          for (int i = 0; i < dd; ++i) fv[i] = gauss(rng);
          for (int i = 0; i < dt_; ++i) yv[i] = gauss(rng);
          fy.push_back({fv, yv});
        }
        return FiniteRankMap::hilbert(dd, dt_, fy);
      };
      FiniteRankMap A = rand_map(2 + int(rng() % 3), 2 + int(rng() % 3));
      FiniteRankMap B = rand_map(2 + int(rng() % 3), 2 + int(rng() % 3));
      FiniteRankMap AB = tensor_product(A, B);
      for (double p : {0.5, 1.0}) {
        double lhs = p_nuclear_norm(AB, p).best();
        double rhs = p_nuclear_norm(A, p).best() * p_nuclear_norm(B, p).best();
        worst_tensor =
            std::max(worst_tensor, std::abs(lhs - rhs) / std::max(1.0, rhs));
      }
    }
    if (!(worst_tensor < 1e-10)) pass = false;

    Eigen::VectorXd one(1);
    one << 1.0;
    FiniteRankMap unit = FiniteRankMap::hilbert(1, 1, {{one, one}});
    EpsContent content = eps_content(unit, 0.4);
    if (!(content.exact && content.value == 5)) pass = false;

    ExponentWindows w = exponent_windows(0.1);
    auto exact = [&](const WindowStatus& s, double want) {
      if (!s.admissible || std::abs(s.q_min - want) > 1e-15) pass = false;
    };
    exact(w.limit_maps, 2.0 / 17.0);
    exact(w.damped_tail, 2.0 / 9.0);
    exact(w.charged_tail, 1.0 / 3.0);
    exact(w.orthonormalization, 4.0 / 21.0);
    exact(w.content_premise, 1.0 / 9.0);

    double dt = seconds_since(t0);
    if (!(dt < 30.0)) pass = false;
    line(7, "finite-rank calculus suite", pass,
         "200 maps: reconstruction " + fmt(worst_rec) +
             " (tol 1e-09), orthonormality " + fmt(worst_orth) +
             " (tol 1e-10); 50 tensor pairs: deviation " + fmt(worst_tensor) +
             " (tol 1e-10); content(0.4) = " + std::to_string(content.value) +
             " (want 5); exponent windows exact at p = 0.1; " + fmt(dt) +
             " s (limit 30 s)");
  });

  // ------------------------------------------------------------------ 8
  criterion(8, "sector tables", [&] {
    using namespace sectors;
    auto t0 = clock_t_::now();
    bool pass = true;
    std::string counts;

    auto check_case = [&](const FiniteGroup& G, const std::vector<int>& N,
                          int want_preserved, int want_rest) {
      auto reps = irreps(G);
      std::vector<int> delta;
      for (std::size_t i = 0; i < reps.size(); ++i)
        delta.push_back(static_cast<int>(i));
      SectorTable t = sector_table(G, reps, N, delta);
      int rest = static_cast<int>(t.rows.size()) - t.preserved_count;
      int quot = static_cast<int>(irreps(quotient(G, N).group).size());
      if (t.preserved_count != want_preserved) pass = false;
      if (want_rest >= 0 && rest != want_rest) pass = false;
      if (t.preserved_count != quot) pass = false;
      counts += G.name() + " " + std::to_string(t.preserved_count) + "/" +
                std::to_string(rest) + "; ";
    };

    FiniteGroup z4 = FiniteGroup::cyclic(4);
    check_case(z4, {0, 2}, 2, 2);
    FiniteGroup s3 = FiniteGroup::symmetric3();
    check_case(s3, s3.generated_subgroup({3}), 2, 1);
    FiniteGroup v4 =
        FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
    check_case(v4, {0, 2}, 2, -1);
    FiniteGroup d4 = FiniteGroup::dihedral4();
    check_case(d4, d4.center(), 4, -1);
    FiniteGroup q8 = FiniteGroup::quaternion8();
    check_case(q8, q8.center(), 4, -1);

    TorusSectorTable tab =
        torus_sector_table(TorusGroup{1}, TorusSubgroup{{3}}, 4);
    std::vector<long long> kept;
    for (const auto& r : tab.rows)
      if (r.preserved) kept.push_back(r.k[0]);
    if (kept != std::vector<long long>{-3, 0, 3}) pass = false;

    double dt = seconds_since(t0);
    if (!(dt < 1.0)) pass = false;
    line(8, "sector tables", pass,
         counts + "torus weights {-3, 0, 3}; quotient counts match; " +
             fmt(dt) + " s (limit 1 s)");
  });

  // ------------------------------------------------------------------ 9
  criterion(9, "determinism", [&] {
    fs::path base = fs::temp_directory_path();
    fs::path d1 = base / "scalelab_accept_run1";
    fs::path d2 = base / "scalelab_accept_run2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    bool pass = true;
    std::string details;
    for (const fs::path& d : {d1, d2}) {
      std::string cmd = "\"" + cli + "\" all --config \"" + config +
                        "\" --out \"" + d.string() + "\" > /dev/null 2>&1";
      int rc = std::system(cmd.c_str());
      if (rc != 0) {
        pass = false;
        details = "cli run exited with status " + std::to_string(rc);
      }
    }
    if (pass) {
      auto listing = [](const fs::path& root) {
        std::set<std::string> out;
        for (const auto& e : fs::recursive_directory_iterator(root))
          if (e.is_regular_file())
            out.insert(fs::relative(e.path(), root).string());
        return out;
      };
      std::set<std::string> l1 = listing(d1), l2 = listing(d2);
      if (l1 != l2 || l1.empty()) {
        pass = false;
        details = "artifact listings differ";
      } else {
        int files = 0;
        for (const std::string& rel : l1) {
          ++files;
          if (slurp(d1 / rel) != slurp(d2 / rel)) {
            pass = false;
            details = "byte mismatch in " + rel;
            break;
          }
        }
        if (pass)
          details = "two full runs byte-identical across " +
                    std::to_string(files) + " artifacts";
      }
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
    line(9, "determinism", pass, details);
  });

  if (g_failures) {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("acceptance: all criteria passed\n");
  return 0;
}
