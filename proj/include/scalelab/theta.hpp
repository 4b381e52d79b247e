#pragma once

// Spectra of damped inclusion maps at the one-particle level. A generator
// family (a factor plus a set of localized smearing functions) produces, at
// each scale, a finite set of charged states; the map of interest multiplies
// them by a sub-unit damping factor in energy. Whitening the Gram matrix of
// the generators turns the damped overlap matrix into an operator whose
// spectrum is the computable stand-in for the singular values of the damped
// inclusion, and whose p-norms feed the nuclearity diagnostics.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"
#include "models.hpp"
#include "onep.hpp"
#include "sectors.hpp"

namespace scalelab {

// ---------------------------------------------------------------------------
// generator families

struct GeneratorFamily {
  std::variant<FreeMultipletFactor, DampedFactor> factor;
  std::vector<TestFunction> fns;  // scale-1 shapes, dilated along the orbit
  double region_radius = 1.0;

  const Dims& dims() const {
    return std::visit([](const auto& f) -> const Dims& { return f.dims; },
                      factor);
  }
  int components() const {
    return std::visit([](const auto& f) { return f.components(); }, factor);
  }
  const ChargeLabel& label(int c) const {
    return std::visit(
        [c](const auto& f) -> const ChargeLabel& { return f.labels.at(c); },
        factor);
  }
  bool is_damped() const {
    return std::holds_alternative<DampedFactor>(factor);
  }
};

inline GeneratorFamily make_generator_family(
    std::variant<FreeMultipletFactor, DampedFactor> factor,
    std::vector<TestFunction> fns, double region_radius = 1.0) {
  GeneratorFamily g{std::move(factor), std::move(fns), region_radius};
  if (g.fns.empty())
    throw ValidationError("make_generator_family: no generator functions");
  if (!(region_radius > 0))
    throw ValidationError("make_generator_family: region radius must be > 0");
  for (const auto& f : g.fns) {
    if (f.domain() != Domain::Spacetime || !(f.dims() == g.dims()))
      throw ValidationError(
          "make_generator_family: generators must be spacetime functions of "
          "the factor's dimension");
    if (f.is_zero())
      throw ValidationError("make_generator_family: zero generator");
    if (f.r_eff(1e-8) > region_radius * (1.0 + 1e-9))
      throw ValidationError(
          "make_generator_family: generator not localized in the region");
  }
  return g;
}

// ---------------------------------------------------------------------------
// gauge averaging

// Weights for averaging over the gauge group: finite-group elements with
// complex weights, or rank-one torus angles. On an irrep k the average acts
// by the scalar sum_g psi(g) chi_k(g) / chi_k(e).
struct GaugeWeights {
  std::vector<std::pair<int, std::complex<double>>> finite;
  std::vector<std::pair<double, std::complex<double>>> torus_angles;

  bool trivial() const { return finite.empty() && torus_angles.empty(); }

  static GaugeWeights identity() { return {}; }

  // Haar average: keeps only the trivial charge.
  static GaugeWeights uniform(const sectors::FiniteGroup& G) {
    GaugeWeights w;
    for (int g = 0; g < G.order(); ++g)
      w.finite.push_back({g, {1.0 / G.order(), 0.0}});
    return w;
  }

  // Central projector onto one irrep, normalized to pass it with weight 1.
  static GaugeWeights character_projector(const sectors::FiniteGroup& G,
                                          const sectors::Irrep& r) {
    GaugeWeights w;
    for (int g = 0; g < G.order(); ++g)
      w.finite.push_back(
          {g, std::conj(r.chi_of_element(G, g)) * double(r.dim) /
                  double(G.order())});
    return w;
  }
};

namespace detail {

// scalar applied to the block of charge `label` by the gauge average
inline std::complex<double> gauge_scalar(const GeneratorFamily& gen,
                                         const GaugeWeights& psi,
                                         const ChargeLabel& label) {
  if (psi.trivial()) return {1.0, 0.0};
  if (gen.is_damped())
    throw ValidationError(
        "gauge averaging needs a factor with group data attached");
  const auto& F = std::get<FreeMultipletFactor>(gen.factor);
  if (!psi.finite.empty()) {
    if (!F.group)
      throw ValidationError("gauge weights refer to a finite group the "
                            "factor does not carry");
    const sectors::Irrep& r = F.reps.at(label.irrep);
    KahanCSum acc;
    for (auto [g, wgt] : psi.finite)
      acc.add(wgt * r.chi_of_element(*F.group, g) / double(r.dim));
    return acc.value();
  }
  if (!F.torus || F.torus->rank != 1)
    throw ValidationError("torus gauge weights need a rank-one torus factor");
  long long k = F.torus_delta2.at(label.irrep).k.at(0);
  KahanCSum acc;
  for (auto [theta, wgt] : psi.torus_angles)
    acc.add(wgt * std::exp(std::complex<double>(0.0, double(k) * theta)));
  return acc.value();
}

struct WhitenedBlock {
  Eigen::VectorXd sv;  // descending
  int floor_hits = 0;
  std::uint64_t rule_fingerprint = 0;
};

// Spectrum of G^{-1/2} M G^{-1/2} for unit-normalized states u_i, where
// G is their Gram matrix and M the overlap damped by `mult` per node.
// Real non-negative multipliers give a Hermitian matrix with spectrum in
// [0,1] (the damping is a pointwise contraction); otherwise singular values
// are reported.
inline WhitenedBlock whitened_block(const std::vector<OneParticleVector>& us,
                                    const std::vector<std::complex<double>>& mv) {
  const int k = static_cast<int>(us.size());
  const QuadratureRule& q = us[0].rule();
  std::vector<Eigen::VectorXcd> uv;
  uv.reserve(us.size());
  for (const auto& u : us) uv.push_back(u.unit_values());

  bool herm = true;
  for (const auto& z : mv)
    if (z.imag() != 0.0 || z.real() < 0.0) {
      herm = false;
      break;
    }

  Eigen::MatrixXcd G(k, k), M(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      KahanCSum g_acc, m_acc;
      for (std::size_t jm = 0; jm < q.n_m(); ++jm)
        for (std::size_t ia = 0; ia < q.n_ang(); ++ia)
          for (std::size_t ir = 0; ir < q.n_r(); ++ir) {
            std::size_t n = q.idx(ir, ia, jm);
            std::complex<double> t =
                q.weight(ir, ia, jm) * std::conj(uv[i][n]) * uv[j][n];
            g_acc.add(t);
            m_acc.add(t * mv[n]);
          }
      G(i, j) = g_acc.value();
      M(i, j) = m_acc.value();
    }
  G = ((G + G.adjoint()) / 2.0).eval();  // symmetrize roundoff

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  if (es.info() != Eigen::Success)
    throw QuadratureError("whitened spectrum: Gram eigendecomposition failed");
  const Eigen::VectorXd& g = es.eigenvalues();
  double gmax = g.maxCoeff();
  if (!(gmax > 0))
    throw ValidationError("whitened spectrum: all generators vanish");
  double floor = 1e-12 * gmax;
  int kept = 0;
  for (int i = 0; i < k; ++i)
    if (g[i] > floor) ++kept;
  WhitenedBlock out;
  out.floor_hits = k - kept;
  out.rule_fingerprint = q.fingerprint;
  if (2 * out.floor_hits > k)
    throw ValidationError(
        "whitened spectrum: generator family numerically degenerate");

  Eigen::MatrixXcd W(k, kept);
  int col = 0;
  for (int i = 0; i < k; ++i)
    if (g[i] > floor)
      W.col(col++) = es.eigenvectors().col(i) / std::sqrt(g[i]);
  Eigen::MatrixXcd S = W.adjoint() * M * W;

  Eigen::VectorXd sv(kept);
  if (herm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ss(
        ((S + S.adjoint()) / 2.0).eval());
    if (ss.info() != Eigen::Success)
      throw QuadratureError("whitened spectrum: eigendecomposition failed");
    for (int i = 0; i < kept; ++i) {
      double v = ss.eigenvalues()[i];
      if (v < -1e-8 || v > 1.0 + 1e-8)
        throw QuadratureError(
            "whitened spectrum: eigenvalue escapes [0,1] beyond roundoff");
      sv[i] = std::min(1.0, std::max(0.0, v));
    }
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
    for (int i = 0; i < kept; ++i) sv[i] = svd.singularValues()[i];
  }
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  out.sv = std::move(sv);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// spectra

struct ThetaOptions {
  QuadOptions quad;
  std::vector<double> p_list = {0.5, 1.0};
  GaugeWeights gauge;  // default: no averaging
};

struct NuclearitySpectrum {
  double lam = 1.0;
  double beta = 0.0;                // 0 when a custom damping function ran
  Eigen::VectorXd sv;               // descending, all component blocks merged
  std::map<double, double> p_norms;
  int eff_rank = 0;
  int floor_hits = 0;
  int n_states = 0;
  int n_components = 0;
  std::uint64_t rule_fingerprint = 0;  // folded over component blocks
  bool proxy = true;  // finitely many generators, not the full map
};

inline double p_norm(const NuclearitySpectrum& spec, double p) {
  if (!(p > 0) || p > 1) throw ValidationError("p_norm: p must be in (0, 1]");
  detail::KahanSum acc;
  for (int i = 0; i < spec.sv.size(); ++i)
    if (spec.sv[i] > 0) acc.add(std::pow(spec.sv[i], p));
  return std::pow(acc.value(), 1.0 / p);
}

// Spectrum of the inclusion damped by an arbitrary energy-momentum function.
// `f_damp(p0, pr)` is evaluated at the scaled arguments (lam*omega, lam*p),
// must be dominated by 1e6 * e^{-beta_check * lam * omega} on the nodes, and
// an optional gauge average multiplies each charge block by its scalar.
// Distinct charges are orthogonal, so the spectrum is assembled blockwise.
inline NuclearitySpectrum generalized_theta(
    const GeneratorFamily& gen, double lam,
    const std::function<std::complex<double>(double, double)>& f_damp,
    double beta_check, const GaugeWeights& psi, const ThetaOptions& opts = {}) {
  if (!(lam > 0)) throw ValidationError("generalized_theta: scale must be > 0");
  if (!f_damp) throw ValidationError("generalized_theta: missing damping");
  for (double p : opts.p_list)
    if (!(p > 0) || p > 1)
      throw ValidationError("generalized_theta: p values must be in (0, 1]");

  NuclearitySpectrum spec;
  spec.lam = lam;
  spec.n_components = gen.components();

  std::vector<TestFunction> fd;
  fd.reserve(gen.fns.size());
  for (const auto& f : gen.fns) fd.push_back(dilate(f, lam));

  // identical measure and damping power give identical blocks: cache by
  // (point mass or -1 for the mass window, box power)
  std::map<std::pair<double, int>, detail::WhitenedBlock> cache;
  std::vector<double> all;
  std::vector<std::uint64_t> fps;

  for (int c = 0; c < gen.components(); ++c) {
    MassMeasure rho;
    int n_box = 0;
    if (gen.is_damped()) {
      const auto& F = std::get<DampedFactor>(gen.factor);
      rho = MassMeasure::lebesgue(opts.quad.m_max_override);
      n_box = F.schedule(lam);
    } else {
      const auto& F = std::get<FreeMultipletFactor>(gen.factor);
      rho = MassMeasure::point(F.masses[c]);
    }
    std::pair<double, int> key{rho.is_point() ? rho.mass : -1.0, n_box};
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<std::pair<const TestFunction*, int>> plan;
      for (const auto& f : fd) plan.push_back({&f, n_box});
      auto rule = plan_rule(gen.dims(), rho, plan, opts.quad);
      std::vector<OneParticleVector> us;
      for (const auto& f : fd) {
        us.push_back(single_particle_map(f, rho, rule, n_box));
        check_tails(us.back(), opts.quad.tail_tol);
      }
      std::vector<std::complex<double>> mv(rule->size());
      for (std::size_t jm = 0; jm < rule->n_m(); ++jm)
        for (std::size_t ia = 0; ia < rule->n_ang(); ++ia)
          for (std::size_t ir = 0; ir < rule->n_r(); ++ir) {
            double om = rule->omega(ir, jm);
            std::complex<double> z = f_damp(lam * om, lam * rule->r[ir]);
            if (!(std::abs(z) <= 1e6 * std::exp(-beta_check * lam * om)))
              throw ValidationError(
                  "generalized_theta: damping function not dominated by the "
                  "required exponential decay");
            mv[rule->idx(ir, ia, jm)] = z;
          }
      it = cache.emplace(key, detail::whitened_block(us, mv)).first;
    }
    const detail::WhitenedBlock& blk = it->second;
    double scale = std::abs(detail::gauge_scalar(gen, psi, gen.label(c)));
    for (int i = 0; i < blk.sv.size(); ++i) all.push_back(scale * blk.sv[i]);
    spec.floor_hits += blk.floor_hits;
    spec.n_states += static_cast<int>(gen.fns.size());
    fps.push_back(blk.rule_fingerprint);
  }

  std::sort(all.begin(), all.end(), std::greater<>());
  spec.sv = Eigen::Map<Eigen::VectorXd>(all.data(), all.size());
  spec.rule_fingerprint =
      detail::fnv1a64(fps.data(), fps.size() * sizeof(std::uint64_t));
  spec.eff_rank = 0;
  if (spec.sv.size() > 0 && spec.sv[0] > 0)
    for (int i = 0; i < spec.sv.size(); ++i)
      if (spec.sv[i] > 1e-12 * spec.sv[0]) ++spec.eff_rank;
  for (double p : opts.p_list) spec.p_norms[p] = p_norm(spec, p);
  return spec;
}

// Spectrum of the inclusion damped by e^{-beta H} at scale lam. Identical to
// generalized_theta with f_damp(p0, pr) = e^{-beta p0} and no gauge average
// beyond the one carried in the options.
inline NuclearitySpectrum theta_spectrum(const GeneratorFamily& gen,
                                         double lam, double beta,
                                         const ThetaOptions& opts = {}) {
  if (!(beta > 0)) throw ValidationError("theta_spectrum: beta must be > 0");
  NuclearitySpectrum spec = generalized_theta(
      gen, lam,
      [beta](double p0, double) {
        return std::complex<double>(std::exp(-beta * p0), 0.0);
      },
      beta, opts.gauge, opts);
  spec.beta = beta;
  return spec;
}

// ---------------------------------------------------------------------------
// decay along the scaling orbit

struct SpectrumDecayRow {
  double lam = 1.0;
  int n_box = 0;
  double top = 0.0;
  std::map<double, double> p_norms;
  int floor_hits = 0;
};

struct SpectrumDecayReport {
  double beta = 0.0;
  std::vector<SpectrumDecayRow> rows;  // lambda descending
  bool decade_decreasing = true;       // top strictly falls per decade step
  double max_decade_ratio = 0.0;       // max top(lam/10) / top(lam)
  bool beta_monotone = true;           // doubling beta shrinks the top value
  double beta_check_top = 0.0;         // top at 2*beta, smallest lambda
};

// Top value and p-norms of the damped-factor spectra along a scale grid: the
// box powers grow as the scale shrinks, so the top value must fall by more
// than an order of magnitude per decade once the schedule kicks in.
inline SpectrumDecayReport damped_spectrum_decay(const GeneratorFamily& gen,
                                                 std::vector<double> grid,
                                                 double beta,
                                                 const ThetaOptions& opts = {}) {
  if (!gen.is_damped())
    throw ValidationError("damped_spectrum_decay: needs the damped factor");
  detail::sort_grid_desc(grid, "damped_spectrum_decay");
  const auto& F = std::get<DampedFactor>(gen.factor);
  F.schedule.validate_on(grid);

  SpectrumDecayReport rep;
  rep.beta = beta;
  for (double lam : grid) {
    NuclearitySpectrum s = theta_spectrum(gen, lam, beta, opts);
    SpectrumDecayRow row;
    row.lam = lam;
    row.n_box = F.schedule(lam);
    row.top = s.sv.size() ? s.sv[0] : 0.0;
    row.p_norms = s.p_norms;
    row.floor_hits = s.floor_hits;
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    for (std::size_t j = i + 1; j < rep.rows.size(); ++j)
      if (std::abs(rep.rows[i].lam / rep.rows[j].lam - 10.0) < 1e-9) {
        double ratio = rep.rows[j].top / rep.rows[i].top;
        rep.max_decade_ratio = std::max(rep.max_decade_ratio, ratio);
        if (!(rep.rows[j].top < rep.rows[i].top)) rep.decade_decreasing = false;
      }
  double lam_min = rep.rows.back().lam;
  NuclearitySpectrum hot = theta_spectrum(gen, lam_min, 2.0 * beta, opts);
  rep.beta_check_top = hot.sv.size() ? hot.sv[0] : 0.0;
  rep.beta_monotone =
      rep.beta_check_top <= rep.rows.back().top * (1.0 + 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------
// truncation tails

// q-norm of the spectrum past the first keep_n entries; 0 once the whole
// spectrum is kept.
inline double truncation_tail(const NuclearitySpectrum& spec, int keep_n,
                              double q) {
  if (keep_n < 0) throw ValidationError("truncation_tail: negative count");
  if (!(q > 0) || q > 1)
    throw ValidationError("truncation_tail: q must be in (0, 1]");
  detail::KahanSum acc;
  for (int i = keep_n; i < spec.sv.size(); ++i)
    if (spec.sv[i] > 0) acc.add(std::pow(spec.sv[i], q));
  double s = acc.value();
  return s > 0 ? std::pow(s, 1.0 / q) : 0.0;
}

// Smallest truncation rank whose tail is at or below the tolerance.
inline int truncation_rank(const NuclearitySpectrum& spec, double tol,
                           double q) {
  for (int n = 0; n <= spec.sv.size(); ++n)
    if (truncation_tail(spec, n, q) <= tol) return n;
  return static_cast<int>(spec.sv.size());
}

}  // namespace scalelab
