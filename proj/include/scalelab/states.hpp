#pragma once

// Quasi-free states at the one-particle level. A Cauchy pair (g, h) maps to
// the canonical vector u = (ghat/sqrt(omega) + i sqrt(omega) hhat)/sqrt(2);
// the vacuum expectation of the Weyl operator is exp(-q/4) with q = 2||u||^2,
// and the symplectic form is sigma(F, G) = 2 Im<u_F, u_G>. Scaling families
// are lambda-indexed term lists whose dilation conventions keep q exactly
// covariant: Cauchy pairs rescale with powers -(s+1)/2 on g and (1-s)/2 on h,
// spacetime functions rescale geometrically with no prefactor (normalization
// lives in the state, so only normalized quantities enter verdicts).

#include <complex>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "onep.hpp"

namespace scalelab {

struct CauchyDatum {
  Dims dims;
  TestFunction g, h;  // spatial domain, real-valued

  static CauchyDatum make(TestFunction g_, TestFunction h_) {
    if (g_.domain() != Domain::Spatial || h_.domain() != Domain::Spatial)
      throw ValidationError("CauchyDatum: components must be spatial");
    if (!(g_.dims() == h_.dims()))
      throw ValidationError("CauchyDatum: dimension mismatch");
    if (!g_.is_real() || !h_.is_real())
      throw ValidationError("CauchyDatum: components must be real-valued");
    CauchyDatum d{g_.dims(), std::move(g_), std::move(h_)};
    return d;
  }

  bool is_zero() const { return g.is_zero() && h.is_zero(); }

  // The dilation that makes q exactly mass-covariant:
  // q_m(dilated(lam)) = q_{lam m}(original) for every rule-independent q.
  CauchyDatum dilated(double lam) const {
    const double s = dims.s;
    CauchyDatum d = *this;
    d.g = g.dilated(lam, -(s + 1.0) / 2.0);
    d.h = h.dilated(lam, (1.0 - s) / 2.0);
    return d;
  }

  double r_eff(double tol) const {
    return std::max(g.is_zero() ? 0.0 : g.r_eff(tol),
                    h.is_zero() ? 0.0 : h.r_eff(tol));
  }
};

// u at the nodes of `rule`, log-safe.
inline OneParticleVector cauchy_vector(
    const CauchyDatum& d, std::shared_ptr<const QuadratureRule> rule) {
  if (!rule) throw ValidationError("cauchy_vector: null rule");
  if (!(d.dims == Dims{rule->s}))
    throw ValidationError("cauchy_vector: dimension mismatch");
  if ((!d.g.is_radial() || !d.h.is_radial()) && !rule->product_rule)
    throw ValidationError(
        "cauchy_vector: non-radial data on a radial-only rule");
  const QuadratureRule& q = *rule;
  const std::size_t N = q.size();
  Eigen::VectorXcd unit(N);
  std::vector<double> logs(N, -std::numeric_limits<double>::infinity());
  double mx = -std::numeric_limits<double>::infinity();
  const double half_log2 = 0.5 * std::log(2.0);

  for (std::size_t jm = 0; jm < q.n_m(); ++jm)
    for (std::size_t ia = 0; ia < q.n_ang(); ++ia)
      for (std::size_t ir = 0; ir < q.n_r(); ++ir) {
        const std::size_t k = q.idx(ir, ia, jm);
        const double om = q.omega(ir, jm);
        const double lo = 0.5 * std::log(om);
        LogComplex gv = d.g.fourier_log(0.0, q.r[ir], q.cosang[ia]);
        LogComplex hv = d.h.fourier_log(0.0, q.r[ir], q.cosang[ia]);
        double la = gv.is_zero() ? -std::numeric_limits<double>::infinity()
                                 : gv.log_mag - lo - half_log2;
        double lb = hv.is_zero() ? -std::numeric_limits<double>::infinity()
                                 : hv.log_mag + lo - half_log2;
        double L = std::max(la, lb);
        if (!(L > -std::numeric_limits<double>::infinity())) {
          unit[k] = {0.0, 0.0};
          continue;
        }
        std::complex<double> val{0.0, 0.0};
        if (la > -std::numeric_limits<double>::infinity())
          val += gv.unit * std::exp(la - L);
        if (lb > -std::numeric_limits<double>::infinity())
          val += std::complex<double>(0, 1) * hv.unit * std::exp(lb - L);
        logs[k] = L;
        mx = std::max(mx, L);
        unit[k] = val;
      }

  if (!(mx > -std::numeric_limits<double>::infinity()))
    return OneParticleVector(rule, Eigen::VectorXcd::Zero(N), 0.0);
  for (std::size_t k = 0; k < N; ++k)
    unit[k] = logs[k] > -std::numeric_limits<double>::infinity()
                  ? unit[k] * std::exp(logs[k] - mx)
                  : std::complex<double>(0.0, 0.0);
  return OneParticleVector(rule, std::move(unit), mx);
}

// sigma(F, G) = 2 Im <u_F, u_G> on a shared rule.
inline double symplectic_form(const OneParticleVector& a,
                              const OneParticleVector& b) {
  return 2.0 * inner(a, b).imag();
}

// Gaussian vacuum functional on one Weyl generator: stores the quadratic
// form value q; the expectation is exp(-q/4).
struct GaussianForm {
  double q = 0.0;
  double q_log = -std::numeric_limits<double>::infinity();
  bool diverged = false;  // q beyond double range; weyl() underflows to 0
  double mass = 0.0;
  std::uint64_t rule_fingerprint = 0;

  double weyl() const { return diverged ? 0.0 : std::exp(-0.25 * q); }
};

inline GaussianForm vacuum_form(const CauchyDatum& d, double m,
                                const QuadOptions& opts = {}) {
  if (m < 0) throw ValidationError("vacuum_form: negative mass");
  GaussianForm out;
  out.mass = m;
  if (d.is_zero()) return out;
  auto rule = plan_rule(d.dims, MassMeasure::point(m),
                        {{&d.g, 0}, {&d.h, 0}}, opts);
  out.rule_fingerprint = rule->fingerprint;
  OneParticleVector u = cauchy_vector(d, rule);
  check_tails(u, opts.tail_tol);
  out.q_log = std::log(2.0) + u.norm2_log();
  if (out.q_log > 709.0) {
    out.diverged = true;
    out.q = std::numeric_limits<double>::infinity();
  } else {
    out.q = std::exp(out.q_log);
  }
  return out;
}

// ---------------------------------------------------------------------------
// scaling families

struct FamilyTerm {
  std::complex<double> coeff{1.0, 0.0};
  std::variant<CauchyDatum, DampedFunction> fn;
};

// lambda-indexed families of Weyl generators. The generator callback returns
// the term list at each scale; construction fixes a localization radius, and
// every evaluation checks that the terms actually live in the ball of radius
// lambda * localization_radius (effective support at tolerance 1e-8).
class ScalingFamily {
 public:
  static ScalingFamily cauchy_orbit(CauchyDatum base, std::string name = {}) {
    ScalingFamily f;
    f.dims_ = base.dims;
    f.loc_radius_ = base.is_zero() ? 0.0 : base.r_eff(1e-8);
    f.name_ = name.empty() ? "cauchy_orbit" : std::move(name);
    f.gen_ = [base](double lam) {
      return std::vector<FamilyTerm>{{{1.0, 0.0}, base.dilated(lam)}};
    };
    return f;
  }

  static ScalingFamily spacetime_orbit(TestFunction f0,
                                       std::function<int(double)> n_box,
                                       std::string name = {}) {
    if (f0.domain() != Domain::Spacetime)
      throw ValidationError("spacetime_orbit: needs a spacetime function");
    if (!n_box) throw ValidationError("spacetime_orbit: null schedule");
    ScalingFamily f;
    f.dims_ = f0.dims();
    f.loc_radius_ = f0.is_zero() ? 0.0 : f0.r_eff(1e-8);
    f.name_ = name.empty() ? "spacetime_orbit" : std::move(name);
    f.gen_ = [f0, n_box](double lam) {
      int n = n_box(lam);
      if (n < 0)
        throw ValidationError("spacetime_orbit: schedule returned n < 0");
      return std::vector<FamilyTerm>{
          {{1.0, 0.0}, DampedFunction{f0.dilated(lam, 0.0), n}}};
    };
    return f;
  }

  static ScalingFamily identity(Dims dims) {
    dims.validate();
    ScalingFamily f;
    f.dims_ = dims;
    f.loc_radius_ = 0.0;
    f.name_ = "identity";
    f.gen_ = [dims](double) {
      return std::vector<FamilyTerm>{};  // empty product: W = 1
    };
    return f;
  }

  // Linear combination wrapper around an existing family's terms.
  ScalingFamily scaled(std::complex<double> c, std::string name = {}) const {
    ScalingFamily f = *this;
    auto gen = gen_;
    f.gen_ = [gen, c](double lam) {
      auto terms = gen(lam);
      for (auto& t : terms) t.coeff *= c;
      return terms;
    };
    if (!name.empty()) f.name_ = std::move(name);
    return f;
  }

  Dims dims() const { return dims_; }
  double localization_radius() const { return loc_radius_; }
  const std::string& name() const { return name_; }
  const std::optional<ChargeLabel>& charge() const { return charge_; }
  ScalingFamily& set_charge(ChargeLabel c) {
    charge_ = std::move(c);
    return *this;
  }

  std::vector<FamilyTerm> at(double lam) const {
    if (!(lam > 0)) throw ValidationError("ScalingFamily: lambda must be > 0");
    auto terms = gen_(lam);
    const double bound = lam * loc_radius_ * (1.0 + 1e-9) + 1e-300;
    for (const auto& t : terms) {
      double r = 0.0;
      if (auto* cd = std::get_if<CauchyDatum>(&t.fn))
        r = cd->is_zero() ? 0.0 : cd->r_eff(1e-8);
      else {
        const auto& df = std::get<DampedFunction>(t.fn);
        r = df.f.is_zero() ? 0.0 : df.f.r_eff(1e-8);
      }
      if (r > bound)
        throw ValidationError(
            "ScalingFamily: term at lambda = " + std::to_string(lam) +
            " has effective support " + std::to_string(r) +
            " outside the declared localization " + std::to_string(bound));
    }
    return terms;
  }

 private:
  Dims dims_{};
  double loc_radius_ = 0.0;
  std::function<std::vector<FamilyTerm>(double)> gen_;
  std::optional<ChargeLabel> charge_;
  std::string name_;
};

// Mass measure + discretization policy: everything the state evaluation
// needs to know about the model it runs in.
struct ModelContext {
  Dims dims{};
  MassMeasure measure = MassMeasure::point(1.0);
  QuadOptions quad{};
};

struct WeylValue {
  double lam = 1.0;
  double modulus = 1.0;  // exp(-q/4); 0 when diverged
  double q = 0.0;
  double q_log = -std::numeric_limits<double>::infinity();
  bool diverged = false;
};

namespace detail {

inline OneParticleVector family_vector(const std::vector<FamilyTerm>& terms,
                                       const ModelContext& ctx) {
  std::vector<std::pair<const TestFunction*, int>> fns;
  for (const auto& t : terms) {
    if (auto* cd = std::get_if<CauchyDatum>(&t.fn)) {
      if (!cd->g.is_zero()) fns.push_back({&cd->g, 0});
      if (!cd->h.is_zero()) fns.push_back({&cd->h, 0});
    } else {
      const auto& df = std::get<DampedFunction>(t.fn);
      if (!df.f.is_zero()) fns.push_back({&df.f, df.n_box});
    }
  }
  if (fns.empty())
    throw ValidationError("family_vector: no nonzero terms");
  auto rule = plan_rule(ctx.dims, ctx.measure, fns, ctx.quad);
  std::vector<OneParticleVector> parts;
  std::vector<std::complex<double>> coeffs;
  for (const auto& t : terms) {
    if (auto* cd = std::get_if<CauchyDatum>(&t.fn)) {
      if (cd->is_zero()) continue;
      parts.push_back(cauchy_vector(*cd, rule));
    } else {
      const auto& df = std::get<DampedFunction>(t.fn);
      if (df.f.is_zero()) continue;
      parts.push_back(single_particle_map(df, ctx.measure, rule));
    }
    coeffs.push_back(t.coeff);
  }
  std::vector<const OneParticleVector*> ptrs;
  for (auto& p : parts) ptrs.push_back(&p);
  return linear_combination(coeffs, ptrs);
}

}  // namespace detail

inline WeylValue weyl_at_scale(const ScalingFamily& F, double lam,
                               const ModelContext& ctx) {
  if (!(F.dims() == ctx.dims))
    throw ValidationError("weyl_at_scale: dimension mismatch");
  WeylValue out;
  out.lam = lam;
  auto terms = F.at(lam);
  bool all_zero = true;
  for (const auto& t : terms) {
    if (t.coeff == std::complex<double>(0, 0)) continue;
    if (auto* cd = std::get_if<CauchyDatum>(&t.fn))
      all_zero = all_zero && cd->is_zero();
    else
      all_zero = all_zero && std::get<DampedFunction>(t.fn).f.is_zero();
  }
  if (terms.empty() || all_zero) return out;  // W = identity, q = 0

  OneParticleVector u = detail::family_vector(terms, ctx);
  if (u.is_zero()) return out;
  check_tails(u, ctx.quad.tail_tol);
  out.q_log = std::log(2.0) + u.norm2_log();
  if (out.q_log > 709.0) {
    out.diverged = true;
    out.q = std::numeric_limits<double>::infinity();
    out.modulus = 0.0;
  } else {
    out.q = std::exp(out.q_log);
    out.modulus = std::exp(-0.25 * out.q);
  }
  return out;
}

struct ScalingLimitReport {
  std::vector<double> lam;      // descending
  std::vector<double> value;    // Weyl modulus per scale
  std::vector<double> q_log;
  double limit_candidate = 0.0;  // value at the smallest scale; no extrapolation
  double cauchy_defect = 0.0;    // max step among the last 4 grid points
  bool oscillation = false;      // alternating steps above 1e-11 in the tail
  bool any_diverged = false;
};

// Evaluates the family along a geometric grid and reports tail convergence
// diagnostics. Requires >= 8 points spanning >= 3 decades: fewer would make
// the "last four points" defect meaningless as a limit proxy.
inline ScalingLimitReport scaling_limit_estimate(const ScalingFamily& F,
                                                 const ModelContext& ctx,
                                                 std::vector<double> grid) {
  if (grid.size() < 8)
    throw ValidationError("scaling_limit_estimate: need at least 8 scales");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  if (!(grid.front() / grid.back() >= 999.999))
    throw ValidationError(
        "scaling_limit_estimate: grid must span at least 3 decades");

  ScalingLimitReport rep;
  for (double lam : grid) {
    WeylValue w = weyl_at_scale(F, lam, ctx);
    rep.lam.push_back(lam);
    rep.value.push_back(w.modulus);
    rep.q_log.push_back(w.q_log);
    rep.any_diverged = rep.any_diverged || w.diverged;
  }
  rep.limit_candidate = rep.value.back();
  const std::size_t n = rep.value.size();
  for (std::size_t k = n - 4; k < n; ++k)
    rep.cauchy_defect = std::max(
        rep.cauchy_defect, std::abs(rep.value[k] - rep.value[k - 1]));
  std::size_t tail_start = n >= 7 ? n - 7 : 0;
  for (std::size_t k = tail_start + 2; k < n; ++k) {
    double d1 = rep.value[k - 1] - rep.value[k - 2];
    double d2 = rep.value[k] - rep.value[k - 1];
    if (d1 * d2 < 0 && std::abs(d1) > 1e-11 && std::abs(d2) > 1e-11)
      rep.oscillation = true;
  }
  return rep;
}

// Probe-sup proxy for the distance between the mass-m1 and mass-m2 vacuum
// restrictions to a ball of radius lambda * region_radius: the max Weyl-value
// gap over the dilated probes. A lower bound on the true norm distance, hence
// "proxy" wherever it is reported.
inline double local_state_distance_proxy(double m1, double m2, double lam,
                                         const std::vector<CauchyDatum>& probes,
                                         const QuadOptions& opts = {},
                                         double region_radius = 1.0) {
  if (probes.empty())
    throw ValidationError("local_state_distance_proxy: no probes");
  if (m1 < 0 || m2 < 0 || !(lam > 0))
    throw ValidationError("local_state_distance_proxy: bad arguments");
  double sup = 0.0;
  for (const auto& p : probes) {
    if (p.r_eff(1e-8) > region_radius * (1.0 + 1e-9))
      throw ValidationError(
          "local_state_distance_proxy: probe leaks outside the region");
    CauchyDatum pd = p.dilated(lam);
    double w1 = vacuum_form(pd, m1, opts).weyl();
    double w2 = vacuum_form(pd, m2, opts).weyl();
    sup = std::max(sup, std::abs(w1 - w2));
  }
  return sup;
}

struct FactorizationCheck {
  double lhs = 1.0;   // product-state evaluation of the joint generator
  double rhs = 1.0;   // product of the factor evaluations
  double defect = 0.0;
};

// Quasi-free product states factorize exactly: the joint quadratic form is
// q_A + q_B. Evaluating both sides through different floating-point paths
// gives a nontrivial defect check.
inline FactorizationCheck product_factorization(const ModelContext& ctxA,
                                                const ModelContext& ctxB,
                                                const ScalingFamily& FA,
                                                const ScalingFamily& FB,
                                                double lam) {
  WeylValue a = weyl_at_scale(FA, lam, ctxA);
  WeylValue b = weyl_at_scale(FB, lam, ctxB);
  FactorizationCheck out;
  if (a.diverged || b.diverged) {
    out.lhs = 0.0;
    out.rhs = 0.0;
    out.defect = 0.0;
    return out;
  }
  out.lhs = std::exp(-0.25 * (a.q + b.q));
  out.rhs = a.modulus * b.modulus;
  out.defect = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace scalelab
