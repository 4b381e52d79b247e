#pragma once

// Momentum/mass discretization. A rule is a tensor grid
//   (radial momentum) x (direction cosine) x (mass),
// with the Lorentz-invariant-measure factors folded into the weights:
// radial weights carry (2pi)^{-s} r^{s-1} and the panel Jacobian, angular
// weights sum to the sphere area A_s, mass weights are plain Lebesgue panel
// weights (or the single unit weight of a point mass). Radial-only rules are
// the special case of one angular pseudo-node carrying all of A_s; they are
// only valid for integrands with no angular dependence, which callers check
// via TestFunction::is_radial before selecting them.
//
// Panels are Gauss-Legendre; coverage of [0, p_max] uses one base panel plus
// geometrically growing octaves, so ~25 panels span seven decades while
// keeping nodes where smooth integrands live.

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "gauss.hpp"

namespace scalelab {

// Mass distribution of the one-particle space: either a single mass value or
// Lebesgue measure dm on the half-line (window resolved at rule-build time).
struct MassMeasure {
  enum class Kind { PointMass, LebesgueHalfLine };

  Kind kind = Kind::PointMass;
  double mass = 1.0;      // PointMass only; 0 allowed (massless)
  double m_max = 0.0;     // LebesgueHalfLine: 0 means adaptive window

  static MassMeasure point(double m) {
    if (m < 0) throw ValidationError("MassMeasure: negative mass");
    MassMeasure mm;
    mm.kind = Kind::PointMass;
    mm.mass = m;
    return mm;
  }
  static MassMeasure lebesgue(double m_max = 0.0) {
    if (m_max < 0) throw ValidationError("MassMeasure: negative m_max");
    MassMeasure mm;
    mm.kind = Kind::LebesgueHalfLine;
    mm.m_max = m_max;
    return mm;
  }
  bool is_point() const { return kind == Kind::PointMass; }
};

struct QuadratureRule {
  int s = 3;

  std::vector<double> r, wr;          // radial nodes/folded weights
  std::vector<double> cosang, wang;   // direction cosines; sum(wang) = A_s
  bool product_rule = false;          // true when angular nodes are real
  std::vector<double> m, wm;          // mass nodes/weights
  bool mass_is_point = true;

  // construction record, kept for refinement and tail accounting
  std::vector<double> radial_boundaries, mass_boundaries;
  int r_per_panel = 0, m_per_panel = 0, angular_nodes = 0;

  std::uint64_t fingerprint = 0;

  std::size_t n_r() const { return r.size(); }
  std::size_t n_ang() const { return cosang.size(); }
  std::size_t n_m() const { return m.size(); }
  std::size_t size() const { return n_r() * n_ang() * n_m(); }

  // flattened node index; mass slowest, radial fastest
  std::size_t idx(std::size_t ir, std::size_t ia, std::size_t jm) const {
    return (jm * n_ang() + ia) * n_r() + ir;
  }
  double weight(std::size_t ir, std::size_t ia, std::size_t jm) const {
    return wr[ir] * wang[ia] * wm[jm];
  }
  double omega(std::size_t ir, std::size_t jm) const {
    return std::hypot(r[ir], m[jm]);
  }
  double sphere_area() const { return s == 3 ? 4.0 * M_PI : 2.0 * M_PI; }

  double p_max() const { return radial_boundaries.back(); }
};

namespace detail {

// {0, p_max 2^-octaves, ..., p_max/2, p_max}: octaves+1 panels.
inline std::vector<double> octave_boundaries(double p_max, int octaves) {
  if (p_max <= 0) throw ValidationError("octave_boundaries: p_max <= 0");
  if (octaves < 1 || octaves > 60)
    throw ValidationError("octave_boundaries: octave count out of range");
  std::vector<double> b;
  b.push_back(0.0);
  for (int k = octaves; k >= 0; --k) b.push_back(p_max * std::ldexp(1.0, -k));
  return b;
}

inline void check_boundaries(const std::vector<double>& b, const char* what) {
  if (b.size() < 2)
    throw ValidationError(std::string(what) + ": need at least one panel");
  if (b.front() < 0)
    throw ValidationError(std::string(what) + ": negative start");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (!(b[i] > b[i - 1]))
      throw ValidationError(std::string(what) +
                            ": boundaries not strictly increasing");
}

inline std::uint64_t hash_doubles(const std::vector<double>& v,
                                  std::uint64_t h) {
  return v.empty() ? h : fnv1a64(v.data(), v.size() * sizeof(double), h);
}

}  // namespace detail

// Assembles a rule from explicit panel boundaries. angular_nodes == 0 gives a
// radial-only rule. Pass point_mass for a PointMass measure (mass_boundaries
// ignored); otherwise mass_boundaries must describe a Lebesgue window.
inline QuadratureRule make_rule(Dims dims,
                                const std::vector<double>& radial_boundaries,
                                int r_nodes_per_panel, int angular_nodes,
                                std::optional<double> point_mass,
                                const std::vector<double>& mass_boundaries = {},
                                int m_nodes_per_panel = 0) {
  dims.validate();
  detail::check_boundaries(radial_boundaries, "radial boundaries");
  if (r_nodes_per_panel < 2 || r_nodes_per_panel > 200)
    throw ValidationError("make_rule: radial nodes per panel out of range");

  QuadratureRule q;
  q.s = dims.s;
  q.radial_boundaries = radial_boundaries;
  q.r_per_panel = r_nodes_per_panel;
  q.angular_nodes = angular_nodes;

  const double two_pi_pow = std::pow(2.0 * M_PI, -dims.s);
  std::vector<double> nodes, weights;
  for (std::size_t k = 1; k < radial_boundaries.size(); ++k)
    detail::append_panel(r_nodes_per_panel, radial_boundaries[k - 1],
                         radial_boundaries[k], nodes, weights);
  q.r = nodes;
  q.wr.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    q.wr[i] = weights[i] * two_pi_pow * std::pow(nodes[i], dims.s - 1);

  if (angular_nodes == 0) {
    q.product_rule = false;
    q.cosang = {1.0};
    q.wang = {q.sphere_area()};
  } else {
    if (angular_nodes < 2 || angular_nodes > 512)
      throw ValidationError("make_rule: angular node count out of range");
    q.product_rule = true;
    const detail::GaussRule& g = detail::gauss_legendre(angular_nodes);
    q.cosang.resize(angular_nodes);
    q.wang.resize(angular_nodes);
    if (dims.s == 3) {
      // integral over S^2 = 2 pi * integral over cos(theta)
      for (int i = 0; i < angular_nodes; ++i) {
        q.cosang[i] = g.x[i];
        q.wang[i] = 2.0 * M_PI * g.w[i];
      }
    } else {
      // integral over S^1 = 2 * integral of d(theta) over [0, pi]
      for (int i = 0; i < angular_nodes; ++i) {
        double theta = 0.5 * M_PI * (1.0 + g.x[i]);
        q.cosang[i] = std::cos(theta);
        q.wang[i] = M_PI * g.w[i];
      }
    }
  }

  if (point_mass.has_value()) {
    if (*point_mass < 0) throw ValidationError("make_rule: negative mass");
    q.mass_is_point = true;
    q.m = {*point_mass};
    q.wm = {1.0};
    q.m_per_panel = 0;
  } else {
    detail::check_boundaries(mass_boundaries, "mass boundaries");
    if (m_nodes_per_panel < 2 || m_nodes_per_panel > 200)
      throw ValidationError("make_rule: mass nodes per panel out of range");
    q.mass_is_point = false;
    q.mass_boundaries = mass_boundaries;
    q.m_per_panel = m_nodes_per_panel;
    for (std::size_t k = 1; k < mass_boundaries.size(); ++k)
      detail::append_panel(m_nodes_per_panel, mass_boundaries[k - 1],
                           mass_boundaries[k], q.m, q.wm);
  }

  if (q.size() > std::size_t(4e7))
    throw ValidationError("make_rule: rule would exceed 4e7 nodes");

  std::uint64_t h = detail::fnv1a64(&q.s, sizeof q.s);
  h = detail::hash_doubles(q.r, h);
  h = detail::hash_doubles(q.cosang, h);
  h = detail::hash_doubles(q.m, h);
  h = detail::hash_doubles(q.wm, h);
  q.fingerprint = h;
  return q;
}

// Same panels, twice the nodes everywhere; used by convergence diagnostics.
inline QuadratureRule refined(const QuadratureRule& q) {
  return make_rule(Dims{q.s}, q.radial_boundaries, 2 * q.r_per_panel,
                   q.product_rule ? 2 * q.angular_nodes : 0,
                   q.mass_is_point ? std::optional<double>(q.m[0])
                                   : std::nullopt,
                   q.mass_boundaries,
                   q.mass_is_point ? 0 : 2 * q.m_per_panel);
}

}  // namespace scalelab
