#pragma once

// Finite-rank map calculus over real scalars: p-nuclear norms, epsilon
// content (maximal packings of the image of the unit ball), the growth check
// tying content to the p-norm, tensor products, re-orthonormalization of
// nuclear decompositions, and the admissible exponent windows used by the
// nuclearity estimates. Domains are either a Euclidean coordinate space or a
// matrix space under the operator norm (functionals then measured in trace
// norm); targets are always Euclidean.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace scalelab::nuclearity {

struct DomainDesc {
  enum class Kind { Hilbert, MatrixSpaceOperatorNorm };
  Kind kind = Kind::Hilbert;
  int dim = 0;             // Hilbert
  int rows = 0, cols = 0;  // matrix space

  int coord_dim() const {
    return kind == Kind::Hilbert ? dim : rows * cols;
  }
  static DomainDesc hilbert(int d) {
    if (d < 1) throw ValidationError("DomainDesc: dim must be >= 1");
    return {Kind::Hilbert, d, 0, 0};
  }
  static DomainDesc matrix(int r, int c) {
    if (r < 1 || c < 1) throw ValidationError("DomainDesc: bad matrix shape");
    return {Kind::MatrixSpaceOperatorNorm, 0, r, c};
  }
};

namespace detail {

inline double trace_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().sum();
}

// functional coordinates -> its dual norm in the given domain
inline double dual_norm(const DomainDesc& d, const Eigen::VectorXd& coords) {
  if (d.kind == DomainDesc::Kind::Hilbert) return coords.norm();
  Eigen::Map<const Eigen::MatrixXd> m(coords.data(), d.rows, d.cols);
  return trace_norm(m);
}

}  // namespace detail

struct Term {
  Eigen::VectorXd functional;  // coordinates; pairing is the Euclidean /
                               // Frobenius dot against the domain coordinates
  double dual_norm = 0.0;
  Eigen::VectorXd target;
};

class FiniteRankMap {
 public:
  FiniteRankMap(DomainDesc dom, int target_dim, std::vector<Term> terms)
      : dom_(dom), target_dim_(target_dim), terms_(std::move(terms)) {
    if (target_dim_ < 1)
      throw ValidationError("FiniteRankMap: target dim must be >= 1");
    for (auto& t : terms_) {
      if (t.functional.size() != dom_.coord_dim() ||
          t.target.size() != target_dim_)
        throw ValidationError("FiniteRankMap: term shape mismatch");
      double d = detail::dual_norm(dom_, t.functional);
      if (std::abs(d - t.dual_norm) > 1e-10 * std::max(1.0, d))
        throw ValidationError("FiniteRankMap: stored dual norm inconsistent");
    }
  }

  static FiniteRankMap hilbert(
      int dom_dim, int target_dim,
      const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& fy) {
    DomainDesc d = DomainDesc::hilbert(dom_dim);
    std::vector<Term> terms;
    for (auto& [f, y] : fy)
      terms.push_back({f, f.norm(), y});
    return FiniteRankMap(d, target_dim, std::move(terms));
  }

  static FiniteRankMap matrix_domain(
      int rows, int cols, int target_dim,
      const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& fy) {
    DomainDesc d = DomainDesc::matrix(rows, cols);
    std::vector<Term> terms;
    for (auto& [F, y] : fy) {
      if (F.rows() != rows || F.cols() != cols)
        throw ValidationError("matrix_domain: functional shape mismatch");
      Eigen::VectorXd coords =
          Eigen::Map<const Eigen::VectorXd>(F.data(), rows * cols);
      terms.push_back({coords, detail::trace_norm(F), y});
    }
    return FiniteRankMap(d, target_dim, std::move(terms));
  }

  const DomainDesc& domain() const { return dom_; }
  int target_dim() const { return target_dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (x.size() != dom_.coord_dim())
      throw ValidationError("apply: coordinate size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(target_dim_);
    for (const auto& t : terms_) out += t.functional.dot(x) * t.target;
    return out;
  }

  // dense matrix of the map; Hilbert domains only (the coordinate matrix of
  // a matrix-space map would hide the non-Euclidean ball)
  Eigen::MatrixXd matrix() const {
    if (dom_.kind != DomainDesc::Kind::Hilbert)
      throw ValidationError("matrix: only for Hilbert domains");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(target_dim_, dom_.coord_dim());
    for (const auto& t : terms_) m += t.target * t.functional.transpose();
    return m;
  }

  Eigen::VectorXd singular_values() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix());
    return svd.singularValues();
  }

  struct OpNorm {
    double value = 0.0;
    bool exact = true;
  };

  // Exact for Hilbert domains and rank-one matrix-space maps; otherwise the
  // decomposition bound sum ||f|| ||y||, flagged inexact.
  OpNorm op_norm() const {
    if (dom_.kind == DomainDesc::Kind::Hilbert) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix());
      return {svd.singularValues().size() ? svd.singularValues()[0] : 0.0,
              true};
    }
    std::vector<const Term*> nz;
    for (const auto& t : terms_)
      if (t.dual_norm > 0 && t.target.norm() > 0) nz.push_back(&t);
    if (nz.empty()) return {0.0, true};
    if (nz.size() == 1)
      return {nz[0]->dual_norm * nz[0]->target.norm(), true};
    double b = 0.0;
    for (const auto* t : nz) b += t->dual_norm * t->target.norm();
    return {b, false};
  }

 private:
  DomainDesc dom_;
  int target_dim_;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// p-nuclear norm

struct PNuclearNorm {
  double decomposition_bound = 0.0;      // (sum (||f|| ||y||)^p)^(1/p)
  std::optional<double> schatten;        // exact value on Hilbert domains
  bool exact = false;

  double best() const { return schatten ? *schatten : decomposition_bound; }
};

inline PNuclearNorm p_nuclear_norm(const FiniteRankMap& T, double p) {
  if (!(p > 0) || p > 1)
    throw ValidationError("p_nuclear_norm: p must be in (0, 1]");
  PNuclearNorm out;
  double acc = 0.0;
  for (const auto& t : T.terms())
    acc += std::pow(t.dual_norm * t.target.norm(), p);
  out.decomposition_bound = std::pow(acc, 1.0 / p);
  if (T.domain().kind == DomainDesc::Kind::Hilbert) {
    Eigen::VectorXd sv = T.singular_values();
    // Rank-deficient maps produce roundoff-level singular values ~1e-16 * top;
    // for p < 1 the p-th power inflates that noise, so cut relative to sv[0].
    double cut = sv.size() ? 1e-14 * sv[0] : 0.0;
    double s = 0.0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > cut) s += std::pow(sv[i], p);
    out.schatten = std::pow(s, 1.0 / p);
    out.exact = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// epsilon content

enum class ContentMethod { Auto, RankOneExact, ExhaustiveGrid, GreedyPacking };

struct EpsContentOptions {
  double pitch = 0.0;   // ExhaustiveGrid lattice spacing; must be < eps/4
  int samples = 0;      // GreedyPacking candidates (0 = 2000 * coord dim)
  int restarts = 8;
  std::uint64_t seed = 0x5ca1ab1eULL;
};

struct EpsContent {
  long long value = 1;
  bool exact = false;  // true when the value is the true maximum
  std::string method;
  std::string note;
};

namespace detail {

inline long long segment_count(double diameter, double eps) {
  // max n with (n-1) eps < diameter
  if (!(diameter > 0)) return 1;
  long long k = 0;
  while ((double(k) + 1.0) * eps < diameter) {
    ++k;
    if (k > 100000000LL)
      throw ValidationError("eps_content: eps far too small for this map");
  }
  return k + 1;
}

// greedy packing of `pts` in the given order; keeps points pairwise > eps
inline long long greedy_count(const std::vector<Eigen::VectorXd>& pts,
                              const std::vector<int>& order, double eps) {
  std::vector<const Eigen::VectorXd*> kept;
  for (int i : order) {
    bool ok = true;
    for (const auto* k : kept)
      if ((*k - pts[i]).norm() <= eps) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(&pts[i]);
  }
  return static_cast<long long>(kept.size());
}

// deterministic candidates in the domain unit ball, mapped through T
inline std::vector<Eigen::VectorXd> image_candidates(const FiniteRankMap& T,
                                                     int n_samples,
                                                     std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const DomainDesc& d = T.domain();
  const int cd = d.coord_dim();
  std::vector<Eigen::VectorXd> images;
  auto push = [&](const Eigen::VectorXd& x) { images.push_back(T.apply(x)); };

  if (d.kind == DomainDesc::Kind::Hilbert) {
    for (int i = 0; i < cd; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(cd);
      e[i] = 1.0;
      push(e);
      push(-e);
    }
    for (int s = 0; s < n_samples; ++s) {
      Eigen::VectorXd x(cd);
      for (int i = 0; i < cd; ++i) x[i] = gauss(rng);
      double n = x.norm();
      if (n == 0) continue;
      x /= n;
      if (s % 2) x *= std::pow(unif(rng), 1.0 / cd);  // interior points too
      push(x);
    }
  } else {
    for (int s = 0; s < n_samples; ++s) {
      Eigen::MatrixXd m(d.rows, d.cols);
      for (int i = 0; i < d.rows; ++i)
        for (int j = 0; j < d.cols; ++j) m(i, j) = gauss(rng);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
      if (top == 0) continue;
      m /= top;  // on the operator-norm sphere
      if (s % 2) m *= unif(rng);
      push(Eigen::Map<const Eigen::VectorXd>(m.data(), d.rows * d.cols));
    }
  }
  return images;
}

}  // namespace detail

// Maximal number of image points of the unit ball with pairwise distances
// strictly greater than eps. Exact for rank-one maps (the image is a
// segment) and whenever eps >= twice the operator norm; the grid and packing
// methods return certified lower bounds.
inline EpsContent eps_content(const FiniteRankMap& T, double eps,
                              ContentMethod method = ContentMethod::Auto,
                              const EpsContentOptions& opts = {}) {
  if (!(eps > 0)) throw ValidationError("eps_content: eps must be > 0");

  std::vector<const Term*> nz;
  for (const auto& t : T.terms())
    if (t.dual_norm > 0 && t.target.norm() > 0) nz.push_back(&t);

  auto on = T.op_norm();
  if (eps >= 2.0 * on.value) {
    // image diameter <= 2||T|| <= 2 * bound: no two points exceed eps
    return {1, true, "diameter", "eps at least the image diameter bound"};
  }

  bool rank_one = nz.size() <= 1;
  if (!rank_one && T.domain().kind == DomainDesc::Kind::Hilbert) {
    Eigen::VectorXd sv = T.singular_values();
    rank_one = sv.size() == 0 || (sv.size() >= 2 && sv[1] <= 1e-14 * sv[0]);
  }

  if (method == ContentMethod::RankOneExact && !rank_one)
    throw ValidationError("eps_content: map is not rank one");
  if (method == ContentMethod::Auto && rank_one)
    method = ContentMethod::RankOneExact;
  if (method == ContentMethod::Auto) method = ContentMethod::GreedyPacking;

  switch (method) {
    case ContentMethod::RankOneExact: {
      double norm = on.value;
      if (!on.exact)
        throw ValidationError("eps_content: rank-one norm not available");
      return {detail::segment_count(2.0 * norm, eps), true, "rank_one_exact",
              "image is a segment of length 2||T||"};
    }
    case ContentMethod::ExhaustiveGrid: {
      if (T.domain().kind != DomainDesc::Kind::Hilbert)
        throw ValidationError("eps_content: grid method needs a Hilbert domain");
      int cd = T.domain().coord_dim();
      if (cd > 3)
        throw ValidationError(
            "eps_content: grid method limited to domain dimension <= 3");
      if (!(opts.pitch > 0) || !(opts.pitch < eps / 4.0))
        throw ValidationError(
            "eps_content: grid pitch must be positive and < eps/4");
      int steps = static_cast<int>(std::floor(2.0 / opts.pitch)) + 1;
      if (std::pow(double(steps), cd) > 4e6)
        throw ValidationError("eps_content: grid too fine, reduce resolution");
      std::vector<Eigen::VectorXd> images;
      Eigen::VectorXd x(cd);
      std::vector<int> ix(cd, 0);
      while (true) {
        for (int i = 0; i < cd; ++i) x[i] = -1.0 + ix[i] * opts.pitch;
        if (x.norm() <= 1.0) images.push_back(T.apply(x));
        int i = cd - 1;
        while (i >= 0 && ++ix[i] >= steps) ix[i--] = 0;
        if (i < 0) break;
      }
      std::vector<int> order(images.size());
      std::iota(order.begin(), order.end(), 0);
      return {detail::greedy_count(images, order, eps), false,
              "exhaustive_grid", "certified lower bound (greedy over grid)"};
    }
    case ContentMethod::GreedyPacking: {
      std::mt19937_64 rng(opts.seed);
      int cd = T.domain().coord_dim();
      int n_samples = opts.samples > 0 ? opts.samples : 2000 * cd;
      auto images = detail::image_candidates(T, n_samples, rng);
      long long best = 1;
      std::vector<int> order(images.size());
      std::iota(order.begin(), order.end(), 0);
      for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        best = std::max(best, detail::greedy_count(images, order, eps));
        std::shuffle(order.begin(), order.end(), rng);
      }
      return {best, false, "greedy_packing",
              "certified lower bound (seeded greedy packing)"};
    }
    case ContentMethod::Auto:
      break;
  }
  throw Error("eps_content: unreachable");
}

// ---------------------------------------------------------------------------
// content growth vs p-norm

struct ContentConstantRow {
  double eps = 0.0;
  long long content = 1;
  double c_star = 0.0;  // eps^q log(content) / ||T||_p^q
};

struct ContentConstantReport {
  std::vector<ContentConstantRow> rows;
  double c_max = 0.0;
  double p = 0.0, q = 0.0;
  double p_norm = 0.0;
  bool p_norm_exact = false;
};

// For q > p/(1-p) the constant c*(eps) = eps^q log N(eps) / ||T||_p^q stays
// bounded as eps -> 0; this evaluates it on a grid of eps values.
inline ContentConstantReport content_constant_check(
    const FiniteRankMap& T, double p, double q,
    const std::vector<double>& eps_grid,
    ContentMethod method = ContentMethod::Auto,
    const EpsContentOptions& opts = {}) {
  if (!(p > 0) || !(p < 1))
    throw ValidationError("content_constant_check: p must be in (0, 1)");
  if (!(q > p / (1.0 - p)) || q > 1)
    throw ValidationError(
        "content_constant_check: q must satisfy p/(1-p) < q <= 1");
  if (eps_grid.empty())
    throw ValidationError("content_constant_check: empty eps grid");
  ContentConstantReport rep;
  rep.p = p;
  rep.q = q;
  auto pn = p_nuclear_norm(T, p);
  rep.p_norm = pn.best();
  rep.p_norm_exact = pn.exact;
  for (double eps : eps_grid) {
    auto c = eps_content(T, eps, method, opts);
    double cs = std::pow(eps, q) * std::log(double(c.value)) /
                std::pow(rep.p_norm, q);
    rep.rows.push_back({eps, c.value, cs});
    rep.c_max = std::max(rep.c_max, cs);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// tensor product

// Pairwise tensor of the decompositions; Hilbert domains only. Dual norms
// multiply exactly in the Euclidean case, and the Schatten spectrum of the
// product is the pairwise product of spectra, so p-norms are multiplicative.
inline FiniteRankMap tensor_product(const FiniteRankMap& A,
                                    const FiniteRankMap& B) {
  if (A.domain().kind != DomainDesc::Kind::Hilbert ||
      B.domain().kind != DomainDesc::Kind::Hilbert)
    throw ValidationError("tensor_product: Hilbert domains only");
  const int da = A.domain().coord_dim(), db = B.domain().coord_dim();
  const int ta = A.target_dim(), tb = B.target_dim();
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fy;
  for (const auto& s : A.terms())
    for (const auto& t : B.terms()) {
      Eigen::VectorXd f(da * db), y(ta * tb);
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j)
          f[i * db + j] = s.functional[i] * t.functional[j];
      for (int i = 0; i < ta; ++i)
        for (int j = 0; j < tb; ++j) y[i * tb + j] = s.target[i] * t.target[j];
      fy.push_back({std::move(f), std::move(y)});
    }
  return FiniteRankMap::hilbert(da * db, ta * tb, fy);
}

// ---------------------------------------------------------------------------
// re-orthonormalization of a decomposition

struct OrthonormalizedDecomposition {
  std::vector<Eigen::VectorXd> xi;        // orthonormal target system
  std::vector<Eigen::VectorXd> f_coords;  // functional coordinates per xi
  std::vector<double> f_dual_norms;
  double sum_norms_q = 0.0;  // sum ||f_n||^q, the reported q-bound
  double majorant = 0.0;     // sum_k k^(1-q/2) (||g_k|| ||z_k||)^q, sorted
  std::vector<int> skipped;  // original indices of dependent targets
  int rank = 0;
};

// Rewrites T = sum_k g_k(.) z_k as sum_n f_n(.) xi_n with orthonormal xi_n,
// sorting terms by ||g_k|| ||z_k|| (descending) and skipping targets that are
// linearly dependent on earlier ones. The q-sum of the new functionals is
// bounded by the majorant above; orthonormal input reproduces itself.
inline OrthonormalizedDecomposition orthonormalize_decomposition(
    const FiniteRankMap& T, double q) {
  if (!(q > 0) || q > 1)
    throw ValidationError("orthonormalize_decomposition: q must be in (0, 1]");

  struct Item {
    int orig;
    double a;  // ||g|| ||z||
    const Term* t;
  };
  std::vector<Item> items;
  for (std::size_t k = 0; k < T.terms().size(); ++k) {
    const Term& t = T.terms()[k];
    double a = t.dual_norm * t.target.norm();
    if (a > 0) items.push_back({static_cast<int>(k), a, &t});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& x, const Item& y) { return x.a > y.a; });

  OrthonormalizedDecomposition out;
  std::vector<const Term*> kept_terms;
  for (const auto& it : items) {
    Eigen::VectorXd r = it.t->target;
    for (const auto& xi : out.xi) r -= xi.dot(it.t->target) * xi;
    if (r.norm() < 1e-10 * it.t->target.norm()) {
      out.skipped.push_back(it.orig);
      continue;
    }
    out.xi.push_back(r / r.norm());
    kept_terms.push_back(it.t);
  }
  out.rank = static_cast<int>(out.xi.size());

  // f_n collects <xi_n, z_k> g_k over every term (skipped ones included:
  // their targets still decompose along the xi basis)
  const int cd = T.domain().coord_dim();
  for (const auto& xi : out.xi) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(cd);
    for (const auto& it : items) f += xi.dot(it.t->target) * it.t->functional;
    double dn = detail::dual_norm(T.domain(), f);
    out.f_coords.push_back(std::move(f));
    out.f_dual_norms.push_back(dn);
    out.sum_norms_q += std::pow(dn, q);
  }

  for (std::size_t k = 0; k < items.size(); ++k)
    out.majorant +=
        std::pow(double(k + 1), 1.0 - q / 2.0) * std::pow(items[k].a, q);
  if (out.sum_norms_q > out.majorant * (1.0 + 1e-9))
    throw Error("orthonormalize_decomposition: majorant violated");
  return out;
}

// Reconstruction defect sup_x ||T x - sum f_n(x) xi_n|| over coordinates:
// the operator norm of the difference, computable on Hilbert domains.
inline double reconstruction_defect(const FiniteRankMap& T,
                                    const OrthonormalizedDecomposition& d) {
  if (T.domain().kind != DomainDesc::Kind::Hilbert)
    throw ValidationError("reconstruction_defect: Hilbert domains only");
  Eigen::MatrixXd m = T.matrix();
  for (std::size_t n = 0; n < d.xi.size(); ++n)
    m -= d.xi[n] * d.f_coords[n].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

// ---------------------------------------------------------------------------
// exponent windows

struct WindowStatus {
  bool admissible = false;
  double q_min = std::numeric_limits<double>::quiet_NaN();  // window (q_min, 1]
};

struct ExponentWindows {
  double p = 0.0;
  WindowStatus limit_maps;         // p < 1/3 : q > 2p/(2-3p)
  WindowStatus damped_tail;        // p < 1/3 : q > 2p/(1-p)
  WindowStatus charged_tail;       // p < 1/6 : q > 2p/(1-4p)
  WindowStatus orthonormalization; // p < 2/3 : q > 4p/(p+2)
  WindowStatus content_premise;    // p < 1   : q > p/(1-p)
};

// The q-windows (q_min, 1] under which the respective summability estimates
// hold, each with its own validity range in p; outside that range the window
// is reported inadmissible with no threshold.
inline ExponentWindows exponent_windows(double p) {
  if (!(p > 0) || p > 1)
    throw ValidationError("exponent_windows: p must be in (0, 1]");
  ExponentWindows w;
  w.p = p;
  auto set = [p](WindowStatus& s, bool ok, double q_min) {
    s.admissible = ok && q_min < 1.0;
    if (ok) s.q_min = q_min;
  };
  if (p < 1.0 / 3.0) set(w.limit_maps, true, 2.0 * p / (2.0 - 3.0 * p));
  if (p < 1.0 / 3.0) set(w.damped_tail, true, 2.0 * p / (1.0 - p));
  if (p < 1.0 / 6.0) set(w.charged_tail, true, 2.0 * p / (1.0 - 4.0 * p));
  if (p < 2.0 / 3.0) set(w.orthonormalization, true, 4.0 * p / (p + 2.0));
  if (p < 1.0) set(w.content_premise, true, p / (1.0 - p));
  return w;
}

}  // namespace scalelab::nuclearity
