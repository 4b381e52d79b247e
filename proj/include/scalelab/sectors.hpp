#pragma once

// Charge-sector bookkeeping: finite groups given by multiplication tables,
// their irreducible characters (computed numerically from the class algebra,
// Burnside-Dixon style), torus (U(1)^r) weight lattices, and the derived
// structures the models need: symmetric generating sets, the split of a dual
// set along a normal subgroup, conjugation structure (pair/real counts), and
// per-irrep preservation tables.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core.hpp"

namespace scalelab::sectors {

class FiniteGroup {
 public:
  explicit FiniteGroup(std::vector<std::vector<int>> table,
                       std::string name = {})
      : mul_(std::move(table)), name_(std::move(name)) {
    n_ = static_cast<int>(mul_.size());
    if (n_ < 1) throw ValidationError("FiniteGroup: empty table");
    for (const auto& row : mul_) {
      if (static_cast<int>(row.size()) != n_)
        throw ValidationError("FiniteGroup: table not square");
      for (int v : row)
        if (v < 0 || v >= n_)
          throw ValidationError("FiniteGroup: entry out of range");
    }
    find_identity();
    find_inverses();
    check_associativity();
    build_classes();
  }

  static FiniteGroup cyclic(int n) {
    if (n < 1) throw ValidationError("cyclic: order must be >= 1");
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
    return FiniteGroup(std::move(t), "Z" + std::to_string(n));
  }

  // permutations of {0,1,2} in lexicographic order; (a*b)(x) = a(b(x))
  static FiniteGroup symmetric3() {
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> p{0, 1, 2};
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    const int n = 6;
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::array<int, 3> c;
        for (int x = 0; x < 3; ++x) c[x] = perms[i][perms[j][x]];
        t[i][j] = static_cast<int>(
            std::find(perms.begin(), perms.end(), c) - perms.begin());
      }
    return FiniteGroup(std::move(t), "S3");
  }

  // order 8: elements r^a s^b with id = a + 4b, s r s = r^-1
  static FiniteGroup dihedral4() {
    std::vector<std::vector<int>> t(8, std::vector<int>(8));
    auto id = [](int a, int b) { return ((a % 4) + 4) % 4 + 4 * (b % 2); };
    for (int a1 = 0; a1 < 4; ++a1)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int a2 = 0; a2 < 4; ++a2)
          for (int b2 = 0; b2 < 2; ++b2)
            t[id(a1, b1)][id(a2, b2)] =
                id(b1 ? a1 - a2 : a1 + a2, b1 + b2);
    return FiniteGroup(std::move(t), "D4");
  }

  // unit quaternions {+-1, +-i, +-j, +-k}; ids 0..3 = +1,+i,+j,+k, 4..7 neg
  static FiniteGroup quaternion8() {
    // unit part table and sign table for i*j = k etc.
    static const int unit[4][4] = {
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sgn[4][4] = {
        {1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    std::vector<std::vector<int>> t(8, std::vector<int>(8));
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        int ui = i % 4, uj = j % 4;
        int s = sgn[ui][uj] * (i >= 4 ? -1 : 1) * (j >= 4 ? -1 : 1);
        t[i][j] = unit[ui][uj] + (s < 0 ? 4 : 0);
      }
    return FiniteGroup(std::move(t), "Q8");
  }

  // element id = i * |B| + j
  static FiniteGroup product(const FiniteGroup& A, const FiniteGroup& B) {
    int na = A.order(), nb = B.order(), n = na * nb;
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int i1 = 0; i1 < na; ++i1)
      for (int j1 = 0; j1 < nb; ++j1)
        for (int i2 = 0; i2 < na; ++i2)
          for (int j2 = 0; j2 < nb; ++j2)
            t[i1 * nb + j1][i2 * nb + j2] =
                A.mul(i1, i2) * nb + B.mul(j1, j2);
    return FiniteGroup(std::move(t), A.name() + "x" + B.name());
  }

  int order() const { return n_; }
  int identity() const { return id_; }
  int mul(int a, int b) const { return mul_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  const std::string& name() const { return name_; }

  int n_classes() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  int class_of(int g) const { return class_of_[g]; }

  bool contains_subgroup(const std::vector<int>& elems) const {
    std::set<int> s(elems.begin(), elems.end());
    if (!s.count(id_)) return false;
    for (int a : s)
      for (int b : s)
        if (!s.count(mul_[a][b])) return false;
    for (int a : s)
      if (!s.count(inv_[a])) return false;
    return true;
  }

  bool is_normal(const std::vector<int>& elems) const {
    if (!contains_subgroup(elems)) return false;
    std::set<int> s(elems.begin(), elems.end());
    for (int g = 0; g < n_; ++g)
      for (int a : s)
        if (!s.count(mul_[mul_[g][a]][inv_[g]])) return false;
    return true;
  }

  std::vector<int> generated_subgroup(const std::vector<int>& gens) const {
    std::set<int> s{id_};
    std::vector<int> frontier{id_};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int a : frontier)
        for (int g : gens)
          for (int x : {mul_[a][g], mul_[a][inv_[g]]})
            if (s.insert(x).second) next.push_back(x);
      frontier = std::move(next);
    }
    return {s.begin(), s.end()};
  }

  std::vector<int> center() const {
    std::vector<int> c;
    for (int g = 0; g < n_; ++g) {
      bool central = true;
      for (int x = 0; x < n_ && central; ++x)
        central = mul_[g][x] == mul_[x][g];
      if (central) c.push_back(g);
    }
    return c;
  }

 private:
  void find_identity() {
    id_ = -1;
    for (int e = 0; e < n_; ++e) {
      bool ok = true;
      for (int g = 0; g < n_ && ok; ++g)
        ok = mul_[e][g] == g && mul_[g][e] == g;
      if (ok) {
        id_ = e;
        break;
      }
    }
    if (id_ < 0) throw ValidationError("FiniteGroup: no identity element");
  }

  void find_inverses() {
    inv_.assign(n_, -1);
    for (int g = 0; g < n_; ++g) {
      for (int h = 0; h < n_; ++h)
        if (mul_[g][h] == id_ && mul_[h][g] == id_) {
          if (inv_[g] >= 0)
            throw ValidationError("FiniteGroup: non-unique inverse");
          inv_[g] = h;
        }
      if (inv_[g] < 0) throw ValidationError("FiniteGroup: missing inverse");
    }
  }

  void check_associativity() const {
    if (n_ <= 300) {
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
          for (int c = 0; c < n_; ++c)
            if (mul_[mul_[a][b]][c] != mul_[a][mul_[b][c]])
              throw ValidationError("FiniteGroup: table not associative");
    } else {
      std::mt19937_64 rng(0x5ec7045u);
      std::uniform_int_distribution<int> d(0, n_ - 1);
      for (int k = 0; k < 1000000; ++k) {
        int a = d(rng), b = d(rng), c = d(rng);
        if (mul_[mul_[a][b]][c] != mul_[a][mul_[b][c]])
          throw ValidationError("FiniteGroup: table not associative");
      }
    }
  }

  void build_classes() {
    class_of_.assign(n_, -1);
    for (int g = 0; g < n_; ++g) {
      if (class_of_[g] >= 0) continue;
      std::set<int> orbit;
      for (int x = 0; x < n_; ++x)
        orbit.insert(mul_[mul_[x][g]][inv_[x]]);
      int ci = static_cast<int>(classes_.size());
      classes_.push_back({orbit.begin(), orbit.end()});
      for (int y : orbit) class_of_[y] = ci;
    }
    // canonical order: identity class first, then by (size, least element)
    std::vector<int> perm(classes_.size());
    std::iota(perm.begin(), perm.end(), 0);
    int idc = class_of_[id_];
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
      if (a == idc || b == idc) return a == idc && b != idc;
      if (classes_[a].size() != classes_[b].size())
        return classes_[a].size() < classes_[b].size();
      return classes_[a].front() < classes_[b].front();
    });
    std::vector<std::vector<int>> nc;
    for (int p : perm) nc.push_back(classes_[p]);
    classes_ = std::move(nc);
    for (int ci = 0; ci < static_cast<int>(classes_.size()); ++ci)
      for (int y : classes_[ci]) class_of_[y] = ci;
  }

  int n_ = 0, id_ = 0;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_, class_of_;
  std::vector<std::vector<int>> classes_;
  std::string name_;
};

struct Irrep {
  int dim = 1;
  std::vector<std::complex<double>> chi;  // per conjugacy class
  int frobenius_schur = 1;                // +1 real, 0 complex, -1 quaternionic
  std::string name;

  std::complex<double> chi_of_element(const FiniteGroup& G, int g) const {
    return chi[G.class_of(g)];
  }
};

namespace detail_sec {

inline std::vector<std::complex<double>> conj_chi(
    const std::vector<std::complex<double>>& c) {
  std::vector<std::complex<double>> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::conj(c[i]);
  return out;
}

inline bool chi_close(const std::vector<std::complex<double>>& a,
                      const std::vector<std::complex<double>>& b,
                      double tol = 1e-6) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace detail_sec

// Numeric character table from the class algebra: the class-multiplication
// matrices M_i share a common eigenbasis of class functions; a random linear
// combination separates the eigenvalues, each eigenvector gives one row of
// the table. Deterministic: one fixed seed, retrying with fresh coefficients
// only if the spectrum fails to separate.
inline std::vector<Irrep> irreps(const FiniteGroup& G,
                                 std::uint64_t seed = 0x1a2b3c4d5e6fULL) {
  const int k = G.n_classes();
  const int n = G.order();
  const auto& classes = G.classes();

  // a[i][j][l]: number of x in C_i with x^-1 z_l in C_j, z_l a fixed rep
  std::vector<Eigen::MatrixXd> M(k, Eigen::MatrixXd::Zero(k, k));
  for (int l = 0; l < k; ++l) {
    int zl = classes[l].front();
    for (int i = 0; i < k; ++i)
      for (int x : classes[i]) {
        int j = G.class_of(G.mul(G.inv(x), zl));
        M[i](j, l) += 1.0;
      }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  Eigen::MatrixXcd vecs;
  bool separated = false;
  for (int attempt = 0; attempt < 12 && !separated; ++attempt) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) A += unif(rng) * M[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXcd ev = es.eigenvalues();
    double scale = 1.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(ev[i]));
    separated = true;
    for (int i = 0; i < k && separated; ++i)
      for (int j = i + 1; j < k; ++j)
        if (std::abs(ev[i] - ev[j]) < 1e-5 * scale) {
          separated = false;
          break;
        }
    if (separated) vecs = es.eigenvectors();
  }
  if (!separated)
    throw Error("irreps: class-algebra spectrum failed to separate");

  std::vector<Irrep> out;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXcd v = vecs.col(c);
    if (std::abs(v[0]) < 1e-12)
      throw Error("irreps: degenerate eigenvector (identity component 0)");
    v /= v[0];  // class 0 is the identity class
    double s = 0.0;
    for (int j = 0; j < k; ++j)
      s += std::norm(v[j]) / classes[j].size();
    double dim_f = std::sqrt(n / s);
    int dim = static_cast<int>(std::lround(dim_f));
    if (std::abs(dim_f - dim) > 1e-6 || dim < 1)
      throw Error("irreps: non-integer dimension " + std::to_string(dim_f));
    Irrep r;
    r.dim = dim;
    r.chi.resize(k);
    for (int j = 0; j < k; ++j)
      r.chi[j] = double(dim) * v[j] / double(classes[j].size());
    out.push_back(std::move(r));
  }

  // Frobenius-Schur indicator from the squaring map
  for (auto& r : out) {
    std::complex<double> acc{0, 0};
    for (int g = 0; g < n; ++g)
      acc += r.chi[G.class_of(G.mul(g, g))];
    acc /= double(n);
    int fs = static_cast<int>(std::lround(acc.real()));
    if (std::abs(acc - std::complex<double>(fs, 0)) > 1e-6 || fs < -1 || fs > 1)
      throw Error("irreps: invalid Frobenius-Schur indicator");
    r.frobenius_schur = fs;
  }

  int dim2 = 0;
  for (auto& r : out) dim2 += r.dim * r.dim;
  if (dim2 != n) throw Error("irreps: sum of squared dimensions != |G|");

  // canonical sort: dimension, then lexicographic on rounded characters
  auto key = [](const Irrep& r) {
    std::vector<std::pair<long long, long long>> t;
    for (auto z : r.chi)
      t.push_back({std::llround(z.real() * 1e8), std::llround(z.imag() * 1e8)});
    return std::make_pair(r.dim, t);
  };
  std::sort(out.begin(), out.end(),
            [&](const Irrep& a, const Irrep& b) { return key(a) < key(b); });

  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].name = "irr" + std::to_string(i) + "_d" + std::to_string(out[i].dim);
  // nicer names for cyclic groups: chi_k with chi_k(1) = exp(2 pi i k / n)
  if (k == n) {
    bool cyclic = true;
    int gen = -1;
    for (int g = 0; g < n && cyclic; ++g) {
      // a generator has order n
      int x = g, ord = 1;
      while (x != G.identity() && ord <= n) {
        x = G.mul(x, g);
        ++ord;
      }
      if (ord == n) {
        gen = g;
        break;
      }
    }
    if (gen >= 0) {
      for (auto& r : out) {
        double ang = std::arg(r.chi_of_element(G, gen));
        int kk = static_cast<int>(std::lround(ang * n / (2.0 * M_PI)));
        kk = ((kk % n) + n) % n;
        r.name = "chi" + std::to_string(kk);
      }
    }
  }
  return out;
}

// Orthogonality residual of a character table; tests pin this below 1e-10.
inline double orthogonality_residual(const FiniteGroup& G,
                                     const std::vector<Irrep>& reps) {
  double worst = 0.0;
  const auto& classes = G.classes();
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = 0; b < reps.size(); ++b) {
      std::complex<double> acc{0, 0};
      for (std::size_t j = 0; j < classes.size(); ++j)
        acc += double(classes[j].size()) * reps[a].chi[j] *
               std::conj(reps[b].chi[j]);
      acc /= double(G.order());
      worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

inline std::vector<int> kernel(const FiniteGroup& G, const Irrep& r,
                               double tol = 1e-6) {
  std::vector<int> ker;
  for (int g = 0; g < G.order(); ++g)
    if (std::abs(r.chi_of_element(G, g) - std::complex<double>(r.dim, 0)) < tol)
      ker.push_back(g);
  return ker;
}

struct Quotient {
  FiniteGroup group;
  std::vector<int> coset_of;  // element of G -> element of quotient
};

inline Quotient quotient(const FiniteGroup& G, const std::vector<int>& N) {
  if (!G.is_normal(N))
    throw ValidationError("quotient: subgroup is not normal");
  std::set<int> ns(N.begin(), N.end());
  std::vector<int> coset_of(G.order(), -1);
  std::vector<int> reps;
  for (int g = 0; g < G.order(); ++g) {
    if (coset_of[g] >= 0) continue;
    int ci = static_cast<int>(reps.size());
    reps.push_back(g);
    for (int h : ns) coset_of[G.mul(g, h)] = ci;
  }
  int q = static_cast<int>(reps.size());
  std::vector<std::vector<int>> t(q, std::vector<int>(q));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      t[a][b] = coset_of[G.mul(reps[a], reps[b])];
  return {FiniteGroup(std::move(t), G.name() + "/N"), std::move(coset_of)};
}

struct GeneratingCheck {
  bool symmetric = false;   // closed under conjugates
  bool generating = false;  // joint kernel trivial
};

inline GeneratingCheck generating_check(const FiniteGroup& G,
                                        const std::vector<Irrep>& reps,
                                        const std::vector<int>& delta) {
  GeneratingCheck out;
  out.symmetric = true;
  for (int i : delta) {
    auto cc = detail_sec::conj_chi(reps.at(i).chi);
    bool found = false;
    for (int j : delta)
      if (detail_sec::chi_close(reps.at(j).chi, cc)) {
        found = true;
        break;
      }
    out.symmetric = out.symmetric && found;
  }
  std::set<int> joint;
  for (int g = 0; g < G.order(); ++g) joint.insert(g);
  for (int i : delta) {
    auto ker = kernel(G, reps.at(i));
    std::set<int> ks(ker.begin(), ker.end());
    std::set<int> inter;
    for (int g : joint)
      if (ks.count(g)) inter.insert(g);
    joint = std::move(inter);
  }
  out.generating = delta.empty()
                       ? G.order() == 1
                       : (joint.size() == 1 && *joint.begin() == G.identity());
  return out;
}

// Split of a symmetric generating set along a normal subgroup N:
// Delta_2 holds the irreps trivial on N, Delta_1 the rest; N_1 is the joint
// kernel of Delta_1. The iso flag records whether N_1 and N intersect
// trivially and their orders multiply to |G| (the numeric certificate that
// G decomposes as the product of the two quotients).
struct SplitResult {
  std::vector<int> delta1, delta2;  // indices into the irrep list
  std::vector<int> n1;              // joint kernel of delta1 (sorted elements)
  bool iso = false;
  std::string note;
};

inline SplitResult split(const FiniteGroup& G, const std::vector<Irrep>& reps,
                         const std::vector<int>& delta,
                         const std::vector<int>& N) {
  if (!G.is_normal(N)) throw ValidationError("split: N is not normal");
  auto gc = generating_check(G, reps, delta);
  if (!gc.symmetric) throw ValidationError("split: Delta is not symmetric");
  if (!gc.generating) throw ValidationError("split: Delta is not generating");
  std::set<int> ns(N.begin(), N.end());

  SplitResult out;
  for (int i : delta) {
    auto ker = kernel(G, reps.at(i));
    std::set<int> ks(ker.begin(), ker.end());
    bool trivial_on_N = true;
    for (int g : ns) trivial_on_N = trivial_on_N && ks.count(g);
    (trivial_on_N ? out.delta2 : out.delta1).push_back(i);
  }

  std::set<int> joint;
  for (int g = 0; g < G.order(); ++g) joint.insert(g);
  for (int i : out.delta1) {
    auto ker = kernel(G, reps.at(i));
    std::set<int> ks(ker.begin(), ker.end());
    std::set<int> inter;
    for (int g : joint)
      if (ks.count(g)) inter.insert(g);
    joint = std::move(inter);
  }
  out.n1.assign(joint.begin(), joint.end());

  std::vector<int> meet;
  for (int g : out.n1)
    if (ns.count(g)) meet.push_back(g);
  bool trivial_meet = meet.size() == 1 && meet[0] == G.identity();
  bool orders = static_cast<long long>(out.n1.size()) *
                    static_cast<long long>(ns.size()) ==
                G.order();
  out.iso = trivial_meet && orders;
  if (!out.iso)
    out.note = trivial_meet ? "order product mismatch"
                            : "N1 and N intersect nontrivially";
  return out;
}

// Conjugation structure of a symmetric set: m conjugate pairs, p real-type
// members (by total dimension), n = 2m + p. Quaternionic members cannot make
// a real one-particle structure on their own; they are counted as a doubled
// pair (flagged), consistent with n = 2m + p.
struct ConjugationStructure {
  int m = 0, p = 0, n = 0;
  std::vector<std::pair<int, int>> pairs;  // (i, j) with chi_j = conj(chi_i)
  std::vector<int> reals;
  std::vector<int> quaternionic_doubled;
  bool doubled = false;
};

inline ConjugationStructure conjugation_structure(
    const std::vector<Irrep>& reps, const std::vector<int>& delta) {
  ConjugationStructure out;
  std::set<int> left(delta.begin(), delta.end());
  if (left.size() != delta.size())
    throw ValidationError("conjugation_structure: duplicate entries");
  while (!left.empty()) {
    int i = *left.begin();
    left.erase(left.begin());
    const Irrep& r = reps.at(i);
    auto cc = detail_sec::conj_chi(r.chi);
    if (detail_sec::chi_close(r.chi, cc)) {
      if (r.frobenius_schur == -1) {
        out.quaternionic_doubled.push_back(i);
        out.doubled = true;
        out.m += r.dim;
        out.n += 2 * r.dim;
      } else {
        out.reals.push_back(i);
        out.p += r.dim;
        out.n += r.dim;
      }
      continue;
    }
    int partner = -1;
    for (int j : left)
      if (detail_sec::chi_close(reps.at(j).chi, cc)) {
        partner = j;
        break;
      }
    if (partner < 0)
      throw ValidationError(
          "conjugation_structure: set is not closed under conjugation");
    left.erase(partner);
    out.pairs.push_back({i, partner});
    out.m += r.dim;
    out.n += 2 * r.dim;
  }
  return out;
}

struct SectorRow {
  std::string irrep;
  int dim = 1;
  bool trivial_on_N = false;
  bool preserved = false;  // == trivial_on_N by the preservation criterion
  int assignment = 0;      // 1 or 2 when the irrep is in Delta, else 0
};

struct SectorTable {
  std::vector<SectorRow> rows;
  int preserved_count = 0;
};

inline SectorTable sector_table(const FiniteGroup& G,
                                const std::vector<Irrep>& reps,
                                const std::vector<int>& N,
                                const std::vector<int>& delta) {
  if (!G.is_normal(N)) throw ValidationError("sector_table: N is not normal");
  std::set<int> ns(N.begin(), N.end());
  std::set<int> d1, d2;
  if (!delta.empty()) {
    auto sp = split(G, reps, delta, N);
    d1.insert(sp.delta1.begin(), sp.delta1.end());
    d2.insert(sp.delta2.begin(), sp.delta2.end());
  }
  SectorTable out;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    SectorRow row;
    row.irrep = reps[i].name;
    row.dim = reps[i].dim;
    auto ker = kernel(G, reps[i]);
    std::set<int> ks(ker.begin(), ker.end());
    row.trivial_on_N = true;
    for (int g : ns) row.trivial_on_N = row.trivial_on_N && ks.count(g);
    row.preserved = row.trivial_on_N;
    row.assignment = d1.count(int(i)) ? 1 : (d2.count(int(i)) ? 2 : 0);
    if (row.preserved) ++out.preserved_count;
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// torus (U(1)^r) charges

struct TorusGroup {
  int rank = 1;
};

struct TorusIrrep {
  std::vector<long long> k;
  std::string name;
};

// all weights with |k_i| <= box, lexicographic
inline std::vector<TorusIrrep> torus_irreps(const TorusGroup& T,
                                            long long box) {
  if (T.rank < 1 || T.rank > 4)
    throw ValidationError("torus_irreps: rank out of range");
  if (box < 0 || box > 64) throw ValidationError("torus_irreps: box out of range");
  std::vector<TorusIrrep> out;
  std::vector<long long> k(T.rank, -box);
  while (true) {
    TorusIrrep r;
    r.k = k;
    std::string nm = "w";
    for (long long c : k) nm += (c >= 0 ? "+" : "") + std::to_string(c);
    r.name = nm;
    out.push_back(std::move(r));
    int i = T.rank - 1;
    while (i >= 0 && k[i] == box) k[i--] = -box;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

// finite subgroup Z_{n_1} x ... x Z_{n_r} embedded coordinate-wise; n_i >= 1
struct TorusSubgroup {
  std::vector<long long> orders;
};

inline bool torus_trivial_on(const TorusIrrep& r, const TorusSubgroup& N) {
  if (r.k.size() != N.orders.size())
    throw ValidationError("torus_trivial_on: rank mismatch");
  for (std::size_t i = 0; i < r.k.size(); ++i) {
    if (N.orders[i] < 1)
      throw ValidationError("torus_trivial_on: subgroup order must be >= 1");
    if (r.k[i] % N.orders[i] != 0) return false;
  }
  return true;
}

namespace detail_sec {

// Smith normal form diagonal of an integer matrix (small sizes only).
inline std::vector<long long> snf_diagonal(
    std::vector<std::vector<long long>> a) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<long long> diag;
  int t = 0;
  while (t < rows && t < cols) {
    // find a nonzero pivot
    int pr = -1, pc = -1;
    for (int i = t; i < rows && pr < 0; ++i)
      for (int j = t; j < cols; ++j)
        if (a[i][j] != 0) {
          pr = i;
          pc = j;
          break;
        }
    if (pr < 0) break;
    std::swap(a[t], a[pr]);
    for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pc]);
    bool reduced = false;
    while (!reduced) {
      reduced = true;
      for (int i = t + 1; i < rows; ++i)
        while (a[i][t] != 0) {
          long long q = a[i][t] / a[t][t];
          for (int j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
          if (a[i][t] != 0) {
            std::swap(a[t], a[i]);
            reduced = false;
          }
        }
      for (int j = t + 1; j < cols; ++j)
        while (a[t][j] != 0) {
          long long q = a[t][j] / a[t][t];
          for (int i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
          if (a[t][j] != 0) {
            for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][j]);
            reduced = false;
          }
        }
    }
    diag.push_back(std::llabs(a[t][t]));
    ++t;
  }
  return diag;
}

}  // namespace detail_sec

inline GeneratingCheck torus_generating_check(
    const std::vector<TorusIrrep>& delta, int rank) {
  GeneratingCheck out;
  out.symmetric = true;
  for (const auto& r : delta) {
    bool found = false;
    for (const auto& s : delta) {
      bool neg = true;
      for (std::size_t i = 0; i < r.k.size(); ++i)
        neg = neg && s.k[i] == -r.k[i];
      if (neg) {
        found = true;
        break;
      }
    }
    out.symmetric = out.symmetric && found;
  }
  std::vector<std::vector<long long>> m;
  for (const auto& r : delta) m.push_back(r.k);
  if (static_cast<int>(m.size()) < rank) {
    out.generating = false;
    return out;
  }
  auto d = detail_sec::snf_diagonal(std::move(m));
  out.generating = static_cast<int>(d.size()) == rank;
  for (long long v : d) out.generating = out.generating && v == 1;
  return out;
}

struct TorusSectorRow {
  std::string irrep;
  std::vector<long long> k;
  bool trivial_on_N = false;
  bool preserved = false;
};

struct TorusSectorTable {
  std::vector<TorusSectorRow> rows;
  int preserved_count = 0;  // within the weight box only
};

inline TorusSectorTable torus_sector_table(const TorusGroup& T,
                                           const TorusSubgroup& N,
                                           long long box) {
  if (static_cast<int>(N.orders.size()) != T.rank)
    throw ValidationError("torus_sector_table: rank mismatch");
  TorusSectorTable out;
  for (const auto& r : torus_irreps(T, box)) {
    TorusSectorRow row;
    row.irrep = r.name;
    row.k = r.k;
    row.trivial_on_N = torus_trivial_on(r, N);
    row.preserved = row.trivial_on_N;
    if (row.preserved) ++out.preserved_count;
    out.rows.push_back(std::move(row));
  }
  return out;
}

// Rank-1 split: N_1 is the cyclic subgroup Z_g with g = gcd of the Delta_1
// weights. The product decomposition G = G_1 x G_2 cannot hold for a torus
// (the right side is a 2-torus), so the iso certificate is reported false
// with a note; finite models are where the certificate is meaningful.
struct TorusSplitResult {
  std::vector<std::size_t> delta1, delta2;  // indices into the given weights
  long long n1_order = 0;                   // 0 means the whole circle
  bool iso = false;
  std::string note = "infinite group: product certificate not applicable";
};

inline TorusSplitResult torus_split(const std::vector<TorusIrrep>& delta,
                                    const TorusSubgroup& N) {
  if (N.orders.size() != 1)
    throw ValidationError("torus_split: implemented for rank 1 only");
  auto gc = torus_generating_check(delta, 1);
  if (!gc.symmetric) throw ValidationError("torus_split: Delta not symmetric");
  if (!gc.generating) throw ValidationError("torus_split: Delta not generating");
  TorusSplitResult out;
  long long g = 0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i].k[0] % N.orders[0] == 0) {
      out.delta2.push_back(i);
    } else {
      out.delta1.push_back(i);
      g = std::gcd(g, std::llabs(delta[i].k[0]));
    }
  }
  out.n1_order = g;  // joint kernel of the delta1 characters
  return out;
}

}  // namespace scalelab::sectors
