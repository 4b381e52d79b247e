#pragma once

// Smearing functions and their momentum-space evaluation.
//
// Two families:
//  * AnalyticGaussian: A exp(-|x-c|^2/(2 w^2)) exp(i k.x) with the offset c
//    and modulation k restricted to the time axis and one distinguished
//    spatial axis e1. Its transform is closed-form, so evaluation works in
//    log-magnitude form and never under/overflows; this is what makes the
//    d'Alembertian-damped states (mass factors m^{2n} with n ~ 100)
//    computable at all.
//  * GridBump: tau(t) * phi(|x|) sampled on a uniform grid. The radial and
//    time transforms are midpoint sums; since the sampled profiles extend
//    evenly/smoothly to compactly supported C^inf functions, those sums
//    converge beyond all orders until p approaches the grid Nyquist band,
//    and evaluation past pi/(2h) is refused.
//
// Transform convention: fhat(p) = integral f(x) exp(+i p.x) dx with the
// componentwise dot over all coordinates (time included for spacetime
// functions). On-shell evaluation plugs p0 = omega_m(p).

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "core.hpp"

namespace scalelab {

enum class Domain { Spatial, Spacetime };

// Value v = unit * exp(log_mag); zero encoded as log_mag = -inf, unit = 0.
struct LogComplex {
  double log_mag = -std::numeric_limits<double>::infinity();
  std::complex<double> unit{0.0, 0.0};

  bool is_zero() const { return !(log_mag > -std::numeric_limits<double>::infinity()); }
  std::complex<double> value() const {
    return is_zero() ? std::complex<double>(0, 0) : unit * std::exp(log_mag);
  }
  static LogComplex from(std::complex<double> v) {
    double a = std::abs(v);
    if (a == 0.0) return {};
    return {std::log(a), v / a};
  }
};

struct GaussianSpec {
  std::complex<double> amplitude{1.0, 0.0};
  double width = 1.0;
  double center_t = 0.0, center_x = 0.0;  // offset along (t, e1)
  double mod_t = 0.0, mod_x = 0.0;        // plane-wave modulation along (t, e1)
};

struct GridSpec {
  // radial profile at r_j = (j + 0.5) h, time profile at symmetric midpoints
  std::vector<double> radial;
  std::vector<double> time;  // empty for spatial-domain functions
  double h = 0.0;
  double amp_scale = 1.0;
};

class TestFunction {
 public:
  enum class Kind { Zero, Gaussian, Grid };

  static TestFunction zero(Dims d, Domain dom) {
    d.validate();
    TestFunction f;
    f.dims_ = d;
    f.domain_ = dom;
    f.kind_ = Kind::Zero;
    return f;
  }

  static TestFunction gaussian(Dims d, Domain dom, GaussianSpec g) {
    d.validate();
    if (!(g.width > 0)) throw ValidationError("TestFunction: width must be > 0");
    if (dom == Domain::Spatial && (g.center_t != 0 || g.mod_t != 0))
      throw ValidationError("TestFunction: time offset/modulation on a spatial function");
    TestFunction f;
    f.dims_ = d;
    f.domain_ = dom;
    f.kind_ = g.amplitude == std::complex<double>(0, 0) ? Kind::Zero : Kind::Gaussian;
    f.gauss_ = g;
    return f;
  }

  static TestFunction grid_bump(Dims d, Domain dom, GridSpec g) {
    d.validate();
    if (!(g.h > 0)) throw ValidationError("TestFunction: grid spacing must be > 0");
    if (g.radial.empty()) throw ValidationError("TestFunction: empty radial profile");
    if (dom == Domain::Spacetime && g.time.empty())
      throw ValidationError("TestFunction: spacetime grid bump needs a time profile");
    if (dom == Domain::Spatial && !g.time.empty())
      throw ValidationError("TestFunction: spatial grid bump with a time profile");
    TestFunction f;
    f.dims_ = d;
    f.domain_ = dom;
    f.kind_ = Kind::Grid;
    f.grid_ = std::move(g);
    return f;
  }

  // Smooth bump exp(-1/(1 - (r/R)^2)) sampled with `samples` radial points;
  // spacetime versions get the same profile in time over (-R, R).
  static TestFunction bump_profile(Dims d, Domain dom, double radius,
                                   int samples) {
    if (!(radius > 0)) throw ValidationError("bump_profile: radius must be > 0");
    if (samples < 8 || samples > 100000)
      throw ValidationError("bump_profile: sample count out of range");
    GridSpec g;
    g.h = radius / samples;
    g.radial.resize(samples);
    for (int j = 0; j < samples; ++j) {
      double t = (j + 0.5) / samples;  // in (0, 1)
      g.radial[j] = std::exp(-1.0 / (1.0 - t * t));
    }
    if (dom == Domain::Spacetime) {
      g.time.resize(2 * samples);
      for (int j = 0; j < 2 * samples; ++j) {
        double t = (j + 0.5 - samples) / samples;  // midpoints in (-1, 1)
        g.time[j] = std::exp(-1.0 / (1.0 - t * t));
      }
    }
    return grid_bump(d, dom, std::move(g));
  }

  Dims dims() const { return dims_; }
  Domain domain() const { return domain_; }
  Kind kind() const { return kind_; }
  const GaussianSpec& gaussian_spec() const { return gauss_; }
  const GridSpec& grid_spec() const { return grid_; }

  bool is_zero() const { return kind_ == Kind::Zero; }

  // No spatial offset or modulation: on-shell values depend on |p| only.
  bool is_radial() const {
    if (kind_ == Kind::Gaussian)
      return gauss_.center_x == 0 && gauss_.mod_x == 0;
    return true;  // zero and grid bumps are radial by construction
  }

  // Real-valued in position space (Cauchy data requirement).
  bool is_real() const {
    if (kind_ == Kind::Gaussian)
      return gauss_.amplitude.imag() == 0 && gauss_.mod_t == 0 &&
             gauss_.mod_x == 0;
    return true;
  }

  // fhat at momentum (p0, p) with |p| = pr and cos(angle(p, e1)) = cos_theta.
  // p0 is ignored for spatial-domain functions.
  LogComplex fourier_log(double p0, double pr, double cos_theta) const {
    switch (kind_) {
      case Kind::Zero:
        return {};
      case Kind::Gaussian: {
        const GaussianSpec& g = gauss_;
        const double w2 = g.width * g.width;
        int n = dims_.s;
        double quad = 0.0, phase = std::arg(g.amplitude);
        double p1 = pr * cos_theta + g.mod_x;
        double perp2 = pr * pr * std::max(0.0, 1.0 - cos_theta * cos_theta);
        quad += p1 * p1 + perp2;
        phase += p1 * g.center_x;
        if (domain_ == Domain::Spacetime) {
          n += 1;
          double pt = p0 + g.mod_t;
          quad += pt * pt;
          phase += pt * g.center_t;
        }
        LogComplex out;
        out.log_mag = std::log(std::abs(g.amplitude)) +
                      0.5 * n * std::log(2.0 * M_PI * w2) - 0.5 * w2 * quad;
        out.unit = std::polar(1.0, phase);
        return out;
      }
      case Kind::Grid:
        return LogComplex::from(grid_fourier(p0, pr));
    }
    return {};
  }

  std::complex<double> fourier_at(double p0, double pr,
                                  double cos_theta) const {
    return fourier_log(p0, pr, cos_theta).value();
  }

  // Radial momentum beyond which |fhat| is below exp(-cut_log) of its peak;
  // rules built from this bound capture the squared tail to ~exp(-2 cut_log).
  double momentum_support_hint(double cut_log = 60.0) const {
    switch (kind_) {
      case Kind::Zero:
        return 1.0;
      case Kind::Gaussian:
        return std::abs(gauss_.mod_x) +
               std::sqrt(2.0 * cut_log) / gauss_.width;
      case Kind::Grid:
        return nyquist();
    }
    return 1.0;
  }

  // Inverse length scale governing mass decay of on-shell values; seeds the
  // Lebesgue mass-window scan.
  double mass_decay_hint() const {
    if (kind_ == Kind::Gaussian) return 1.0 / gauss_.width;
    if (kind_ == Kind::Grid) return nyquist();
    return 1.0;
  }

  double nyquist() const {
    return kind_ == Kind::Grid ? M_PI / (2.0 * grid_.h)
                               : std::numeric_limits<double>::infinity();
  }

  // Radius of a ball around the origin holding all but `tol` of the mass of
  // |f|^2. Exact for grid bumps (compact support); for Gaussians solved from
  // the closed-form radial mass profile.
  double r_eff(double tol) const {
    if (!(tol > 0) || !(tol < 1)) throw ValidationError("r_eff: tol must be in (0,1)");
    switch (kind_) {
      case Kind::Zero:
        return 0.0;
      case Kind::Grid: {
        double rr = (grid_.radial.size() - 0.5) * grid_.h + 0.5 * grid_.h;
        if (domain_ == Domain::Spatial) return rr;
        double rt = (0.5 * grid_.time.size()) * grid_.h;
        return std::hypot(rr, rt);
      }
      case Kind::Gaussian: {
        int n = domain_ == Domain::Spacetime ? dims_.s + 1 : dims_.s;
        double cen = domain_ == Domain::Spacetime
                         ? std::hypot(gauss_.center_t, gauss_.center_x)
                         : std::abs(gauss_.center_x);
        // fraction of n-dim exp(-|y|^2/w^2) mass outside radius u*w
        auto frac = [n](double u) {
          double e = std::exp(-u * u);
          switch (n) {
            case 2: return e;
            case 3: return std::erfc(u) + 2.0 * u * e / std::sqrt(M_PI);
            default: return (1.0 + u * u) * e;  // n == 4
          }
        };
        double lo = 0.0, hi = 1.0;
        while (frac(hi) > tol && hi < 1e3) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          (frac(mid) > tol ? lo : hi) = mid;
        }
        return cen + 0.5 * (lo + hi) * gauss_.width;
      }
    }
    return 0.0;
  }

  // Geometric dilation x -> x/lam with amplitude factor lam^amp_power. The
  // Cauchy-pair prefactor conventions live on CauchyDatum; a bare dilation
  // carries none (lam == 1 is the identity).
  TestFunction dilated(double lam, double amp_power = 0.0) const {
    if (!(lam > 0)) throw ValidationError("dilated: lambda must be > 0");
    TestFunction f = *this;
    double a = std::pow(lam, amp_power);
    switch (kind_) {
      case Kind::Zero:
        break;
      case Kind::Gaussian:
        f.gauss_.width *= lam;
        f.gauss_.center_t *= lam;
        f.gauss_.center_x *= lam;
        f.gauss_.mod_t /= lam;
        f.gauss_.mod_x /= lam;
        f.gauss_.amplitude *= a;
        break;
      case Kind::Grid:
        f.grid_.h *= lam;
        f.grid_.amp_scale *= a;
        break;
    }
    return f;
  }

 private:
  std::complex<double> grid_fourier(double p0, double pr) const {
    const GridSpec& g = grid_;
    const double nyq = nyquist();
    if (pr > nyq || (domain_ == Domain::Spacetime && std::abs(p0) > nyq))
      throw QuadratureError(
          "grid transform queried at |p| = " + std::to_string(std::max(pr, std::abs(p0))) +
          " beyond the trusted band pi/(2h) = " + std::to_string(nyq) +
          "; decrease the grid spacing");
    const double h = g.h;
    detail::KahanSum racc;
    const std::size_t nr = g.radial.size();
    if (dims_.s == 3) {
      if (pr == 0.0) {
        for (std::size_t j = 0; j < nr; ++j) {
          double r = (j + 0.5) * h;
          racc.add(r * r * g.radial[j]);
        }
      } else {
        for (std::size_t j = 0; j < nr; ++j) {
          double r = (j + 0.5) * h;
          racc.add(r * std::sin(pr * r) / pr * g.radial[j]);
        }
      }
    } else {
      for (std::size_t j = 0; j < nr; ++j) {
        double r = (j + 0.5) * h;
        racc.add(r * std::cyl_bessel_j(0.0, pr * r) * g.radial[j]);
      }
    }
    double sphere = dims_.s == 3 ? 4.0 * M_PI : 2.0 * M_PI;
    std::complex<double> v(sphere * h * racc.value() * g.amp_scale, 0.0);
    if (domain_ == Domain::Spacetime) {
      detail::KahanCSum tacc;
      const std::size_t nt = g.time.size();
      for (std::size_t j = 0; j < nt; ++j) {
        double t = (j + 0.5 - 0.5 * nt) * h;
        tacc.add(g.time[j] * std::polar(1.0, p0 * t));
      }
      v *= h * tacc.value();
    }
    return v;
  }

  Dims dims_{};
  Domain domain_ = Domain::Spacetime;
  Kind kind_ = Kind::Zero;
  GaussianSpec gauss_{};
  GridSpec grid_{};
};

// Momentum-space view of a test function; also accepts full momentum vectors
// with the convention that offsets/modulations live along the first axis.
struct MomentumEvaluator {
  const TestFunction* f;

  std::complex<double> operator()(double p0, double pr,
                                  double cos_theta = 1.0) const {
    return f->fourier_at(p0, pr, cos_theta);
  }
  std::complex<double> at_vector(double p0, const std::vector<double>& p) const {
    double n2 = 0.0;
    for (double c : p) n2 += c * c;
    double pr = std::sqrt(n2);
    double ct = pr > 0 ? p.at(0) / pr : 1.0;
    return f->fourier_at(p0, pr, ct);
  }
};

inline MomentumEvaluator fourier(const TestFunction& f) { return {&f}; }

// Geometric dilation of a spacetime smearing function (no prefactor).
inline TestFunction dilate(const TestFunction& f, double lam) {
  return f.dilated(lam, 0.0);
}

}  // namespace scalelab
