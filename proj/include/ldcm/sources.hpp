#pragma once

#include <memory>
#include <optional>

#include "ldcm/common.hpp"

namespace ldcm {

// Time-dependent charge/current evaluators. Sources vanish identically
// (exact zeros) outside their stated support, and advertise a physical
// bounding box so per-step sampling only touches the active region.
class SourceModel {
 public:
  virtual ~SourceModel() = default;

  virtual bool has_charge() const { return false; }
  virtual double rho(const Vec3&, double) const { return 0.0; }
  virtual Vec3 current(const Vec3&, double) const { return {0, 0, 0}; }

  // AABB containing the support at time t; nullopt means everywhere.
  virtual std::optional<std::pair<Vec3, Vec3>> support(double) const { return std::nullopt; }

  // amplitude used to normalize the Gauss-law diagnostic
  virtual double gauss_normalizer() const { return 1.0; }

  // analytic-derivative hook; stencil path is used when false
  virtual bool provides_derivatives() const { return false; }
  virtual Vec3 grad_rho(const Vec3&, double) const { return {0, 0, 0}; }
  virtual Vec3 curl_current(const Vec3&, double) const { return {0, 0, 0}; }
};

struct TranslatingChargeParams {
  double a = 1e4;          // amplitude
  double R0 = 1.0 / 72;    // support radius
  Vec3 x0{127.0 / 256, 127.0 / 256, 127.0 / 256};
  double nu = 1024.0 / 80;
  double d = 1.0 / 256;    // displacement scale
  Vec3 vhat{1, 0, 0};
  enum class Profile { Sin7, Sin2 } profile = Profile::Sin7;
  std::optional<double> stop_time;  // freeze the centre after this time
};

class TranslatingCharge : public SourceModel {
 public:
  explicit TranslatingCharge(TranslatingChargeParams p, bool analytic_derivatives = false)
      : p_(p), analytic_(analytic_derivatives) {
    double n = norm2(p_.vhat);
    require(n > 0 && p_.R0 > 0, "TranslatingCharge: need unit direction and positive radius");
    p_.vhat = (1.0 / n) * p_.vhat;
  }

  bool has_charge() const override { return true; }

  Vec3 velocity(double t) const {
    if (p_.stop_time && t >= *p_.stop_time) return {0, 0, 0};
    double s;
    if (p_.profile == TranslatingChargeParams::Profile::Sin7) {
      double u = std::sin(2.0 * pi * p_.nu * t);
      s = p_.nu * p_.d * pi * (35.0 / 16.0) * u * u * u * u * u * u * u;
    } else {
      s = p_.nu * p_.d * pi * std::sin(2.0 * p_.nu * t);
    }
    return s * p_.vhat;
  }

  // closed-form antiderivative of the motion profile
  double displacement(double t) const {
    if (p_.stop_time && t >= *p_.stop_time) t = *p_.stop_time;
    if (p_.profile == TranslatingChargeParams::Profile::Sin7) {
      auto F = [](double c) { return -c + c * c * c - 0.6 * std::pow(c, 5) + std::pow(c, 7) / 7.0; };
      double c = std::cos(2.0 * pi * p_.nu * t);
      return 0.5 * p_.d * (35.0 / 16.0) * (F(c) + 16.0 / 35.0);
    }
    return 0.5 * p_.d * pi * (1.0 - std::cos(2.0 * p_.nu * t));
  }

  Vec3 center(double t) const { return p_.x0 + displacement(t) * p_.vhat; }

  double rho(const Vec3& x, double t) const override {
    Vec3 dx = x - center(t);
    double r = norm2(dx) / p_.R0;
    if (r >= 1.0) return 0.0;
    double q = r - r * r;
    double q2 = q * q;
    return p_.a * q2 * q2 * q2;
  }

  Vec3 current(const Vec3& x, double t) const override { return rho(x, t) * velocity(t); }

  std::optional<std::pair<Vec3, Vec3>> support(double t) const override {
    Vec3 c = center(t);
    return std::make_pair(c - Vec3{p_.R0, p_.R0, p_.R0}, c + Vec3{p_.R0, p_.R0, p_.R0});
  }

  double gauss_normalizer() const override {
    return four_pi * p_.a / 4096.0;  // (r - r^2)^6 peaks at 1/4096
  }

  bool provides_derivatives() const override { return analytic_; }
  Vec3 grad_rho(const Vec3& x, double t) const override {
    Vec3 dx = x - center(t);
    double dist = norm2(dx);
    double r = dist / p_.R0;
    if (r >= 1.0 || dist == 0.0) return {0, 0, 0};
    double q = r - r * r;
    double q5 = q * q * q * q * q;
    double drho_dr = 6.0 * p_.a * q5 * (1.0 - 2.0 * r);
    return (drho_dr / (p_.R0 * dist)) * dx;
  }
  Vec3 curl_current(const Vec3& x, double t) const override {
    // J = v(t) rho with spatially constant v: curl J = grad(rho) x v
    Vec3 g = grad_rho(x, t);
    Vec3 v = velocity(t);
    return {g[1] * v[2] - g[2] * v[1], g[2] * v[0] - g[0] * v[2], g[0] * v[1] - g[1] * v[0]};
  }

  const TranslatingChargeParams& params() const { return p_; }

 private:
  TranslatingChargeParams p_;
  bool analytic_ = false;
};

// Equilibrium field of the spherical charge: E = 4 pi R0 a P(r) rhat with the
// degree-13 interior polynomial matching 1/(45045 r^2) at the support edge.
inline double electrostatic_radial_profile(double r) {
  if (r >= 1.0) return 1.0 / (45045.0 * r * r);
  double r7 = std::pow(r, 7);
  return r7 * (1.0 / 9 + r * (-3.0 / 5 + r * (15.0 / 11 + r * (-5.0 / 3 + r * (15.0 / 13 + r * (-3.0 / 7 + r / 15.0))))));
}

inline Vec3 electrostatic_field(const Vec3& x, double a, double R0, const Vec3& x0) {
  Vec3 dx = x - x0;
  double dist = norm2(dx);
  if (dist == 0.0) return {0, 0, 0};
  double r = dist / R0;
  double mag = four_pi * R0 * a * electrostatic_radial_profile(r);
  return (mag / dist) * dx;
}

struct DivFreeCurrentParams {
  double amplitude = 100.0;
  double a = 3.0 / 160;
  double d = 13.0 / 320;
  Vec3 x0{0.5, 0.5, 0.5};  // (x0, y0, z0)
  double nu = 20.0;
};

class DivFreeCurrent : public SourceModel {
 public:
  explicit DivFreeCurrent(DivFreeCurrentParams p) : p_(p) {
    require(p_.a > 0 && p_.d > 0, "DivFreeCurrent: a, d must be positive");
  }

  Vec3 current(const Vec3& x, double t) const override {
    double dx = x[0] - p_.x0[0], dy = x[1] - p_.x0[1], dz = x[2] - p_.x0[2];
    double r = std::sqrt(dx * dx + dy * dy);
    if (r >= p_.a || std::abs(dz) >= 0.5 * p_.d) return {0, 0, 0};
    double u = 0.5 * pi * r / p_.a;
    double cu = std::cos(u);
    double radial_over_r = r < 1e-12 * p_.a ? 0.5 * pi / p_.a : std::sin(u) / r;
    double c10 = std::pow(cu, 10);
    double cz = std::cos(pi * dz / p_.d);
    double window = radial_over_r * c10 * std::pow(cz, 11) * std::sin(2.0 * pi * p_.nu * t);
    double f = p_.amplitude * window;
    return {-dy * f, dx * f, 0.0};
  }

  std::optional<std::pair<Vec3, Vec3>> support(double) const override {
    return std::make_pair(p_.x0 - Vec3{p_.a, p_.a, 0.5 * p_.d}, p_.x0 + Vec3{p_.a, p_.a, 0.5 * p_.d});
  }

  // peak of sin(u) cos^10(u) over u in [0, pi/2]
  double max_current() const {
    double s = 1.0 / std::sqrt(11.0);
    return p_.amplitude * s * std::pow(10.0 / 11.0, 5);
  }
  double field_normalizer() const { return four_pi / p_.nu * max_current(); }
  double gauss_normalizer() const override { return four_pi / (p_.nu * p_.a) * max_current(); }

  const DivFreeCurrentParams& params() const { return p_; }

 private:
  DivFreeCurrentParams p_;
};

class ZeroSource : public SourceModel {
 public:
  std::optional<std::pair<Vec3, Vec3>> support(double) const override {
    return std::make_pair(Vec3{0, 0, 0}, Vec3{0, 0, 0});
  }
};

}  // namespace ldcm
