#pragma once

#include <atomic>
#include <span>

#include "ldcm/bspline.hpp"
#include "ldcm/sphere_quadrature.hpp"
#include "ldcm/stencil.hpp"

namespace ldcm {

// Compact cube of convolution weights for one (c, ds, h). Weights are stored
// as density samples: (K*f)(x) = sum_n w[n] h^3 f(x - n h). An inclusive 3D
// prefix-sum table over the cube supports exact partial-mass lookups for the
// domain-boundary correction.
class DiscreteKernel {
 public:
  DiscreteKernel() = default;
  DiscreteKernel(int half_width, double h, double ds, double c)
      : rho_(half_width), h_(h), ds_(ds), c_(c), n_(2 * half_width + 1) {
    w_.assign(std::size_t(n_) * n_ * n_, 0.0);
    id_ = next_id();
  }

  static DiscreteKernel from_weights(int half_width, double h, std::vector<double> w, double ds = 0,
                                     double c = 1) {
    DiscreteKernel k(half_width, h, ds, c);
    expect(w.size() == k.w_.size(), "DiscreteKernel::from_weights: size mismatch");
    k.w_ = std::move(w);
    k.finalize();
    return k;
  }

  // identity element of the discrete convolution
  static DiscreteKernel point_mass(double h) {
    DiscreteKernel k(0, h, 0, 1);
    k.w_[0] = 1.0 / (h * h * h);
    k.finalize();
    return k;
  }

  int half_width() const { return rho_; }
  double h() const { return h_; }
  double ds() const { return ds_; }
  double wave_speed() const { return c_; }
  std::uint64_t id() const { return id_; }

  double& wref(int i, int j, int k) { return w_[idx(i, j, k)]; }
  double wat(int i, int j, int k) const {
    if (i < -rho_ || i > rho_ || j < -rho_ || j > rho_ || k < -rho_ || k > rho_) return 0.0;
    return w_[idx(i, j, k)];
  }
  const std::vector<double>& weights() const { return w_; }

  // Call after the weights are final; builds the prefix table.
  void finalize() {
    prefix_.assign(w_.size(), 0.0);
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j) {
        double row = 0.0;
        for (int i = 0; i < n_; ++i) {
          row += w_[raw(i, j, k)];
          double v = row;
          if (j > 0) v += prefix_[raw(i, j - 1, k)];
          if (k > 0) v += prefix_[raw(i, j, k - 1)];
          if (j > 0 && k > 0) v -= prefix_[raw(i, j - 1, k - 1)];
          prefix_[raw(i, j, k)] = v;
        }
      }
    total_ = prefix_[raw(n_ - 1, n_ - 1, n_ - 1)];
  }

  double weight_total() const { return total_; }
  double mass() const { return total_ * h_ * h_ * h_; }

  // Sum of weights over tap offsets in the (clamped) box; exact complement of
  // the full total for interior evaluation points.
  double box_weight_sum(const IndexBox& taps) const {
    int lo[3], hi[3];
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::max(taps.lo[d], -rho_) + rho_;
      hi[d] = std::min(taps.hi[d], rho_) + rho_;
      if (lo[d] > hi[d]) return 0.0;
    }
    auto P = [&](int i, int j, int k) -> double {
      if (i < 0 || j < 0 || k < 0) return 0.0;
      return prefix_[raw(i, j, k)];
    };
    return P(hi[0], hi[1], hi[2]) - P(lo[0] - 1, hi[1], hi[2]) - P(hi[0], lo[1] - 1, hi[2]) -
           P(hi[0], hi[1], lo[2] - 1) + P(lo[0] - 1, lo[1] - 1, hi[2]) +
           P(lo[0] - 1, hi[1], lo[2] - 1) + P(hi[0], lo[1] - 1, lo[2] - 1) -
           P(lo[0] - 1, lo[1] - 1, lo[2] - 1);
  }

  IndexBox support() const { return IndexBox(-rho_, rho_); }

 private:
  std::size_t raw(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n_) * (std::size_t(j) + std::size_t(n_) * k);
  }
  std::size_t idx(int i, int j, int k) const { return raw(i + rho_, j + rho_, k + rho_); }
  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  int rho_ = 0;
  double h_ = 1, ds_ = 0, c_ = 1;
  int n_ = 1;
  std::vector<double> w_, prefix_;
  double total_ = 0;
  std::uint64_t id_ = 0;
};

// Discrete Fourier symbol at wavevector k; real because every kernel built
// here is inversion-symmetric.
inline double kernel_symbol(const DiscreteKernel& kern, const Vec3& k) {
  const int r = kern.half_width();
  const double h = kern.h(), h3 = h * h * h;
  double s = 0.0;
  for (int c = -r; c <= r; ++c)
    for (int b = -r; b <= r; ++b)
      for (int a = -r; a <= r; ++a) {
        double w = kern.wat(a, b, c);
        if (w != 0.0) s += w * h3 * std::cos(h * (k[0] * a + k[1] * b + k[2] * c));
      }
  return s;
}

namespace detail {

// average over the 48 octahedral symmetries (axis permutations x sign flips)
inline void symmetrize_octahedral(DiscreteKernel& k) {
  const int r = k.half_width();
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<double> out(k.weights().size());
  std::size_t idx = 0;
  for (int c = -r; c <= r; ++c)
    for (int b = -r; b <= r; ++b)
      for (int a = -r; a <= r; ++a, ++idx) {
        int n[3] = {a, b, c};
        double acc = 0.0;
        for (const auto& p : perms)
          for (int s = 0; s < 8; ++s) {
            int m[3] = {n[p[0]], n[p[1]], n[p[2]]};
            if (s & 1) m[0] = -m[0];
            if (s & 2) m[1] = -m[1];
            if (s & 4) m[2] = -m[2];
            acc += k.wat(m[0], m[1], m[2]);
          }
        out[idx] = acc / 48.0;
      }
  std::size_t i = 0;
  for (int c = -r; c <= r; ++c)
    for (int b = -r; b <= r; ++b)
      for (int a = -r; a <= r; ++a) k.wref(a, b, c) = out[i++];
}

}  // namespace detail

// Regularized (weighted) spherical delta of radius c*ds deposited with the
// W60 tensor spline: weight_index 0 gives the plain shell G, index i in 1..3
// gives the shell weighted by the unit-direction component n_i (which folds
// the 1/(c ds) of the H identity into the kernel, so the assembled H has unit
// mass and a cosine symbol).
inline DiscreteKernel build_spherical_delta(double c, double ds, double h,
                                            const SphereQuadrature& quad, int weight_index,
                                            int max_half_width = 1 << 20) {
  require(c * ds > 0, "build_spherical_delta: c*ds must be positive");
  require(weight_index >= 0 && weight_index <= 3, "build_spherical_delta: weight_index in 0..3");
  const double R = c * ds;
  const int sup = spline_support(SplineKind::W60);
  const int rho = int(std::ceil(R / h)) + sup;
  require(rho <= max_half_width,
          "build_spherical_delta: kernel half-width " + std::to_string(rho) +
              " exceeds the configured maximum " + std::to_string(max_half_width) +
              " (quadrature step too large for the ghost budget)");

  DiscreteKernel kern(rho, h, ds, c);
  const double inv_h3 = 1.0 / (h * h * h);
  std::array<double, 8> wx{}, wy{}, wz{};
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Vec3& n = quad.points[q];
    const double omega = R * quad.weights[q] / four_pi;
    const double m = weight_index == 0 ? 1.0 : n[weight_index - 1];
    if (m == 0.0) continue;
    const double u[3] = {R * n[0] / h, R * n[1] / h, R * n[2] / h};
    int lo[3], hi[3];
    std::array<double, 8>* w1[3] = {&wx, &wy, &wz};
    for (int d = 0; d < 3; ++d) {
      lo[d] = int(std::ceil(u[d] - sup));
      hi[d] = int(std::floor(u[d] + sup));
      for (int i = lo[d]; i <= hi[d]; ++i) (*w1[d])[i - lo[d]] = eval_spline(SplineKind::W60, u[d] - i);
    }
    const double f = omega * m * inv_h3;
    for (int kk = lo[2]; kk <= hi[2]; ++kk)
      for (int jj = lo[1]; jj <= hi[1]; ++jj) {
        double fyz = f * wy[jj - lo[1]] * wz[kk - lo[2]];
        for (int ii = lo[0]; ii <= hi[0]; ++ii) kern.wref(ii, jj, kk) += fyz * wx[ii - lo[0]];
      }
  }
  if (weight_index == 0) detail::symmetrize_octahedral(kern);
  kern.finalize();
  return kern;
}

// New kernel computing K * (D f) in a single convolution: weights are the
// cross-correlation of K with the one-dimensional stencil along `axis`.
inline DiscreteKernel fold_stencil(const DiscreteKernel& k, int axis,
                                   std::span<const double> coeffs, double scale) {
  const int w = int(coeffs.size()) / 2;
  const int rho = k.half_width() + w;
  DiscreteKernel out(rho, k.h(), k.ds(), k.wave_speed());
  for (int c = -rho; c <= rho; ++c)
    for (int b = -rho; b <= rho; ++b)
      for (int a = -rho; a <= rho; ++a) {
        int p[3] = {a, b, c};
        double acc = 0.0;
        for (int m = -w; m <= w; ++m) {
          int t[3] = {p[0], p[1], p[2]};
          t[axis] += m;
          acc += coeffs[m + w] * k.wat(t[0], t[1], t[2]);
        }
        if (acc != 0.0) out.wref(a, b, c) = acc * scale;
      }
  out.finalize();
  return out;
}

// The three kernels one propagator application needs. K_H carries total mass
// exactly 1 and K_GL exactly 0 (zero-sum stencils kill the folded terms).
struct PropagatorSet {
  DiscreteKernel G;    // spherical shell, mass c*ds
  DiscreteKernel H;    // (G - sum_i G_i (x) d_i) / (c ds), mass 1
  DiscreteKernel GL;   // G with the discrete Laplacian folded in, mass 0
  double c = 1, ds = 0, h = 1;

  int max_half_width() const { return std::max(H.half_width(), GL.half_width()); }
};

inline PropagatorSet assemble_propagator_set(double c, double ds, double h,
                                             const SphereQuadrature& quad,
                                             int max_half_width = 1 << 20) {
  PropagatorSet set;
  set.c = c;
  set.ds = ds;
  set.h = h;
  set.G = build_spherical_delta(c, ds, h, quad, 0, max_half_width);
  const int rho_h = set.G.half_width() + FDStencil::half_width;
  require(rho_h <= max_half_width,
          "assemble_propagator_set: folded kernel half-width " + std::to_string(rho_h) +
              " exceeds the configured maximum " + std::to_string(max_half_width));

  DiscreteKernel H(rho_h, h, ds, c);
  const double inv_cds = 1.0 / (c * ds);
  for (int kk = -set.G.half_width(); kk <= set.G.half_width(); ++kk)
    for (int jj = -set.G.half_width(); jj <= set.G.half_width(); ++jj)
      for (int ii = -set.G.half_width(); ii <= set.G.half_width(); ++ii)
        H.wref(ii, jj, kk) = inv_cds * set.G.wat(ii, jj, kk);
  for (int axis = 0; axis < 3; ++axis) {
    DiscreteKernel gi = build_spherical_delta(c, ds, h, quad, axis + 1, max_half_width);
    DiscreteKernel folded = fold_stencil(gi, axis, FDStencil::d1, 1.0 / h);
    for (int kk = -rho_h; kk <= rho_h; ++kk)
      for (int jj = -rho_h; jj <= rho_h; ++jj)
        for (int ii = -rho_h; ii <= rho_h; ++ii) {
          double v = folded.wat(ii, jj, kk);
          if (v != 0.0) H.wref(ii, jj, kk) -= v;
        }
  }
  H.finalize();
  set.H = std::move(H);

  DiscreteKernel GL(rho_h, h, ds, c);
  for (int axis = 0; axis < 3; ++axis) {
    DiscreteKernel folded = fold_stencil(set.G, axis, FDStencil::d2, 1.0 / (h * h));
    for (int kk = -rho_h; kk <= rho_h; ++kk)
      for (int jj = -rho_h; jj <= rho_h; ++jj)
        for (int ii = -rho_h; ii <= rho_h; ++ii) {
          double v = folded.wat(ii, jj, kk);
          if (v != 0.0) GL.wref(ii, jj, kk) += v;
        }
  }
  GL.finalize();
  set.GL = std::move(GL);
  return set;
}

inline PropagatorSet make_propagator_set(double c, double ds, double h, int max_half_width = 1 << 20) {
  return assemble_propagator_set(c, ds, h, sphere_quadrature_for(c, ds, h), max_half_width);
}

}  // namespace ldcm
