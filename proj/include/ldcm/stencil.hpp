#pragma once

#include <array>

#include "ldcm/field.hpp"

namespace ldcm {

// Sixth-order centered differences. Offsets -3..3; first derivative is
// antisymmetric and zero-sum, second derivative symmetric and zero-sum.
struct FDStencil {
  static constexpr int half_width = 3;
  static constexpr std::array<double, 7> d1 = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0,
                                               3.0 / 4,   -3.0 / 20, 1.0 / 60};
  static constexpr std::array<double, 7> d2 = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18,
                                               3.0 / 2,  -3.0 / 20, 1.0 / 90};
  static const std::array<double, 7>& coeffs(int order) {
    expect(order == 1 || order == 2, "FDStencil: order must be 1 or 2");
    return order == 1 ? d1 : d2;
  }
};

namespace detail {

inline void check_stencil_ghost(const NodeField& f, const IndexBox& eval, const IndexBox* clamp) {
  IndexBox need = grow(eval, FDStencil::half_width);
  if (clamp) need = intersect(need, *clamp);
  IndexBox valid = f.valid_ghost() > 0 ? grow(f.box(), f.valid_ghost()) : f.box();
  expect(valid.contains(need), "stencil: insufficient valid ghost data for evaluation box");
}

}  // namespace detail

// out(co) = d^order/d(axis)^order f(cf) on eval. When `clamp` is given, taps
// falling outside that box read the center node's value instead (the same
// exterior closure the convolution uses at the physical boundary).
inline void diff_into(const NodeField& f, int cf, NodeField& out, int co, int axis, int order,
                      const IndexBox& eval, const IndexBox* clamp = nullptr) {
  detail::check_stencil_ghost(f, eval, clamp);
  expect(out.stored_box().contains(eval), "diff_into: output does not store eval box");
  const auto& c = FDStencil::coeffs(order);
  const double scale = order == 1 ? 1.0 / f.h() : 1.0 / (f.h() * f.h());
  const int W = FDStencil::half_width;
  for_each_node(eval, [&](int i, int j, int k) {
    Int3 n{i, j, k};
    double acc = 0.0;
    double centre = f.at(cf, i, j, k);
    for (int m = -W; m <= W; ++m) {
      Int3 t = n;
      t[axis] += m;
      double v = (clamp && !clamp->contains(t[0], t[1], t[2])) ? centre : f.at(cf, t[0], t[1], t[2]);
      acc += c[m + W] * v;
    }
    out.at(co, i, j, k) = acc * scale;
  });
}

inline NodeField diff(const NodeField& f, int axis, int order, const IndexBox& eval,
                      const IndexBox* clamp = nullptr) {
  NodeField out(eval, 0, 1, f.h(), f.origin());
  diff_into(f, 0, out, 0, axis, order, eval, clamp);
  return out;
}

inline void grad_into(const NodeField& s, int cs, NodeField& out, const IndexBox& eval,
                      const IndexBox* clamp = nullptr) {
  for (int d = 0; d < 3; ++d) diff_into(s, cs, out, d, d, 1, eval, clamp);
}

inline void div_into(const NodeField& v, NodeField& out, int co, const IndexBox& eval,
                     const IndexBox* clamp = nullptr) {
  NodeField tmp(eval, 0, 1, v.h(), v.origin());
  diff_into(v, 0, out, co, 0, 1, eval, clamp);
  for (int d = 1; d < 3; ++d) {
    diff_into(v, d, tmp, 0, d, 1, eval, clamp);
    for_each_node(eval, [&](int i, int j, int k) { out.at(co, i, j, k) += tmp.at(0, i, j, k); });
  }
}

inline void curl_into(const NodeField& v, NodeField& out, const IndexBox& eval,
                      const IndexBox* clamp = nullptr) {
  NodeField tmp(eval, 0, 1, v.h(), v.origin());
  // (curl v)_i = d_j v_k - d_k v_j, (i,j,k) cyclic
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    diff_into(v, k, out, i, j, 1, eval, clamp);
    diff_into(v, j, tmp, 0, k, 1, eval, clamp);
    for_each_node(eval, [&](int a, int b, int c) { out.at(i, a, b, c) -= tmp.at(0, a, b, c); });
  }
}

inline void laplacian_into(const NodeField& f, int cf, NodeField& out, int co, const IndexBox& eval,
                           const IndexBox* clamp = nullptr) {
  NodeField tmp(eval, 0, 1, f.h(), f.origin());
  diff_into(f, cf, out, co, 0, 2, eval, clamp);
  for (int d = 1; d < 3; ++d) {
    diff_into(f, cf, tmp, 0, d, 2, eval, clamp);
    for_each_node(eval, [&](int i, int j, int k) { out.at(co, i, j, k) += tmp.at(0, i, j, k); });
  }
}

inline NodeField grad(const NodeField& s, const IndexBox& eval, const IndexBox* clamp = nullptr) {
  NodeField out(eval, 0, 3, s.h(), s.origin());
  grad_into(s, 0, out, eval, clamp);
  return out;
}
inline NodeField div(const NodeField& v, const IndexBox& eval, const IndexBox* clamp = nullptr) {
  NodeField out(eval, 0, 1, v.h(), v.origin());
  div_into(v, out, 0, eval, clamp);
  return out;
}
inline NodeField curl(const NodeField& v, const IndexBox& eval, const IndexBox* clamp = nullptr) {
  NodeField out(eval, 0, 3, v.h(), v.origin());
  curl_into(v, out, eval, clamp);
  return out;
}
inline NodeField laplacian(const NodeField& f, const IndexBox& eval, const IndexBox* clamp = nullptr) {
  NodeField out(eval, 0, f.ncomp(), f.h(), f.origin());
  for (int c = 0; c < f.ncomp(); ++c) laplacian_into(f, c, out, c, eval, clamp);
  return out;
}

// d_i^2 F_i for the filter diagonal
inline void laplace_diag(const NodeField& F, int i, NodeField& out, const IndexBox& eval,
                         const IndexBox* clamp) {
  diff_into(F, i, out, i, i, 2, eval, clamp);
}

// Constraint filter: F_i += eta * (sum_j d_i d_j F_j - 4*pi d_i rho).
// Diagonal terms use the second-derivative stencil, off-diagonal terms two
// first-derivative passes, so F must be valid to ghost 6 (3 per pass).
// rho == nullptr gives the divergence-only form used for B.
inline void marder_filter(NodeField& F, double eta, const NodeField* rho, const IndexBox& eval,
                          const IndexBox* clamp = nullptr) {
  expect(F.ncomp() == 3, "marder_filter: vector field expected");
  IndexBox mid = grow(eval, FDStencil::half_width);
  if (clamp) mid = intersect(mid, *clamp);

  // first-derivative passes g_j = d_j F_j, plus the combined operand per axis
  NodeField g(mid, 0, 4, F.h(), F.origin());
  for (int d = 0; d < 3; ++d) diff_into(F, d, g, d, d, 1, mid, clamp);
  for_each_node(mid, [&](int i, int j, int k) {
    g.at(3, i, j, k) = g.at(0, i, j, k) + g.at(1, i, j, k) + g.at(2, i, j, k);
  });
  if (rho) {
    expect(rho->valid_ghost() > 0 ? grow(rho->box(), rho->valid_ghost()).contains(mid)
                                  : rho->box().contains(mid),
           "marder_filter: rho not valid on required box");
    for_each_node(mid, [&](int i, int j, int k) { g.at(3, i, j, k) -= four_pi * rho->at(0, i, j, k); });
  }
  g.set_valid_ghost(0);

  NodeField inc(eval, 0, 3, F.h(), F.origin());
  NodeField cross(eval, 0, 1, F.h(), F.origin());
  for (int i = 0; i < 3; ++i) {
    laplace_diag(F, i, inc, eval, clamp);
    // operand for the off-diagonal part: g_sum - g_i (- 4 pi rho)
    NodeField operand(mid, 0, 1, F.h(), F.origin());
    for_each_node(mid, [&](int a, int b, int c) {
      operand.at(0, a, b, c) = g.at(3, a, b, c) - g.at(i, a, b, c);
    });
    diff_into(operand, 0, cross, 0, i, 1, eval, clamp);
    for_each_node(eval, [&](int a, int b, int c) {
      F.at(i, a, b, c) += eta * (inc.at(i, a, b, c) + cross.at(0, a, b, c));
    });
  }
}

}  // namespace ldcm
