#pragma once

#include "ldcm/level.hpp"
#include "ldcm/sources.hpp"
#include "ldcm/stencil.hpp"
#include "ldcm/threading.hpp"

namespace ldcm {

// Closed composite 3/8 Newton-Cotes rule over [0, dt] with M = 3k+1 points
// at spacing ds = dt/(M-1). Exact for cubics; weights sum to dt.
struct QuadratureScheme {
  int M = 4;
  double ds = 0;
  std::vector<double> w;
};

inline QuadratureScheme make_quadrature(double dt, int M) {
  require(M >= 4 && (M - 1) % 3 == 0,
          "make_quadrature: M must be 3k+1 with k >= 1, got " + std::to_string(M));
  QuadratureScheme q;
  q.M = M;
  q.ds = dt / (M - 1);
  q.w.assign(M, 0.0);
  for (int panel = 0; panel * 3 + 3 < M + 1; ++panel) {
    int base = panel * 3;
    q.w[base] += 3.0 / 8.0 * q.ds;
    q.w[base + 1] += 9.0 / 8.0 * q.ds;
    q.w[base + 2] += 9.0 / 8.0 * q.ds;
    q.w[base + 3] += 3.0 / 8.0 * q.ds;
  }
  return q;
}

// One propagator application to a state pair over a single output window:
//   f' = H*f + sign G*g,   g' = sign GL*f + H*g
// sign is +1 for the (E, Phi) pair and -1 for (B, Psi).
inline std::pair<NodeField, NodeField> apply_pair(ConvolutionEngine& eng, const PropagatorSet& set,
                                                  int sign, const NodeField& f, const NodeField& g,
                                                  const IndexBox& out_box,
                                                  const IndexBox* domain = nullptr) {
  expect(f.ncomp() == g.ncomp(), "apply_pair: component mismatch");
  NodeField fo(out_box, 0, f.ncomp(), f.h(), f.origin());
  NodeField go(out_box, 0, g.ncomp(), g.h(), g.origin());
  for (int c = 0; c < f.ncomp(); ++c) eng.apply_pair_comp(set, sign, f, g, c, fo, go, out_box, domain);
  return {std::move(fo), std::move(go)};
}

// --- level-scoped pieces of the single-level update ---------------------

inline void reinit_curl_state(Level& lv, WorkerPool& pool) {
  pool.parallel_for(lv.owned.size(), [&](long long p) {
    curl_into(lv.U.B, lv.U.Phi, lv.owned[p], lv.clamp());
    curl_into(lv.U.E, lv.U.Psi, lv.owned[p], lv.clamp());
  });
  lv.U.Phi.set_valid_ghost(0);
  lv.U.Psi.set_valid_ghost(0);
}

namespace detail {

inline IndexBox index_box_of_support(const Level& lv, const Vec3& lo, const Vec3& hi, int pad) {
  IndexBox b;
  for (int d = 0; d < 3; ++d) {
    b.lo[d] = int(std::floor((lo[d] - lv.origin[d]) / lv.h)) - pad;
    b.hi[d] = int(std::ceil((hi[d] - lv.origin[d]) / lv.h)) + pad;
  }
  return b;
}

inline void sample_rho(const SourceModel& src, const Level& lv, double t, NodeField& out) {
  for_each_node(out.box(), [&](int i, int j, int k) {
    out.at(0, i, j, k) = src.rho(lv.U.E.pos(i, j, k), t);
  });
}

inline void sample_current(const SourceModel& src, const Level& lv, double t, NodeField& out) {
  for_each_node(out.box(), [&](int i, int j, int k) {
    Vec3 J = src.current(lv.U.E.pos(i, j, k), t);
    out.at(0, i, j, k) = J[0];
    out.at(1, i, j, k) = J[1];
    out.at(2, i, j, k) = J[2];
  });
}

}  // namespace detail

// Quadrature-node source deposition at time tm with weight wm:
//   E   -= wm 4pi J,   Phi -= wm 4pi c grad(rho),   Psi -= wm 4pi curl(J).
// The gradient/curl come from sixth-order stencils applied to sampled rho, J
// unless the source provides analytic derivatives. Refinement levels update
// their ghost ring too (the ring carries propagator input); level 0 has none.
inline void add_sources_level(Level& lv, const SourceModel& src, double c, double tm, double wm) {
  auto sup = src.support(tm);
  std::vector<IndexBox> areas(lv.owned);
  if (lv.index > 0)
    for (const auto& b : lv.ghost_ring.boxes()) areas.push_back(b);

  IndexBox active = lv.bound;
  if (sup) active = intersect(grow(lv.bound, lv.ghost), detail::index_box_of_support(lv, sup->first, sup->second, 3));
  if (active.empty()) return;

  const bool analytic = src.provides_derivatives();
  NodeField rho_s, j_s;
  if (!analytic) {
    IndexBox samp = grow(active, FDStencil::half_width);
    rho_s = NodeField(samp, 0, 1, lv.h, lv.origin);
    j_s = NodeField(samp, 0, 3, lv.h, lv.origin);
    if (src.has_charge()) detail::sample_rho(src, lv, tm, rho_s);
    detail::sample_current(src, lv, tm, j_s);
  }

  const double kJ = -wm * four_pi;
  const double kRho = -wm * four_pi * c;
  for (const auto& area : areas) {
    IndexBox b = intersect(area, active);
    if (b.empty()) continue;
    if (analytic) {
      for_each_node(b, [&](int i, int j, int k) {
        Vec3 x = lv.U.E.pos(i, j, k);
        Vec3 J = src.current(x, tm);
        Vec3 gr = src.grad_rho(x, tm);
        Vec3 cj = src.curl_current(x, tm);
        for (int d = 0; d < 3; ++d) {
          lv.U.E.at(d, i, j, k) += kJ * J[d];
          lv.U.Phi.at(d, i, j, k) += kRho * gr[d];
          lv.U.Psi.at(d, i, j, k) += kJ * cj[d];
        }
      });
    } else {
      for_each_node(b, [&](int i, int j, int k) {
        for (int d = 0; d < 3; ++d) lv.U.E.at(d, i, j, k) += kJ * j_s.at(d, i, j, k);
      });
      if (src.has_charge()) {
        NodeField gr(b, 0, 3, lv.h, lv.origin);
        grad_into(rho_s, 0, gr, b, nullptr);
        for_each_node(b, [&](int i, int j, int k) {
          for (int d = 0; d < 3; ++d) lv.U.Phi.at(d, i, j, k) += kRho * gr.at(d, i, j, k);
        });
      }
      NodeField cj(b, 0, 3, lv.h, lv.origin);
      curl_into(j_s, cj, b, nullptr);
      for_each_node(b, [&](int i, int j, int k) {
        for (int d = 0; d < 3; ++d) lv.U.Psi.at(d, i, j, k) += kJ * cj.at(d, i, j, k);
      });
    }
  }
}

// One quadrature sub-step of the propagator on both pairs, patch-parallel.
// Results land in the owned tiling; ghosts are invalidated.
inline void propagate_level(Level& lv, ConvolutionEngine& eng, WorkerPool& pool) {
  const IndexBox* dom = lv.clamp();
  const long long n = lv.owned.size();
  pool.parallel_for(3 * n, [&](long long item) {
    int comp = int(item % 3);
    const IndexBox& box = lv.owned[item / 3];
    eng.apply_pair_comp(lv.prop, +1, lv.U.E, lv.U.Phi, comp, lv.scr_a, lv.scr_b, box, dom);
  });
  std::swap(lv.U.E, lv.scr_a);
  std::swap(lv.U.Phi, lv.scr_b);
  pool.parallel_for(3 * n, [&](long long item) {
    int comp = int(item % 3);
    const IndexBox& box = lv.owned[item / 3];
    eng.apply_pair_comp(lv.prop, -1, lv.U.B, lv.U.Psi, comp, lv.scr_a, lv.scr_b, box, dom);
  });
  std::swap(lv.U.B, lv.scr_a);
  std::swap(lv.U.Psi, lv.scr_b);
  lv.U.E.set_valid_ghost(0);
  lv.U.B.set_valid_ghost(0);
  lv.U.Phi.set_valid_ghost(0);
  lv.U.Psi.set_valid_ghost(0);
}

// End-of-step constraint filter. Increments are computed into scratch from a
// frozen view of the fields, then applied, so patches stay independent.
inline void filter_level(Level& lv, const SourceModel& src, double t_new, WorkerPool& pool) {
  NodeField rho_s;
  const NodeField* rho_ptr = nullptr;
  if (src.has_charge()) {
    IndexBox samp = grow(lv.bound, std::min(lv.ghost + FDStencil::half_width, lv.ghost == 0 ? FDStencil::half_width : lv.ghost + FDStencil::half_width));
    samp = grow(lv.bound, lv.ghost) ;
    samp = grow(samp, FDStencil::half_width);
    rho_s = NodeField(samp, 0, 1, lv.h, lv.origin);
    auto sup = src.support(t_new);
    IndexBox active = samp;
    if (sup) active = intersect(samp, detail::index_box_of_support(lv, sup->first, sup->second, 1));
    if (!active.empty())
      for_each_node(active, [&](int i, int j, int k) {
        rho_s.at(0, i, j, k) = src.rho(lv.U.E.pos(i, j, k), t_new);
      });
    rho_ptr = &rho_s;
  }

  pool.parallel_for(lv.owned.size(), [&](long long p) {
    marder_increment(lv.U.E, lv.eta, rho_ptr, lv.owned[p], lv.clamp(), lv.scr_a);
    marder_increment(lv.U.B, lv.eta, nullptr, lv.owned[p], lv.clamp(), lv.scr_b);
  });
  pool.parallel_for(lv.owned.size(), [&](long long p) {
    for_each_node(lv.owned[p], [&](int i, int j, int k) {
      for (int d = 0; d < 3; ++d) {
        lv.U.E.at(d, i, j, k) += lv.scr_a.at(d, i, j, k);
        lv.U.B.at(d, i, j, k) += lv.scr_b.at(d, i, j, k);
      }
    });
  });
  lv.U.E.set_valid_ghost(0);
  lv.U.B.set_valid_ghost(0);
}

// Algorithm view of one full step on an isolated level (no finer/coarser
// neighbours): curl re-init, M quadrature nodes with propagation between
// them, then the filter. The multilevel driver interleaves the same calls
// with sampling and interpolation.
inline void advance_single_level(Level& lv, const SourceModel& src, double c, double t,
                                 const QuadratureScheme& quad, ConvolutionEngine& eng,
                                 WorkerPool& pool) {
  reinit_curl_state(lv, pool);
  for (int m = 1; m <= quad.M; ++m) {
    double tm = t + (m - 1) * quad.ds;
    add_sources_level(lv, src, c, tm, quad.w[m - 1]);
    if (m < quad.M) propagate_level(lv, eng, pool);
  }
  filter_level(lv, src, t + (quad.M - 1) * quad.ds, pool);
}

}  // namespace ldcm
