#pragma once

#include "ldcm/convolution.hpp"
#include "ldcm/field.hpp"
#include "ldcm/kernel.hpp"

namespace ldcm {

// Per-level auxiliary wave state. Phi and Psi are re-derived from the curls
// of B and E at the start of every time step.
struct StateU {
  NodeField E, B, Phi, Psi;
};

// One refinement level: a union of node-disjoint boxes, field storage over
// the bounding box plus a ghost ring, a disjoint write tiling into patches,
// and the convolution kernels for this spacing. Level 0 owns the physical
// domain boundary and uses the bounded operators instead of a ghost ring.
struct Level {
  int index = 0;
  double h = 1.0;
  double eta = 0.0;  // filter coefficient for this spacing
  Vec3 origin{0, 0, 0};
  BoxList region;
  IndexBox bound;
  int ghost = 0;
  IndexBox domain_box;  // level-0 clamp box (the physical domain in this level's indices)
  BoxList ghost_ring;   // grow(region, ghost) \ region, empty on level 0
  std::vector<IndexBox> owned;
  StateU U;
  NodeField scr_a, scr_b;
  PropagatorSet prop;

  const IndexBox* clamp() const { return index == 0 ? &domain_box : nullptr; }
  bool bounded() const { return index == 0; }
};

namespace detail {

inline std::vector<IndexBox> tile_region(const BoxList& region, int patch_nodes) {
  std::vector<IndexBox> owned;
  for (const auto& b : region.boxes()) {
    bool divisible = patch_nodes >= 2;
    for (int d = 0; d < 3; ++d)
      divisible = divisible && b.extent(d) >= patch_nodes &&
                  (b.extent(d) - 1) % (patch_nodes - 1) == 0;
    if (divisible) {
      auto patches = partition_domain(b, patch_nodes);
      auto tiles = owned_boxes(patches, b);
      owned.insert(owned.end(), tiles.begin(), tiles.end());
    } else {
      owned.push_back(b);
    }
  }
  return owned;
}

}  // namespace detail

inline void allocate_level_fields(Level& lv) {
  lv.U.E = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
  lv.U.B = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
  lv.U.Phi = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
  lv.U.Psi = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
  lv.scr_a = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
  lv.scr_b = NodeField(lv.bound, lv.ghost, 3, lv.h, lv.origin);
}

inline Level make_level(int index, double h, Vec3 origin, BoxList region, int ghost, int patch_nodes,
                        PropagatorSet prop, double eta) {
  Level lv;
  lv.index = index;
  lv.h = h;
  lv.origin = origin;
  lv.region = std::move(region);
  lv.bound = lv.region.bounding();
  lv.ghost = index == 0 ? 0 : ghost;
  lv.domain_box = lv.bound;
  if (index > 0) {
    BoxList grown;
    for (const auto& b : lv.region.boxes()) grown = BoxList::unite(grown, BoxList(grow(b, lv.ghost)));
    lv.ghost_ring = BoxList::subtract(grown, lv.region);
  }
  lv.owned = detail::tile_region(lv.region, patch_nodes);
  lv.prop = std::move(prop);
  lv.eta = eta;
  allocate_level_fields(lv);
  return lv;
}

}  // namespace ldcm
