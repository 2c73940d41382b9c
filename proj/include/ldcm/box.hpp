#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <vector>

#include "ldcm/common.hpp"

namespace ldcm {

// Closed, inclusive range of node indices. Node counts are hi - lo + 1 per
// axis; a box with lo > hi on any axis is empty.
struct IndexBox {
  Int3 lo{0, 0, 0};
  Int3 hi{-1, -1, -1};

  IndexBox() = default;
  IndexBox(Int3 l, Int3 h) : lo(l), hi(h) {}
  IndexBox(int l, int h) : lo{l, l, l}, hi{h, h, h} {}

  bool empty() const { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }
  int extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  long long num_nodes() const {
    if (empty()) return 0;
    return 1LL * extent(0) * extent(1) * extent(2);
  }
  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i <= hi[0] && j >= lo[1] && j <= hi[1] && k >= lo[2] && k <= hi[2];
  }
  bool contains(const IndexBox& b) const {
    return b.empty() || (contains(b.lo[0], b.lo[1], b.lo[2]) && contains(b.hi[0], b.hi[1], b.hi[2]));
  }
  bool operator==(const IndexBox& o) const { return lo == o.lo && hi == o.hi; }
  bool operator!=(const IndexBox& o) const { return !(*this == o); }

  friend IndexBox intersect(const IndexBox& a, const IndexBox& b) {
    IndexBox r;
    for (int d = 0; d < 3; ++d) {
      r.lo[d] = std::max(a.lo[d], b.lo[d]);
      r.hi[d] = std::min(a.hi[d], b.hi[d]);
    }
    return r;
  }
};

inline std::ostream& operator<<(std::ostream& os, const IndexBox& b) {
  return os << "[(" << b.lo[0] << "," << b.lo[1] << "," << b.lo[2] << ")..("
            << b.hi[0] << "," << b.hi[1] << "," << b.hi[2] << ")]";
}

inline IndexBox grow(const IndexBox& b, int w) {
  IndexBox r{{b.lo[0] - w, b.lo[1] - w, b.lo[2] - w}, {b.hi[0] + w, b.hi[1] + w, b.hi[2] + w}};
  expect(!r.empty(), "grow: result box is empty");
  return r;
}

inline IndexBox refine_box(const IndexBox& b, int r) {
  require(r >= 2, "refine_box: ratio must be >= 2");
  return {{b.lo[0] * r, b.lo[1] * r, b.lo[2] * r}, {b.hi[0] * r, b.hi[1] * r, b.hi[2] * r}};
}

// Inverse of refine_box; corners must be aligned to the ratio.
inline IndexBox coarsen_box(const IndexBox& b, int r) {
  require(r >= 2, "coarsen_box: ratio must be >= 2");
  for (int d = 0; d < 3; ++d)
    require(b.lo[d] % r == 0 && b.hi[d] % r == 0,
            "coarsen_box: corner not aligned to ratio along axis " + std::to_string(d));
  return {{b.lo[0] / r, b.lo[1] / r, b.lo[2] / r}, {b.hi[0] / r, b.hi[1] / r, b.hi[2] / r}};
}

// Coarse nodes coincident with nodes of the fine box: ceil(lo/r)..floor(hi/r).
inline IndexBox coarsen_coincident(const IndexBox& b, int r) {
  IndexBox c;
  for (int d = 0; d < 3; ++d) {
    c.lo[d] = ceil_div(b.lo[d], r);
    c.hi[d] = floor_div(b.hi[d], r);
  }
  return c;
}

template <class Fn>
inline void for_each_node(const IndexBox& b, Fn&& fn) {
  for (int k = b.lo[2]; k <= b.hi[2]; ++k)
    for (int j = b.lo[1]; j <= b.hi[1]; ++j)
      for (int i = b.lo[0]; i <= b.hi[0]; ++i) fn(i, j, k);
}

// A union of node-disjoint boxes. subtract() produces the canonical disjoint
// decomposition, so BoxList values built through the algebra never overlap.
class BoxList {
 public:
  BoxList() = default;
  explicit BoxList(const IndexBox& b) {
    if (!b.empty()) boxes_.push_back(b);
  }
  explicit BoxList(std::vector<IndexBox> bs) : boxes_(std::move(bs)) {}

  const std::vector<IndexBox>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }
  long long num_nodes() const {
    long long n = 0;
    for (auto& b : boxes_) n += b.num_nodes();
    return n;
  }
  bool contains(int i, int j, int k) const {
    for (auto& b : boxes_)
      if (b.contains(i, j, k)) return true;
    return false;
  }
  bool contains(const IndexBox& b) const {
    BoxList rem = subtract(BoxList(b), *this);
    return rem.empty();
  }
  IndexBox bounding() const {
    expect(!boxes_.empty(), "BoxList::bounding: empty list");
    IndexBox r = boxes_[0];
    for (auto& b : boxes_)
      for (int d = 0; d < 3; ++d) {
        r.lo[d] = std::min(r.lo[d], b.lo[d]);
        r.hi[d] = std::max(r.hi[d], b.hi[d]);
      }
    return r;
  }
  bool operator==(const BoxList& o) const { return boxes_ == o.boxes_; }

  // a \ b, node-disjoint pieces.
  static BoxList subtract(const BoxList& a, const BoxList& b) {
    std::vector<IndexBox> cur = a.boxes_;
    for (const auto& cut : b.boxes_) {
      std::vector<IndexBox> next;
      for (const auto& box : cur) split_minus(box, cut, next);
      cur = std::move(next);
    }
    return BoxList(std::move(cur));
  }
  static BoxList intersect(const BoxList& a, const BoxList& b) {
    std::vector<IndexBox> out;
    for (const auto& x : a.boxes_)
      for (const auto& y : b.boxes_) {
        IndexBox c = ldcm::intersect(x, y);
        if (!c.empty()) out.push_back(c);
      }
    return BoxList(std::move(out));
  }
  // a ∪ b assuming callers keep pieces disjoint (b is cut against a first).
  static BoxList unite(const BoxList& a, const BoxList& b) {
    BoxList extra = subtract(b, a);
    std::vector<IndexBox> out = a.boxes_;
    out.insert(out.end(), extra.boxes_.begin(), extra.boxes_.end());
    return BoxList(std::move(out));
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (auto& b : boxes_) for_each_node(b, fn);
  }

 private:
  // box \ cut appended to out as up to 6 disjoint boxes.
  static void split_minus(const IndexBox& box, const IndexBox& cut, std::vector<IndexBox>& out) {
    IndexBox c = ldcm::intersect(box, cut);
    if (c.empty()) {
      out.push_back(box);
      return;
    }
    IndexBox rem = box;
    for (int d = 0; d < 3; ++d) {
      if (rem.lo[d] < c.lo[d]) {
        IndexBox lowside = rem;
        lowside.hi[d] = c.lo[d] - 1;
        out.push_back(lowside);
        rem.lo[d] = c.lo[d];
      }
      if (rem.hi[d] > c.hi[d]) {
        IndexBox highside = rem;
        highside.lo[d] = c.hi[d] + 1;
        out.push_back(highside);
        rem.hi[d] = c.hi[d];
      }
    }
    // rem == c, dropped
  }

  std::vector<IndexBox> boxes_;
};

// One unit of domain decomposition: a box plus the width of the halo it
// reads from its surroundings.
struct Patch {
  IndexBox box;
  int ghost_width = 0;

  BoxList ghost_region() const { return BoxList::subtract(BoxList(grow(box, ghost_width)), BoxList(box)); }
};

// Node-centered geometry: the node with index i sits at origin + i*h.
struct GridGeometry {
  Vec3 origin{0, 0, 0};
  double h = 1.0;
  IndexBox domain;

  Vec3 node_pos(int i, int j, int k) const {
    return {origin[0] + i * h, origin[1] + j * h, origin[2] + k * h};
  }
};

// Tile `domain` with patches of patch_nodes^3 nodes; adjacent patches share
// exactly one layer of boundary nodes, so extents must satisfy
// (nodes-1) % (patch_nodes-1) == 0 per axis.
inline std::vector<Patch> partition_domain(const IndexBox& domain, int patch_nodes, int ghost_width = 0) {
  require(patch_nodes >= 2, "partition_domain: patch_nodes must be >= 2");
  require(!domain.empty(), "partition_domain: empty domain");
  Int3 n{};
  const char* axis_name[3] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    int span = domain.extent(d) - 1;
    int step = patch_nodes - 1;
    require(span % step == 0,
            std::string("partition_domain: domain extent ") + std::to_string(domain.extent(d)) +
                " nodes along axis " + axis_name[d] + " is not divisible into patches of " +
                std::to_string(patch_nodes) + " nodes");
    n[d] = span / step;
  }
  std::vector<Patch> out;
  out.reserve(1LL * n[0] * n[1] * n[2]);
  int step = patch_nodes - 1;
  for (int pk = 0; pk < n[2]; ++pk)
    for (int pj = 0; pj < n[1]; ++pj)
      for (int pi = 0; pi < n[0]; ++pi) {
        IndexBox b{{domain.lo[0] + pi * step, domain.lo[1] + pj * step, domain.lo[2] + pk * step},
                   {domain.lo[0] + (pi + 1) * step, domain.lo[1] + (pj + 1) * step,
                    domain.lo[2] + (pk + 1) * step}};
        out.push_back(Patch{b, ghost_width});
      }
  return out;
}

// Disjoint write-ownership tiling derived from a shared-node partition: every
// node belongs to exactly one patch (the one whose low corner it is closest
// to; the final patch per axis keeps the high face).
inline std::vector<IndexBox> owned_boxes(const std::vector<Patch>& patches, const IndexBox& domain) {
  std::vector<IndexBox> out;
  out.reserve(patches.size());
  for (const auto& p : patches) {
    IndexBox b = p.box;
    for (int d = 0; d < 3; ++d)
      if (b.hi[d] != domain.hi[d]) b.hi[d] -= 1;
    out.push_back(b);
  }
  return out;
}

}  // namespace ldcm
