#pragma once

#include <cstring>
#include <vector>

#include "ldcm/box.hpp"
#include "ldcm/common.hpp"

namespace ldcm {

// Multi-component real values on the nodes of a box plus a ghost ring.
// Storage covers grow(box, ghost) for every component; valid_ghost() tracks
// how many ghost layers currently hold meaningful data.
class NodeField {
 public:
  NodeField() = default;
  NodeField(const IndexBox& box, int ghost, int ncomp, double h, Vec3 origin = {0, 0, 0})
      : box_(box),
        store_(ghost > 0 ? grow(box, ghost) : box),
        ghost_(ghost),
        ncomp_(ncomp),
        h_(h),
        origin_(origin) {
    expect(!box.empty(), "NodeField: empty box");
    for (int d = 0; d < 3; ++d) dims_[d] = store_.extent(d);
    plane_ = 1LL * dims_[0] * dims_[1];
    npts_ = plane_ * dims_[2];
    v_.assign(npts_ * ncomp_, 0.0);
  }

  const IndexBox& box() const { return box_; }
  const IndexBox& stored_box() const { return store_; }
  int ghost_width() const { return ghost_; }
  int ncomp() const { return ncomp_; }
  double h() const { return h_; }
  const Vec3& origin() const { return origin_; }
  long long points_per_comp() const { return npts_; }

  int valid_ghost() const { return valid_ghost_; }
  void set_valid_ghost(int g) { valid_ghost_ = std::min(g, ghost_); }

  Vec3 pos(int i, int j, int k) const {
    return {origin_[0] + i * h_, origin_[1] + j * h_, origin_[2] + k * h_};
  }

  long long offset(int i, int j, int k) const {
    return (i - store_.lo[0]) + 1LL * dims_[0] * (j - store_.lo[1]) + plane_ * (k - store_.lo[2]);
  }
  double& at(int c, int i, int j, int k) { return v_[c * npts_ + offset(i, j, k)]; }
  double at(int c, int i, int j, int k) const { return v_[c * npts_ + offset(i, j, k)]; }

  double* comp(int c) { return v_.data() + c * npts_; }
  const double* comp(int c) const { return v_.data() + c * npts_; }

  void fill(double val) { std::fill(v_.begin(), v_.end(), val); }
  void fill_comp(int c, double val) {
    std::fill(v_.begin() + c * npts_, v_.begin() + (c + 1) * npts_, val);
  }

  // out-of-place copy of one component over a box (both fields must store it)
  static void copy_region(const NodeField& src, int cs, NodeField& dst, int cd, const IndexBox& b) {
    expect(src.store_.contains(b) && dst.store_.contains(b), "copy_region: box not stored");
    for_each_node(b, [&](int i, int j, int k) { dst.at(cd, i, j, k) = src.at(cs, i, j, k); });
  }

  bool finite_on(const IndexBox& b) const {
    for (int c = 0; c < ncomp_; ++c) {
      bool ok = true;
      for_each_node(b, [&](int i, int j, int k) {
        if (!std::isfinite(at(c, i, j, k))) ok = false;
      });
      if (!ok) return false;
    }
    return true;
  }

 private:
  IndexBox box_, store_;
  int ghost_ = 0;
  int ncomp_ = 1;
  double h_ = 1.0;
  Vec3 origin_{0, 0, 0};
  Int3 dims_{0, 0, 0};
  long long plane_ = 0, npts_ = 0;
  std::vector<double> v_;
  int valid_ghost_ = 0;
};

}  // namespace ldcm
