#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>

#include "ldcm/field.hpp"
#include "ldcm/kernel.hpp"

namespace ldcm {

// Exact linear convolution of compact kernels with node fields. The fast path
// zero-pads each output window to at least (window + 2*half_width) per axis
// and multiplies spectra (Hockney); direct_convolve is the nested-loop oracle
// with the identical contract. With a `domain` box the exterior is closed by
// substituting the evaluation node's own value, realized as a chi-masked
// convolution plus an exact partial-mass correction.

inline int next_fast_size(int n) {
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

namespace detail {

inline void check_conv_contract(const DiscreteKernel& k, const NodeField& f, const IndexBox& out_box,
                                const IndexBox* domain) {
  expect(!out_box.empty(), "convolve: empty output box");
  if (domain) expect(domain->contains(out_box), "convolve: output box extends outside the domain");
  IndexBox need = grow(out_box, k.half_width());
  if (domain) need = intersect(need, *domain);
  IndexBox valid = f.valid_ghost() > 0 ? grow(f.box(), f.valid_ghost()) : f.box();
  expect(valid.contains(need), "convolve: field not valid on output box grown by the kernel radius");
}

struct FftBuffers {
  FftBuffers() = default;
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  Int3 dims{0, 0, 0};
  double* real = nullptr;
  fftw_complex* ca = nullptr;
  fftw_complex* cb = nullptr;
  fftw_complex* cc = nullptr;

  void alloc(const Int3& d) {
    free_all();
    dims = d;
    std::size_t nr = std::size_t(d[0]) * d[1] * d[2];
    std::size_t nc = std::size_t(d[0]) * d[1] * (d[2] / 2 + 1);
    real = fftw_alloc_real(nr);
    ca = fftw_alloc_complex(nc);
    cb = fftw_alloc_complex(nc);
    cc = fftw_alloc_complex(nc);
  }
  void free_all() {
    if (real) fftw_free(real);
    if (ca) fftw_free(ca);
    if (cb) fftw_free(cb);
    if (cc) fftw_free(cc);
    real = nullptr;
    ca = cb = cc = nullptr;
  }
  ~FftBuffers() { free_all(); }
};

}  // namespace detail

class ConvolutionEngine {
 public:
  ConvolutionEngine() = default;
  ConvolutionEngine(const ConvolutionEngine&) = delete;
  ~ConvolutionEngine() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

  // out(co) over out_box; accumulates if `add`.
  void convolve_into(const DiscreteKernel& k, const NodeField& f, int cf, NodeField& out, int co,
                     const IndexBox& out_box, const IndexBox* domain = nullptr, bool add = false) {
    detail::check_conv_contract(k, f, out_box, domain);
    const int rho = k.half_width();
    Int3 dims = padded_dims(out_box, rho);
    auto& buf = buffers(dims);
    const auto& spec = spectrum(k, dims);
    load_window(f, cf, grow(out_box, rho), dims, domain, buf.real);
    fftw_execute_dft_r2c(plans(dims).r2c, buf.real, buf.ca);
    std::size_t nc = std::size_t(dims[0]) * dims[1] * (dims[2] / 2 + 1);
    auto* sa = reinterpret_cast<std::complex<double>*>(buf.ca);
    for (std::size_t i = 0; i < nc; ++i) sa[i] *= spec[i];
    fftw_execute_dft_c2r(plans(dims).c2r, buf.ca, buf.real);
    store_result(buf.real, dims, out_box, rho, out, co, add);
    if (domain) apply_boundary_correction(k, f, cf, out, co, out_box, *domain, 1.0);
  }

  NodeField convolve(const DiscreteKernel& k, const NodeField& f, const IndexBox& out_box,
                     const IndexBox* domain = nullptr) {
    NodeField out(out_box, 0, f.ncomp(), f.h(), f.origin());
    for (int c = 0; c < f.ncomp(); ++c) convolve_into(k, f, c, out, c, out_box, domain);
    return out;
  }

  // One component of the propagator pair:
  //   fout = H*f + sign G*g,  gout = sign GL*f + H*g
  // done with two forward and two inverse transforms on a shared padded grid.
  void apply_pair_comp(const PropagatorSet& set, int sign, const NodeField& f, const NodeField& g,
                       int comp, NodeField& fout, NodeField& gout, const IndexBox& out_box,
                       const IndexBox* domain = nullptr) {
    const int rho = set.max_half_width();
    detail::check_conv_contract(set.H, f, out_box, domain);
    detail::check_conv_contract(set.H, g, out_box, domain);
    Int3 dims = padded_dims(out_box, rho);
    auto& buf = buffers(dims);
    const auto& specH = spectrum(set.H, dims);
    const auto& specG = spectrum(set.G, dims);
    const auto& specGL = spectrum(set.GL, dims);
    const auto& pl = plans(dims);
    const IndexBox win = grow(out_box, rho);
    std::size_t nc = std::size_t(dims[0]) * dims[1] * (dims[2] / 2 + 1);

    load_window(f, comp, win, dims, domain, buf.real);
    fftw_execute_dft_r2c(pl.r2c, buf.real, buf.ca);
    load_window(g, comp, win, dims, domain, buf.real);
    fftw_execute_dft_r2c(pl.r2c, buf.real, buf.cb);

    auto* cf = reinterpret_cast<std::complex<double>*>(buf.ca);
    auto* cg = reinterpret_cast<std::complex<double>*>(buf.cb);
    auto* cm = reinterpret_cast<std::complex<double>*>(buf.cc);
    const double s = double(sign);
    for (std::size_t i = 0; i < nc; ++i) cm[i] = specH[i] * cf[i] + s * specG[i] * cg[i];
    fftw_execute_dft_c2r(pl.c2r, buf.cc, buf.real);
    store_result(buf.real, dims, out_box, rho, fout, comp, false);
    for (std::size_t i = 0; i < nc; ++i) cm[i] = s * specGL[i] * cf[i] + specH[i] * cg[i];
    fftw_execute_dft_c2r(pl.c2r, buf.cc, buf.real);
    store_result(buf.real, dims, out_box, rho, gout, comp, false);

    if (domain && !domain->contains(win)) {
      // exterior closure: each field contributes its own centre value
      for_each_node(out_box, [&](int i, int j, int k) {
        double wH = outside_weight(set.H, *domain, i, j, k);
        double wG = outside_weight(set.G, *domain, i, j, k);
        double wGL = outside_weight(set.GL, *domain, i, j, k);
        if (wH == 0.0 && wG == 0.0 && wGL == 0.0) return;
        double h3 = f.h() * f.h() * f.h();
        double fv = f.at(comp, i, j, k), gv = g.at(comp, i, j, k);
        fout.at(comp, i, j, k) += h3 * (fv * wH + s * gv * wG);
        gout.at(comp, i, j, k) += h3 * (s * fv * wGL + gv * wH);
      });
    }
  }

  // Deterministic single-threaded helper used by tests and the CLI.
  NodeField convolve_bounded(const DiscreteKernel& k, const NodeField& f, const IndexBox& domain) {
    return convolve(k, f, domain, &domain);
  }

 private:
  struct Plans {
    fftw_plan r2c = nullptr, c2r = nullptr;
  };

  static Int3 padded_dims(const IndexBox& out_box, int rho) {
    Int3 d;
    for (int a = 0; a < 3; ++a) d[a] = next_fast_size(out_box.extent(a) + 2 * rho);
    return d;
  }

  // buffer layout: row-major (z, y, x), x fastest — matches fftw_plan_*_3d(nz, ny, nx).
  static std::size_t ridx(const Int3& dims, int x, int y, int z) {
    return std::size_t(z) * dims[1] * dims[2] + std::size_t(y) * dims[2] + x;
  }

  Plans plans(const Int3& dims) {
    std::lock_guard<std::mutex> lk(mx_);
    auto key = std::make_tuple(dims[0], dims[1], dims[2]);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t nr = std::size_t(dims[0]) * dims[1] * dims[2];
    std::size_t nc = std::size_t(dims[0]) * dims[1] * (dims[2] / 2 + 1);
    double* r = fftw_alloc_real(nr);
    fftw_complex* c = fftw_alloc_complex(nc);
    Plans p;
    p.r2c = fftw_plan_dft_r2c_3d(dims[0], dims[1], dims[2], r, c, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_3d(dims[0], dims[1], dims[2], c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
    plans_[key] = p;
    return p;
  }

  const std::vector<std::complex<double>>& spectrum(const DiscreteKernel& k, const Int3& dims) {
    auto key = std::make_tuple(k.id(), dims[0], dims[1], dims[2]);
    {
      std::lock_guard<std::mutex> lk(spec_mx_);
      auto it = spectra_.find(key);
      if (it != spectra_.end()) return it->second;
    }
    // build outside the lock, publish under it
    std::size_t nr = std::size_t(dims[0]) * dims[1] * dims[2];
    std::size_t nc = std::size_t(dims[0]) * dims[1] * (dims[2] / 2 + 1);
    double* r = fftw_alloc_real(nr);
    fftw_complex* c = fftw_alloc_complex(nc);
    std::fill(r, r + nr, 0.0);
    const int rho = k.half_width();
    expect(dims[0] >= 2 * rho + 1 && dims[1] >= 2 * rho + 1 && dims[2] >= 2 * rho + 1,
           "spectrum: padded size smaller than kernel support");
    for (int kz = -rho; kz <= rho; ++kz)
      for (int ky = -rho; ky <= rho; ++ky)
        for (int kx = -rho; kx <= rho; ++kx) {
          double w = k.wat(kx, ky, kz);
          if (w == 0.0) continue;
          int x = (kx + dims[2]) % dims[2];
          int y = (ky + dims[1]) % dims[1];
          int z = (kz + dims[0]) % dims[0];
          r[ridx(dims, x, y, z)] = w;
        }
    fftw_execute_dft_r2c(plans(dims).r2c, r, c);
    const double h3 = k.h() * k.h() * k.h();
    const double scale = h3 / double(nr);
    std::vector<std::complex<double>> spec(nc);
    auto* cc = reinterpret_cast<std::complex<double>*>(c);
    for (std::size_t i = 0; i < nc; ++i) spec[i] = cc[i] * scale;
    fftw_free(r);
    fftw_free(c);
    std::lock_guard<std::mutex> lk(spec_mx_);
    auto [it, inserted] = spectra_.emplace(key, std::move(spec));
    return it->second;
  }

  detail::FftBuffers& buffers(const Int3& dims) {
    thread_local std::map<std::tuple<int, int, int>, detail::FftBuffers> cache;
    auto key = std::make_tuple(dims[0], dims[1], dims[2]);
    auto& b = cache[key];
    if (b.dims != dims) b.alloc(dims);
    return b;
  }

  static void load_window(const NodeField& f, int comp, const IndexBox& win, const Int3& dims,
                          const IndexBox* domain, double* r) {
    std::size_t nr = std::size_t(dims[0]) * dims[1] * dims[2];
    std::fill(r, r + nr, 0.0);
    IndexBox src = domain ? intersect(win, *domain) : win;
    const double* fp = f.comp(comp);
    for (int k = src.lo[2]; k <= src.hi[2]; ++k)
      for (int j = src.lo[1]; j <= src.hi[1]; ++j) {
        std::size_t dst = ridx(dims, src.lo[0] - win.lo[0], j - win.lo[1], k - win.lo[2]);
        long long ofs = f.offset(src.lo[0], j, k);
        for (int i = 0; i <= src.hi[0] - src.lo[0]; ++i) r[dst + i] = fp[ofs + i];
      }
  }

  static void store_result(const double* r, const Int3& dims, const IndexBox& out_box, int rho,
                           NodeField& out, int comp, bool add) {
    double* op = out.comp(comp);
    for (int k = out_box.lo[2]; k <= out_box.hi[2]; ++k)
      for (int j = out_box.lo[1]; j <= out_box.hi[1]; ++j) {
        std::size_t src = ridx(dims, rho, j - out_box.lo[1] + rho, k - out_box.lo[2] + rho);
        long long ofs = out.offset(out_box.lo[0], j, k);
        if (add)
          for (int i = 0; i <= out_box.hi[0] - out_box.lo[0]; ++i) op[ofs + i] += r[src + i];
        else
          for (int i = 0; i <= out_box.hi[0] - out_box.lo[0]; ++i) op[ofs + i] = r[src + i];
      }
  }

  // Total kernel weight whose taps fall outside the domain for node (i,j,k);
  // exactly zero for interior nodes.
  static double outside_weight(const DiscreteKernel& k, const IndexBox& domain, int i, int j,
                               int kk) {
    IndexBox taps{{i - domain.hi[0], j - domain.hi[1], kk - domain.hi[2]},
                  {i - domain.lo[0], j - domain.lo[1], kk - domain.lo[2]}};
    return k.weight_total() - k.box_weight_sum(taps);
  }

  void apply_boundary_correction(const DiscreteKernel& k, const NodeField& f, int cf, NodeField& out,
                                 int co, const IndexBox& out_box, const IndexBox& domain,
                                 double scale) {
    if (domain.contains(grow(out_box, k.half_width()))) return;
    const double h3 = f.h() * f.h() * f.h();
    for_each_node(out_box, [&](int i, int j, int kk) {
      double w = outside_weight(k, domain, i, j, kk);
      if (w != 0.0) out.at(co, i, j, kk) += scale * h3 * w * f.at(cf, i, j, kk);
    });
  }

  std::map<std::tuple<int, int, int>, Plans> plans_;
  std::mutex mx_;
  std::map<std::tuple<std::uint64_t, int, int, int>, std::vector<std::complex<double>>> spectra_;
  std::mutex spec_mx_;
};

// Nested-loop reference with the same contract as ConvolutionEngine::convolve.
inline NodeField direct_convolve(const DiscreteKernel& k, const NodeField& f, const IndexBox& out_box,
                                 const IndexBox* domain = nullptr) {
  detail::check_conv_contract(k, f, out_box, domain);
  NodeField out(out_box, 0, f.ncomp(), f.h(), f.origin());
  const int rho = k.half_width();
  const double h3 = f.h() * f.h() * f.h();
  for (int c = 0; c < f.ncomp(); ++c)
    for_each_node(out_box, [&](int i, int j, int kk) {
      double centre = f.at(c, i, j, kk);
      double acc = 0.0;
      for (int mz = -rho; mz <= rho; ++mz)
        for (int my = -rho; my <= rho; ++my)
          for (int mx = -rho; mx <= rho; ++mx) {
            double w = k.wat(mx, my, mz);
            if (w == 0.0) continue;
            int x = i - mx, y = j - my, z = kk - mz;
            double v = (domain && !domain->contains(x, y, z)) ? centre : f.at(c, x, y, z);
            acc += w * v;
          }
      out.at(c, i, j, kk) = acc * h3;
    });
  return out;
}

}  // namespace ldcm
