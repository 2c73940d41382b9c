#pragma once

#include <array>
#include <vector>

#include "ldcm/box.hpp"
#include "ldcm/common.hpp"

namespace ldcm {

// The two even piecewise-polynomial kernels used throughout: W60 is the
// sixth-order C0 cardinal spline regularizing the spherical delta; W66 is the
// sixth-order smooth quasi-interpolant used between refinement levels.
// Coefficients are exact rationals evaluated in Horner form in |x|; the test
// suite asserts partition of unity and vanishing discrete moments 1..5, which
// fail loudly on any transcription slip.
enum class SplineKind { W60, W66 };

namespace detail {

// degree-5 pieces on [0,1],[1,2],[2,3]; coefficients highest power first
inline constexpr double w60_pieces[3][6] = {
    {-1.0 / 12, 1.0 / 4, 5.0 / 12, -5.0 / 4, -1.0 / 3, 1.0},
    {1.0 / 24, -3.0 / 8, 25.0 / 24, -5.0 / 8, -13.0 / 12, 1.0},
    {-1.0 / 120, 1.0 / 8, -17.0 / 24, 15.0 / 8, -137.0 / 60, 1.0},
};

// degree-9 pieces on [0,1]..[3,4]
inline constexpr double w66_pieces[4][10] = {
    {-665.0 / 12048, 665.0 / 3012, -2419.0 / 12048, -2437.0 / 12048, 0.0, 2723.0 / 3012, 0.0,
     -4543.0 / 3012, 0.0, 19177.0 / 21084},
    {133.0 / 4016, -399.0 / 1004, 39659.0 / 20080, -104409.0 / 20080, 23443.0 / 3012,
     -14175.0 / 2008, 7553.0 / 1506, -32207.0 / 10040, 2933.0 / 15060, 13081.0 / 14056},
    {-133.0 / 12048, 665.0 / 3012, -114139.0 / 60240, 109283.0 / 12048, -79303.0 / 3012,
     283423.0 / 6024, -75215.0 / 1506, 170023.0 / 6024, -90923.0 / 15060, -17653.0 / 42168},
    {19.0 / 12048, -133.0 / 3012, 225859.0 / 421680, -221003.0 / 60240, 23299.0 / 1506,
     -30793.0 / 753, 49184.0 / 753, -208208.0 / 3765, 53632.0 / 3765, 32512.0 / 5271},
};

template <int N>
inline double horner(const double (&c)[N], double x) {
  double r = c[0];
  for (int i = 1; i < N; ++i) r = r * x + c[i];
  return r;
}

// d-th derivative of the piece polynomial at |x| (one-sided, in |x|)
template <int N>
inline double horner_derivative(const double (&c)[N], double x, int d) {
  constexpr int deg = N - 1;
  if (d > deg) return 0.0;
  double r = 0.0;
  for (int i = 0; i <= deg - d; ++i) {
    // coefficient of x^(deg-i), differentiated d times
    double f = c[i];
    for (int m = 0; m < d; ++m) f *= double(deg - i - m);
    r = (i == 0) ? f : r * x + f;
  }
  return r;
}

}  // namespace detail

inline constexpr int spline_support(SplineKind k) { return k == SplineKind::W60 ? 3 : 4; }
inline constexpr int spline_smoothness(SplineKind k) { return k == SplineKind::W60 ? 0 : 6; }
inline constexpr int spline_order(SplineKind) { return 6; }

inline double eval_spline(SplineKind kind, double x) {
  double ax = std::abs(x);
  if (kind == SplineKind::W60) {
    if (ax >= 3.0) return 0.0;
    return detail::horner(detail::w60_pieces[int(ax)], ax);
  }
  if (ax >= 4.0) return 0.0;
  return detail::horner(detail::w66_pieces[int(ax)], ax);
}

// One-sided derivative of order d at x, taking the piece on the `from_above`
// side of the knot. Exposed for the knot-continuity checks.
inline double eval_spline_derivative(SplineKind kind, double x, int d, bool from_above) {
  double ax = std::abs(x);
  int sup = spline_support(kind);
  if (ax > sup || (ax == sup && from_above)) return 0.0;
  int piece = int(ax);
  if (ax == double(piece) && !from_above) piece -= 1;  // left limit at a knot
  if (piece < 0) piece = 0;
  double r = kind == SplineKind::W60 ? detail::horner_derivative(detail::w60_pieces[piece], ax, d)
                                     : detail::horner_derivative(detail::w66_pieces[piece], ax, d);
  // chain rule for |x| when x < 0
  if (x < 0 && d % 2 == 1) r = -r;
  return r;
}

// Tensor-product weights W(off_x - i) W(off_y - j) W(off_z - k) on the window
// of nodes that can carry a nonzero value for the given offset.
struct TensorStencil {
  IndexBox window;
  std::vector<double> w;  // x-fastest over window
  double& at(int i, int j, int k) {
    return w[(i - window.lo[0]) +
             window.extent(0) * ((j - window.lo[1]) + 1LL * window.extent(1) * (k - window.lo[2]))];
  }
  double at(int i, int j, int k) const { return const_cast<TensorStencil*>(this)->at(i, j, k); }
  double sum() const {
    double s = 0;
    for (double x : w) s += x;
    return s;
  }
};

inline TensorStencil tensor_weights(SplineKind kind, const Vec3& offset) {
  const int s = spline_support(kind);
  TensorStencil t;
  std::array<std::vector<double>, 3> w1;
  for (int d = 0; d < 3; ++d) {
    int lo = int(std::floor(offset[d])) - s + 1;
    int hi = int(std::floor(offset[d])) + s;
    if (offset[d] == std::floor(offset[d])) hi -= 1, lo -= 1;  // node-aligned: symmetric window
    t.window.lo[d] = lo;
    t.window.hi[d] = hi;
    for (int i = lo; i <= hi; ++i) w1[d].push_back(eval_spline(kind, offset[d] - i));
  }
  t.w.resize(t.window.num_nodes());
  long long idx = 0;
  for (int k = 0; k < t.window.extent(2); ++k)
    for (int j = 0; j < t.window.extent(1); ++j)
      for (int i = 0; i < t.window.extent(0); ++i)
        t.w[idx++] = w1[0][i] * w1[1][j] * w1[2][k];
  return t;
}

}  // namespace ldcm
