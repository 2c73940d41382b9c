#pragma once

#include <gsl/gsl_integration.h>

#include <memory>
#include <vector>

#include "ldcm/common.hpp"

namespace ldcm {

// Surface quadrature on the unit sphere: Gauss-Legendre in the polar cosine
// crossed with a uniform azimuth grid. Weights are solid angles summing to
// 4*pi; the point set is symmetric under inversion (azimuth count is even).
struct SphereQuadrature {
  int n_polar = 0;
  int n_azimuth = 0;
  std::vector<Vec3> points;      // unit directions
  std::vector<double> weights;   // solid-angle weights

  std::size_t size() const { return points.size(); }
};

inline SphereQuadrature make_sphere_quadrature(int n_polar, int n_azimuth) {
  require(n_polar >= 1 && n_azimuth >= 2 && n_azimuth % 2 == 0,
          "make_sphere_quadrature: need n_polar >= 1 and even n_azimuth >= 2");
  SphereQuadrature q;
  q.n_polar = n_polar;
  q.n_azimuth = n_azimuth;
  std::unique_ptr<gsl_integration_glfixed_table, void (*)(gsl_integration_glfixed_table*)> table(
      gsl_integration_glfixed_table_alloc(n_polar), gsl_integration_glfixed_table_free);
  const double dphi = 2.0 * pi / n_azimuth;
  q.points.reserve(std::size_t(n_polar) * n_azimuth);
  q.weights.reserve(std::size_t(n_polar) * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    double mu, wmu;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &mu, &wmu, table.get());
    double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < n_azimuth; ++j) {
      double phi = dphi * j;
      q.points.push_back({st * std::cos(phi), st * std::sin(phi), mu});
      q.weights.push_back(wmu * dphi);
    }
  }
  return q;
}

// Resolution rule: great-circle spacing of points at radius c*ds stays below
// the grid spacing h.
inline SphereQuadrature sphere_quadrature_for(double c, double ds, double h) {
  int n_polar = std::max(8, int(std::ceil(pi * c * ds / h)) + 2);
  return make_sphere_quadrature(n_polar, 2 * n_polar);
}

}  // namespace ldcm
