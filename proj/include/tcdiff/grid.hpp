#pragma once
#include <cstddef>
#include <vector>

namespace tcdiff {

// Real scalar field sampled on the uniform N x N grid over the unit torus.
// v[i*n + j] is the value at x = (i/n, j/n). The inner product is the grid
// quadrature of the L2(torus) pairing: <u,w> = (1/N^2) sum u*w, so norms are
// resolution-consistent for band-limited fields.
struct GridField {
  int n = 0;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(int n_, double fill = 0.0)
      : n(n_), v(static_cast<std::size_t>(n_) * n_, fill) {}

  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }
  std::size_t size() const { return v.size(); }

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);
  // this += s * o
  void axpy(double s, const GridField& o);
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

double inner(const GridField& a, const GridField& b);
double norm2(const GridField& a);  // inner(a, a)
double field_norm(const GridField& a);

}  // namespace tcdiff
