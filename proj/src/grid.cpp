#include "tcdiff/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace tcdiff {

namespace {
void check_same(const GridField& a, const GridField& b) {
  if (a.n != b.n) throw std::invalid_argument("GridField: resolution mismatch");
}
}  // namespace

GridField& GridField::operator+=(const GridField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (auto& x : v) x *= s;
  return *this;
}

void GridField::axpy(double s, const GridField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * o.v[i];
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

double inner(const GridField& a, const GridField& b) {
  check_same(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) acc += a.v[i] * b.v[i];
  return acc / (static_cast<double>(a.n) * a.n);
}

double norm2(const GridField& a) { return inner(a, a); }

double field_norm(const GridField& a) { return std::sqrt(norm2(a)); }

}  // namespace tcdiff
