#include "tcdiff/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace tcdiff {

void validate(const Schedule& s) {
  if (!(s.T > 0.0)) throw std::invalid_argument("Schedule: T must be positive");
  if (s.alpha_min < 0.0 || s.alpha_max < s.alpha_min)
    throw std::invalid_argument("Schedule: need 0 <= alpha_min <= alpha_max");
}

double alpha_t(const Schedule& s, double t) {
  return s.alpha_min + (s.alpha_max - s.alpha_min) * t / s.T;
}

double int_alpha(const Schedule& s, double t) {
  return s.alpha_min * t + 0.5 * (s.alpha_max - s.alpha_min) * t * t / s.T;
}

double a_t(const Schedule& s, double t) { return std::exp(0.5 * int_alpha(s, t)); }

double abar_t(const Schedule& s, double t) { return std::exp(-0.5 * int_alpha(s, t)); }

double btilde_t(const Schedule& s, double t) {
  // 1 - exp(-x) computed without cancellation for small x
  return -std::expm1(-int_alpha(s, t));
}

double g_t(const Schedule& s, double t) { return std::sqrt(alpha_t(s, t)); }

}  // namespace tcdiff
