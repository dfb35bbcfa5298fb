#pragma once

namespace tcdiff {

// Linear noise schedule alpha(t) = alpha_min + (alpha_max - alpha_min) t/T on
// [0, T]. alpha_min == alpha_max gives a constant schedule; alpha_min = 0 is
// tolerated for degenerate test setups (the forward flow is then frozen at
// a_t = 1 wherever alpha vanishes identically).
struct Schedule {
  double alpha_min = 0.1;
  double alpha_max = 20.0;
  double T = 1.0;
};

void validate(const Schedule& s);

double alpha_t(const Schedule& s, double t);
double int_alpha(const Schedule& s, double t);  // \int_0^t alpha_r dr, closed form
double a_t(const Schedule& s, double t);        // exp(0.5 * int_alpha)
double abar_t(const Schedule& s, double t);     // 1/a_t, the conditional mean decay
double btilde_t(const Schedule& s, double t);   // 1 - a_t^-2, conditional variance factor
double g_t(const Schedule& s, double t);        // sqrt(alpha_t), score scaling

}  // namespace tcdiff
