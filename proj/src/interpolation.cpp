#include <algorithm>
#include <cmath>

#include "epiwelfare/planner.hpp"

namespace epiwelfare {

double GridField::interpolate(double S, double I) const {
  const GridSpec& g = grid;
  S = std::clamp(S, 0.0, 1.0);
  I = std::clamp(I, 0.0, 1.0);
  if (S + I > 1.0) {
    const double scale = 1.0 / (S + I);
    S *= scale;
    I *= scale;
  }

  const double xs = S * static_cast<double>(g.n_S - 1);
  const double xi = I * static_cast<double>(g.n_I - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(xs), g.n_S - 2);
  const std::size_t j = std::min(static_cast<std::size_t>(xi), g.n_I - 2);
  const double a = std::clamp(xs - static_cast<double>(i), 0.0, 1.0);
  const double b = std::clamp(xi - static_cast<double>(j), 0.0, 1.0);

  const bool a00 = g.active(i, j);
  const bool a10 = g.active(i + 1, j);
  const bool a01 = g.active(i, j + 1);
  const bool a11 = g.active(i + 1, j + 1);

  if (a00 && a10 && a01 && a11) {
    return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) + (1 - a) * b * at(i, j + 1) +
           a * b * at(i + 1, j + 1);
  }
  if (a00 && a10 && a01 && a + b <= 1.0 + 1e-12) {
    return at(i, j) + a * (at(i + 1, j) - at(i, j)) + b * (at(i, j + 1) - at(i, j));
  }

  // Unequal spacing near the S + I = 1 edge: bilinear weights over whichever
  // corners are inside the simplex.
  const double w[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
  const bool on[4] = {a00, a10, a01, a11};
  const double v[4] = {a00 ? at(i, j) : 0.0, a10 ? at(i + 1, j) : 0.0, a01 ? at(i, j + 1) : 0.0,
                       a11 ? at(i + 1, j + 1) : 0.0};
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (on[k]) {
      num += w[k] * v[k];
      den += w[k];
    }
  }
  return den > 0.0 ? num / den : at(i, j);
}

double PolicyField::lockdown(double S, double I, double L_bar) const {
  return std::clamp(interpolate(S, I), 0.0, L_bar);
}

}  // namespace epiwelfare
