#include <cmath>
#include <stdexcept>

#include "ipfsmon/analytics/analytics.hpp"

namespace ipfsmon::analytics {

namespace {

// B_2j / (2j)!
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0, -691.0 / 1307674368000.0,
};

}  // namespace

// Euler-Maclaurin summation from a shifted base a = q + n >= 10.
double hurwitz_zeta(double s, double q) {
  if (!(s > 1) || !(q > 0)) throw std::domain_error("hurwitz_zeta needs s > 1 and q > 0");
  double sum = 0;
  double a = q;
  while (a < 10) {
    sum += std::pow(a, -s);
    a += 1;
  }
  const double a_s = std::pow(a, -s);
  sum += a * a_s / (s - 1) + 0.5 * a_s;
  const double inv_a2 = 1.0 / (a * a);
  double rising = s * a_s / a;
  for (int j = 0; j < 6; ++j) {
    sum += kBernoulliOverFactorial[j] * rising;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2) * inv_a2;
  }
  return sum;
}

}  // namespace ipfsmon::analytics
