#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipfsmon/estimators/estimators.hpp"

namespace ipfsmon::estimators {

namespace {

using i128 = __int128;

std::optional<i128> binom_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return i128{0};
  k = std::min(k, n - k);
  i128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    i128 next;
    if (__builtin_mul_overflow(c, static_cast<i128>(n - i), &next)) return std::nullopt;
    c = next / static_cast<i128>(i + 1);
  }
  return c;
}

std::optional<i128> pow_exact(i128 base, std::uint64_t e) {
  i128 out = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(out, base, &out)) return std::nullopt;
  }
  return out;
}

std::optional<double> density_exact(std::uint64_t N, std::uint64_t w, std::uint64_t r, std::uint64_t m) {
  i128 sum = 0;
  for (std::uint64_t k = w; k <= m; ++k) {
    auto a = binom_exact(m, k);
    auto b = binom_exact(k, w);
    if (!a || !b) return std::nullopt;
    auto br = pow_exact(*b, r);
    if (!br) return std::nullopt;
    i128 term;
    if (__builtin_mul_overflow(*a, *br, &term)) return std::nullopt;
    if ((m - k) % 2 == 1) term = -term;
    if (__builtin_add_overflow(sum, term, &sum)) return std::nullopt;
  }
  auto cnm = binom_exact(N, m);
  auto cnw = binom_exact(N, w);
  if (!cnm || !cnw) return std::nullopt;
  auto den = pow_exact(*cnw, r);
  i128 num;
  if (!den || __builtin_mul_overflow(*cnm, sum, &num)) return std::nullopt;
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(*den));
}

class LogFactorial {
 public:
  explicit LogFactorial(std::uint64_t n) {
    table_.resize(static_cast<std::size_t>(std::min<std::uint64_t>(n, kTableMax) + 1));
    for (std::size_t i = 1; i < table_.size(); ++i) table_[i] = table_[i - 1] + std::log(static_cast<long double>(i));
  }
  long double operator()(std::uint64_t n) const {
    return n < table_.size() ? table_[n] : std::lgamma(static_cast<long double>(n) + 1.0L);
  }
  long double choose(std::uint64_t n, std::uint64_t k) const { return (*this)(n) - (*this)(k) - (*this)(n - k); }

 private:
  static constexpr std::uint64_t kTableMax = 2'000'000;
  std::vector<long double> table_;
};

std::optional<double> density_signed_log(const LogFactorial& lf, std::uint64_t N, std::uint64_t w, std::uint64_t r,
                                         std::uint64_t m) {
  std::vector<long double> logs;
  logs.reserve(m - w + 1);
  for (std::uint64_t k = w; k <= m; ++k) logs.push_back(lf.choose(m, k) + static_cast<long double>(r) * lf.choose(k, w));
  const long double top = *std::max_element(logs.begin(), logs.end());
  long double sum = 0;
  for (std::uint64_t k = w; k <= m; ++k) {
    const long double v = std::exp(logs[k - w] - top);
    sum += (m - k) % 2 == 0 ? v : -v;
  }
  const long double rel_err = static_cast<long double>(logs.size()) * 8 * LDBL_EPSILON / std::fabs(sum);
  if (!(sum > 0) || rel_err > 1e-10L) return std::nullopt;
  const long double log_p = std::log(sum) + top + lf.choose(N, m) - static_cast<long double>(r) * lf.choose(N, w);
  return static_cast<double>(std::exp(log_p));
}

double density_recurrence(const LogFactorial& lf, std::uint64_t N, std::uint64_t w, std::uint64_t r,
                          std::uint64_t m) {
  std::vector<long double> p(m + 1, 0.0L), next(m + 1);
  p[w] = 1;
  const long double log_draws = lf.choose(N, w);
  for (std::uint64_t d = 1; d < r; ++d) {
    std::fill(next.begin(), next.end(), 0.0L);
    for (std::uint64_t j = w; j <= m; ++j) {
      if (p[j] == 0) continue;
      const std::uint64_t t_lo = w > j ? w - j : 0;
      const std::uint64_t t_hi = std::min({w, N - j, m - j});
      for (std::uint64_t t = t_lo; t <= t_hi; ++t) {
        next[j + t] += p[j] * std::exp(lf.choose(j, w - t) + lf.choose(N - j, t) - log_draws);
      }
    }
    std::swap(p, next);
  }
  return static_cast<double>(p[m]);
}

}  // namespace

double coupon_density(std::uint64_t N, std::uint64_t w, std::uint64_t r, std::uint64_t m) {
  if (r == 0 || w > N || m < w || m > N || m > r * w) {
    throw std::domain_error("coupon_density requires r >= 1 and w <= m <= min(N, r*w)");
  }
  double p;
  if (auto exact = density_exact(N, w, r, m)) {
    p = *exact;
  } else {
    const LogFactorial lf(std::min(N, std::max<std::uint64_t>(r * w, 1) * 4));
    auto approx = density_signed_log(lf, N, w, r, m);
    p = approx ? *approx : density_recurrence(lf, N, w, r, m);
  }
  return std::clamp(p, 0.0, 1.0);
}

SizeEstimate solve_coupon_mle(std::uint64_t m, std::uint64_t r, double w) {
  if (r < 2) throw std::domain_error("coupon estimator needs r >= 2");
  const double md = static_cast<double>(m);
  const double rw = static_cast<double>(r) * w;
  if (!(w > 0) || md < w || md > rw) throw std::domain_error("coupon estimator needs w <= m <= r*w");
  if (md == rw) throw DisjointSamples("m = r*w: monitor peer sets do not overlap");
  SizeEstimate out{.n_hat = w, .method = Method::CouponMLE};
  if (md == w) return out;

  const double inv_r = 1.0 / static_cast<double>(r);
  auto f = [&](double n) { return n * std::expm1(std::log1p(-md / n) * inv_r) + w; };
  double lo = md, hi = 1e12;
  if (f(hi) <= 0) throw DisjointSamples("overlap too small: estimate exceeds 1e12");
  int it = 0;
  while (hi - lo > 1e-12 * lo && it < 400) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
    ++it;
  }
  out.n_hat = 0.5 * (lo + hi);
  out.iterations = it;
  out.residual = f(out.n_hat);
  return out;
}

}  // namespace ipfsmon::estimators
