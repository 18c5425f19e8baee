#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/rng.hpp"

namespace ipfsmon::analytics {

namespace {

constexpr double kAlphaLo = 1.5;
constexpr double kAlphaHi = 3.5;
constexpr double kXminQuantile = 0.9;
constexpr std::size_t kMinSamples = 50;

struct Prepared {
  std::vector<std::uint64_t> values;  // unique, ascending
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> tail_n;  // samples >= values[i]
  std::vector<double> tail_log;       // sum of log x over samples >= values[i]
  std::size_t n = 0;
};

Prepared prepare(std::vector<std::uint64_t> xs) {
  std::sort(xs.begin(), xs.end());
  Prepared p;
  p.n = xs.size();
  for (auto x : xs) {
    if (!p.values.empty() && p.values.back() == x) {
      ++p.counts.back();
    } else {
      p.values.push_back(x);
      p.counts.push_back(1);
    }
  }
  const std::size_t u = p.values.size();
  p.tail_n.assign(u, 0);
  p.tail_log.assign(u, 0);
  std::uint64_t n = 0;
  double s = 0;
  for (std::size_t i = u; i-- > 0;) {
    n += p.counts[i];
    s += static_cast<double>(p.counts[i]) * std::log(static_cast<double>(p.values[i]));
    p.tail_n[i] = n;
    p.tail_log[i] = s;
  }
  return p;
}

double mle_alpha(double x_min, double n, double sum_log) {
  auto nll = [&](double a) { return n * std::log(hurwitz_zeta(a, x_min)) + a * sum_log; };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = kAlphaLo, hi = kAlphaHi;
  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  double fc = nll(c), fd = nll(d);
  while (hi - lo > 1e-7) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = nll(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = nll(d);
    }
  }
  return 0.5 * (lo + hi);
}

double ks_distance(const Prepared& p, std::size_t first, double alpha) {
  const double n = static_cast<double>(p.tail_n[first]);
  const double z0 = hurwitz_zeta(alpha, static_cast<double>(p.values[first]));
  double d = 0;
  double cum = 0;
  double z = z0;  // zeta(alpha, v) for the current value v
  for (std::size_t j = first; j < p.values.size(); ++j) {
    const auto v = p.values[j];
    if (j > first && v != p.values[j - 1] + 1) z = hurwitz_zeta(alpha, static_cast<double>(v));
    d = std::max(d, std::fabs(cum / n - (1 - z / z0)));
    cum += static_cast<double>(p.counts[j]);
    z -= std::pow(static_cast<double>(v), -alpha);
    d = std::max(d, std::fabs(cum / n - (1 - z / z0)));
  }
  return d;
}

PowerLawFit fit_point(const Prepared& p) {
  if (p.values.size() < 2) throw DegenerateSample("all samples are equal");
  const auto last = static_cast<std::size_t>(std::floor(kXminQuantile * static_cast<double>(p.values.size() - 1)));
  PowerLawFit best;
  best.ks_statistic = INFINITY;
  for (std::size_t i = 0; i <= last; ++i) {
    if (p.tail_n[i] < 2) break;
    const double x_min = static_cast<double>(p.values[i]);
    const double alpha = mle_alpha(x_min, static_cast<double>(p.tail_n[i]), p.tail_log[i]);
    const double d = ks_distance(p, i, alpha);
    if (d < best.ks_statistic) {
      best.alpha = alpha;
      best.x_min = p.values[i];
      best.ks_statistic = d;
      best.n_tail = p.tail_n[i];
    }
  }
  return best;
}

void check_samples(std::span<const std::uint64_t> samples) {
  if (samples.size() < kMinSamples) throw std::invalid_argument("power-law fit needs at least 50 samples");
  if (std::find(samples.begin(), samples.end(), 0) != samples.end()) {
    throw std::invalid_argument("power-law fit needs positive samples");
  }
}

/// Inverse-CDF sampler for the discrete power law on [x_min, inf).
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, std::uint64_t x_min) : alpha_(alpha), x_min_(x_min) {
    const double z0 = hurwitz_zeta(alpha, static_cast<double>(x_min));
    cdf_.resize(kTable);
    double acc = 0;
    for (std::size_t k = 0; k < kTable; ++k) {
      acc += std::pow(static_cast<double>(x_min + k), -alpha) / z0;
      cdf_[k] = acc;
    }
    x_tail_ = static_cast<double>(x_min + kTable);
    body_mass_ = 1 - hurwitz_zeta(alpha, x_tail_) / z0;
  }

  std::uint64_t operator()(Rng& rng) const {
    const double u = unit_interval(rng());
    if (u < body_mass_) {
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      return x_min_ + std::min(k, kTable - 1);
    }
    const double v = (u - body_mass_) / (1 - body_mass_);
    const double x = std::floor((x_tail_ - 0.5) * std::pow(1 - v, -1 / (alpha_ - 1)) + 0.5);
    return static_cast<std::uint64_t>(std::clamp(x, x_tail_, 0x1p53));
  }

 private:
  static constexpr std::size_t kTable = 1 << 14;
  double alpha_;
  std::uint64_t x_min_;
  std::vector<double> cdf_;
  double x_tail_ = 0;
  double body_mass_ = 0;
};

struct Bootstrap {
  PowerLawSampler tail;
  std::vector<std::uint64_t> body;  // samples below x_min
  double tail_prob;
  std::size_t n;

  double ks_of_replicate(std::uint64_t seed, std::uint32_t i) const {
    Rng rng(derive_seed(seed, i));
    std::vector<std::uint64_t> xs(n);
    for (auto& x : xs) {
      if (body.empty() || unit_interval(rng()) < tail_prob) {
        x = tail(rng);
      } else {
        x = body[static_cast<std::size_t>(unit_interval(rng()) * static_cast<double>(body.size()))];
      }
    }
    const auto p = prepare(std::move(xs));
    if (p.values.size() < 2) return 0;
    return fit_point(p).ks_statistic;
  }
};

template <bool Parallel>
PowerLawFit fit_with_bootstrap(std::span<const std::uint64_t> samples, std::uint32_t bootstraps, std::uint64_t seed) {
  check_samples(samples);
  if (bootstraps == 0) throw std::invalid_argument("power-law p-value needs at least one bootstrap");
  auto fit = fit_point(prepare({samples.begin(), samples.end()}));
  Bootstrap b{PowerLawSampler(fit.alpha, fit.x_min), {}, 0, samples.size()};
  for (auto x : samples) {
    if (x < fit.x_min) b.body.push_back(x);
  }
  std::sort(b.body.begin(), b.body.end());
  b.tail_prob = static_cast<double>(fit.n_tail) / static_cast<double>(samples.size());

  std::vector<double> ks(bootstraps);
  const auto n = static_cast<std::ptrdiff_t>(bootstraps);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ks[static_cast<std::size_t>(i)] = b.ks_of_replicate(seed, static_cast<std::uint32_t>(i));
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ks[static_cast<std::size_t>(i)] = b.ks_of_replicate(seed, static_cast<std::uint32_t>(i));
    }
  }
  const auto exceed = std::count_if(ks.begin(), ks.end(), [&](double d) { return d >= fit.ks_statistic; });
  fit.p_value = static_cast<double>(exceed) / static_cast<double>(bootstraps);
  fit.bootstraps = bootstraps;
  return fit;
}

}  // namespace

PowerLawFit fit_power_law_point(std::span<const std::uint64_t> samples) {
  check_samples(samples);
  return fit_point(prepare({samples.begin(), samples.end()}));
}

PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint32_t bootstraps, std::uint64_t seed) {
  return fit_with_bootstrap<true>(samples, bootstraps, seed);
}

namespace serial {
PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint32_t bootstraps, std::uint64_t seed) {
  return fit_with_bootstrap<false>(samples, bootstraps, seed);
}
}  // namespace serial

nlohmann::json to_json(const PowerLawFit& f) {
  return {{"alpha", f.alpha},
          {"x_min", f.x_min},
          {"ks_statistic", f.ks_statistic},
          {"p_value", f.p_value},
          {"n_tail", f.n_tail},
          {"bootstraps", f.bootstraps},
          {"rejected", f.p_value < kPowerLawRejectP}};
}

}  // namespace ipfsmon::analytics
