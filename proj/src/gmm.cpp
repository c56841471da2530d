#include "uls/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uls/rng.hpp"

namespace uls {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + d * d / variance);
}

}  // namespace

double Gmm::log_pdf(double x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : components) {
    if (c.weight <= 0) continue;
    best = std::max(best, std::log(c.weight) + log_normal(x, c.mean, c.variance));
  }
  if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
  double sum = 0;
  for (const auto& c : components) {
    if (c.weight <= 0) continue;
    sum += std::exp(std::log(c.weight) + log_normal(x, c.mean, c.variance) - best);
  }
  return best + std::log(sum);
}

double Gmm::pdf(double x) const { return std::exp(log_pdf(x)); }

double Gmm::log_likelihood(std::span<const double> samples) const {
  double ll = 0;
  for (double x : samples) ll += log_pdf(x);
  return ll;
}

Gmm fit_gmm(std::span<const double> samples, int k, std::uint64_t seed, double variance_floor,
            std::vector<double>* ll_trace) {
  if (ll_trace) ll_trace->clear();
  const std::size_t n = samples.size();
  if (k < 1) throw std::invalid_argument("fit_gmm: k must be >= 1");
  if (n < std::size_t(k)) throw std::invalid_argument("fit_gmm: fewer samples than components");
  if (!(variance_floor > 0)) throw std::invalid_argument("fit_gmm: variance floor must be positive");

  // Collapse k to the number of distinct values.
  {
    std::vector<double> distinct(samples.begin(), samples.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    k = std::min<std::size_t>(std::size_t(k), distinct.size());
  }

  double sample_mean = 0;
  for (double x : samples) sample_mean += x;
  sample_mean /= double(n);
  double sample_var = 0;
  for (double x : samples) sample_var += (x - sample_mean) * (x - sample_mean);
  sample_var = std::max(sample_var / double(n), variance_floor);

  // k-means++ seeding of the means.
  SplitMix64 rng(seed);
  std::vector<double> means;
  means.push_back(samples[rng.below(n)]);
  std::vector<double> d2(n);
  while (int(means.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double m : means) best = std::min(best, (samples[i] - m) * (samples[i] - m));
      d2[i] = best;
      total += best;
    }
    if (total <= 0) break;  // all remaining values coincide with a chosen center
    double u = rng.next_double() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      u -= d2[i];
      if (u <= 0) {
        pick = i;
        break;
      }
    }
    means.push_back(samples[pick]);
  }
  k = int(means.size());

  Gmm g;
  g.components.resize(std::size_t(k));
  for (int c = 0; c < k; ++c) g.components[std::size_t(c)] = {1.0 / k, means[std::size_t(c)], sample_var};

  std::vector<double> resp(n * std::size_t(k));
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 50; ++iter) {
    // E-step with per-sample log-sum-exp.
    double ll = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const auto& comp = g.components[std::size_t(c)];
        const double lp = (comp.weight > 0)
                              ? std::log(comp.weight) + log_normal(samples[i], comp.mean, comp.variance)
                              : -std::numeric_limits<double>::infinity();
        resp[i * std::size_t(k) + std::size_t(c)] = lp;
        best = std::max(best, lp);
      }
      double sum = 0;
      for (int c = 0; c < k; ++c)
        sum += std::exp(resp[i * std::size_t(k) + std::size_t(c)] - best);
      const double lse = best + std::log(sum);
      ll += lse;
      for (int c = 0; c < k; ++c) {
        auto& r = resp[i * std::size_t(k) + std::size_t(c)];
        r = std::exp(r - lse);
      }
    }
    if (ll_trace) ll_trace->push_back(ll);

    // M-step.
    for (int c = 0; c < k; ++c) {
      double nk = 0, mu = 0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * std::size_t(k) + std::size_t(c)];
        mu += resp[i * std::size_t(k) + std::size_t(c)] * samples[i];
      }
      auto& comp = g.components[std::size_t(c)];
      if (nk <= 1e-12) {
        comp.weight = 0;
        continue;
      }
      mu /= nk;
      double var = 0;
      for (std::size_t i = 0; i < n; ++i)
        var += resp[i * std::size_t(k) + std::size_t(c)] * (samples[i] - mu) * (samples[i] - mu);
      comp.weight = nk / double(n);
      comp.mean = mu;
      comp.variance = std::max(var / nk, variance_floor);
    }

    if (std::isfinite(prev_ll) && ll - prev_ll < 1e-6 * std::abs(prev_ll)) break;
    prev_ll = ll;
  }

  // Renormalize weights and order components by mean.
  double wsum = 0;
  for (const auto& c : g.components) wsum += c.weight;
  if (wsum <= 0) throw std::logic_error("fit_gmm: all components vanished");
  for (auto& c : g.components) c.weight /= wsum;
  std::sort(g.components.begin(), g.components.end(),
            [](const auto& a, const auto& b) { return a.mean < b.mean; });
  return g;
}

}  // namespace uls
