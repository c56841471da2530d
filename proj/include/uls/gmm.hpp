#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uls {

/// 1D Gaussian mixture over scalar intensities.
struct Gmm {
  struct Component {
    double weight = 0, mean = 0, variance = 0;
  };
  std::vector<Component> components;

  double log_pdf(double x) const;
  double pdf(double x) const;
  double log_likelihood(std::span<const double> samples) const;
};

/// EM fit from k-means++ initialization. Stops when the relative
/// log-likelihood change drops below 1e-6 or after 50 iterations. If the
/// samples hold fewer than k distinct values, k collapses to that count.
/// When given, ll_trace receives the per-iteration log-likelihood sequence
/// (non-decreasing up to the variance floor).
Gmm fit_gmm(std::span<const double> samples, int k, std::uint64_t seed,
            double variance_floor = 1e-3, std::vector<double>* ll_trace = nullptr);

}  // namespace uls
