#include "msm/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "msm/errors.hpp"

namespace msm {

std::string_view to_string(Divergence d) { return d == Divergence::JensenShannon ? "jsd" : "tv"; }

Divergence divergence_from_string(std::string_view text) {
  if (text == "jsd") return Divergence::JensenShannon;
  if (text == "tv") return Divergence::TotalVariation;
  throw Error(ErrorCode::InvalidArgument, "unknown divergence '" + std::string(text) + "'");
}

namespace {

void check_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(p.size()) + " and " + std::to_string(q.size()));
  }
  for (auto v : {p, q}) {
    double sum = 0;
    for (double x : v) {
      if (!(x >= 0.0)) throw Error(ErrorCode::NotNormalized, "negative or NaN probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::NotNormalized, "vector sums to " + std::to_string(sum));
  }
}

double xlogx_over(double x, double m) { return x > 0 ? x * std::log(x / m) : 0.0; }

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    // Both sums are commutative in IEEE arithmetic, so swapping p and q
    // reproduces every term exactly.
    const double m = 0.5 * (p[i] + q[i]);
    if (m <= 0) continue;
    total += 0.5 * (xlogx_over(p[i], m) + xlogx_over(q[i], m));
  }
  return std::clamp(total, 0.0, std::numbers::ln2);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double divergence(Divergence kind, std::span<const double> p, std::span<const double> q) {
  return kind == Divergence::JensenShannon ? jsd(p, q) : total_variation(p, q);
}

}  // namespace msm
