#include "mibounds/mle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mibounds {

CompactBox::CompactBox(double m, int d) : half_width(m), dim(d) {
  if (!(m > 0.0)) throw std::invalid_argument("CompactBox: half-width must be > 0");
  if (d < 1) throw std::invalid_argument("CompactBox: dim must be >= 1");
}

bool CompactBox::contains(const Vector& theta) const {
  return theta.size() == dim && (theta.array().abs() <= half_width).all();
}

Vector CompactBox::clip(const Vector& theta) const {
  return theta.cwiseMax(-half_width).cwiseMin(half_width);
}

Vector mle_gaussian(const CompactBox& box, const Vector& sample_mean) {
  if (sample_mean.size() != box.dim) throw std::invalid_argument("mle_gaussian: dimension mismatch");
  return box.clip(sample_mean);
}

Vector mle_gaussian(const CompactBox& box, const Sample& s, double noise_sd) {
  (void)noise_sd;  // the argmax over a box does not depend on the noise level
  if (s.n < 1) throw std::invalid_argument("mle_gaussian: empty sample");
  return mle_gaussian(box, s.mean());
}

double mle_expfam(const ExpFamily1D& fam, double t_bar) {
  double lo = fam.theta_lo, hi = fam.theta_hi;
  if (fam.psi1(lo) >= t_bar) return lo;
  if (fam.psi1(hi) <= t_bar) return hi;
  while (hi - lo > 1e-12 * std::max(1.0, std::fabs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (fam.psi1(mid) < t_bar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double mle_expfam(const ExpFamily1D& fam, const Sample& s) {
  if (s.n < 1) throw std::invalid_argument("mle_expfam: empty sample");
  return mle_expfam(fam, s.data.col(0).mean());
}

EpsilonNet build_net(const CompactBox& box, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_net: eps must be > 0");
  const auto cover = covering_number_box(box.half_width, box.dim, eps);
  if (!(cover.count <= 1e7)) {
    throw std::length_error("build_net: net would exceed 1e7 centres");
  }
  EpsilonNet net;
  net.eps = eps;
  net.box = box;
  net.per_axis = cover.per_axis;
  const long k = cover.per_axis;
  const double width = 2.0 * box.half_width / static_cast<double>(k);
  const auto total = static_cast<std::size_t>(cover.count);
  net.centers.reserve(total);
  std::vector<long> idx(box.dim, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Vector v(box.dim);
    for (int j = 0; j < box.dim; ++j) {
      v[j] = -box.half_width + (static_cast<double>(idx[j]) + 0.5) * width;
    }
    net.centers.push_back(std::move(v));
    // Last axis varies fastest.
    for (int j = box.dim - 1; j >= 0; --j) {
      if (++idx[j] < k) break;
      idx[j] = 0;
    }
  }
  return net;
}

std::pair<std::size_t, Vector> net_projection(const EpsilonNet& net, const Vector& theta_hat) {
  if (net.centers.empty()) throw std::invalid_argument("net_projection: empty net");
  std::size_t best = 0;
  double best_d = (net.centers[0] - theta_hat).squaredNorm();
  for (std::size_t i = 1; i < net.centers.size(); ++i) {
    const double d = (net.centers[i] - theta_hat).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, net.centers[best]};
}

}  // namespace mibounds
