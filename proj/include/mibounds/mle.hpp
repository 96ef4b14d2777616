#pragma once

#include "mibounds/bounds.hpp"
#include "mibounds/models.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace mibounds {

/// [-M, M]^d.
struct CompactBox {
  double half_width = 1.0;
  int dim = 1;

  CompactBox() = default;
  CompactBox(double half_width, int dim);
  bool contains(const Vector& theta) const;
  Vector clip(const Vector& theta) const;
};

/// Centers of Euclidean eps-balls covering a box.
struct EpsilonNet {
  std::vector<Vector> centers;
  double eps = 0.0;
  CompactBox box;
  long per_axis = 0;
};

/// Clips the sample mean coordinate-wise to [-M, M].
Vector mle_gaussian(const CompactBox& box, const Sample& s, double noise_sd);
Vector mle_gaussian(const CompactBox& box, const Vector& sample_mean);

/// Solves psi'(theta) = mean(X) by bisection to 1e-12, clipped to the domain.
double mle_expfam(const ExpFamily1D& fam, const Sample& s);
double mle_expfam(const ExpFamily1D& fam, double sufficient_mean);

/// Axis-aligned grid with cell width 2M/K <= 2 eps / sqrt(d); K per axis as in
/// covering_number_box. Refuses nets with more than 1e7 centres.
EpsilonNet build_net(const CompactBox& box, double eps);

/// Nearest centre; ties go to the lowest index.
std::pair<std::size_t, Vector> net_projection(const EpsilonNet& net, const Vector& theta_hat);

}  // namespace mibounds
