#pragma once

#include "artnav/factor_graph.hpp"

namespace artnav::graph {

/// Below this separation the length factor has no defined gradient.
inline constexpr double kMinBaselineSeparation = 1e-6;

/// x - b. The Jacobian with respect to x is the identity.
[[nodiscard]] Vec3 clas_residual(const EnuPosition& x, const ClasFix& fix);

/// x_from - x_to - b. Jacobians are +I (x_from) and -I (x_to).
[[nodiscard]] Vec3 mvrtk_residual(const EnuPosition& x_from, const EnuPosition& x_to,
                                  const BaselineObservation& obs);

/// |xb - xa| - length.
[[nodiscard]] double baseline_length_residual(const EnuPosition& xa, const EnuPosition& xb,
                                              double length);

struct LengthLinearization {
  double residual = 0.0;
  Eigen::RowVector3d d_xa;
  Eigen::RowVector3d d_xb;
};

[[nodiscard]] LengthLinearization linearize_baseline_length(const EnuPosition& xa,
                                                            const EnuPosition& xb,
                                                            double length);

/// IRLS weight of the Huber kernel: 1 inside delta, delta / norm outside.
[[nodiscard]] double huber_weight(double whitened_norm, double delta);

/// Huber loss scaled to equal norm^2 in the quadratic region.
[[nodiscard]] double huber_cost(double whitened_norm, double delta);

/// sqrt(e' * inv(cov) * e) using a Cholesky factor of the covariance.
[[nodiscard]] double whitened_norm(const Vec3& residual, const Mat3& covariance);

}  // namespace artnav::graph
