#pragma once

#include <array>

#include "relocnet/errors.hpp"

namespace relocnet {

using Vec3 = std::array<double, 3>;

/// Orientation quaternion, (w, x, y, z) component order throughout the
/// library; dataset parsers reorder on ingest.
struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  double norm() const;
  bool is_unit(double tol = 1e-9) const;
  Quaternion negated() const { return {-w, -x, -y, -z}; }
};

double quat_dot(const Quaternion& a, const Quaternion& b);

/// Scales q to unit norm. Throws DomainError on (near) zero input.
Quaternion quat_normalize(const Quaternion& q);

/// Unit quaternion -> 3x3 rotation matrix, row-major.
std::array<double, 9> quat_to_rotmat(const Quaternion& q);

/// Rotation matrix -> unit quaternion with w >= 0, choosing the largest
/// diagonal branch for stability. R must be orthonormal within `ortho_tol`
/// and proper (det > 0).
Quaternion rotmat_to_quat(const std::array<double, 9>& r,
                          double ortho_tol = 1e-3);

struct Pose {
  Vec3 position{0, 0, 0};
  Quaternion orientation;

  Pose() = default;
  Pose(const Vec3& pos, const Quaternion& q)
      : position(pos), orientation(quat_normalize(q)) {}
};

/// Regression target [x(3), q(4)], q in (w,x,y,z) order.
using PoseVector = std::array<double, 7>;

PoseVector pose_to_vector(const Pose& p);
Pose vector_to_pose(const PoseVector& v);

/// e_p: Euclidean distance in meters.
double position_error(const Vec3& x, const Vec3& x_hat);

/// e_a in degrees. Default metric is arccos(clamp(|<q,q_hat>|)), invariant to
/// the quaternion double cover and bounded by 90 degrees. `raw` drops the
/// absolute value, using the sign-sensitive inner product verbatim.
double angular_error(const Quaternion& q, const Quaternion& q_hat,
                     bool raw = false);

/// Euclidean distance between raw 7-component pose vectors (architecture
/// comparison plots only; mixes meters and quaternion units).
double pose_vector_error(const PoseVector& p, const PoseVector& p_hat);

/// loss = ||x_hat - x|| + beta * ||q_hat - q/||q|| ||
double posenet_loss(const PoseVector& p_hat, const PoseVector& p_true,
                    double beta);

/// Analytic gradient of posenet_loss w.r.t. p_hat; zero subgradient at the
/// two norm kinks.
PoseVector loss_gradient(const PoseVector& p_hat, const PoseVector& p_true,
                         double beta);

}  // namespace relocnet
