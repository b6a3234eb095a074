#include "relocnet/pose.hpp"

#include <algorithm>
#include <cmath>

namespace relocnet {

namespace {
constexpr double kRad2Deg = 180.0 / 3.14159265358979323846;
}

double Quaternion::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

bool Quaternion::is_unit(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

double quat_dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

Quaternion quat_normalize(const Quaternion& q) {
  const double n = q.norm();
  if (n <= 0.0 || !std::isfinite(n))
    throw DomainError("degenerate quaternion: zero or non-finite norm");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

std::array<double, 9> quat_to_rotmat(const Quaternion& qin) {
  const Quaternion q = quat_normalize(qin);
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
          2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
}

Quaternion rotmat_to_quat(const std::array<double, 9>& r, double ortho_tol) {
  // Orthonormality: R R^T == I within tolerance.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int k = 0; k < 3; ++k) dot += r[i * 3 + k] * r[j * 3 + k];
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - expect) > ortho_tol)
        throw DomainError("rotation matrix is not orthonormal");
    }
  }
  const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) -
                     r[1] * (r[3] * r[8] - r[5] * r[6]) +
                     r[2] * (r[3] * r[7] - r[4] * r[6]);
  if (det < 0) throw DomainError("rotation matrix is a reflection (det < 0)");

  // Shepperd-style: branch on the largest of trace and diagonal entries.
  const double t = r[0] + r[4] + r[8];
  Quaternion q;
  if (t > r[0] && t > r[4] && t > r[8]) {
    const double s = std::sqrt(1.0 + t) * 2.0;
    q.w = 0.25 * s;
    q.x = (r[7] - r[5]) / s;
    q.y = (r[2] - r[6]) / s;
    q.z = (r[3] - r[1]) / s;
  } else if (r[0] >= r[4] && r[0] >= r[8]) {
    const double s = std::sqrt(1.0 + r[0] - r[4] - r[8]) * 2.0;
    q.w = (r[7] - r[5]) / s;
    q.x = 0.25 * s;
    q.y = (r[1] + r[3]) / s;
    q.z = (r[2] + r[6]) / s;
  } else if (r[4] >= r[8]) {
    const double s = std::sqrt(1.0 + r[4] - r[0] - r[8]) * 2.0;
    q.w = (r[2] - r[6]) / s;
    q.x = (r[1] + r[3]) / s;
    q.y = 0.25 * s;
    q.z = (r[5] + r[7]) / s;
  } else {
    const double s = std::sqrt(1.0 + r[8] - r[0] - r[4]) * 2.0;
    q.w = (r[3] - r[1]) / s;
    q.x = (r[2] + r[6]) / s;
    q.y = (r[5] + r[7]) / s;
    q.z = 0.25 * s;
  }
  q = quat_normalize(q);
  if (q.w < 0) q = q.negated();
  return q;
}

PoseVector pose_to_vector(const Pose& p) {
  return {p.position[0], p.position[1], p.position[2],
          p.orientation.w, p.orientation.x, p.orientation.y, p.orientation.z};
}

Pose vector_to_pose(const PoseVector& v) {
  return Pose({v[0], v[1], v[2]}, Quaternion{v[3], v[4], v[5], v[6]});
}

double position_error(const Vec3& x, const Vec3& x_hat) {
  const double dx = x[0] - x_hat[0];
  const double dy = x[1] - x_hat[1];
  const double dz = x[2] - x_hat[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double angular_error(const Quaternion& q, const Quaternion& q_hat, bool raw) {
  const Quaternion a = quat_normalize(q);
  const Quaternion b = quat_normalize(q_hat);
  double d = quat_dot(a, b);
  if (!raw) d = std::abs(d);
  d = std::clamp(d, -1.0, 1.0);
  return std::acos(d) * kRad2Deg;
}

double pose_vector_error(const PoseVector& p, const PoseVector& p_hat) {
  double s = 0;
  for (int i = 0; i < 7; ++i) {
    const double d = p[i] - p_hat[i];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

Quaternion true_quat_normalized(const PoseVector& p_true) {
  return quat_normalize(Quaternion{p_true[3], p_true[4], p_true[5], p_true[6]});
}

}  // namespace

double posenet_loss(const PoseVector& p_hat, const PoseVector& p_true,
                    double beta) {
  if (beta <= 0) throw DomainError("beta must be positive");
  const Quaternion qt = true_quat_normalized(p_true);
  const double ep = position_error({p_hat[0], p_hat[1], p_hat[2]},
                                   {p_true[0], p_true[1], p_true[2]});
  const double dq[4] = {p_hat[3] - qt.w, p_hat[4] - qt.x, p_hat[5] - qt.y,
                        p_hat[6] - qt.z};
  const double eq =
      std::sqrt(dq[0] * dq[0] + dq[1] * dq[1] + dq[2] * dq[2] + dq[3] * dq[3]);
  return ep + beta * eq;
}

PoseVector loss_gradient(const PoseVector& p_hat, const PoseVector& p_true,
                         double beta) {
  const Quaternion qt = true_quat_normalized(p_true);
  PoseVector g{};
  double dx[3], dq[4];
  double np = 0, nq = 0;
  for (int i = 0; i < 3; ++i) {
    dx[i] = p_hat[i] - p_true[i];
    np += dx[i] * dx[i];
  }
  const double qtv[4] = {qt.w, qt.x, qt.y, qt.z};
  for (int i = 0; i < 4; ++i) {
    dq[i] = p_hat[3 + i] - qtv[i];
    nq += dq[i] * dq[i];
  }
  np = std::sqrt(np);
  nq = std::sqrt(nq);
  if (np > 0)
    for (int i = 0; i < 3; ++i) g[i] = dx[i] / np;
  if (nq > 0)
    for (int i = 0; i < 4; ++i) g[3 + i] = beta * dq[i] / nq;
  return g;
}

}  // namespace relocnet
