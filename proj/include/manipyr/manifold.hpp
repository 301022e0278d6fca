#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace manipyr {

enum class ManifoldKind { Euclidean, SO3, SE3 };

std::string to_string(ManifoldKind k);
/// "Rn" (or "Euclidean"), "SO3", "SE3"
ManifoldKind manifold_kind_from_string(const std::string& s);

/// A point of R^n, SO(3) or SE(3). SO(3) uses R only; SE(3) uses R and the
/// translation x (size 3); Euclidean uses x only.
struct ManifoldPoint {
  ManifoldKind kind = ManifoldKind::Euclidean;
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::VectorXd x;

  static ManifoldPoint euclidean(Eigen::VectorXd v);
  static ManifoldPoint so3(const Eigen::Matrix3d& R);
  static ManifoldPoint se3(const Eigen::Matrix3d& R, const Eigen::Vector3d& t);

  /// Euclidean dimension, 3 for SO(3), 6 for SE(3).
  int dim() const;
  /// Row-major embedding coordinates: n, 9 or 16 numbers.
  std::vector<double> coords() const;
  /// Inverse of coords(). Throws InvalidPoint when the invariants fail.
  static ManifoldPoint from_coords(ManifoldKind kind, std::span<const double> c);
  /// 4x4 homogeneous matrix for SE(3), R for SO(3), column for Euclidean.
  Eigen::MatrixXd matrix() const;
};

/// Tangent vector in embedding coordinates. For SO(3) and SE(3) the
/// rotational part S satisfies R^T S skew at the base R; v is the Euclidean
/// vector or the SE(3) translation velocity. The base point is supplied by
/// the caller of exp, it is not stored.
struct TangentVector {
  ManifoldKind kind = ManifoldKind::Euclidean;
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  Eigen::VectorXd v;

  /// Frobenius norm of S combined with the Euclidean norm of v.
  double norm() const;
  TangentVector scaled(double s) const;
  /// Row-major S followed by v: n, 9 or 12 numbers.
  std::vector<double> coords() const;
  static TangentVector from_coords(ManifoldKind kind, std::span<const double> c);
  static TangentVector zero(const ManifoldPoint& like);
};

inline constexpr double kPointTol = 1e-8;
inline constexpr double kOrthoGuard = 1e-10;
/// Rotation angles closer than this to pi have no principal logarithm.
inline constexpr double kAntipodalTol = 1e-7;

/// Throws InvalidPoint if p violates its manifold's invariants.
void validate(const ManifoldPoint& p);

/// q (-) p. Throws TagMismatch or OutOfInjectivityRadius.
TangentVector log_map(const ManifoldPoint& p, const ManifoldPoint& q);
/// p (+) v, followed by the re-orthonormalization guard.
ManifoldPoint exp_map(const ManifoldPoint& p, const TangentVector& v);
double distance(const ManifoldPoint& p, const ManifoldPoint& q);
ManifoldPoint geodesic(const ManifoldPoint& p, const ManifoldPoint& q, double s);

struct MeanOptions {
  double tol = 1e-12;
  int max_iter = 100;
};

struct MeanResult {
  ManifoldPoint point;
  int iterations = 0;
  /// norm of sum_i w_i log_x(c_i) at the returned point
  double residual = 0.0;
};

/// Weighted Riemannian center of mass by damped fixed-point iteration
/// x <- exp_x(eta * sum w_i log_x c_i). The Euclidean case is the plain
/// affine combination, summed in the given order. Weights must sum to one.
MeanResult weighted_mean(std::span<const ManifoldPoint> points, std::span<const double> weights,
                         const MeanOptions& opts = {});

/// Orthogonal projection of v onto the tangent space at p. Leaves vectors
/// already tangent at p unchanged up to rounding.
TangentVector project_to_tangent(const ManifoldPoint& p, const TangentVector& v);

/// Number of polar projections applied by the guard in exp_map so far.
std::uint64_t projection_count();

/// skew(w) with skew(w) v = w x v
Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& K);
/// Rodrigues exponential of hat(w): rotation by |w| about w.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
/// Principal axis-angle vector of R. Throws OutOfInjectivityRadius at angle pi.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& R);
/// Rotation angle in [0, pi].
double rotation_angle(const Eigen::Matrix3d& R);

/// Haar-distributed rotation: QR of a Gaussian matrix, signs of diag(R)
/// moved into Q, then a column flip if det Q = -1.
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);

}  // namespace manipyr
