#include "manipyr/manifold.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "manipyr/error.hpp"

namespace manipyr {

namespace {

std::atomic<std::uint64_t> g_projections{0};

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_same(const ManifoldPoint& p, const ManifoldPoint& q, const char* who) {
  if (p.kind != q.kind || (p.kind == ManifoldKind::Euclidean && p.x.size() != q.x.size()))
    throw TagMismatch(std::string(who) + ": points live on different manifolds (" + to_string(p.kind) + " vs " +
                      to_string(q.kind) + ")");
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  if ((U * svd.matrixV().transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * svd.matrixV().transpose();
}

Eigen::Matrix3d guarded(const Eigen::Matrix3d& R) {
  const double defect = (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
  if (defect <= kOrthoGuard) return R;
  g_projections.fetch_add(1, std::memory_order_relaxed);
  return nearest_rotation(R);
}

// Body-frame log of q at p: rotation vector and translation difference.
struct BodyLog {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::VectorXd t;
};

BodyLog body_log(const ManifoldPoint& p, const ManifoldPoint& q) {
  BodyLog b;
  if (p.kind != ManifoldKind::Euclidean) b.w = so3_log(p.R.transpose() * q.R);
  if (p.kind != ManifoldKind::SO3) b.t = q.x - p.x;
  return b;
}

ManifoldPoint body_exp(const ManifoldPoint& p, const Eigen::Vector3d& w, const Eigen::VectorXd& t) {
  ManifoldPoint out = p;
  if (p.kind != ManifoldKind::Euclidean) out.R = guarded(p.R * so3_exp(w));
  if (p.kind != ManifoldKind::SO3) out.x = p.x + t;
  return out;
}

}  // namespace

std::string to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Euclidean: return "Rn";
    case ManifoldKind::SO3: return "SO3";
    case ManifoldKind::SE3: return "SE3";
  }
  return "?";
}

ManifoldKind manifold_kind_from_string(const std::string& s) {
  if (s == "Rn" || s == "Euclidean") return ManifoldKind::Euclidean;
  if (s == "SO3") return ManifoldKind::SO3;
  if (s == "SE3") return ManifoldKind::SE3;
  throw ValidationError("unknown manifold '" + s + "'");
}

ManifoldPoint ManifoldPoint::euclidean(Eigen::VectorXd v) {
  ManifoldPoint p;
  p.x = std::move(v);
  return p;
}

ManifoldPoint ManifoldPoint::so3(const Eigen::Matrix3d& R) {
  ManifoldPoint p;
  p.kind = ManifoldKind::SO3;
  p.R = R;
  return p;
}

ManifoldPoint ManifoldPoint::se3(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
  ManifoldPoint p;
  p.kind = ManifoldKind::SE3;
  p.R = R;
  p.x = t;
  return p;
}

int ManifoldPoint::dim() const {
  switch (kind) {
    case ManifoldKind::Euclidean: return static_cast<int>(x.size());
    case ManifoldKind::SO3: return 3;
    case ManifoldKind::SE3: return 6;
  }
  return 0;
}

std::vector<double> ManifoldPoint::coords() const {
  std::vector<double> c;
  if (kind == ManifoldKind::Euclidean) return {x.data(), x.data() + x.size()};
  const int n = kind == ManifoldKind::SO3 ? 3 : 4;
  const Eigen::MatrixXd M = matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.push_back(M(i, j));
  return c;
}

Eigen::MatrixXd ManifoldPoint::matrix() const {
  if (kind == ManifoldKind::Euclidean) return x;
  if (kind == ManifoldKind::SO3) return R;
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M.topLeftCorner<3, 3>() = R;
  M.topRightCorner<3, 1>() = x;
  return M;
}

ManifoldPoint ManifoldPoint::from_coords(ManifoldKind kind, std::span<const double> c) {
  ManifoldPoint p;
  p.kind = kind;
  if (kind == ManifoldKind::Euclidean) {
    if (c.empty()) throw InvalidPoint("Euclidean point needs at least one coordinate");
    p.x = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  } else {
    const std::size_t n = kind == ManifoldKind::SO3 ? 3 : 4;
    if (c.size() != n * n)
      throw InvalidPoint(to_string(kind) + " point needs " + std::to_string(n * n) + " coordinates, got " +
                         std::to_string(c.size()));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) p.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i * n + j];
    if (kind == ManifoldKind::SE3) {
      if (c[12] != 0.0 || c[13] != 0.0 || c[14] != 0.0 || c[15] != 1.0)
        throw InvalidPoint("SE3 point: bottom row must be exactly (0, 0, 0, 1)");
      p.x = Eigen::Vector3d(c[3], c[7], c[11]);
    }
  }
  validate(p);
  return p;
}

void validate(const ManifoldPoint& p) {
  const auto finite = [](const auto& m) { return m.allFinite(); };
  switch (p.kind) {
    case ManifoldKind::Euclidean:
      if (p.x.size() == 0 || !finite(p.x)) throw InvalidPoint("Euclidean point must be finite and non-empty");
      return;
    case ManifoldKind::SE3:
      if (p.x.size() != 3 || !finite(p.x)) throw InvalidPoint("SE3 translation must be a finite 3-vector");
      [[fallthrough]];
    case ManifoldKind::SO3: {
      if (!finite(p.R)) throw InvalidPoint("rotation has non-finite entries");
      const double ortho = (p.R.transpose() * p.R - Eigen::Matrix3d::Identity()).norm();
      const double det = p.R.determinant();
      if (ortho > kPointTol || std::abs(det - 1.0) > kPointTol)
        throw InvalidPoint("rotation violates R^T R = I or det R = 1 (defect " + std::to_string(ortho) + ")");
      return;
    }
  }
}

double TangentVector::norm() const {
  const double sv = v.size() ? v.squaredNorm() : 0.0;
  return std::sqrt(S.squaredNorm() + sv);
}

TangentVector TangentVector::scaled(double s) const {
  TangentVector out = *this;
  out.S *= s;
  if (out.v.size()) out.v *= s;
  return out;
}

std::vector<double> TangentVector::coords() const {
  std::vector<double> c;
  if (kind != ManifoldKind::Euclidean)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c.push_back(S(i, j));
  for (Eigen::Index i = 0; i < v.size(); ++i) c.push_back(v[i]);
  return c;
}

TangentVector TangentVector::from_coords(ManifoldKind kind, std::span<const double> c) {
  TangentVector t;
  t.kind = kind;
  std::size_t off = 0;
  if (kind != ManifoldKind::Euclidean) {
    const std::size_t need = kind == ManifoldKind::SO3 ? 9 : 12;
    if (c.size() != need)
      throw ValidationError(to_string(kind) + " tangent vector needs " + std::to_string(need) + " coordinates");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.S(i, j) = c[off++];
  } else if (c.empty()) {
    throw ValidationError("Euclidean tangent vector needs at least one coordinate");
  }
  t.v = Eigen::Map<const Eigen::VectorXd>(c.data() + off, static_cast<Eigen::Index>(c.size() - off));
  return t;
}

TangentVector TangentVector::zero(const ManifoldPoint& like) {
  TangentVector t;
  t.kind = like.kind;
  if (like.kind != ManifoldKind::SO3) t.v = Eigen::VectorXd::Zero(like.x.size());
  return t;
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d K;
  K << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return K;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& K) { return {K(2, 1), K(0, 2), K(1, 0)}; }

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d K = hat(w);
  double a;
  double b;
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

double rotation_angle(const Eigen::Matrix3d& R) {
  const double s = 0.5 * vee(R - R.transpose()).norm();
  const double c = 0.5 * (R.trace() - 1.0);
  return std::atan2(s, c);
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const Eigen::Vector3d u = 0.5 * vee(R - R.transpose());  // sin(theta) * axis
  const double s = u.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (std::numbers::pi - theta < kAntipodalTol)
    throw OutOfInjectivityRadius("so3_log: rotation angle is pi, the logarithm is not unique");
  if (theta < 1e-6) return (1.0 + theta * theta / 6.0) * u;
  if (c > -0.99) return (theta / s) * u;
  // Near pi the antisymmetric part is small; read the axis off the
  // symmetric part R_sym = I + (1 - cos) (a a^T - I).
  const Eigen::Matrix3d aat =
      (0.5 * (R + R.transpose()) - Eigen::Matrix3d::Identity()) / (1.0 - c) + Eigen::Matrix3d::Identity();
  Eigen::Index k;
  aat.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = aat.col(k) / std::sqrt(aat(k, k));
  axis.normalize();
  if (axis.dot(u) < 0.0) axis = -axis;
  return theta * axis;
}

TangentVector log_map(const ManifoldPoint& p, const ManifoldPoint& q) {
  require_same(p, q, "log");
  const BodyLog b = body_log(p, q);
  TangentVector t;
  t.kind = p.kind;
  if (p.kind != ManifoldKind::Euclidean) t.S = p.R * hat(b.w);
  t.v = b.t;
  return t;
}

ManifoldPoint exp_map(const ManifoldPoint& p, const TangentVector& v) {
  if (v.kind != p.kind || (p.kind != ManifoldKind::SO3 && v.v.size() != p.x.size()))
    throw TagMismatch("exp: tangent vector does not match the base point's manifold");
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  if (p.kind != ManifoldKind::Euclidean) {
    const Eigen::Matrix3d A = p.R.transpose() * v.S;
    if ((A + A.transpose()).norm() > kPointTol * std::max(1.0, v.S.norm()))
      throw ValidationError("exp: vector is not tangent at the base point (R^T S not skew)");
    w = vee(0.5 * (A - A.transpose()));
  }
  return body_exp(p, w, v.v);
}

TangentVector project_to_tangent(const ManifoldPoint& p, const TangentVector& v) {
  if (v.kind != p.kind) throw TagMismatch("project_to_tangent: tangent vector does not match the base point's manifold");
  if (p.kind == ManifoldKind::Euclidean) return v;
  TangentVector out = v;
  const Eigen::Matrix3d A = p.R.transpose() * v.S;
  out.S = p.R * (0.5 * (A - A.transpose()));
  return out;
}

double distance(const ManifoldPoint& p, const ManifoldPoint& q) {
  require_same(p, q, "distance");
  double d2 = 0.0;
  if (p.kind != ManifoldKind::Euclidean) {
    const double rho = kSqrt2 * rotation_angle(p.R.transpose() * q.R);
    d2 += rho * rho;
  }
  if (p.kind != ManifoldKind::SO3) d2 += (q.x - p.x).squaredNorm();
  return std::sqrt(d2);
}

ManifoldPoint geodesic(const ManifoldPoint& p, const ManifoldPoint& q, double s) {
  require_same(p, q, "geodesic");
  const BodyLog b = body_log(p, q);
  return body_exp(p, s * b.w, b.t.size() ? Eigen::VectorXd(s * b.t) : b.t);
}

MeanResult weighted_mean(std::span<const ManifoldPoint> points, std::span<const double> weights,
                         const MeanOptions& opts) {
  if (points.empty()) throw EmptyInput("weighted_mean: no points");
  if (points.size() != weights.size()) throw LengthMismatch("weighted_mean: points and weights differ in length");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-12) throw ValidationError("weighted_mean: weights must sum to 1");
  for (const auto& p : points) require_same(points[0], p, "weighted_mean");

  const ManifoldPoint& first = points[0];
  MeanResult res;
  if (first.kind == ManifoldKind::Euclidean) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(first.x.size());
    for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * points[i].x;
    res.point = ManifoldPoint::euclidean(std::move(acc));
    return res;
  }

  std::size_t start = 0;
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (std::abs(weights[i]) > std::abs(weights[start])) start = i;
  ManifoldPoint x = points[start];

  const bool has_t = first.kind == ManifoldKind::SE3;
  auto gradient = [&](const ManifoldPoint& at, Eigen::Vector3d& gw, Eigen::VectorXd& gt) {
    gw.setZero();
    if (has_t) gt = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] == 0.0) continue;
      gw += weights[i] * so3_log(at.R.transpose() * points[i].R);
      if (has_t) gt += weights[i] * (points[i].x - at.x);
    }
    const double tn = has_t ? gt.squaredNorm() : 0.0;
    return std::sqrt(2.0 * gw.squaredNorm() + tn);
  };

  Eigen::Vector3d gw;
  Eigen::VectorXd gt;
  double r = gradient(x, gw, gt);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r <= opts.tol) {
      res.point = x;
      res.iterations = it;
      res.residual = r;
      return res;
    }
    double eta = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, eta *= 0.5) {
      const ManifoldPoint trial = body_exp(x, eta * gw, has_t ? Eigen::VectorXd(eta * gt) : gt);
      Eigen::Vector3d tw;
      Eigen::VectorXd tt;
      const double tr = gradient(trial, tw, tt);
      if (tr < r) {
        x = trial;
        gw = tw;
        gt = tt;
        r = tr;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NonConvergence("weighted_mean: step damping exhausted at residual " + std::to_string(r));
  }
  if (r <= opts.tol) {
    res.point = x;
    res.iterations = opts.max_iter;
    res.residual = r;
    return res;
  }
  throw NonConvergence("weighted_mean: no convergence in " + std::to_string(opts.max_iter) +
                       " iterations (residual " + std::to_string(r) + ")");
}

std::uint64_t projection_count() { return g_projections.load(std::memory_order_relaxed); }

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::Matrix3d G;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) G(i, j) = n01(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(G);
  Eigen::Matrix3d Q = qr.householderQ();
  const Eigen::Matrix3d Rf = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j)
    if (Rf(j, j) < 0.0) Q.col(j) *= -1.0;
  if (Q.determinant() < 0.0) Q.col(0) *= -1.0;
  return Q;
}

}  // namespace manipyr
