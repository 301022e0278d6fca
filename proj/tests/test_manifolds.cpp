#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "manipyr/error.hpp"
#include "manipyr/manifold.hpp"

using namespace manipyr;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix3d rot_z(double t) {
  Matrix3d R;
  R << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  return R;
}

// Axis-angle rotation written out entry by entry.
Matrix3d axis_angle(const Vector3d& axis, double t) {
  const Vector3d a = axis.normalized();
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double C = 1.0 - c;
  Matrix3d R;
  R << c + a.x() * a.x() * C, a.x() * a.y() * C - a.z() * s, a.x() * a.z() * C + a.y() * s,
      a.y() * a.x() * C + a.z() * s, c + a.y() * a.y() * C, a.y() * a.z() * C - a.x() * s,
      a.z() * a.x() * C - a.y() * s, a.z() * a.y() * C + a.x() * s, c + a.z() * a.z() * C;
  return R;
}

Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vector3d(n(rng), n(rng), n(rng)).normalized();
}

ManifoldPoint random_point(ManifoldKind k, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  switch (k) {
    case ManifoldKind::Euclidean: return ManifoldPoint::euclidean(Eigen::Vector4d(n(rng), n(rng), n(rng), n(rng)));
    case ManifoldKind::SO3: return ManifoldPoint::so3(random_rotation(rng));
    case ManifoldKind::SE3: return ManifoldPoint::se3(random_rotation(rng), Vector3d(n(rng), n(rng), n(rng)));
  }
  return {};
}

// Tangent vector at p of norm <= max_norm.
TangentVector random_tangent(const ManifoldPoint& p, double max_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TangentVector t = TangentVector::zero(p);
  if (p.kind != ManifoldKind::Euclidean) t.S = p.R * hat(Vector3d(n(rng), n(rng), n(rng)));
  for (Eigen::Index i = 0; i < t.v.size(); ++i) t.v[i] = n(rng);
  return t.scaled(max_norm * u(rng) / t.norm());
}

double tangent_diff(const TangentVector& a, const TangentVector& b) {
  double d = (a.S - b.S).squaredNorm();
  if (a.v.size()) d += (a.v - b.v).squaredNorm();
  return std::sqrt(d);
}

const ManifoldKind kAll[] = {ManifoldKind::Euclidean, ManifoldKind::SO3, ManifoldKind::SE3};

}  // namespace

TEST(Log, SelfIsZero) {
  std::mt19937_64 rng(1);
  for (auto k : kAll) {
    const auto p = random_point(k, rng);
    EXPECT_LT(log_map(p, p).norm(), 1e-15);
  }
}

TEST(Log, EuclideanIsDifference) {
  const auto p = ManifoldPoint::euclidean(Eigen::Vector2d(1.0, 2.0));
  const auto q = ManifoldPoint::euclidean(Eigen::Vector2d(-0.5, 4.0));
  EXPECT_EQ(log_map(p, q).v, Eigen::Vector2d(-1.5, 2.0));
}

TEST(Log, QuarterTurnAboutZ) {
  const auto v = log_map(ManifoldPoint::so3(Matrix3d::Identity()), ManifoldPoint::so3(rot_z(kPi / 2)));
  EXPECT_NEAR(v.norm(), kPi / 2 * std::numbers::sqrt2, 1e-12);
  EXPECT_LT((v.S - hat(Vector3d(0, 0, kPi / 2))).norm(), 1e-12);
}

TEST(Log, NearAntipodalAndAntipodal) {
  std::mt19937_64 rng(5);
  for (double gap : {1e-2, 1e-4, 1e-6}) {
    const Vector3d a = random_unit(rng);
    const Matrix3d R = axis_angle(a, kPi - gap);
    const Vector3d w = so3_log(R);
    EXPECT_LT((w - (kPi - gap) * a).norm(), 1e-8) << gap;
    EXPECT_LT((so3_exp(w) - R).norm(), 1e-10);
  }
  EXPECT_THROW(so3_log(rot_z(kPi)), OutOfInjectivityRadius);
  EXPECT_THROW(log_map(ManifoldPoint::so3(Matrix3d::Identity()), ManifoldPoint::so3(rot_z(kPi))),
               OutOfInjectivityRadius);
}

TEST(Log, TagMismatch) {
  const auto a = ManifoldPoint::so3(Matrix3d::Identity());
  const auto b = ManifoldPoint::se3(Matrix3d::Identity(), Vector3d::Zero());
  EXPECT_THROW(log_map(a, b), TagMismatch);
  EXPECT_THROW(distance(ManifoldPoint::euclidean(Eigen::Vector2d::Zero()), ManifoldPoint::euclidean(Vector3d::Zero())),
               TagMismatch);
}

TEST(Exp, ZeroAndEuclidean) {
  std::mt19937_64 rng(2);
  for (auto k : kAll) {
    const auto p = random_point(k, rng);
    const auto q = exp_map(p, TangentVector::zero(p));
    EXPECT_LT(distance(p, q), 1e-15);
  }
  const auto p = ManifoldPoint::euclidean(Vector3d(1, 2, 3));
  TangentVector v = TangentVector::zero(p);
  v.v = Vector3d(0.5, -1, 0);
  EXPECT_EQ(exp_map(p, v).x, Vector3d(1.5, 1, 3));
}

TEST(Exp, SkewAboutZMatchesRodrigues) {
  for (double t : {1e-8, 1e-3, 0.4, 1.3, 3.0}) {
    TangentVector v;
    v.kind = ManifoldKind::SO3;
    v.S = hat(Vector3d(0, 0, t));
    const auto q = exp_map(ManifoldPoint::so3(Matrix3d::Identity()), v);
    EXPECT_LT((q.R - rot_z(t)).norm(), 1e-14) << t;
    // the tangent vector's Frobenius length is sqrt(2) times the angle
    EXPECT_NEAR(distance(ManifoldPoint::so3(Matrix3d::Identity()), q), std::numbers::sqrt2 * t, 1e-12);
  }
}

TEST(Exp, RejectsNonTangent) {
  TangentVector v;
  v.kind = ManifoldKind::SO3;
  v.S = Matrix3d::Identity();
  EXPECT_THROW(exp_map(ManifoldPoint::so3(Matrix3d::Identity()), v), ValidationError);
}

TEST(Exp, GuardProjectsDriftedRotations) {
  Matrix3d R = Matrix3d::Identity();
  R(0, 1) = 3e-9;  // valid at 1e-8, but far outside the 1e-10 guard
  const auto p = ManifoldPoint::so3(R);
  validate(p);
  const auto before = projection_count();
  const auto q = exp_map(p, TangentVector::zero(p));
  EXPECT_EQ(projection_count(), before + 1);
  EXPECT_LT((q.R.transpose() * q.R - Matrix3d::Identity()).norm(), 1e-14);
}

TEST(ExpLog, CompatibilityOnThousandCases) {
  std::mt19937_64 rng(42);
  for (auto k : kAll) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_point(k, rng);
      const auto v = random_tangent(p, 0.5, rng);
      worst = std::max(worst, tangent_diff(log_map(p, exp_map(p, v)), v));
    }
    EXPECT_LE(worst, 1e-10) << to_string(k);
  }
}

TEST(ExpLog, LogNormIsDistanceAndExpInverts) {
  std::mt19937_64 rng(43);
  for (auto k : kAll)
    for (int i = 0; i < 200; ++i) {
      const auto p = random_point(k, rng);
      const auto q = random_point(k, rng);
      const auto v = log_map(p, q);
      EXPECT_NEAR(v.norm(), distance(p, q), 1e-10);
      EXPECT_LT(distance(exp_map(p, v), q), 1e-10);
    }
}

TEST(Distance, AxisAngleOracle) {
  std::mt19937_64 rng(3);
  const auto I = ManifoldPoint::so3(Matrix3d::Identity());
  for (double t : {0.0, 0.2, 1.0, 2.5, kPi}) {
    const auto q = ManifoldPoint::so3(axis_angle(random_unit(rng), t));
    EXPECT_NEAR(distance(I, q), std::numbers::sqrt2 * t, 1e-12);
  }
}

TEST(Distance, TranslationOnly) {
  const auto p = ManifoldPoint::se3(Matrix3d::Identity(), Vector3d::Zero());
  const auto q = ManifoldPoint::se3(Matrix3d::Identity(), Vector3d(3, 4, 0));
  EXPECT_DOUBLE_EQ(distance(p, q), 5.0);
}

TEST(Distance, MetricAxioms) {
  std::mt19937_64 rng(4);
  for (auto k : kAll)
    for (int i = 0; i < 300; ++i) {
      const auto a = random_point(k, rng);
      const auto b = random_point(k, rng);
      const auto c = random_point(k, rng);
      EXPECT_NEAR(distance(a, b), distance(b, a), 1e-12);
      EXPECT_LT(distance(a, a), 1e-12);
      EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12);
    }
}

TEST(Distance, BiInvariance) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d Q = random_rotation(rng);
    const Matrix3d A = random_rotation(rng);
    const Matrix3d B = random_rotation(rng);
    const double d = distance(ManifoldPoint::so3(A), ManifoldPoint::so3(B));
    worst = std::max(worst, std::abs(distance(ManifoldPoint::so3(Q * A), ManifoldPoint::so3(Q * B)) - d));
    worst = std::max(worst, std::abs(distance(ManifoldPoint::so3(A * Q), ManifoldPoint::so3(B * Q)) - d));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Distance, SE3ProductIdentity) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_point(ManifoldKind::SE3, rng);
    const auto b = random_point(ManifoldKind::SE3, rng);
    const double rot = distance(ManifoldPoint::so3(a.R), ManifoldPoint::so3(b.R));
    const double d = distance(a, b);
    EXPECT_NEAR(d * d, rot * rot + (a.x - b.x).squaredNorm(), 1e-12 * std::max(1.0, d * d));
  }
}

TEST(Geodesic, EndpointsAndMidpoint) {
  const auto I = ManifoldPoint::so3(Matrix3d::Identity());
  const auto q = ManifoldPoint::so3(rot_z(1.2));
  EXPECT_LT(distance(geodesic(I, q, 0.0), I), 1e-10);
  EXPECT_LT(distance(geodesic(I, q, 1.0), q), 1e-10);
  EXPECT_LT((geodesic(I, q, 0.5).R - rot_z(0.6)).norm(), 1e-12);
  const auto a = ManifoldPoint::se3(rot_z(0.3), Vector3d(1, 2, 3));
  const auto b = ManifoldPoint::se3(rot_z(0.9), Vector3d(3, 0, -1));
  EXPECT_LT((geodesic(a, b, 0.5).x - Vector3d(2, 1, 1)).norm(), 1e-15);
}

TEST(Geodesic, DistanceScales) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto k : kAll) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_point(k, rng);
      const auto q = random_point(k, rng);
      const double s = u(rng);
      worst = std::max(worst, std::abs(distance(p, geodesic(p, q, s)) - s * distance(p, q)));
    }
    EXPECT_LE(worst, 1e-9) << to_string(k);
  }
}

TEST(WeightedMean, EqualPoints) {
  std::mt19937_64 rng(9);
  const auto p = random_point(ManifoldKind::SE3, rng);
  const std::vector<ManifoldPoint> pts(4, p);
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  EXPECT_LT(distance(weighted_mean(pts, w).point, p), 1e-14);
}

TEST(WeightedMean, EuclideanIsAffineCombination) {
  const std::vector<ManifoldPoint> pts{ManifoldPoint::euclidean(Eigen::Vector2d(1, 0)),
                                       ManifoldPoint::euclidean(Eigen::Vector2d(0, 2)),
                                       ManifoldPoint::euclidean(Eigen::Vector2d(4, 4))};
  const std::vector<double> w{-0.25, 0.75, 0.5};
  const auto m = weighted_mean(pts, w).point;
  Eigen::Vector2d expect = Eigen::Vector2d::Zero();
  for (int i = 0; i < 3; ++i) expect += w[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)].x;
  EXPECT_EQ(m.x, expect);
}

TEST(WeightedMean, TwoPointMeanIsMidpoint) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    const auto p = ManifoldPoint::so3(random_rotation(rng));
    const auto q = geodesic(p, ManifoldPoint::so3(random_rotation(rng)), 0.8);
    const std::vector<ManifoldPoint> pts{p, q};
    const std::vector<double> w{0.5, 0.5};
    EXPECT_LT(distance(weighted_mean(pts, w).point, geodesic(p, q, 0.5)), 1e-9);
  }
}

TEST(WeightedMean, StationarityWithSignedWeights) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto k : {ManifoldKind::SO3, ManifoldKind::SE3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = random_point(k, rng);
      std::vector<ManifoldPoint> pts;
      for (int i = 0; i < 5; ++i) pts.push_back(exp_map(c, random_tangent(c, 0.6, rng)));
      std::vector<double> w{0.6, 0.3, 0.25, -0.1, -0.05};
      const auto res = weighted_mean(pts, w);
      TangentVector g = TangentVector::zero(res.point);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto l = log_map(res.point, pts[i]);
        g.S += w[i] * l.S;
        if (g.v.size()) g.v += w[i] * l.v;
      }
      EXPECT_LE(g.norm(), 1e-12);
      EXPECT_LE(res.residual, 1e-12);
    }
  }
}

TEST(WeightedMean, Errors) {
  const std::vector<ManifoldPoint> none;
  const std::vector<double> nw;
  EXPECT_THROW(weighted_mean(none, nw), EmptyInput);
  const std::vector<ManifoldPoint> one{ManifoldPoint::so3(Matrix3d::Identity())};
  const std::vector<double> bad{0.9};
  EXPECT_THROW(weighted_mean(one, bad), ValidationError);
  std::mt19937_64 rng(12);
  std::vector<ManifoldPoint> far;
  for (int i = 0; i < 3; ++i) far.push_back(ManifoldPoint::so3(random_rotation(rng)));
  const std::vector<double> w{0.7, 0.6, -0.3};
  MeanOptions few;
  few.max_iter = 1;
  EXPECT_THROW(weighted_mean(far, w, few), NumericalError);
}

TEST(Points, ValidationAndCoordinates) {
  Matrix3d R = rot_z(0.4);
  R(0, 0) += 1e-6;
  EXPECT_THROW(validate(ManifoldPoint::so3(R)), InvalidPoint);
  EXPECT_THROW(validate(ManifoldPoint::so3(-Matrix3d::Identity())), InvalidPoint);
  const auto p = ManifoldPoint::se3(rot_z(0.4), Vector3d(1, 2, 3));
  const auto c = p.coords();
  ASSERT_EQ(c.size(), 16u);
  EXPECT_EQ(c[3], 1.0);
  EXPECT_EQ(c[15], 1.0);
  const auto back = ManifoldPoint::from_coords(ManifoldKind::SE3, c);
  EXPECT_EQ(back.R, p.R);
  EXPECT_EQ(back.x, p.x);
  auto broken = c;
  broken[14] = 1e-300;
  EXPECT_THROW(ManifoldPoint::from_coords(ManifoldKind::SE3, broken), InvalidPoint);
  EXPECT_THROW(ManifoldPoint::from_coords(ManifoldKind::SO3, c), InvalidPoint);
  const auto t = log_map(p, ManifoldPoint::se3(rot_z(0.9), Vector3d::Zero()));
  const auto tc = TangentVector::from_coords(ManifoldKind::SE3, t.coords());
  EXPECT_EQ(tc.S, t.S);
  EXPECT_EQ(tc.v, t.v);
}

TEST(Points, RandomRotationsAreProper) {
  std::mt19937_64 a(99);
  std::mt19937_64 b(99);
  for (int i = 0; i < 100; ++i) {
    const Matrix3d R = random_rotation(a);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    EXPECT_EQ(R, random_rotation(b));
  }
}

TEST(ProjectToTangent, FixesTangentVectorsAndRemovesNormalPart) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto p = ManifoldPoint::so3(random_rotation(rng));
    const auto q = ManifoldPoint::so3(random_rotation(rng));
    const auto v = log_map(p, q);
    EXPECT_LE((project_to_tangent(p, v).S - v.S).norm(), 1e-14);
    const auto moved = ManifoldPoint::so3(so3_exp(Eigen::Vector3d(0.05, -0.02, 0.01)) * p.R);
    const auto w = project_to_tangent(moved, v);
    const Eigen::Matrix3d A = moved.R.transpose() * w.S;
    EXPECT_LE((A + A.transpose()).norm(), 1e-14);
    EXPECT_LE(w.norm(), v.norm() + 1e-14);
  }
}
