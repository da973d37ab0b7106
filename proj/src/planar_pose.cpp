// -*-c++-*---------------------------------------------------------------------------------------
// Copyright 2026 The fidslam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Dense>
#include <cmath>
#include <fidslam/errors.hpp>
#include <fidslam/planar_pose.hpp>
#include <limits>

namespace fidslam
{
static constexpr double kInf = std::numeric_limits<double>::infinity();
// refined candidates closer than this are the same local minimum
static constexpr double kCoincidentAngle = 1e-4;    // rad
static constexpr double kCoincidentDistance = 1e-4;  // relative to range

static Matrix3 hartley(const PlanePoints & p)
{
  Vector2 c = Vector2::Zero();
  for (const auto & x : p) {
    c += x;
  }
  c /= 4.0;
  double d = 0;
  for (const auto & x : p) {
    d += (x - c).norm();
  }
  d /= 4.0;
  if (!(d > 0) || !std::isfinite(d)) {
    throw DegenerateConfiguration("coincident points");
  }
  const double s = std::sqrt(2.0) / d;
  Matrix3 T;
  T << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return (T);
}

static void checkNotCollinear(const PlanePoints & p, const char * what)
{
  double scale = 0;
  for (const auto & x : p) {
    scale = std::max(scale, (x - p[0]).norm());
  }
  for (int i = 0; i < 4; i++) {
    const Vector2 a = p[(i + 1) % 4] - p[i];
    const Vector2 b = p[(i + 2) % 4] - p[i];
    if (std::abs(a.x() * b.y() - a.y() * b.x()) <= 1e-12 * scale * scale) {
      throw DegenerateConfiguration(std::string(what) + " points are collinear or coincident");
    }
  }
}

Matrix3 homographyFrom4Points(const PlanePoints & obj, const PlanePoints & img)
{
  for (const auto & x : img) {
    if (!x.allFinite()) {
      throw DegenerateConfiguration("non-finite image point");
    }
  }
  checkNotCollinear(obj, "object");
  checkNotCollinear(img, "image");
  const Matrix3 To = hartley(obj);
  const Matrix3 Ti = hartley(img);
  Eigen::Matrix<double, 9, 9> A = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < 4; i++) {
    const Vector3 X = To * obj[i].homogeneous();
    const Vector3 x = Ti * img[i].homogeneous();
    A.block<1, 3>(2 * i, 3) = -X.transpose();
    A.block<1, 3>(2 * i, 6) = x.y() * X.transpose();
    A.block<1, 3>(2 * i + 1, 0) = X.transpose();
    A.block<1, 3>(2 * i + 1, 6) = -x.x() * X.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(A, Eigen::ComputeFullV);
  const auto & sv = svd.singularValues();
  if (!(sv(7) > 1e-12 * sv(0))) {
    throw DegenerateConfiguration("homography is not unique");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Matrix3 Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Matrix3 H = Ti.inverse() * Hn * To;
  if (std::abs(H(2, 2)) > 1e-12 * H.norm()) {
    H /= H(2, 2);
  }
  return (H);
}

// rotation taking the unit vector along v onto the z axis
static Matrix3 rotationToZ(const Vector3 & v)
{
  const Vector3 a = v.normalized();
  const double c = a.z();
  Matrix3 R;
  if (std::abs(1.0 + c) < 1e-12) {
    R << 1, 0, 0, 0, 1, 0, 0, 0, -1;
    return (R);
  }
  const double d = 1.0 / (1.0 + c);
  R << 1 - a.x() * a.x() * d, -a.x() * a.y() * d, -a.x(),  //
    -a.x() * a.y() * d, 1 - a.y() * a.y() * d, -a.y(),     //
    a.x(), a.y(), 1 - (a.x() * a.x() + a.y() * a.y()) * d;
  return (R);
}

std::vector<Pose> poseCandidatesFromHomography(const Matrix3 & H0)
{
  if (!H0.allFinite() || std::abs(H0(2, 2)) < 1e-12 * H0.norm()) {
    throw NoValidPose("homography maps the tag center to infinity");
  }
  const Matrix3 H = H0 / H0(2, 2);
  // image of the tag center and the Jacobian of the homography there
  const double p = H(0, 2);
  const double q = H(1, 2);
  Eigen::Matrix2d J;
  J << H(0, 0) - H(2, 0) * p, H(0, 1) - H(2, 1) * p, H(1, 0) - H(2, 0) * q,
    H(1, 1) - H(2, 1) * q;
  const Matrix3 Rv = rotationToZ(Vector3(p, q, 1.0)).transpose();
  Eigen::Matrix2d B;
  B << Rv(0, 0) - p * Rv(2, 0), Rv(0, 1) - p * Rv(2, 1), Rv(1, 0) - q * Rv(2, 0),
    Rv(1, 1) - q * Rv(2, 1);
  const Eigen::Matrix2d A = B.inverse() * J;
  const double gamma = Eigen::JacobiSVD<Eigen::Matrix2d>(A).singularValues()(0);
  if (!(gamma > 0) || !A.allFinite()) {
    throw NoValidPose("degenerate homography");
  }
  const Eigen::Matrix2d Rt = A / gamma;
  double b0 = std::sqrt(std::max(0.0, 1.0 - Rt(0, 0) * Rt(0, 0) - Rt(1, 0) * Rt(1, 0)));
  double b1 = std::sqrt(std::max(0.0, 1.0 - Rt(0, 1) * Rt(0, 1) - Rt(1, 1) * Rt(1, 1)));
  if (-Rt(0, 0) * Rt(0, 1) - Rt(1, 0) * Rt(1, 1) < 0) {
    b1 = -b1;
  }
  // A = R_2x2 / t_z, and the largest singular value of the upper 2x2
  // block of a rotation is one, so the tag center sits at depth 1/gamma
  // on the ray through (p, q). Both candidates share this translation.
  const Vector3 t = Vector3(p, q, 1.0) / gamma;
  std::vector<Pose> result;
  for (const double sign : {1.0, -1.0}) {
    Matrix3 M;
    M.col(0) << Rt(0, 0), Rt(1, 0), sign * b0;
    M.col(1) << Rt(0, 1), Rt(1, 1), sign * b1;
    M.col(2) = M.col(0).cross(M.col(1));
    const Rotation R = Rotation::fromMatrix(Rv * M);
    if (t.z() > 0 && t.allFinite()) {
      result.emplace_back(R, t);
    }
  }
  if (result.empty()) {
    throw NoValidPose("no pose candidate with the tag in front of the camera");
  }
  return (result);
}

static bool residuals(
  const Intrinsics & k, const Corners & corners, const ObjectCorners & s, const Pose & T,
  Eigen::Matrix<double, 8, 1> * r, Eigen::Matrix<double, 8, 6> * J)
{
  const Matrix3 R = T.rotation().matrix();
  for (int c = 0; c < 4; c++) {
    const Vector3 x = T * s[c];
    if (!(x.z() > 1e-9)) {
      return (false);
    }
    Eigen::Matrix<double, 2, 3> P;
    r->segment<2>(2 * c) = project(k, x, J ? &P : nullptr) - corners[c];
    if (J) {
      J->block<2, 3>(2 * c, 0) = P * (-R * skew(s[c]));
      J->block<2, 3>(2 * c, 3) = P * R;
    }
  }
  return (true);
}

double reprojectionRms(
  const Intrinsics & k, const Corners & corners, double tagSize, const Pose & camTag)
{
  Eigen::Matrix<double, 8, 1> r;
  if (!residuals(k, corners, tagObjectCorners(tagSize), camTag, &r, nullptr)) {
    return (kInf);
  }
  return (std::sqrt(r.squaredNorm() / 4.0));
}

double refineTagPose(
  const Intrinsics & k, const Corners & corners, double tagSize, Pose * T, int maxIterations)
{
  const ObjectCorners s = tagObjectCorners(tagSize);
  Eigen::Matrix<double, 8, 1> r;
  Eigen::Matrix<double, 8, 6> J;
  if (!residuals(k, corners, s, *T, &r, &J)) {
    return (kInf);
  }
  double err = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < maxIterations && err > 1e-24; it++) {
    Matrix6 H = J.transpose() * J;
    H.diagonal() += lambda * H.diagonal().cwiseMax(1e-12);
    const Vector6 delta = H.ldlt().solve(-J.transpose() * r);
    const Pose cand = retract(*T, delta);
    Eigen::Matrix<double, 8, 1> rc;
    Eigen::Matrix<double, 8, 6> Jc;
    if (residuals(k, corners, s, cand, &rc, &Jc) && rc.squaredNorm() < err) {
      const double decrease = err - rc.squaredNorm();
      *T = cand;
      r = rc;
      J = Jc;
      err = rc.squaredNorm();
      lambda = std::max(lambda * 0.1, 1e-12);
      if (decrease < 1e-14 * err) {
        break;
      }
    } else {
      lambda *= 10;
      if (lambda > 1e10) {
        break;
      }
    }
  }
  return (std::sqrt(err / 4.0));
}

double viewAngleDeg(const Pose & camTag)
{
  const Vector3 n = camTag.rotation() * Vector3::UnitZ();
  const Vector3 ray = camTag.translation().normalized();
  const double c = std::min(1.0, std::abs(ray.dot(n)));
  return (std::acos(c) * 180.0 / M_PI);
}

static bool coincident(const Pose & a, const Pose & b)
{
  const double range = std::max(a.translation().norm(), 1e-9);
  return (
    (a.rotation().inverse() * b.rotation()).angle() < kCoincidentAngle &&
    (a.translation() - b.translation()).norm() < kCoincidentDistance * range);
}

AmbiguousPose ambiguityCheck(const Corners & corners, const Intrinsics & k, double tagSize)
{
  const ObjectCorners s = tagObjectCorners(tagSize);
  PlanePoints obj;
  PlanePoints img;
  for (int i = 0; i < 4; i++) {
    obj[i] = s[i].head<2>();
    img[i] = undistort(k, corners[i]);
  }
  const Matrix3 H = homographyFrom4Points(obj, img);
  std::vector<Pose> cand = poseCandidatesFromHomography(H);
  std::vector<double> err;
  for (auto & c : cand) {
    err.push_back(refineTagPose(k, corners, tagSize, &c));
  }
  AmbiguousPose a;
  if (cand.size() == 2 && err[1] < err[0]) {
    std::swap(cand[0], cand[1]);
    std::swap(err[0], err[1]);
  }
  if (!std::isfinite(err[0])) {
    throw NoValidPose("no refined pose keeps all corners in front of the camera");
  }
  a.best = cand[0];
  a.errBest = err[0];
  a.alternateValid = cand.size() == 2 && std::isfinite(err[1]) && !coincident(cand[0], cand[1]);
  if (a.alternateValid) {
    a.alternate = cand[1];
    a.errAlt = err[1];
    a.ratio = a.errAlt > 0 ? a.errBest / a.errAlt : 0.0;
  } else {
    a.alternate = cand[0];
    a.errAlt = kInf;
    a.ratio = 0;
  }
  a.viewAngle = viewAngleDeg(a.best);
  return (a);
}

bool isUnambiguous(
  const AmbiguousPose & a, AmbiguityRule rule, double ratioThreshold, double maxAngleDeg)
{
  const bool oblique = a.viewAngle >= maxAngleDeg;
  if (rule == AmbiguityRule::Literal) {
    return (!(a.ratio > ratioThreshold && !oblique));
  }
  return (oblique || a.ratio < 1.0 - ratioThreshold);
}

bool isUnambiguous(const AmbiguousPose & a, const Scene & scene)
{
  return (isUnambiguous(
    a, scene.ambiguityRule, scene.ambiguityRatioThreshold, scene.maxAmbiguousViewAngle));
}
}  // namespace fidslam
