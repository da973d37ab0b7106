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

#include <fidslam/errors.hpp>
#include <fidslam/factor.hpp>

namespace fidslam
{
std::string VariableKey::str() const
{
  switch (kind) {
    case VariableKind::CameraInRig:
      return ("camera:" + name);
    case VariableKind::TagInBody:
      return ("tag:" + std::to_string(id));
    case VariableKind::StaticBody:
      return ("body:" + name);
    case VariableKind::DynamicBody:
      return ("body:" + name + "@" + std::to_string(time));
  }
  return ("?");
}

std::string toString(FactorKind k)
{
  switch (k) {
    case FactorKind::AbsolutePrior:
      return ("absolute_prior");
    case FactorKind::RelativePrior:
      return ("relative_prior");
    case FactorKind::Projection:
      return ("tag_projection");
  }
  return ("?");
}

std::vector<VariableKey> Factor::keys() const
{
  switch (kind()) {
    case FactorKind::AbsolutePrior:
      return {std::get<AbsolutePosePrior>(data).target};
    case FactorKind::RelativePrior: {
      const auto & f = std::get<RelativePosePrior>(data);
      return {f.a, f.b};
    }
    case FactorKind::Projection: {
      const auto & f = std::get<TagProjection>(data);
      return {f.body, f.cam, f.tag, f.rig};
    }
  }
  return {};
}

int Factor::arity() const
{
  static const int a[3] = {1, 2, 4};
  return (a[data.index()]);
}

static Vector6 whiten(const Twist & d, const PoseNoise & n)
{
  return (d.cwiseQuotient(n.sigma));
}

Vector6 residualAbsolute(const AbsolutePosePrior & f, const Pose & T)
{
  return (whiten(ominus(T, f.mean), f.noise));
}

Vector6 residualRelative(const RelativePosePrior & f, const Pose & Ta, const Pose & Tb)
{
  return (whiten(ominus(Tb.inverse() * Ta, f.delta), f.noise));
}

Eigen::Matrix<double, 8, 1> residualProjection(
  const TagProjection & f, const Pose & wBody, const Pose & rigCam, const Pose & bodyTag,
  const Pose & wRig)
{
  Linearization lin;
  linearize(
    Factor{0, f, false}, {&wBody, &rigCam, &bodyTag, &wRig}, &lin, false);
  return (lin.r);
}

static void linearizeAbsolute(
  const AbsolutePosePrior & f, const Pose & T, Linearization * lin, bool withJ)
{
  const Pose rel = f.mean.inverse() * T;
  const Vector3 phi = rel.rotation().log();
  lin->r.head<6>() << phi, rel.translation();
  lin->r.head<6>() = lin->r.head<6>().cwiseQuotient(f.noise.sigma);
  if (withJ) {
    auto & J = lin->J[0];
    J.setZero();
    J.block<3, 3>(0, 0) = rightJacobianInverse(phi);
    J.block<3, 3>(3, 3) = rel.rotation().matrix();  // R0^T R
    J.topRows<6>() = f.noise.sigma.cwiseInverse().asDiagonal() * J.topRows<6>();
  }
}

static void linearizeRelative(
  const RelativePosePrior & f, const Pose & Ta, const Pose & Tb, Linearization * lin, bool withJ)
{
  const Pose M = Tb.inverse() * Ta;
  const Pose rel = f.delta.inverse() * M;
  const Vector3 phi = rel.rotation().log();
  lin->r.head<6>() << phi, rel.translation();
  lin->r.head<6>() = lin->r.head<6>().cwiseQuotient(f.noise.sigma);
  if (withJ) {
    const Matrix3 Jri = rightJacobianInverse(phi);
    const Matrix3 Rm = M.rotation().matrix();
    const Matrix3 RdT = f.delta.rotation().matrix().transpose();
    const auto W = f.noise.sigma.cwiseInverse().asDiagonal();
    auto & Ja = lin->J[0];
    Ja.setZero();
    Ja.block<3, 3>(0, 0) = Jri;
    Ja.block<3, 3>(3, 3) = RdT * Rm;
    Ja.topRows<6>() = W * Ja.topRows<6>();
    auto & Jb = lin->J[1];
    Jb.setZero();
    Jb.block<3, 3>(0, 0) = -Jri * Rm.transpose();
    Jb.block<3, 3>(3, 0) = RdT * skew(M.translation());
    Jb.block<3, 3>(3, 3) = -RdT;
    Jb.topRows<6>() = W * Jb.topRows<6>();
  }
}

// Corner chain: x = A^-1 B^-1 C D s with A = rig-from-camera,
// B = world-from-rig, C = world-from-body, D = body-from-tag.
static void linearizeProjection(
  const TagProjection & f, const Pose & C, const Pose & A, const Pose & D, const Pose & B,
  Linearization * lin, bool withJ)
{
  const ObjectCorners s = tagObjectCorners(f.tagSize);
  const Pose Ai = A.inverse();
  const Pose Bi = B.inverse();
  const Matrix3 RAt = Ai.rotation().matrix();
  const Matrix3 RBt = Bi.rotation().matrix();
  const Matrix3 RC = C.rotation().matrix();
  const Matrix3 RD = D.rotation().matrix();
  const Matrix3 RAtBt = RAt * RBt;
  const Matrix3 RAtBtC = RAtBt * RC;
  const double ws = 1.0 / f.sigma;
  if (withJ) {
    for (auto & J : lin->J) {
      J.setZero();
    }
  }
  for (int c = 0; c < 4; c++) {
    const Vector3 y = D * s[c];
    const Vector3 z = C * y;
    const Vector3 w = Bi * z;
    const Vector3 x = Ai * w;
    Eigen::Matrix<double, 2, 3> P;
    Vector2 u;
    try {
      u = project(f.intrinsics, x, withJ ? &P : nullptr);
    } catch (const PointBehindCamera &) {
      throw PointBehindCamera(
        "corner " + std::to_string(c + 1) + " of tag " + std::to_string(f.tagId) +
        " behind camera " + f.camera);
    }
    lin->r.segment<2>(2 * c) = (u - f.corners[c]) * ws;
    if (!withJ) {
      continue;
    }
    const Eigen::Matrix<double, 2, 3> Pw = P * ws;
    // body (C)
    lin->J[0].block<2, 3>(2 * c, 0) = Pw * (RAtBt * (-RC * skew(y)));
    lin->J[0].block<2, 3>(2 * c, 3) = Pw * RAtBtC;
    // camera (A)
    lin->J[1].block<2, 3>(2 * c, 0) = Pw * skew(x);
    lin->J[1].block<2, 3>(2 * c, 3) = -Pw;
    // tag (D)
    lin->J[2].block<2, 3>(2 * c, 0) = Pw * (RAtBtC * (-RD * skew(s[c])));
    lin->J[2].block<2, 3>(2 * c, 3) = Pw * (RAtBtC * RD);
    // rig (B)
    lin->J[3].block<2, 3>(2 * c, 0) = Pw * (RAt * skew(w));
    lin->J[3].block<2, 3>(2 * c, 3) = -Pw * RAt;
  }
}

void linearize(
  const Factor & f, const std::array<const Pose *, 4> & v, Linearization * lin,
  bool withJacobians)
{
  lin->dim = f.dim();
  lin->slots = f.arity();
  switch (f.kind()) {
    case FactorKind::AbsolutePrior:
      linearizeAbsolute(std::get<AbsolutePosePrior>(f.data), *v[0], lin, withJacobians);
      break;
    case FactorKind::RelativePrior:
      linearizeRelative(std::get<RelativePosePrior>(f.data), *v[0], *v[1], lin, withJacobians);
      break;
    case FactorKind::Projection:
      linearizeProjection(
        std::get<TagProjection>(f.data), *v[0], *v[1], *v[2], *v[3], lin, withJacobians);
      break;
  }
}
}  // namespace fidslam
