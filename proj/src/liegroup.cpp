#include "rollctl/liegroup.hpp"

#include <cmath>
#include <numbers>

namespace rollctl {

namespace {
constexpr double kSkewTolerance = 1e-9;
constexpr double kSmallAngle = 1e-8;
constexpr double kCutLocusMargin = 1e-6;
}  // namespace

Rotation Rotation::from_matrix(const Mat3& m) {
  Rotation r(m, Unchecked{});
  if (!m.allFinite() || r.orthogonality_defect() > kTolerance) {
    throw Error("not a rotation matrix");
  }
  return r;
}

double Rotation::orthogonality_defect() const {
  const double ortho = (m_.transpose() * m_ - Mat3::Identity()).norm();
  const double det = std::abs(m_.determinant() - 1.0);
  return std::max(ortho, det);
}

Mat3 hat(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<  0.0,  -v.z(),  v.y(),
        v.z(),  0.0,  -v.x(),
       -v.y(),  v.x(),  0.0;
  // clang-format on
  return s;
}

Vec3 vee(const Mat3& s) {
  if ((s + s.transpose()).norm() > kSkewTolerance) {
    throw Error("not antisymmetric");
  }
  // Exact on hat(v); for slightly non-skew input, average both halves.
  if (s(2, 1) == -s(1, 2) && s(0, 2) == -s(2, 0) && s(1, 0) == -s(0, 1)) {
    return {s(2, 1), s(0, 2), s(1, 0)};
  }
  return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const Mat3 k = hat(v);
  double a, b;
  if (theta < kSmallAngle) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rotation(Mat3::Identity() + a * k + b * k * k, Rotation::Unchecked{});
}

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 axis2(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * axis2.norm();
  const double c = 0.5 * (m.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta >= std::numbers::pi - kCutLocusMargin) {
    throw Error("log near cut locus");
  }
  if (theta < kSmallAngle) {
    return 0.5 * (1.0 + theta * theta / 6.0) * axis2;
  }
  return (0.5 * theta / std::sin(theta)) * axis2;
}

Rotation project_so3(const Mat3& a) {
  if (!a.allFinite() || a.determinant() <= 0.0) {
    throw Error("non-orientable input");
  }
  Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3& sigma = svd.singularValues();
  if (sigma(2) <= 1e-12 * sigma(0)) {
    throw Error("non-orientable input");
  }
  return Rotation(svd.matrixU() * svd.matrixV().transpose(),
                  Rotation::Unchecked{});
}

Rotation elem_rot(int axis, double angle) {
  if (axis < 1 || axis > 3) {
    throw Error("axis must be 1, 2 or 3");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m = Mat3::Identity();
  const int i = axis % 3;        // next axis
  const int j = (axis + 1) % 3;  // the one after
  m(i, i) = c;
  m(j, j) = c;
  m(i, j) = -s;
  m(j, i) = s;
  return Rotation(m, Rotation::Unchecked{});
}

Vec3 unit(int axis) {
  if (axis < 1 || axis > 3) {
    throw Error("axis must be 1, 2 or 3");
  }
  return Vec3::Unit(axis - 1);
}

}  // namespace rollctl
