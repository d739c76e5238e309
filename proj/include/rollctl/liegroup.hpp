#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rollctl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Library-wide error type. Messages are short and stable so that callers
/// (and tests) can match on them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element of SO(3). Construction through from_matrix() validates
/// orthogonality and orientation; the factory functions below (exp_so3,
/// elem_rot, project_so3) produce valid rotations by construction.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-12;

  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws Error if ||R^T R - I|| or |det R - 1| exceeds kTolerance.
  static Rotation from_matrix(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

  Rotation operator*(const Rotation& other) const {
    return Rotation(m_ * other.m_, Unchecked{});
  }
  // Accepts any 3-row expression; the result has the operand's column count.
  template <class D>
  Eigen::Matrix<double, 3, D::ColsAtCompileTime> operator*(
      const Eigen::MatrixBase<D>& m) const {
    return m_ * m;
  }

  double operator()(int i, int j) const { return m_(i, j); }

  /// Largest of ||R^T R - I||_F and |det R - 1|.
  double orthogonality_defect() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  friend Rotation exp_so3(const Vec3& v);
  friend Rotation project_so3(const Mat3& a);
  friend Rotation elem_rot(int axis, double angle);

  Mat3 m_;
};

/// Cross-product matrix: hat(v) * w == v.cross(w).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws Error("not antisymmetric") if ||S + S^T|| > 1e-9.
Vec3 vee(const Mat3& s);

/// Rodrigues formula; second-order Taylor expansion below |v| = 1e-8.
Rotation exp_so3(const Vec3& v);

/// Principal logarithm. Throws Error("log near cut locus") once the rotation
/// angle reaches pi - 1e-6.
Vec3 log_so3(const Rotation& r);

/// Orthogonal polar factor of a (nearest rotation in Frobenius norm).
/// Throws Error("non-orientable input") for det a <= 0 or collapsed
/// singular values.
Rotation project_so3(const Mat3& a);

/// Rotation by `angle` radians about inertial axis 1, 2 or 3.
Rotation elem_rot(int axis, double angle);

/// Unit basis vector e_axis, axis in {1,2,3}.
Vec3 unit(int axis);

}  // namespace rollctl
