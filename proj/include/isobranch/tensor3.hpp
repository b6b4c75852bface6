#pragma once

#include <array>

#include <Eigen/Dense>

namespace isobranch {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/**
 * Dense fourth-order tensor on R^3, indexed C(i,j,k,l).
 *
 * The action on a second-order tensor contracts the last index pair:
 * (C[H])_ij = sum_kl C_ijkl H_kl.
 */
class Tensor4 {
public:
  Tensor4() { data_.fill(0.0); }

  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  const std::array<double, 81>& data() const { return data_; }

  /// I_ijkl = delta_ik delta_jl, so that I[H] = H.
  static Tensor4 identity();
  static Tensor4 zero() { return Tensor4(); }

  Tensor4& operator+=(const Tensor4& other);
  Tensor4& operator-=(const Tensor4& other);
  Tensor4& operator*=(double s);

  /// max |C_ijkl - C_klij|
  double major_asymmetry() const;
  double max_abs() const;

private:
  static constexpr int index(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

  std::array<double, 81> data_;
};

Tensor4 operator+(Tensor4 a, const Tensor4& b);
Tensor4 operator-(Tensor4 a, const Tensor4& b);
Tensor4 operator*(double s, Tensor4 a);

double det3(const Mat3& m);

/// Cofactor matrix from the 2x2 minor table; defined for singular matrices too.
Mat3 cof(const Mat3& m);

/// Exact derivative of the cofactor map, D_ijkl = d(Cof F)_ij / dF_kl.
Tensor4 dcof(const Mat3& f);

Mat3 apply4(const Tensor4& c, const Mat3& h);

/// Frobenius inner product A . B = tr(A B^T).
inline double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

/// Levi-Civita symbol on {0,1,2}.
constexpr double levi_civita(int i, int j, int k)
{
  return 0.5 * (i - j) * (j - k) * (k - i);
}

}  // namespace isobranch
