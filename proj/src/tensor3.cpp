#include "isobranch/tensor3.hpp"

#include <algorithm>
#include <cmath>

namespace isobranch {

Tensor4 Tensor4::identity()
{
  Tensor4 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j, i, j) = 1.0;
  return t;
}

Tensor4& Tensor4::operator+=(const Tensor4& other)
{
  for (std::size_t n = 0; n < data_.size(); ++n)
    data_[n] += other.data_[n];
  return *this;
}

Tensor4& Tensor4::operator-=(const Tensor4& other)
{
  for (std::size_t n = 0; n < data_.size(); ++n)
    data_[n] -= other.data_[n];
  return *this;
}

Tensor4& Tensor4::operator*=(double s)
{
  for (double& v : data_)
    v *= s;
  return *this;
}

double Tensor4::major_asymmetry() const
{
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          worst = std::max(worst, std::abs((*this)(i, j, k, l) - (*this)(k, l, i, j)));
  return worst;
}

double Tensor4::max_abs() const
{
  double worst = 0.0;
  for (double v : data_)
    worst = std::max(worst, std::abs(v));
  return worst;
}

Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
Tensor4 operator*(double s, Tensor4 a) { return a *= s; }

double det3(const Mat3& m)
{
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat3 cof(const Mat3& m)
{
  Mat3 c;
  c(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  c(0, 1) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  c(0, 2) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  c(1, 0) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  c(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  c(1, 2) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  c(2, 0) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  c(2, 1) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  c(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return c;
}

// Cof_ij = 1/2 e_imn e_jpq F_mp F_nq, hence dCof_ij/dF_kl = e_ikn e_jlq F_nq.
Tensor4 dcof(const Mat3& f)
{
  Tensor4 d;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      if (i == k)
        continue;
      const int n = 3 - i - k;
      const double eikn = levi_civita(i, k, n);
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          if (j == l)
            continue;
          const int q = 3 - j - l;
          d(i, j, k, l) = eikn * levi_civita(j, l, q) * f(n, q);
        }
    }
  return d;
}

Mat3 apply4(const Tensor4& c, const Mat3& h)
{
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += c(i, j, k, l) * h(k, l);
      out(i, j) = s;
    }
  return out;
}

}  // namespace isobranch
