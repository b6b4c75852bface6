#include "isobranch/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isobranch/errors.hpp"

namespace isobranch {

namespace {

void require_glplus(const Mat3& f, const char* op)
{
  const double d = det3(f);
  if (!(d > 0.0)) {
    std::ostringstream os;
    os << op << ": det F = " << d << " is not positive";
    throw DomainError(os.str());
  }
}

}  // namespace

double solve_stress_free_k(MaterialKind kind, double c1, double c2)
{
  // d|F|^2/dF = 2F, d|Cof F|^2/dF = 2 D(F)^T[Cof F] which is 4I at F = I,
  // d det/dF = Cof F which is I at F = I.
  if (kind == MaterialKind::NeoHookean)
    return 2.0 * c1;
  return 2.0 * c1 + 4.0 * c2;
}

MaterialModel::MaterialModel(MaterialKind kind, double c1, double c2)
    : kind_(kind), c1_(c1), c2_(c2), k_(solve_stress_free_k(kind, c1, c2))
{
}

MaterialModel MaterialModel::neo_hookean(double mu)
{
  if (!(mu > 0.0))
    throw std::invalid_argument("neo-Hookean modulus mu must be positive");
  return MaterialModel(MaterialKind::NeoHookean, 0.5 * mu, 0.0);
}

MaterialModel MaterialModel::mooney_rivlin(double c1, double c2)
{
  if (c1 < 0.0 || c2 < 0.0 || !(c1 + c2 > 0.0))
    throw std::invalid_argument("Mooney-Rivlin requires c1, c2 >= 0 and c1 + c2 > 0");
  return MaterialModel(MaterialKind::MooneyRivlin, c1, c2);
}

std::string MaterialModel::name() const
{
  return kind_ == MaterialKind::NeoHookean ? "neo-hookean" : "mooney-rivlin";
}

double MaterialModel::energy(const Mat3& f) const
{
  require_glplus(f, "energy");
  const double j = det3(f);
  double w = c1_ * (f.squaredNorm() - 3.0) - k_ * (j - 1.0);
  if (c2_ != 0.0)
    w += c2_ * (cof(f).squaredNorm() - 3.0);
  return w;
}

Mat3 MaterialModel::stress(const Mat3& f) const
{
  require_glplus(f, "stress");
  const Mat3 cf = cof(f);
  Mat3 s = 2.0 * c1_ * f - k_ * cf;
  if (c2_ != 0.0) {
    const Tensor4 d = dcof(f);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            acc += cf(i, j) * d(i, j, k, l);
        s(k, l) += 2.0 * c2_ * acc;
      }
  }
  return s;
}

Tensor4 MaterialModel::elasticity(const Mat3& f) const
{
  require_glplus(f, "elasticity");
  const Tensor4 d = dcof(f);
  Tensor4 c = (2.0 * c1_) * Tensor4::identity();
  c -= k_ * d;
  if (c2_ != 0.0) {
    const Mat3 cf = cof(f);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) {
            double acc = 0.0;
            for (int i = 0; i < 3; ++i)
              for (int j = 0; j < 3; ++j)
                acc += d(i, j, k, l) * d(i, j, m, n) + cf(i, j) * levi_civita(i, k, m) * levi_civita(j, l, n);
            c(k, l, m, n) += 2.0 * c2_ * acc;
          }
  }
  return c;
}

Mat3 random_rotation(std::mt19937_64& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng));
  } while (q.norm() < 1e-8);
  q.normalize();
  return q.toRotationMatrix();
}

Mat3 random_glplus(std::mt19937_64& rng, double spread)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat3 f;
  do {
    f = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        f(i, j) += spread * normal(rng);
  } while (det3(f) <= 0.1);
  return f;
}

ObjectivityReport verify_objectivity(const EnergyFunction& energy, int trials, std::uint64_t seed)
{
  if (trials < 1)
    throw std::invalid_argument("verify_objectivity: trials must be >= 1");
  std::mt19937_64 rng(seed);
  ObjectivityReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Mat3 q = random_rotation(rng);
    const Mat3 f = random_glplus(rng);
    report.max_deviation = std::max(report.max_deviation, std::abs(energy(q * f) - energy(f)));
  }
  report.passed = report.max_deviation < 1e-10;
  return report;
}

ObjectivityReport verify_objectivity(const MaterialModel& m, int trials, std::uint64_t seed)
{
  return verify_objectivity([&m](const Mat3& f) { return m.energy(f); }, trials, seed);
}

}  // namespace isobranch
