#include "isobranch/ellipticity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace isobranch {

namespace {

void require_unit(const Vec3& m, const char* op)
{
  if (std::abs(m.norm() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(op) + ": direction must be a unit vector");
}

// Orthonormal pair spanning the plane orthogonal to n (n nonzero).
void plane_basis(const Vec3& n, Vec3& e1, Vec3& e2)
{
  const Vec3 u = n.normalized();
  Vec3 t = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (t - t.dot(u) * u).normalized();
  e2 = u.cross(e1);
}

struct Candidate {
  double value;
  Vec3 a;
};

// Minimum of a^T Q(c) a over unit a orthogonal to (Cof F) c.
Candidate constrained_min(const Tensor4& c, const Mat3& cof_f, const Vec3& dir)
{
  const Mat3 q = acoustic(c, dir);
  const Mat3 qs = 0.5 * (q + q.transpose());
  Vec3 e1, e2;
  plane_basis(cof_f * dir, e1, e2);
  const double m11 = e1.dot(qs * e1);
  const double m12 = e1.dot(qs * e2);
  const double m22 = e2.dot(qs * e2);
  const double mean = 0.5 * (m11 + m22);
  const double rad = std::hypot(0.5 * (m11 - m22), m12);
  const double lo = mean - rad;
  // eigenvector of [[m11, m12], [m12, m22]] for lo
  Vec3 a;
  if (rad == 0.0) {
    a = e1;
  } else if (std::abs(m12) > std::abs(m11 - lo)) {
    a = (lo - m22) * e1 + m12 * e2;
  } else {
    a = m12 * e1 + (lo - m11) * e2;
  }
  if (a.norm() == 0.0)
    a = e1;
  return {lo, a.normalized()};
}

}  // namespace

std::vector<Vec3> sphere_points(int n)
{
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

Mat3 acoustic(const Tensor4& c, const Vec3& m)
{
  require_unit(m, "acoustic");
  Mat3 q = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          s += c(i, j, k, l) * m(j) * m(l);
      q(i, k) = s;
    }
  return q;
}

EllipticityReport se_margin(const Tensor4& c, const Mat3& f, int n_samples, int refine_steps)
{
  if (n_samples < 100)
    throw std::invalid_argument("se_margin: n_samples must be >= 100");
  const Mat3 cof_f = cof(f);

  EllipticityReport report;
  report.samples = n_samples;
  report.min_margin = std::numeric_limits<double>::infinity();
  Vec3 best_dir = Vec3::UnitZ();
  for (const Vec3& dir : sphere_points(n_samples)) {
    const Candidate cand = constrained_min(c, cof_f, dir);
    if (cand.value < report.min_margin) {
      report.min_margin = cand.value;
      report.argmin_a = cand.a;
      best_dir = dir;
    }
  }

  // compass search on the sphere around the best sample
  double step = std::sqrt(4.0 * std::numbers::pi / n_samples);
  for (int it = 0; it < refine_steps; ++it) {
    Vec3 e1, e2;
    plane_basis(best_dir, e1, e2);
    bool improved = false;
    for (const Vec3& t : {e1, Vec3(-e1), e2, Vec3(-e2)}) {
      const Vec3 trial = (best_dir + step * t).normalized();
      const Candidate cand = constrained_min(c, cof_f, trial);
      if (cand.value < report.min_margin) {
        report.min_margin = cand.value;
        report.argmin_a = cand.a;
        best_dir = trial;
        improved = true;
      }
    }
    if (!improved)
      step *= 0.5;
    report.refined = true;
  }
  report.argmin_c = best_dir;
  return report;
}

double unconstrained_rayleigh_min(const Tensor4& c, int n_samples)
{
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& dir : sphere_points(n_samples)) {
    const Mat3 q = acoustic(c, dir);
    const Mat3 qs = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> eig(qs, Eigen::EigenvaluesOnly);
    best = std::min(best, eig.eigenvalues()(0));
  }
  return best;
}

Eigen::Matrix4d adn_matrix(const Tensor4& c, const Mat3& f, const Vec3& m)
{
  require_unit(m, "adn_det");
  const Mat3 q = acoustic(c, m);
  const Vec3 m_hat = cof(f) * m;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a.topLeftCorner<3, 3>() = q;
  a.block<3, 1>(0, 3) = -m_hat;
  a.block<1, 3>(3, 0) = m_hat.transpose();
  return a;
}

double adn_det(const Tensor4& c, const Mat3& f, const Vec3& m)
{
  return adn_matrix(c, f, m).determinant();
}

double adn_min_abs(const Tensor4& c, const Mat3& f, int n_samples)
{
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& m : sphere_points(n_samples))
    best = std::min(best, std::abs(adn_det(c, f, m)));
  return best;
}

EllipticityReport audit_state(const MaterialModel& material, std::span<const Mat3> field, const AuditBudget& budget)
{
  return audit_state([&material](const Mat3& f) { return material.elasticity(f); }, field, budget);
}

EllipticityReport audit_state(const ElasticityFunction& elasticity, std::span<const Mat3> field,
                              const AuditBudget& budget)
{
  if (field.empty())
    throw std::invalid_argument("empty field");

  EllipticityReport worst;
  worst.min_margin = std::numeric_limits<double>::infinity();
  worst.min_adn_abs = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < field.size(); ++n) {
    const Mat3& f = field[n];
    const Tensor4 c = elasticity(f);
    const EllipticityReport point = se_margin(c, f, budget.se_samples, budget.refine_steps);
    const double adn = adn_min_abs(c, f, budget.adn_samples);
    if (point.min_margin < worst.min_margin) {
      worst.min_margin = point.min_margin;
      worst.argmin_a = point.argmin_a;
      worst.argmin_c = point.argmin_c;
      worst.worst_margin_point = static_cast<int>(n);
    }
    if (adn < worst.min_adn_abs) {
      worst.min_adn_abs = adn;
      worst.worst_adn_point = static_cast<int>(n);
    }
    if (point.min_margin <= 0.0)
      worst.flagged_points.push_back(static_cast<int>(n));
  }
  worst.samples = budget.se_samples;
  worst.refined = budget.refine_steps > 0;
  worst.note = "complementing condition assumed (strong ellipticity with Dirichlet data)";
  return worst;
}

}  // namespace isobranch
