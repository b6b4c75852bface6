#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isobranch/material.hpp"
#include "isobranch/tensor3.hpp"

namespace isobranch {

struct EllipticityReport {
  /// Minimum of (a x c) . C[a x c] over unit a, c with a . (Cof F) c = 0.
  double min_margin = 0.0;
  Vec3 argmin_a = Vec3::Zero();
  Vec3 argmin_c = Vec3::Zero();
  int samples = 0;
  bool refined = false;

  /// Filled by audit_state only.
  double min_adn_abs = 0.0;
  int worst_margin_point = -1;
  int worst_adn_point = -1;
  std::vector<int> flagged_points;  // points with min_margin <= 0
  std::string note;
};

struct AuditBudget {
  int se_samples = 1024;
  int refine_steps = 20;
  int adn_samples = 1024;
};

/// Q(m) a = C[a x m] m, i.e. Q_ik = sum_jl C_ijkl m_j m_l.
Mat3 acoustic(const Tensor4& c, const Vec3& m);

EllipticityReport se_margin(const Tensor4& c, const Mat3& f, int n_samples, int refine_steps = 20);

/// min over the same c samples of the smallest eigenvalue of sym Q(c), with no constraint on a.
double unconstrained_rayleigh_min(const Tensor4& c, int n_samples);

/// [[Q(F; m), -m_hat], [m_hat^T, 0]] with m_hat = (Cof F) m.
Eigen::Matrix4d adn_matrix(const Tensor4& c, const Mat3& f, const Vec3& m);
double adn_det(const Tensor4& c, const Mat3& f, const Vec3& m);

/// min over n_samples directions m of |adn_det|.
double adn_min_abs(const Tensor4& c, const Mat3& f, int n_samples);

using ElasticityFunction = std::function<Tensor4(const Mat3&)>;

/// Worst-case strong-ellipticity margin and |ADN det| over a field of deformation gradients.
EllipticityReport audit_state(const MaterialModel& material, std::span<const Mat3> field, const AuditBudget& budget = {});
EllipticityReport audit_state(const ElasticityFunction& elasticity, std::span<const Mat3> field,
                              const AuditBudget& budget = {});

/// Deterministic near-uniform points on S^2 (Fibonacci lattice).
std::vector<Vec3> sphere_points(int n);

}  // namespace isobranch
