#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isobranch/continuation.hpp"
#include "isobranch/material.hpp"
#include "isobranch/mesh.hpp"

namespace isobranch {

struct GlobalMinReport {
  int samples = 0;
  double min_energy = 0.0;
  Mat3 argmin = Mat3::Identity();
  /// max |sigma_i - 1| over the singular values of argmin.
  double argmin_distance = 0.0;
  /// Samples with W below 1e-10 whose singular values are not all within 1e-6 of 1.
  int near_zero_off_so3 = 0;
  bool passed = false;
};

struct GlobalMinOptions {
  std::uint64_t seed = 1;
  double spread = 0.5;
  /// Every sample F is replaced by rotation * F.
  Mat3 rotation = Mat3::Identity();
  int workers = 1;
};

/// Random F in GL+ rescaled to det F = 1; W(F) >= W(I) = 0 is the property sampled.
GlobalMinReport global_min_probe(const MaterialModel& material, int n_samples, const GlobalMinOptions& options = {});

/**
 * w = grad(beta) x axis with beta = amplitude * prod (1 - s_i^2)^4 on a box,
 * s_i = (x_i - center_i) / half_width_i. Divergence-free for any constant axis,
 * and w vanishes with its first two derivatives on the box boundary.
 */
struct DivFreeField {
  Vec3 center = Vec3::Zero();
  Vec3 half_width = Vec3::Constant(0.4);
  Vec3 axis = Vec3::UnitZ();
  double amplitude = 0.1;

  bool in_support(const Vec3& x) const;
  Vec3 value(const Vec3& x) const;
  /// dw_i / dx_j
  Mat3 gradient(const Vec3& x) const;
  double divergence(const Vec3& x) const { return gradient(x).trace(); }
};

struct QuasiconvexityReport {
  double integral = 0.0;
  /// max |det(I + grad v) - 1| over quadrature points.
  double det_defect = 0.0;
  double tolerance = 0.0;
  int flow_steps = 0;
  int points = 0;
  bool passed = false;
};

/**
 * v = (time-1 flow map of w) - id, with grad v from the variational equation,
 * both by classical RK4. Integral of W(I + grad v) over the support box by
 * composite 3-point Gauss with cells_per_axis cells in each direction.
 * Throws DomainError if a trajectory leaves the domain.
 */
QuasiconvexityReport quasiconvexity_probe(const MaterialModel& material, const DivFreeField& field, int flow_steps,
                                          const Mesh& domain, int cells_per_axis = 6);

/// Order of the flow integrator.
inline constexpr int flow_integrator_order = 4;

/**
 * Convergence order of the det defect for fields of DivFreeField type. grad w = S H with S skew and
 * H symmetric, so tr((grad w)^5) = 0 and the leading RK4 error term of log det cancels.
 */
inline constexpr int det_defect_order = flow_integrator_order + 1;

struct FlowPoint {
  Vec3 x;
  /// Jacobian of the flow map at the start point.
  Mat3 phi;
};

/// Time-1 flow of w from x by flow_steps RK4 steps, with the variational equation alongside.
FlowPoint flow_map(const DivFreeField& field, const Vec3& x, int flow_steps);

struct UniquenessReport {
  int starts = 0;
  int converged = 0;
  int not_converged = 0;
  /// |u|_inf + |p|_inf of each converged solution, in start order.
  std::vector<double> solution_norms;
  double max_solution_norm = 0.0;
  bool hypotheses_certified = false;
  std::string label;
  bool passed = false;
};

struct UniquenessOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  Vec3 star_origin = Vec3::Zero();
};

/**
 * Newton on the zero-load problem from random starts with nodal |u| <= start_radius.
 * Passes when every converged solution is zero to 10x the Newton tolerance.
 */
UniquenessReport uniqueness_probe(const MaterialModel& material, const Discretization& disc, int n_starts,
                                  double start_radius, const ContinuationSettings& newton,
                                  const UniquenessOptions& options = {});

}  // namespace isobranch
