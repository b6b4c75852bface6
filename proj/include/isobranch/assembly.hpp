#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "isobranch/material.hpp"
#include "isobranch/mesh.hpp"
#include "isobranch/parity.hpp"

namespace isobranch {

using SparseMatrix = Eigen::SparseMatrix<double>;

/**
 * Unknown layout [u | p | mean-pressure multiplier].
 *
 * Q2 displacement dofs on nodes off the boundary (u = 0 on the boundary is
 * built in), Q1 pressure dofs on every vertex, and one multiplier enforcing
 * zero mean pressure.
 */
struct DofMap {
  int n_u = 0;
  int n_p = 0;
  std::vector<int> u_base;  // per Q2 node: first of 3 dofs, -1 on the boundary
  std::vector<int> p_dof;   // per vertex

  int multiplier() const { return n_u + n_p; }
  int size() const { return n_u + n_p + 1; }
};

struct State {
  double lambda = 0.0;
  VectorX w;
  int u_size = 0;
  int p_size = 0;

  auto displacement() const { return w.segment(0, u_size); }
  auto pressure() const { return w.segment(u_size, p_size); }
  double multiplier() const { return w(u_size + p_size); }
};

enum class BoundaryFamily { Identity, Shear, IsochoricStretch };
enum class BodyForceKind { None, Dead, LiveCentering, LiveGradient };

/**
 * Boundary placement A(lambda) with det A = 1 and A(0) = I, and a body force
 * b(lambda, grad u, u, x) vanishing at lambda = 0.
 *   dead            b = lambda c (1 + k . x) g
 *   live-centering  b = lambda c (f(x) - x),       f(x) = A x + u(x)
 *   live-gradient   b = lambda c (grad f - I) g
 */
struct LoadProgram {
  BoundaryFamily boundary = BoundaryFamily::Identity;
  double boundary_rate = 1.0;
  BodyForceKind body_force = BodyForceKind::None;
  double force_scale = 1.0;
  Vec3 direction = Vec3::UnitZ();
  /// Magnitude gradient k of the dead load. k = 0 is a pure gradient field, absorbed entirely by the pressure.
  Vec3 profile = Vec3::Zero();

  Mat3 boundary_map(double lambda) const;
  Mat3 boundary_map_rate(double lambda) const;

  Vec3 force(double lambda, const Mat3& grad_u, const Vec3& u, const Vec3& x) const;
  /// Total d b / d lambda including the dependence through A(lambda).
  Vec3 force_rate(double lambda, const Mat3& grad_u, const Vec3& u, const Vec3& x) const;
  /// d b / du (a 3x3 matrix) and d b / d(grad u)[H] = force_gradient_factor * H g.
  Mat3 force_du(double lambda) const;
  double force_gradient_factor(double lambda) const;

  bool displacement_independent() const
  {
    return body_force == BodyForceKind::None || body_force == BodyForceKind::Dead;
  }
};

struct QuadratureSample {
  int element;
  int point;
  Vec3 x;
  double jxw;
  Vec3 u;
  Mat3 grad_u;
  double p;
};

class Discretization {
public:
  explicit Discretization(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }

  /// Element loops run on this many threads. 1 gives bitwise-reproducible results.
  void set_workers(int workers) { workers_ = workers < 1 ? 1 : workers; }
  int workers() const { return workers_; }

  State zero_state(double lambda = 0.0) const;

  /// Physical gradients of the 27 Q2 shape functions at Gauss point q of element e.
  const std::array<Vec3, 27>& q2_gradients(int e, int q) const { return grads_[index(e, q)]; }
  const std::array<double, 27>& q2_values() const { return q2_values_; }
  const std::array<double, 8>& q1_values(int q) const { return q1_values_[static_cast<std::size_t>(q)]; }

  void visit_quadrature(const State& state, const std::function<void(const QuadratureSample&)>& visit) const;

  /// Displacement at a Q2 node (zero on the boundary).
  Vec3 nodal_displacement(const State& state, int node) const;
  double vertex_pressure(const State& state, int vertex) const;

private:
  std::size_t index(int e, int q) const { return static_cast<std::size_t>(e) * 27 + static_cast<std::size_t>(q); }

  Mesh mesh_;
  DofMap dofs_;
  std::vector<std::array<Vec3, 27>> grads_;
  std::array<double, 27> q2_values_{};
  std::array<std::array<double, 8>, 27> q1_values_{};
  int workers_ = 1;
};

/// Deformation gradients A(lambda) + grad u at every quadrature point, element-major.
std::vector<Mat3> deformation_gradients(const Discretization& disc, const LoadProgram& program, const State& state);

VectorX residual(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                 const State& state);

SparseMatrix jacobian(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                      const State& state);

/// d residual / d lambda at fixed w.
VectorX lambda_derivative(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                          const State& state);

/**
 * Linear operator at the origin with tangent mu I + (1 - mu) C(I).
 * mu = 1 is the discrete Stokes operator, mu = 0 the Jacobian at (0, 0).
 */
SparseMatrix homotopy_operator(double mu, const Discretization& disc, const MaterialModel& material);

/// Load vector int tau . v over the displacement dofs.
VectorX assemble_load(const Discretization& disc, const std::function<Vec3(const Vec3&)>& tau);

/// Direct sparse LU with pivot and determinant-sign reporting.
class BorderedSolver {
public:
  BorderedSolver();
  ~BorderedSolver();
  BorderedSolver(BorderedSolver&&) noexcept;
  BorderedSolver& operator=(BorderedSolver&&) noexcept;

  /// Throws SingularMatrixError when the smallest pivot is negligible.
  void factorize(const SparseMatrix& matrix);
  VectorX solve(const VectorX& rhs) const;

  double min_pivot() const { return min_pivot_; }
  double max_pivot() const { return max_pivot_; }
  long min_pivot_index() const { return min_pivot_index_; }
  int det_sign() const { return det_sign_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double min_pivot_ = 0.0;
  double max_pivot_ = 0.0;
  long min_pivot_index_ = -1;
  int det_sign_ = 0;
};

struct SolveResult {
  VectorX solution;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
  int det_sign = 0;
};

SolveResult solve_bordered(const SparseMatrix& matrix, const VectorX& rhs);

}  // namespace isobranch
