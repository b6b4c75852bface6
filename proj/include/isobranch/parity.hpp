#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace isobranch {

using MatrixX = Eigen::MatrixXd;
using VectorX = Eigen::VectorXd;

/// Continuous family t in [0,1] -> square matrix of fixed dimension.
struct OperatorPath {
  std::function<MatrixX(double)> evaluate;
  int dimension = 0;
};

using Parametrix = std::function<MatrixX(double)>;

struct DegreeResult {
  int base_point_degree = 0;
  int absolute_degree = 0;
  std::vector<int> parities;  // sigma_j, one per solution
  std::vector<VectorX> solutions;
};

/// Leray-Schauder index (-1)^d of I - kappa, d = #{real eigenvalues of kappa > 1}.
int ls_index(const MatrixX& kappa);

/// Product of determinant signs at the two endpoints.
int parity_of_path(const OperatorPath& path);

/// Product of ls_index(I - N(t) T(t)) at the endpoints.
int parity_via_parametrix(const OperatorPath& path, const Parametrix& parametrix);

/// Sign of det, throwing SingularMatrixError when |det| is negligible
/// relative to the Hadamard bound (product of column norms).
int regular_det_sign(const MatrixX& a, double rel_tol = 1e-12);

struct SmoothMap {
  int dimension = 0;
  std::function<VectorX(const VectorX&)> value;
  std::function<MatrixX(const VectorX&)> jacobian;
};

struct Box {
  VectorX lower;
  VectorX upper;

  bool contains(const VectorX& x, double margin = 0.0) const;
};

struct DegreeOptions {
  int starts_per_axis = 16;
  int newton_iterations = 50;
  double newton_tolerance = 1e-13;
  double dedup_radius = 1e-6;
  double regular_tolerance = 1e-10;
};

/**
 * Base-point degree of G on a box: sum of parities sigma_j along straight
 * parameter paths from DG(p) to DG(w_j) over all solutions of G(w) = y.
 * Solutions come from multi-start Newton on a uniform grid of starts.
 */
DegreeResult basepoint_degree(const SmoothMap& g, const Box& region, const VectorX& base_point, const VectorX& y,
                              const DegreeOptions& options = {});

int absolute_degree(const DegreeResult& result);

}  // namespace isobranch
