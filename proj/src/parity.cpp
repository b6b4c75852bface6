#include "isobranch/parity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "isobranch/errors.hpp"

namespace isobranch {

int regular_det_sign(const MatrixX& a, double rel_tol)
{
  if (a.rows() != a.cols())
    throw std::invalid_argument("determinant sign of a non-square matrix");
  if (a.rows() == 0)
    return 1;
  double hadamard = 1.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    hadamard *= a.col(j).norm();
  const double det = a.partialPivLu().determinant();
  if (!(std::abs(det) > rel_tol * hadamard)) {
    std::ostringstream os;
    os << "numerically singular matrix (|det| = " << std::abs(det) << ", Hadamard bound " << hadamard << ")";
    throw SingularMatrixError(os.str(), -1);
  }
  return det > 0.0 ? 1 : -1;
}

int ls_index(const MatrixX& kappa)
{
  if (kappa.rows() != kappa.cols())
    throw std::invalid_argument("ls_index: kappa must be square");
  const Eigen::Index n = kappa.rows();
  const MatrixX shifted = MatrixX::Identity(n, n) - kappa;
  const int det_sign = regular_det_sign(shifted);
  if (n == 0)
    return 1;

  Eigen::EigenSolver<MatrixX> eig(kappa, false);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("ls_index: eigenvalue solve failed");
  const double imag_tol = 1e-8 * kappa.norm();
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto lambda = eig.eigenvalues()(i);
    if (std::abs(lambda.imag()) <= imag_tol && lambda.real() > 1.0)
      ++count;
  }
  const int index = (count % 2 == 0) ? 1 : -1;
  if (index != det_sign)
    throw std::logic_error("ls_index: eigenvalue count disagrees with sign(det(I - kappa))");
  return index;
}

int parity_of_path(const OperatorPath& path)
{
  const MatrixX t0 = path.evaluate(0.0);
  const MatrixX t1 = path.evaluate(1.0);
  try {
    return regular_det_sign(t0) * regular_det_sign(t1);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("parity_of_path: singular endpoint: ") + e.what(), -1);
  }
}

int parity_via_parametrix(const OperatorPath& path, const Parametrix& parametrix)
{
  int parity = 1;
  for (double t : {0.0, 1.0}) {
    const MatrixX n = parametrix(t);
    regular_det_sign(n);
    const MatrixX tt = path.evaluate(t);
    const MatrixX kappa = MatrixX::Identity(tt.rows(), tt.cols()) - n * tt;
    parity *= ls_index(kappa);
  }
  return parity;
}

bool Box::contains(const VectorX& x, double margin) const
{
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < lower(i) - margin || x(i) > upper(i) + margin)
      return false;
  return true;
}

namespace {

bool newton_solve(const SmoothMap& g, const VectorX& y, VectorX& w, const Box& region, const DegreeOptions& options)
{
  const VectorX span = region.upper - region.lower;
  for (int it = 0; it < options.newton_iterations; ++it) {
    const VectorX r = g.value(w) - y;
    if (r.norm() < options.newton_tolerance)
      return true;
    const MatrixX dg = g.jacobian(w);
    Eigen::FullPivLU<MatrixX> lu(dg);
    if (!lu.isInvertible())
      return false;
    w -= lu.solve(r);
    if (!w.allFinite() || !region.contains(w, span.maxCoeff()))
      return false;
  }
  return (g.value(w) - y).norm() < options.newton_tolerance * 1e3;
}

}  // namespace

DegreeResult basepoint_degree(const SmoothMap& g, const Box& region, const VectorX& base_point, const VectorX& y,
                              const DegreeOptions& options)
{
  const int n = g.dimension;
  if (base_point.size() != n || y.size() != n || region.lower.size() != n || region.upper.size() != n)
    throw std::invalid_argument("basepoint_degree: dimension mismatch");
  const MatrixX dg_base = g.jacobian(base_point);
  regular_det_sign(dg_base);

  std::vector<VectorX> roots;
  const int per_axis = options.starts_per_axis;
  long total = 1;
  for (int i = 0; i < n; ++i)
    total *= per_axis;
  const double boundary_tol = 1e-9 * (region.upper - region.lower).maxCoeff();
  for (long s = 0; s < total; ++s) {
    VectorX w(n);
    long rest = s;
    for (int i = 0; i < n; ++i) {
      const long idx = rest % per_axis;
      rest /= per_axis;
      w(i) = region.lower(i) + (idx + 0.5) / per_axis * (region.upper(i) - region.lower(i));
    }
    if (!newton_solve(g, y, w, region, options))
      continue;
    if (!region.contains(w, boundary_tol))
      continue;
    if (!region.contains(w, -boundary_tol))
      throw RegularValueError("basepoint_degree: solution on the region boundary");
    const bool seen =
        std::any_of(roots.begin(), roots.end(), [&](const VectorX& r) { return (r - w).norm() < options.dedup_radius; });
    if (!seen)
      roots.push_back(w);
  }
  std::sort(roots.begin(), roots.end(), [](const VectorX& a, const VectorX& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });

  DegreeResult result;
  for (const VectorX& w : roots) {
    const MatrixX dg = g.jacobian(w);
    try {
      regular_det_sign(dg, options.regular_tolerance);
    } catch (const SingularMatrixError&) {
      throw RegularValueError("basepoint_degree: y is not a regular value (singular DG at a solution)");
    }
    OperatorPath path{[&g, &base_point, &w](double t) { return g.jacobian((1.0 - t) * base_point + t * w); }, n};
    result.parities.push_back(parity_of_path(path));
    result.solutions.push_back(w);
  }
  for (int s : result.parities)
    result.base_point_degree += s;
  result.absolute_degree = absolute_degree(result);
  return result;
}

int absolute_degree(const DegreeResult& result)
{
  return std::abs(result.base_point_degree);
}

}  // namespace isobranch
