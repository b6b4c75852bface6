#include "isobranch/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/SparseLU>

#include "isobranch/errors.hpp"

namespace isobranch {

// ---------------------------------------------------------------- load program

Mat3 LoadProgram::boundary_map(double lambda) const
{
  Mat3 a = Mat3::Identity();
  switch (boundary) {
  case BoundaryFamily::Identity:
    break;
  case BoundaryFamily::Shear:
    a(0, 1) = boundary_rate * lambda;
    break;
  case BoundaryFamily::IsochoricStretch: {
    const double s = std::exp(boundary_rate * lambda);
    a(0, 0) = s;
    a(1, 1) = a(2, 2) = 1.0 / std::sqrt(s);
    break;
  }
  }
  return a;
}

Mat3 LoadProgram::boundary_map_rate(double lambda) const
{
  Mat3 a = Mat3::Zero();
  switch (boundary) {
  case BoundaryFamily::Identity:
    break;
  case BoundaryFamily::Shear:
    a(0, 1) = boundary_rate;
    break;
  case BoundaryFamily::IsochoricStretch: {
    const double s = std::exp(boundary_rate * lambda);
    a(0, 0) = boundary_rate * s;
    a(1, 1) = a(2, 2) = -0.5 * boundary_rate / std::sqrt(s);
    break;
  }
  }
  return a;
}

Vec3 LoadProgram::force(double lambda, const Mat3& grad_u, const Vec3& u, const Vec3& x) const
{
  switch (body_force) {
  case BodyForceKind::None:
    return Vec3::Zero();
  case BodyForceKind::Dead:
    return lambda * force_scale * (1.0 + profile.dot(x)) * direction;
  case BodyForceKind::LiveCentering:
    return lambda * force_scale * ((boundary_map(lambda) - Mat3::Identity()) * x + u);
  case BodyForceKind::LiveGradient:
    return lambda * force_scale * ((boundary_map(lambda) + grad_u - Mat3::Identity()) * direction);
  }
  return Vec3::Zero();
}

Vec3 LoadProgram::force_rate(double lambda, const Mat3& grad_u, const Vec3& u, const Vec3& x) const
{
  switch (body_force) {
  case BodyForceKind::None:
    return Vec3::Zero();
  case BodyForceKind::Dead:
    return force_scale * (1.0 + profile.dot(x)) * direction;
  case BodyForceKind::LiveCentering:
    return force_scale * ((boundary_map(lambda) - Mat3::Identity()) * x + u) +
           lambda * force_scale * (boundary_map_rate(lambda) * x);
  case BodyForceKind::LiveGradient:
    return force_scale * ((boundary_map(lambda) + grad_u - Mat3::Identity()) * direction) +
           lambda * force_scale * (boundary_map_rate(lambda) * direction);
  }
  return Vec3::Zero();
}

Mat3 LoadProgram::force_du(double lambda) const
{
  if (body_force == BodyForceKind::LiveCentering)
    return lambda * force_scale * Mat3::Identity();
  return Mat3::Zero();
}

double LoadProgram::force_gradient_factor(double lambda) const
{
  return body_force == BodyForceKind::LiveGradient ? lambda * force_scale : 0.0;
}

// -------------------------------------------------------------- discretization

Discretization::Discretization(Mesh mesh) : mesh_(std::move(mesh))
{
  dofs_.u_base.assign(mesh_.q2_nodes.size(), -1);
  for (std::size_t n = 0; n < mesh_.q2_nodes.size(); ++n)
    if (!mesh_.q2_on_boundary[n]) {
      dofs_.u_base[n] = dofs_.n_u;
      dofs_.n_u += 3;
    }
  dofs_.p_dof.resize(mesh_.vertices.size());
  for (std::size_t v = 0; v < mesh_.vertices.size(); ++v)
    dofs_.p_dof[v] = dofs_.n_u + dofs_.n_p++;

  const auto& ref = shape::volume_points();
  std::array<std::array<Vec3, 27>, 27> ref_grads{};
  for (int q = 0; q < 27; ++q) {
    for (int a = 0; a < 27; ++a)
      ref_grads[q][a] = shape::q2_gradient(a, ref[q]);
    for (int b = 0; b < 8; ++b)
      q1_values_[q][b] = shape::q1_value(b, ref[q]);
  }
  grads_.resize(static_cast<std::size_t>(mesh_.num_elements()) * 27);
  for (int e = 0; e < mesh_.num_elements(); ++e)
    for (int q = 0; q < 27; ++q) {
      const Mat3 jinv_t = mesh_.quadrature[e].jacobian[q].inverse().transpose();
      for (int a = 0; a < 27; ++a)
        grads_[index(e, q)][a] = jinv_t * ref_grads[q][a];
    }
}

State Discretization::zero_state(double lambda) const
{
  State s;
  s.lambda = lambda;
  s.u_size = dofs_.n_u;
  s.p_size = dofs_.n_p;
  s.w = VectorX::Zero(dofs_.size());
  return s;
}

Vec3 Discretization::nodal_displacement(const State& state, int node) const
{
  const int base = dofs_.u_base[static_cast<std::size_t>(node)];
  if (base < 0)
    return Vec3::Zero();
  return state.w.segment<3>(base);
}

double Discretization::vertex_pressure(const State& state, int vertex) const
{
  return state.w(dofs_.p_dof[static_cast<std::size_t>(vertex)]);
}

namespace {

// Q2 shape values at the 27 Gauss points, [q][a].
const std::array<std::array<double, 27>, 27>& q2_point_values()
{
  static const auto table = [] {
    std::array<std::array<double, 27>, 27> t{};
    const auto& ref = shape::volume_points();
    for (int q = 0; q < 27; ++q)
      for (int a = 0; a < 27; ++a)
        t[q][a] = shape::q2_value(a, ref[q]);
    return t;
  }();
  return table;
}

struct LocalState {
  std::array<Vec3, 27> u{};
  std::array<double, 8> p{};
  double multiplier = 0.0;
};

LocalState gather(const Discretization& disc, const State& state, int e)
{
  const Mesh& mesh = disc.mesh();
  const DofMap& dofs = disc.dofs();
  LocalState local;
  const auto& cell = mesh.q2_cells[static_cast<std::size_t>(e)];
  for (int a = 0; a < 27; ++a) {
    const int base = dofs.u_base[static_cast<std::size_t>(cell[a])];
    local.u[a] = base < 0 ? Vec3::Zero() : Vec3(state.w.segment<3>(base));
  }
  const auto& hex = mesh.hexes[static_cast<std::size_t>(e)];
  for (int b = 0; b < 8; ++b)
    local.p[b] = state.w(dofs.p_dof[static_cast<std::size_t>(hex[b])]);
  local.multiplier = state.w(dofs.multiplier());
  return local;
}

struct PointValues {
  Vec3 u;
  Mat3 grad_u;
  double p;
};

PointValues point_values(const Discretization& disc, const LocalState& local, int e, int q)
{
  const auto& grads = disc.q2_gradients(e, q);
  const auto& vals = q2_point_values()[static_cast<std::size_t>(q)];
  PointValues pv{Vec3::Zero(), Mat3::Zero(), 0.0};
  for (int a = 0; a < 27; ++a) {
    pv.u += vals[a] * local.u[a];
    pv.grad_u += local.u[a] * grads[a].transpose();
  }
  const auto& pvals = disc.q1_values(q);
  for (int b = 0; b < 8; ++b)
    pv.p += pvals[b] * local.p[b];
  return pv;
}

Mat3 checked_deformation(const Mat3& a, const Mat3& grad_u, int e, double lambda)
{
  const Mat3 f = a + grad_u;
  const double j = det3(f);
  if (!(j > 0.0))
    throw InvertedElementError(e, lambda, j);
  return f;
}

// Element-local dof indices (-1 for eliminated boundary dofs).
struct ElementDofs {
  std::array<int, 81> u{};
  std::array<int, 8> p{};
};

ElementDofs element_dofs(const Discretization& disc, int e)
{
  ElementDofs d;
  const auto& cell = disc.mesh().q2_cells[static_cast<std::size_t>(e)];
  for (int a = 0; a < 27; ++a) {
    const int base = disc.dofs().u_base[static_cast<std::size_t>(cell[a])];
    for (int i = 0; i < 3; ++i)
      d.u[3 * a + i] = base < 0 ? -1 : base + i;
  }
  const auto& hex = disc.mesh().hexes[static_cast<std::size_t>(e)];
  for (int b = 0; b < 8; ++b)
    d.p[b] = disc.dofs().p_dof[static_cast<std::size_t>(hex[b])];
  return d;
}

// Runs body(worker, e) over all elements split into contiguous chunks.
template <typename Body>
void for_elements(const Discretization& disc, int workers, Body&& body)
{
  const int n = disc.mesh().num_elements();
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int e = 0; e < n; ++e)
      body(0, e);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const int begin = n * w / workers, end = n * (w + 1) / workers;
        try {
          for (int e = begin; e < end; ++e)
            body(w, e);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& err : errors)
    if (err)
      std::rethrow_exception(err);
}

using Triplet = Eigen::Triplet<double>;

// Element matrix contributions for the tangent T (momentum-momentum), the
// cofactor coupling and the lower-order body-force terms.
struct TangentInputs {
  Tensor4 tangent;
  Mat3 cofactor;
  Mat3 force_du = Mat3::Zero();
  double force_grad = 0.0;
};

void add_element_matrix(const Discretization& disc, int e, const ElementDofs& dofs,
                        const std::function<TangentInputs(int q)>& inputs_at, const Vec3& direction,
                        std::vector<Triplet>& out)
{
  std::array<double, 81 * 81> kuu{};
  std::array<double, 81 * 8> kup{};
  std::array<double, 8 * 81> kpu{};
  std::array<double, 8> border{};
  const auto& quad = disc.mesh().quadrature[static_cast<std::size_t>(e)];

  for (int q = 0; q < 27; ++q) {
    const double jxw = quad.jxw[q];
    const auto& grads = disc.q2_gradients(e, q);
    const auto& vals = q2_point_values()[static_cast<std::size_t>(q)];
    const auto& pvals = disc.q1_values(q);
    const TangentInputs in = inputs_at(q);

    // g[a][i][k][l] = sum_j dN_a/dx_j T_ijkl
    std::array<double, 27 * 27> g{};
    for (int a = 0; a < 27; ++a)
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            double s = 0.0;
            for (int j = 0; j < 3; ++j)
              s += grads[a](j) * in.tangent(i, j, k, l);
            g[a * 27 + i * 9 + k * 3 + l] = s;
          }
    for (int a = 0; a < 27; ++a)
      for (int c = 0; c < 27; ++c) {
        const Vec3& gc = grads[c];
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) {
            const double* ga = &g[a * 27 + i * 9 + k * 3];
            kuu[(3 * a + i) * 81 + 3 * c + k] += jxw * (ga[0] * gc(0) + ga[1] * gc(1) + ga[2] * gc(2));
          }
      }

    if (in.force_grad != 0.0 || in.force_du != Mat3::Zero()) {
      for (int a = 0; a < 27; ++a)
        for (int c = 0; c < 27; ++c) {
          const double gdir = direction.dot(grads[c]);
          for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
              double v = in.force_du(i, k) * vals[c];
              if (i == k)
                v += in.force_grad * gdir;
              kuu[(3 * a + i) * 81 + 3 * c + k] -= jxw * vals[a] * v;
            }
        }
    }

    for (int a = 0; a < 27; ++a) {
      const Vec3 cg = in.cofactor * grads[a];  // (Cof F)_ij dN_a/dx_j
      for (int i = 0; i < 3; ++i)
        for (int d = 0; d < 8; ++d) {
          const double v = jxw * cg(i) * pvals[d];
          kup[(3 * a + i) * 8 + d] -= v;
          kpu[d * 81 + 3 * a + i] += v;
        }
    }
    for (int d = 0; d < 8; ++d)
      border[d] += jxw * pvals[d];
  }

  const int mult = disc.dofs().multiplier();
  for (int r = 0; r < 81; ++r) {
    if (dofs.u[r] < 0)
      continue;
    for (int c = 0; c < 81; ++c)
      if (dofs.u[c] >= 0)
        out.emplace_back(dofs.u[r], dofs.u[c], kuu[r * 81 + c]);
    for (int d = 0; d < 8; ++d)
      out.emplace_back(dofs.u[r], dofs.p[d], kup[r * 8 + d]);
  }
  for (int d = 0; d < 8; ++d) {
    for (int c = 0; c < 81; ++c)
      if (dofs.u[c] >= 0)
        out.emplace_back(dofs.p[d], dofs.u[c], kpu[d * 81 + c]);
    out.emplace_back(dofs.p[d], mult, border[d]);
    out.emplace_back(mult, dofs.p[d], border[d]);
  }
}

SparseMatrix from_worker_triplets(int n, std::vector<std::vector<Triplet>>& per_worker)
{
  std::size_t total = 0;
  for (const auto& t : per_worker)
    total += t.size();
  std::vector<Triplet> all;
  all.reserve(total);
  for (auto& t : per_worker)
    all.insert(all.end(), t.begin(), t.end());
  SparseMatrix m(n, n);
  m.setFromTriplets(all.begin(), all.end());
  m.makeCompressed();
  return m;
}

VectorX sum_worker_vectors(std::vector<VectorX>& per_worker)
{
  VectorX out = per_worker.front();
  for (std::size_t w = 1; w < per_worker.size(); ++w)
    out += per_worker[w];
  return out;
}

}  // namespace

void Discretization::visit_quadrature(const State& state,
                                      const std::function<void(const QuadratureSample&)>& visit) const
{
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const LocalState local = gather(*this, state, e);
    const auto& quad = mesh_.quadrature[static_cast<std::size_t>(e)];
    for (int q = 0; q < 27; ++q) {
      const PointValues pv = point_values(*this, local, e, q);
      visit(QuadratureSample{e, q, quad.points[q], quad.jxw[q], pv.u, pv.grad_u, pv.p});
    }
  }
}

std::vector<Mat3> deformation_gradients(const Discretization& disc, const LoadProgram& program, const State& state)
{
  std::vector<Mat3> out;
  out.reserve(static_cast<std::size_t>(disc.mesh().num_elements()) * 27);
  const Mat3 a = program.boundary_map(state.lambda);
  disc.visit_quadrature(state, [&](const QuadratureSample& s) { out.push_back(a + s.grad_u); });
  return out;
}

VectorX residual(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                 const State& state)
{
  const int n = disc.dofs().size();
  const int workers = std::max(1, std::min(disc.workers(), disc.mesh().num_elements()));
  std::vector<VectorX> acc(static_cast<std::size_t>(workers), VectorX::Zero(n));
  const Mat3 a = program.boundary_map(state.lambda);
  const int mult = disc.dofs().multiplier();

  for_elements(disc, workers, [&](int w, int e) {
    VectorX& r = acc[static_cast<std::size_t>(w)];
    const LocalState local = gather(disc, state, e);
    const ElementDofs dofs = element_dofs(disc, e);
    const auto& quad = disc.mesh().quadrature[static_cast<std::size_t>(e)];
    for (int q = 0; q < 27; ++q) {
      const PointValues pv = point_values(disc, local, e, q);
      const Mat3 f = checked_deformation(a, pv.grad_u, e, state.lambda);
      const Mat3 cf = cof(f);
      const Mat3 stress = material.stress(f) - pv.p * cf;
      const Vec3 b = program.force(state.lambda, pv.grad_u, pv.u, quad.points[q]);
      const double jxw = quad.jxw[q];
      const auto& grads = disc.q2_gradients(e, q);
      const auto& vals = q2_point_values()[static_cast<std::size_t>(q)];
      for (int node = 0; node < 27; ++node) {
        if (dofs.u[3 * node] < 0)
          continue;
        const Vec3 row = jxw * (stress * grads[node] - vals[node] * b);
        for (int i = 0; i < 3; ++i)
          r(dofs.u[3 * node + i]) += row(i);
      }
      const auto& pvals = disc.q1_values(q);
      const double constraint = det3(f) - 1.0 + local.multiplier;
      for (int d = 0; d < 8; ++d)
        r(dofs.p[d]) += jxw * pvals[d] * constraint;
      r(mult) += jxw * pv.p;
    }
  });
  return sum_worker_vectors(acc);
}

SparseMatrix jacobian(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                      const State& state)
{
  const int workers = std::max(1, std::min(disc.workers(), disc.mesh().num_elements()));
  std::vector<std::vector<Triplet>> trip(static_cast<std::size_t>(workers));
  const Mat3 a = program.boundary_map(state.lambda);
  const Mat3 force_du = program.force_du(state.lambda);
  const double force_grad = program.force_gradient_factor(state.lambda);

  for_elements(disc, workers, [&](int w, int e) {
    const LocalState local = gather(disc, state, e);
    const ElementDofs dofs = element_dofs(disc, e);
    add_element_matrix(
        disc, e, dofs,
        [&](int q) {
          const PointValues pv = point_values(disc, local, e, q);
          const Mat3 f = checked_deformation(a, pv.grad_u, e, state.lambda);
          TangentInputs in;
          in.tangent = material.elasticity(f);
          in.tangent -= pv.p * dcof(f);
          in.cofactor = cof(f);
          in.force_du = force_du;
          in.force_grad = force_grad;
          return in;
        },
        program.direction, trip[static_cast<std::size_t>(w)]);
  });
  return from_worker_triplets(disc.dofs().size(), trip);
}

VectorX lambda_derivative(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                          const State& state)
{
  const int n = disc.dofs().size();
  const int workers = std::max(1, std::min(disc.workers(), disc.mesh().num_elements()));
  std::vector<VectorX> acc(static_cast<std::size_t>(workers), VectorX::Zero(n));
  const Mat3 a = program.boundary_map(state.lambda);
  const Mat3 a_rate = program.boundary_map_rate(state.lambda);

  for_elements(disc, workers, [&](int w, int e) {
    VectorX& r = acc[static_cast<std::size_t>(w)];
    const LocalState local = gather(disc, state, e);
    const ElementDofs dofs = element_dofs(disc, e);
    const auto& quad = disc.mesh().quadrature[static_cast<std::size_t>(e)];
    for (int q = 0; q < 27; ++q) {
      const PointValues pv = point_values(disc, local, e, q);
      const Mat3 f = checked_deformation(a, pv.grad_u, e, state.lambda);
      const Mat3 cf = cof(f);
      Tensor4 tangent = material.elasticity(f);
      tangent -= pv.p * dcof(f);
      const Mat3 stress_rate = apply4(tangent, a_rate);
      const Vec3 b_rate = program.force_rate(state.lambda, pv.grad_u, pv.u, quad.points[q]);
      const double jxw = quad.jxw[q];
      const auto& grads = disc.q2_gradients(e, q);
      const auto& vals = q2_point_values()[static_cast<std::size_t>(q)];
      for (int node = 0; node < 27; ++node) {
        if (dofs.u[3 * node] < 0)
          continue;
        const Vec3 row = jxw * (stress_rate * grads[node] - vals[node] * b_rate);
        for (int i = 0; i < 3; ++i)
          r(dofs.u[3 * node + i]) += row(i);
      }
      const auto& pvals = disc.q1_values(q);
      const double constraint_rate = ddot(cf, a_rate);
      for (int d = 0; d < 8; ++d)
        r(dofs.p[d]) += jxw * pvals[d] * constraint_rate;
    }
  });
  return sum_worker_vectors(acc);
}

SparseMatrix homotopy_operator(double mu, const Discretization& disc, const MaterialModel& material)
{
  if (mu < 0.0 || mu > 1.0)
    throw std::invalid_argument("homotopy_operator: mu must lie in [0, 1]");
  TangentInputs in;
  in.tangent = mu * Tensor4::identity() + (1.0 - mu) * material.elasticity(Mat3::Identity());
  in.cofactor = Mat3::Identity();

  const int workers = std::max(1, std::min(disc.workers(), disc.mesh().num_elements()));
  std::vector<std::vector<Triplet>> trip(static_cast<std::size_t>(workers));
  for_elements(disc, workers, [&](int w, int e) {
    add_element_matrix(
        disc, e, element_dofs(disc, e), [&in](int) { return in; }, Vec3::Zero(), trip[static_cast<std::size_t>(w)]);
  });
  return from_worker_triplets(disc.dofs().size(), trip);
}

VectorX assemble_load(const Discretization& disc, const std::function<Vec3(const Vec3&)>& tau)
{
  VectorX r = VectorX::Zero(disc.dofs().size());
  for (int e = 0; e < disc.mesh().num_elements(); ++e) {
    const ElementDofs dofs = element_dofs(disc, e);
    const auto& quad = disc.mesh().quadrature[static_cast<std::size_t>(e)];
    for (int q = 0; q < 27; ++q) {
      const Vec3 t = quad.jxw[q] * tau(quad.points[q]);
      const auto& vals = q2_point_values()[static_cast<std::size_t>(q)];
      for (int node = 0; node < 27; ++node) {
        if (dofs.u[3 * node] < 0)
          continue;
        for (int i = 0; i < 3; ++i)
          r(dofs.u[3 * node + i]) += vals[node] * t(i);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------- solver

namespace {

// Exposes the supernodal L store, whose diagonal holds the U pivots.
class PivotLU : public Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> {
public:
  template <typename Visit>
  void visit_pivots(Visit&& visit) const
  {
    for (Eigen::Index j = 0; j < this->cols(); ++j)
      for (typename SCMatrix::InnerIterator it(m_Lstore, j); it; ++it)
        if (it.index() == j) {
          visit(j, it.value());
          break;
        }
  }
};

}  // namespace

struct BorderedSolver::Impl {
  PivotLU lu;
};

BorderedSolver::BorderedSolver() : impl_(std::make_unique<Impl>()) {}
BorderedSolver::~BorderedSolver() = default;
BorderedSolver::BorderedSolver(BorderedSolver&&) noexcept = default;
BorderedSolver& BorderedSolver::operator=(BorderedSolver&&) noexcept = default;

void BorderedSolver::factorize(const SparseMatrix& matrix)
{
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("BorderedSolver: matrix must be square");
  auto& lu = impl_->lu;
  lu.analyzePattern(matrix);
  lu.factorize(matrix);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("sparse LU failed: " + lu.lastErrorMessage(), -1);

  min_pivot_ = std::numeric_limits<double>::infinity();
  max_pivot_ = 0.0;
  min_pivot_index_ = -1;
  lu.visit_pivots([this](Eigen::Index j, double v) {
    const double m = std::abs(v);
    if (m < min_pivot_) {
      min_pivot_ = m;
      min_pivot_index_ = static_cast<long>(j);
    }
    max_pivot_ = std::max(max_pivot_, m);
  });
  if (!(min_pivot_ > 1e-13 * max_pivot_)) {
    std::ostringstream os;
    os << "singular matrix: pivot " << min_pivot_ << " at elimination step " << min_pivot_index_
       << " (largest pivot " << max_pivot_ << ")";
    det_sign_ = 0;
    throw SingularMatrixError(os.str(), min_pivot_index_);
  }
  det_sign_ = lu.signDeterminant() > 0 ? 1 : -1;
}

VectorX BorderedSolver::solve(const VectorX& rhs) const
{
  VectorX x = impl_->lu.solve(rhs);
  return x;
}

SolveResult solve_bordered(const SparseMatrix& matrix, const VectorX& rhs)
{
  BorderedSolver solver;
  solver.factorize(matrix);
  SolveResult result;
  result.solution = solver.solve(rhs);
  result.min_pivot = solver.min_pivot();
  result.max_pivot = solver.max_pivot();
  result.det_sign = solver.det_sign();
  return result;
}

}  // namespace isobranch
