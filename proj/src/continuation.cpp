#include "isobranch/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "isobranch/errors.hpp"

namespace isobranch {

void ContinuationSettings::validate() const
{
  auto fail = [](const std::string& what) { throw std::invalid_argument("continuation settings: " + what); };
  if (!(ds_min > 0.0))
    fail("ds_min must be positive");
  if (!(ds_min <= ds0))
    fail("ds0 must be at least ds_min");
  if (!(ds0 <= ds_max))
    fail("ds0 must not exceed ds_max");
  if (!(tolerance > 0.0))
    fail("tolerance must be positive");
  if (max_iterations < 1)
    fail("max_iterations must be at least 1");
  if (max_steps < 1)
    fail("max_steps must be at least 1");
  if (budget.se_samples < 100)
    fail("se_samples must be at least 100");
  if (budget.adn_samples < 1 || budget.refine_steps < 0 || budget.point_stride < 1 || budget.injectivity_points < 0)
    fail("monitor budget out of range");
}

namespace {

[[noreturn]] void not_converged(const char* where, int iterations, double residual)
{
  std::ostringstream os;
  os << where << ": no convergence after " << iterations << " iterations (residual " << residual << ")";
  throw ConvergenceError(os.str(), residual);
}

void check_finite(const char* where, int iterations, double residual)
{
  if (!std::isfinite(residual))
    not_converged(where, iterations, residual);
}

// [[J, col], [row^T, corner]]
SparseMatrix augment(const SparseMatrix& j, const VectorX& col, const VectorX& row, double corner)
{
  const Eigen::Index n = j.rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(j.nonZeros() + 2 * n + 1));
  for (int k = 0; k < j.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(j, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (col(i) != 0.0)
      t.emplace_back(static_cast<int>(i), static_cast<int>(n), col(i));
    if (row(i) != 0.0)
      t.emplace_back(static_cast<int>(n), static_cast<int>(i), row(i));
  }
  t.emplace_back(static_cast<int>(n), static_cast<int>(n), corner);
  SparseMatrix m(n + 1, n + 1);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

VectorX solve_or_fail(const SparseMatrix& m, const VectorX& rhs, const char* where, double residual)
{
  BorderedSolver solver;
  try {
    solver.factorize(m);
  } catch (const SingularMatrixError& e) {
    throw ConvergenceError(std::string(where) + ": " + e.what(), residual);
  }
  return solver.solve(rhs);
}

}  // namespace

NewtonResult newton_correct(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                            const State& initial, const ContinuationSettings& settings)
{
  NewtonResult out;
  out.state = initial;
  for (int it = 0;; ++it) {
    const VectorX r = residual(disc, material, program, out.state);
    const double norm = r.norm();
    out.residuals.push_back(norm);
    check_finite("newton", it, norm);
    if (norm <= settings.tolerance) {
      out.iterations = it;
      return out;
    }
    if (it == settings.max_iterations)
      not_converged("newton", it, norm);
    out.state.w -= solve_or_fail(jacobian(disc, material, program, out.state), r, "newton", norm);
  }
}

NewtonResult newton_correct(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                            const State& initial, const ArclengthConstraint& c, const ContinuationSettings& settings)
{
  NewtonResult out;
  out.state = initial;
  const Eigen::Index n = initial.w.size();
  const VectorX row = c.theta * c.theta * c.tangent_w;
  for (int it = 0;; ++it) {
    const VectorX r = residual(disc, material, program, out.state);
    const double g = row.dot(out.state.w - c.anchor_w) + c.tangent_lambda * (out.state.lambda - c.anchor_lambda) - c.ds;
    const double norm = std::sqrt(r.squaredNorm() + g * g);
    out.residuals.push_back(norm);
    check_finite("arclength newton", it, norm);
    if (norm <= settings.tolerance) {
      out.iterations = it;
      return out;
    }
    if (it == settings.max_iterations)
      not_converged("arclength newton", it, norm);
    const SparseMatrix j = jacobian(disc, material, program, out.state);
    const VectorX rl = lambda_derivative(disc, material, program, out.state);
    VectorX rhs(n + 1);
    rhs << r, g;
    const VectorX d = solve_or_fail(augment(j, rl, row, c.tangent_lambda), rhs, "arclength newton", norm);
    out.state.w -= d.head(n);
    out.state.lambda -= d(n);
  }
}

BranchRecord evaluate_record(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                             const State& state, const MonitorBudget& budget, int newton_iters, double ds)
{
  BranchRecord rec;
  rec.lambda = state.lambda;
  rec.newton_iters = newton_iters;
  rec.ds = ds;

  const Mesh& mesh = disc.mesh();
  for (std::size_t node = 0; node < mesh.q2_nodes.size(); ++node)
    rec.norm_u_inf = std::max(rec.norm_u_inf, disc.nodal_displacement(state, static_cast<int>(node)).norm());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    rec.norm_p_inf = std::max(rec.norm_p_inf, std::abs(disc.vertex_pressure(state, static_cast<int>(v))));

  const Mat3 a = program.boundary_map(state.lambda);
  std::vector<Mat3> audited;
  rec.min_det = std::numeric_limits<double>::infinity();
  rec.max_det = -std::numeric_limits<double>::infinity();
  long index = 0;
  disc.visit_quadrature(state, [&](const QuadratureSample& s) {
    const Mat3 f = a + s.grad_u;
    const double d = det3(f);
    rec.min_det = std::min(rec.min_det, d);
    rec.max_det = std::max(rec.max_det, d);
    rec.max_det_dev = std::max(rec.max_det_dev, std::abs(d - 1.0));
    rec.norm_gradu_inf = std::max(rec.norm_gradu_inf, s.grad_u.norm());
    if (index++ % budget.point_stride == 0)
      audited.push_back(f);
  });

  const auto audit = audit_state(material, audited, AuditBudget{budget.se_samples, budget.refine_steps, budget.adn_samples});
  rec.se_margin = audit.min_margin;
  rec.adn_min_abs = audit.min_adn_abs;

  BorderedSolver solver;
  try {
    solver.factorize(jacobian(disc, material, program, state));
    rec.jac_det_sign = solver.det_sign();
  } catch (const SingularMatrixError&) {
    rec.jac_det_sign = 0;
  }
  return rec;
}

InjectivityReport injectivity_monitor(const Discretization& disc, const LoadProgram& program, const State& state,
                                      int sample_points)
{
  InjectivityReport rep;
  const Mat3 a = program.boundary_map(state.lambda);
  rep.min_det = std::numeric_limits<double>::infinity();
  disc.visit_quadrature(state, [&](const QuadratureSample& s) {
    const double d = det3(a + s.grad_u);
    if (d < rep.min_det) {
      rep.min_det = d;
      rep.element = s.element;
      rep.point = s.point;
    }
  });
  rep.orientation_preserved = rep.min_det > 0.0;

  if (sample_points > 0) {
    const Mesh& mesh = disc.mesh();
    // vertex -> coincident Q2 node
    std::vector<int> q2_of_vertex(mesh.vertices.size(), -1);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (int b = 0; b < 8; ++b) {
        const auto o = shape::q1_offset(b);
        q2_of_vertex[static_cast<std::size_t>(mesh.hexes[e][b])] = mesh.q2_cells[e][2 * o[0] + 6 * o[1] + 18 * o[2]];
      }
    const int nv = static_cast<int>(mesh.vertices.size());
    const int stride = std::max(1, nv / sample_points);
    std::vector<Vec3> x, fx;
    for (int v = 0; v < nv && static_cast<int>(x.size()) < sample_points; v += stride) {
      x.push_back(mesh.vertices[v]);
      fx.push_back(a * mesh.vertices[v] + disc.nodal_displacement(state, q2_of_vertex[v]));
    }
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        rep.min_pair_ratio = std::min(rep.min_pair_ratio, (fx[i] - fx[j]).norm() / (x[i] - x[j]).norm());
        ++rep.pairs_checked;
      }
  }
  rep.passed = rep.orientation_preserved && (rep.pairs_checked == 0 || rep.min_pair_ratio > 1e-12);
  return rep;
}

double incompressibility_monitor(const Discretization& disc, const LoadProgram& program, const State& state)
{
  const Mat3 a = program.boundary_map(state.lambda);
  double dev = 0.0;
  disc.visit_quadrature(state,
                        [&](const QuadratureSample& s) { dev = std::max(dev, std::abs(det3(a + s.grad_u) - 1.0)); });
  return dev;
}

std::vector<ParityEvent> parity_tracker(const std::vector<BranchRecord>& records)
{
  std::vector<ParityEvent> events;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const int s0 = records[i].jac_det_sign, s1 = records[i + 1].jac_det_sign;
    if (s0 * s1 < 0)
      events.push_back({records[i].lambda, records[i + 1].lambda, s0, s1, "possible singular point"});
  }
  return events;
}

const char* to_string(BranchStatus status)
{
  switch (status) {
  case BranchStatus::Completed:
    return "completed";
  case BranchStatus::Stalled:
    return "stalled";
  case BranchStatus::Inverted:
    return "inverted";
  }
  return "unknown";
}

BranchResult trace_branch(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                          const ContinuationSettings& settings, const RecordSink& sink)
{
  settings.validate();
  if (settings.lambda_target == 0.0)
    throw std::invalid_argument("trace_branch: lambda_target must be nonzero");
  const double target = settings.lambda_target;
  const double dir = target > 0.0 ? 1.0 : -1.0;

  BranchResult result;
  auto accept = [&](const NewtonResult& nr, double ds) {
    const BranchRecord rec = evaluate_record(disc, material, program, nr.state, settings.budget, nr.iterations, ds);
    result.records.push_back(rec);
    if (settings.keep_states)
      result.states.push_back(nr.state);
    if (sink)
      sink(rec, nr.state);
  };

  NewtonResult origin = newton_correct(disc, material, program, disc.zero_state(0.0), settings);
  accept(origin, 0.0);
  State cur = origin.state;
  std::optional<State> prev;

  double ds = settings.ds0;
  bool last_inverted = false;
  std::string last_error;
  int accepted = 0, attempts = 0;

  auto reached = [&] { return dir * (cur.lambda - target) >= -1e-14 * std::abs(target); };

  // initial tangent dw/dlambda from J t = -R_lambda at the origin
  auto first_tangent = [&] {
    BorderedSolver solver;
    solver.factorize(jacobian(disc, material, program, cur));
    return VectorX(-solver.solve(lambda_derivative(disc, material, program, cur)));
  };

  auto natural_step = [&](double lambda_new) {
    State guess = cur;
    guess.lambda = lambda_new;
    const double dl = lambda_new - cur.lambda;
    if (prev) {
      const double span = cur.lambda - prev->lambda;
      if (span != 0.0)
        guess.w += (dl / span) * (cur.w - prev->w);
    } else {
      guess.w += dl * first_tangent();
    }
    return newton_correct(disc, material, program, guess, settings);
  };

  while (!reached()) {
    if (accepted >= settings.max_steps || attempts >= 20 * settings.max_steps) {
      result.status = BranchStatus::Stalled;
      result.failure_lambda = cur.lambda;
      result.message = "step budget exhausted before reaching the target";
      return result;
    }
    ++attempts;
    double attempted_lambda = cur.lambda;
    try {
      NewtonResult step;
      if (settings.mode == ContinuationMode::Natural || !prev) {
        const double remaining = std::abs(target - cur.lambda);
        attempted_lambda = remaining <= ds * (1.0 + 1e-12) ? target : cur.lambda + dir * ds;
        step = natural_step(attempted_lambda);
        step.state.lambda = attempted_lambda;
      } else {
        const VectorX dw = cur.w - prev->w;
        const double dl = cur.lambda - prev->lambda;
        const double wn = cur.w.norm();
        const double theta = wn > 0.0 ? std::abs(cur.lambda) / wn : 1.0;
        const double nrm = std::sqrt(theta * theta * dw.squaredNorm() + dl * dl);
        ArclengthConstraint c{cur.w, cur.lambda, dw / nrm, dl / nrm, theta, ds};
        State guess = cur;
        guess.w += ds * c.tangent_w;
        guess.lambda += ds * c.tangent_lambda;
        attempted_lambda = guess.lambda;
        if (dir * (guess.lambda - target) >= 0.0) {
          attempted_lambda = target;
          step = natural_step(target);
          step.state.lambda = target;
        } else {
          step = newton_correct(disc, material, program, guess, c, settings);
          attempted_lambda = step.state.lambda;
          if (dir * (step.state.lambda - target) > 0.0) {
            attempted_lambda = target;
            step = natural_step(target);
            step.state.lambda = target;
          }
          if (dir * step.state.lambda <= 0.0) {
            std::ostringstream os;
            os << "arclength trace recorded lambda = " << step.state.lambda << " on the wrong side of 0";
            result.findings.push_back(os.str());
          }
        }
      }
      prev = cur;
      cur = step.state;
      accept(step, ds);
      ++accepted;
      last_inverted = false;
      if (step.iterations <= 3)
        ds = std::min(1.5 * ds, settings.ds_max);
      continue;
    } catch (const InvertedElementError& e) {
      last_inverted = true;
      last_error = e.what();
      result.failure_lambda = e.lambda();
    } catch (const ConvergenceError& e) {
      last_inverted = false;
      last_error = e.what();
      result.failure_lambda = attempted_lambda;
    } catch (const SingularMatrixError& e) {
      last_inverted = false;
      last_error = e.what();
      result.failure_lambda = attempted_lambda;
    }
    ds *= 0.5;
    if (ds < settings.ds_min) {
      result.status = last_inverted ? BranchStatus::Inverted : BranchStatus::Stalled;
      std::ostringstream os;
      os << (last_inverted ? "element inversion" : "stall") << " near lambda = " << result.failure_lambda
         << " (step size below ds_min): " << last_error;
      result.message = os.str();
      return result;
    }
  }
  result.status = BranchStatus::Completed;
  return result;
}

}  // namespace isobranch
