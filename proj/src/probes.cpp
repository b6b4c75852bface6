#include "isobranch/probes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "isobranch/errors.hpp"

namespace isobranch {

namespace {

// body(i) for i in [0, n), contiguous chunks per worker. Results must be written by index.
template <typename Body>
void parallel_indices(int n, int workers, Body&& body)
{
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int i = n * w / workers; i < n * (w + 1) / workers; ++i)
            body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

double so3_distance(const Mat3& f)
{
  const Vec3 s = Eigen::JacobiSVD<Mat3>(f).singularValues();
  return (s.array() - 1.0).abs().maxCoeff();
}

}  // namespace

GlobalMinReport global_min_probe(const MaterialModel& material, int n_samples, const GlobalMinOptions& options)
{
  if (n_samples < 1)
    throw std::invalid_argument("global_min_probe: n_samples must be at least 1");
  std::mt19937_64 rng(options.seed);
  std::vector<Mat3> samples(static_cast<std::size_t>(n_samples));
  for (auto& f : samples) {
    const Mat3 g = random_glplus(rng, options.spread);
    f = options.rotation * (g / std::cbrt(det3(g)));
  }
  std::vector<double> energy(samples.size());
  parallel_indices(n_samples, options.workers, [&](int i) { energy[i] = material.energy(samples[i]); });

  GlobalMinReport rep;
  rep.samples = n_samples;
  const auto best = std::min_element(energy.begin(), energy.end()) - energy.begin();
  rep.min_energy = energy[best];
  rep.argmin = samples[best];
  rep.argmin_distance = so3_distance(rep.argmin);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (energy[i] < 1e-10 && so3_distance(samples[i]) > 1e-6)
      ++rep.near_zero_off_so3;
  rep.passed = rep.min_energy > -1e-12 && rep.near_zero_off_so3 == 0;
  return rep;
}

// ---------------------------------------------------------------- test field

namespace {

double bump(double s) { return std::pow(1.0 - s * s, 4); }
double bump_d(double s) { return -8.0 * s * std::pow(1.0 - s * s, 3); }
double bump_dd(double s)
{
  const double q = 1.0 - s * s;
  return -8.0 * q * q * q + 48.0 * s * s * q * q;
}

}  // namespace

bool DivFreeField::in_support(const Vec3& x) const
{
  return ((x - center).cwiseAbs().array() < half_width.array()).all();
}

Vec3 DivFreeField::value(const Vec3& x) const
{
  if (!in_support(x))
    return Vec3::Zero();
  const Vec3 s = (x - center).cwiseQuotient(half_width);
  const Vec3 q(bump(s(0)), bump(s(1)), bump(s(2)));
  const Vec3 dq(bump_d(s(0)), bump_d(s(1)), bump_d(s(2)));
  const Vec3 grad_beta = amplitude * Vec3(dq(0) * q(1) * q(2) / half_width(0), q(0) * dq(1) * q(2) / half_width(1),
                                          q(0) * q(1) * dq(2) / half_width(2));
  return grad_beta.cross(axis);
}

Mat3 DivFreeField::gradient(const Vec3& x) const
{
  if (!in_support(x))
    return Mat3::Zero();
  const Vec3 s = (x - center).cwiseQuotient(half_width);
  const std::array<double, 3> q{bump(s(0)), bump(s(1)), bump(s(2))};
  const std::array<double, 3> dq{bump_d(s(0)), bump_d(s(1)), bump_d(s(2))};
  const std::array<double, 3> ddq{bump_dd(s(0)), bump_dd(s(1)), bump_dd(s(2))};
  // Hessian of beta
  Mat3 h;
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      double v = amplitude / (half_width(j) * half_width(l));
      for (int i = 0; i < 3; ++i) {
        if (i == j && i == l)
          v *= ddq[i];
        else if (i == j || i == l)
          v *= dq[i];
        else
          v *= q[i];
      }
      h(j, l) = v;
    }
  // w_i = eps_ijk d_j beta c_k  =>  d_l w_i = eps_ijk H_jl c_k
  Mat3 g = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double e = levi_civita(i, j, k);
        if (e != 0.0)
          for (int l = 0; l < 3; ++l)
            g(i, l) += e * h(j, l) * axis(k);
      }
  return g;
}

// ---------------------------------------------------------- quasiconvexity

namespace {

void rk4_step(const DivFreeField& field, double dt, Vec3& x, Mat3& phi)
{
  const Vec3 k1 = field.value(x);
  const Mat3 m1 = field.gradient(x) * phi;
  const Vec3 x2 = x + 0.5 * dt * k1;
  const Vec3 k2 = field.value(x2);
  const Mat3 m2 = field.gradient(x2) * (phi + 0.5 * dt * m1);
  const Vec3 x3 = x + 0.5 * dt * k2;
  const Vec3 k3 = field.value(x3);
  const Mat3 m3 = field.gradient(x3) * (phi + 0.5 * dt * m2);
  const Vec3 x4 = x + dt * k3;
  const Vec3 k4 = field.value(x4);
  const Mat3 m4 = field.gradient(x4) * (phi + dt * m3);
  x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  phi += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
}

}  // namespace

FlowPoint flow_map(const DivFreeField& field, const Vec3& x, int flow_steps)
{
  if (flow_steps < 1)
    throw std::invalid_argument("flow_map: flow_steps must be at least 1");
  FlowPoint fp{x, Mat3::Identity()};
  const double dt = 1.0 / flow_steps;
  for (int n = 0; n < flow_steps; ++n)
    rk4_step(field, dt, fp.x, fp.phi);
  return fp;
}

QuasiconvexityReport quasiconvexity_probe(const MaterialModel& material, const DivFreeField& field, int flow_steps,
                                          const Mesh& domain, int cells_per_axis)
{
  if (flow_steps < 100)
    throw std::invalid_argument("quasiconvexity_probe: flow_steps must be at least 100");
  if (cells_per_axis < 1)
    throw std::invalid_argument("quasiconvexity_probe: cells_per_axis must be at least 1");
  const Vec3 lo = field.center - field.half_width;
  const Vec3 width = 2.0 * field.half_width;
  const int grid = 8;
  for (int k = 0; k <= grid; ++k)
    for (int j = 0; j <= grid; ++j)
      for (int i = 0; i <= grid; ++i)
        if (!domain.contains(lo + Vec3(i, j, k).cwiseProduct(width) / grid))
          throw DomainError("quasiconvexity_probe: field support is not inside the domain");

  QuasiconvexityReport rep;
  rep.flow_steps = flow_steps;
  const double dt = 1.0 / flow_steps;
  auto flow = [&](const Vec3& x0) {
    Vec3 x = x0;
    Mat3 phi = Mat3::Identity();
    for (int n = 0; n < flow_steps; ++n) {
      rk4_step(field, dt, x, phi);
      if (!x.allFinite() || (!field.in_support(x) && !domain.contains(x))) {
        std::ostringstream os;
        os << "quasiconvexity_probe: flow left the domain (amplitude " << field.amplitude << ")";
        throw DomainError(os.str());
      }
    }
    return phi;
  };

  const auto& gp = shape::gauss_points;
  const auto& gw = shape::gauss_weights;
  const Vec3 cell = width / cells_per_axis;
  const double jac = cell.prod() / 8.0;
  for (int ck = 0; ck < cells_per_axis; ++ck)
    for (int cj = 0; cj < cells_per_axis; ++cj)
      for (int ci = 0; ci < cells_per_axis; ++ci)
        for (int c = 0; c < 3; ++c)
          for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) {
              const Vec3 xi(gp[a], gp[b], gp[c]);
              const Vec3 x = lo + (Vec3(ci, cj, ck) + 0.5 * (xi + Vec3::Ones())).cwiseProduct(cell);
              const Mat3 phi = flow(x);
              rep.det_defect = std::max(rep.det_defect, std::abs(det3(phi) - 1.0));
              rep.integral += gw[a] * gw[b] * gw[c] * jac * material.energy(phi);
              ++rep.points;
            }
  // W changes by O(k |det - 1|) off the constraint surface
  rep.tolerance = rep.det_defect * material.k() * width.prod() + 1e-14;
  rep.passed = rep.integral > -rep.tolerance;
  return rep;
}

// -------------------------------------------------------------- uniqueness

UniquenessReport uniqueness_probe(const MaterialModel& material, const Discretization& disc, int n_starts,
                                  double start_radius, const ContinuationSettings& newton,
                                  const UniquenessOptions& options)
{
  if (n_starts < 1)
    throw std::invalid_argument("uniqueness_probe: n_starts must be at least 1");
  if (start_radius < 0.0)
    throw std::invalid_argument("uniqueness_probe: start_radius must be non-negative");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double per_component = start_radius / std::sqrt(3.0);
  std::vector<State> starts;
  for (int s = 0; s < n_starts; ++s) {
    State st = disc.zero_state(0.0);
    for (int i = 0; i < st.u_size; ++i)
      st.w(i) = per_component * uni(rng);
    for (int i = 0; i < st.p_size; ++i)
      st.w(st.u_size + i) = start_radius * uni(rng);
    starts.push_back(std::move(st));
  }

  const LoadProgram zero_load;
  std::vector<double> norms(starts.size(), -1.0);
  parallel_indices(n_starts, options.workers, [&](int s) {
    try {
      const State sol = newton_correct(disc, material, zero_load, starts[s], newton).state;
      norms[s] = sol.displacement().lpNorm<Eigen::Infinity>() + sol.pressure().lpNorm<Eigen::Infinity>();
    } catch (const ConvergenceError&) {
    } catch (const InvertedElementError&) {
    }
  });

  UniquenessReport rep;
  rep.starts = n_starts;
  for (double n : norms) {
    if (n < 0.0) {
      ++rep.not_converged;
      continue;
    }
    ++rep.converged;
    rep.solution_norms.push_back(n);
    rep.max_solution_norm = std::max(rep.max_solution_norm, n);
  }
  rep.passed = rep.max_solution_norm < 10.0 * newton.tolerance;

  try {
    rep.hypotheses_certified = star_shape_check(disc.mesh(), options.star_origin).passed;
  } catch (const DomainError&) {
    rep.hypotheses_certified = false;
  }
  rep.label = rep.hypotheses_certified ? "hypotheses certified (domain star-shaped about the origin)"
                                       : "hypotheses not certified";
  return rep;
}

}  // namespace isobranch
