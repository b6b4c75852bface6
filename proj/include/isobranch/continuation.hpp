#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "isobranch/assembly.hpp"
#include "isobranch/ellipticity.hpp"

namespace isobranch {

enum class ContinuationMode { Natural, Arclength };

/// Per-record audit cost. Quadrature points are visited with the given stride.
struct MonitorBudget {
  int se_samples = 256;
  int refine_steps = 10;
  int adn_samples = 128;
  int point_stride = 1;
  /// Vertex images checked pairwise for coincidence; 0 disables the check.
  int injectivity_points = 0;
};

struct ContinuationSettings {
  double lambda_target = 1.0;
  double ds0 = 0.1;
  double ds_min = 1e-4;
  double ds_max = 0.25;
  double tolerance = 1e-10;
  int max_iterations = 12;
  int max_steps = 10000;
  ContinuationMode mode = ContinuationMode::Natural;
  MonitorBudget budget;
  bool keep_states = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct BranchRecord {
  double lambda = 0.0;
  double norm_u_inf = 0.0;
  double norm_gradu_inf = 0.0;
  double norm_p_inf = 0.0;
  double min_det = 1.0;
  double max_det = 1.0;
  double max_det_dev = 0.0;
  double se_margin = 0.0;
  double adn_min_abs = 0.0;
  int jac_det_sign = 0;
  int newton_iters = 0;
  double ds = 0.0;
};

struct NewtonResult {
  State state;
  int iterations = 0;
  /// Residual norm before each linear solve, and the final one.
  std::vector<double> residuals;
};

/// Newton at fixed lambda. Throws ConvergenceError; inverted elements propagate.
NewtonResult newton_correct(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                            const State& initial, const ContinuationSettings& settings);

/// theta^2 t_w . (w - w0) + t_l (lambda - lambda0) = ds
struct ArclengthConstraint {
  VectorX anchor_w;
  double anchor_lambda = 0.0;
  VectorX tangent_w;
  double tangent_lambda = 0.0;
  double theta = 1.0;
  double ds = 0.0;
};

/// Newton on the residual augmented by the arclength row; lambda is an unknown.
NewtonResult newton_correct(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                            const State& initial, const ArclengthConstraint& constraint,
                            const ContinuationSettings& settings);

/// Record for a converged state. jac_det_sign is taken from a fresh factorization.
BranchRecord evaluate_record(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                             const State& state, const MonitorBudget& budget, int newton_iters, double ds);

enum class BranchStatus { Completed, Stalled, Inverted };

struct BranchResult {
  std::vector<BranchRecord> records;
  std::vector<State> states;  // parallel to records when keep_states
  BranchStatus status = BranchStatus::Completed;
  std::string message;
  /// Lambda of the last failed attempt (stall or inversion).
  double failure_lambda = 0.0;
  /// Observations that are not failures, e.g. an arclength trace doubling back past lambda = 0.
  std::vector<std::string> findings;
};

using RecordSink = std::function<void(const BranchRecord&, const State&)>;

/// Predictor-corrector trace from (0, 0) toward settings.lambda_target.
BranchResult trace_branch(const Discretization& disc, const MaterialModel& material, const LoadProgram& program,
                          const ContinuationSettings& settings, const RecordSink& sink = {});

struct InjectivityReport {
  double min_det = 1.0;
  int element = -1;
  int point = -1;
  bool orientation_preserved = true;
  /// min |f(x_a) - f(x_b)| / |x_a - x_b| over the sampled vertex pairs; 0 pairs leaves it at +inf.
  double min_pair_ratio = std::numeric_limits<double>::infinity();
  int pairs_checked = 0;
  bool passed = true;
};

InjectivityReport injectivity_monitor(const Discretization& disc, const LoadProgram& program, const State& state,
                                      int sample_points = 0);

/// max |det(A + grad u) - 1| over quadrature points.
double incompressibility_monitor(const Discretization& disc, const LoadProgram& program, const State& state);

struct ParityEvent {
  double lambda_from;
  double lambda_to;
  int sign_from;
  int sign_to;
  std::string label;
};

/// Neighbouring records whose Jacobian determinant signs differ.
std::vector<ParityEvent> parity_tracker(const std::vector<BranchRecord>& records);

const char* to_string(BranchStatus status);

}  // namespace isobranch
