#include "isobranch/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "isobranch/errors.hpp"
#include "isobranch/mesh.hpp"
#include "isobranch/output.hpp"
#include "isobranch/probes.hpp"

namespace isobranch {

namespace fs = std::filesystem;

namespace {

std::string fixed(const char* fmt, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

void log_line(const RunOptions& options, const std::string& line)
{
  if (options.log)
    *options.log << line << '\n';
}

void write_summary(const Summary& summary, const fs::path& path, const RunOptions& options)
{
  try {
    summary.write(path.string());
    log_line(options, "summary: " + path.string());
  } catch (const std::exception& e) {
    log_line(options, std::string("summary not written: ") + e.what());
  }
}

Vec3 mesh_center(const MeshConfig& m) { return m.centered ? Vec3::Zero() : Vec3(0.5 * m.extent); }

void set_verdicts(Summary& s, const BranchVerdicts& v)
{
  s.set("branch", "records", v.records);
  s.set("branch", "lambda_min", v.lambda_min);
  s.set("branch", "lambda_max", v.lambda_max);
  s.set("branch", "max_norm_u_inf", v.max_u);
  s.set("branch", "max_norm_gradu_inf", v.max_gradu);
  s.set("branch", "max_norm_p_inf", v.max_p);
  s.set("branch", "min_detF", v.min_det);
  s.set("branch", "max_det_dev", v.max_det_dev);
  s.set("branch", "min_se_margin", v.min_se_margin);
  s.set("branch", "min_adn_abs", v.min_adn_abs);
  s.set("branch", "parity_events", static_cast<int>(v.parity_events.size()));
  for (std::size_t i = 0; i < v.parity_events.size(); ++i) {
    const auto& e = v.parity_events[i];
    std::ostringstream os;
    os << format_real(e.lambda_from) << " -> " << format_real(e.lambda_to) << ", sign " << e.sign_from << " -> "
       << e.sign_to << " (" << e.label << ")";
    s.set("branch", "parity_event_" + std::to_string(i + 1), os.str());
  }
  s.set("verdicts", "parity_injectivity", v.parity_injectivity());
  s.set("verdicts", "incompressibility", v.incompressibility());
  s.set("verdicts", "ellipticity", v.ellipticity());
}

void origin_checks(Summary& s, const RunConfig& cfg, const Discretization& disc, const MaterialModel& material,
                   const RunOptions& options)
{
  const auto obj = verify_objectivity(material, cfg.probes.objectivity_trials, cfg.seed);
  s.set("checks", "objectivity_trials", obj.trials);
  s.set("checks", "objectivity_max_deviation", obj.max_deviation);
  s.set("checks", "objectivity", pass_fail(obj.passed));

  const double stress_free = material.stress(Mat3::Identity()).cwiseAbs().maxCoeff();
  s.set("checks", "stress_free_residual", stress_free);
  s.set("checks", "stress_free", pass_fail(stress_free < 1e-12));

  const VectorX r0 = residual(disc, material, LoadProgram{}, disc.zero_state(0.0));
  const double r0_norm = r0.size() ? r0.lpNorm<Eigen::Infinity>() : 0.0;
  s.set("checks", "origin_residual", r0_norm);
  s.set("checks", "origin_residual_ok", pass_fail(r0_norm < 1e-12));
  log_line(options, "checks: objectivity " + std::string(pass_fail(obj.passed)) + ", stress-free " +
                        pass_fail(stress_free < 1e-12));

  if (!cfg.probes.homotopy_sweep)
    return;
  std::ostringstream pivots;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool invertible = true;
  for (double mu : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    BorderedSolver solver;
    try {
      solver.factorize(homotopy_operator(mu, disc, material));
      lo = std::min(lo, solver.min_pivot());
      hi = std::max(hi, solver.min_pivot());
      pivots << (mu == 0.0 ? "" : " ") << format_real(solver.min_pivot());
    } catch (const SingularMatrixError&) {
      invertible = false;
      pivots << (mu == 0.0 ? "" : " ") << "singular";
    }
  }
  const double ratio = invertible ? hi / lo : std::numeric_limits<double>::infinity();
  s.set("checks", "homotopy_mu", "0 0.25 0.5 0.75 1");
  s.set("checks", "homotopy_min_pivots", pivots.str());
  s.set("checks", "homotopy_pivot_ratio", ratio);
  s.set("checks", "homotopy", pass_fail(invertible && ratio <= 100.0));
  log_line(options, "homotopy sweep: pivot ratio " + format_real(ratio));
}

void run_probes(Summary& s, const RunConfig& cfg, const Discretization& disc, const MaterialModel& material,
                const RunOptions& options)
{
  const ProbeConfig& p = cfg.probes;
  if (p.global_min) {
    GlobalMinOptions o;
    o.seed = cfg.seed;
    o.workers = cfg.workers;
    const auto r = global_min_probe(material, p.global_min_samples, o);
    s.set("probes", "global_min_samples", r.samples);
    s.set("probes", "global_min_energy", r.min_energy);
    s.set("probes", "global_min_argmin_so3_distance", r.argmin_distance);
    s.set("probes", "global_min_near_zero_off_so3", r.near_zero_off_so3);
    s.set("probes", "global_min", pass_fail(r.passed));
    log_line(options, "global minimum probe: " + std::string(pass_fail(r.passed)));
  }
  if (p.quasiconvexity) {
    DivFreeField f;
    f.center = mesh_center(cfg.mesh);
    f.half_width = 0.5 * p.qc_support * cfg.mesh.extent;
    f.amplitude = p.qc_amplitude;
    try {
      const auto r = quasiconvexity_probe(material, f, p.qc_flow_steps, disc.mesh(), p.qc_cells);
      s.set("probes", "quasiconvexity_integral", r.integral);
      s.set("probes", "quasiconvexity_det_defect", r.det_defect);
      s.set("probes", "quasiconvexity_tolerance", r.tolerance);
      s.set("probes", "quasiconvexity", pass_fail(r.passed));
      log_line(options, "quasiconvexity probe: " + std::string(pass_fail(r.passed)));
    } catch (const DomainError& e) {
      s.set("probes", "quasiconvexity", "not run");
      s.set("probes", "quasiconvexity_message", e.what());
    }
  }
  if (p.uniqueness) {
    UniquenessOptions o;
    o.seed = cfg.seed;
    o.workers = cfg.workers;
    const auto r = uniqueness_probe(material, disc, p.uniqueness_starts, p.uniqueness_radius, cfg.continuation, o);
    s.set("probes", "uniqueness_starts", r.starts);
    s.set("probes", "uniqueness_converged", r.converged);
    s.set("probes", "uniqueness_not_converged", r.not_converged);
    s.set("probes", "uniqueness_max_solution_norm", r.max_solution_norm);
    s.set("probes", "uniqueness_label", r.label);
    s.set("probes", "uniqueness", pass_fail(r.passed));
    if (!r.passed)
      s.set("findings", "uniqueness", "nonzero solution at zero load, norm " + format_real(r.max_solution_norm));
    log_line(options, "uniqueness probe: " + std::string(pass_fail(r.passed)) + ", " + r.label);
  }
}

}  // namespace

int run(const std::string& config_path, const RunOptions& options)
{
  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    Summary s;
    s.set("run", "status", "config_error");
    s.set("run", "exit_code", exit_code::config);
    s.set("run", "config", config_path);
    s.set("run", "message", e.what());
    log_line(options, std::string("config error: ") + e.what());
    const fs::path dir = options.output_directory.empty() ? fs::path(".") : fs::path(options.output_directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_summary(s, dir / "summary.txt", options);
    return exit_code::config;
  }
  return run(cfg, options);
}

int run(const RunConfig& cfg, const RunOptions& options)
{
  const fs::path dir = options.output_directory.empty() ? fs::path(cfg.output.directory)
                                                        : fs::path(options.output_directory);
  Summary s;
  s.set("run", "status", "error");
  s.set("run", "exit_code", exit_code::failure);
  s.set("run", "seed", std::to_string(cfg.seed));
  s.set("run", "workers", cfg.workers);
  const fs::path summary_path = dir / cfg.output.summary;

  auto finish = [&](const char* status, int code, const std::string& message) {
    s.set("run", "status", status);
    s.set("run", "exit_code", code);
    s.set("run", "message", message);
    write_summary(s, summary_path, options);
    return code;
  };

  try {
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    s.set("run", "message", std::string("cannot create output directory: ") + e.what());
    write_summary(s, "summary.txt", options);
    return exit_code::failure;
  }

  try {
    const MaterialModel material = cfg.material.build();
    s.set("run", "material", material.name());
    Discretization disc(build_box_mesh(cfg.mesh.extent, cfg.mesh.divisions, cfg.mesh.centered));
    disc.set_workers(cfg.workers);
    const Mesh& mesh = disc.mesh();
    s.set("mesh", "elements", mesh.num_elements());
    s.set("mesh", "vertices", static_cast<int>(mesh.vertices.size()));
    s.set("mesh", "q2_nodes", static_cast<int>(mesh.q2_nodes.size()));
    s.set("mesh", "unknowns", disc.dofs().size());
    log_line(options, "mesh: " + std::to_string(mesh.num_elements()) + " elements, " +
                          std::to_string(disc.dofs().size()) + " unknowns");

    try {
      const auto star = star_shape_check(mesh, Vec3::Zero());
      s.set("mesh", "star_shape_min", star.min_value);
      s.set("mesh", "star_shape", pass_fail(star.passed));
    } catch (const DomainError& e) {
      s.set("mesh", "star_shape", "origin outside");
      s.set("mesh", "star_shape_message", e.what());
    }

    origin_checks(s, cfg, disc, material, options);

    const fs::path csv_path = dir / cfg.output.csv;
    s.set("branch", "csv", cfg.output.csv);
    BranchCsvWriter csv(csv_path.string());
    int step = 0;
    const int every = cfg.output.vtk_every;
    int snapshots = 0;
    double min_pair_ratio = std::numeric_limits<double>::infinity();
    bool injective = true;
    const int inj_points = cfg.continuation.budget.injectivity_points;
    auto sink = [&](const BranchRecord& rec, const State& state) {
      csv.write(rec);
      if (inj_points > 0) {
        const auto inj = injectivity_monitor(disc, cfg.loading, state, inj_points);
        min_pair_ratio = std::min(min_pair_ratio, inj.min_pair_ratio);
        injective = injective && inj.passed;
      }
      if (every > 0 && step % every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "_%06d.vtk", step);
        write_vtk((dir / (cfg.output.vtk_prefix + name)).string(), disc, cfg.loading, state);
        ++snapshots;
      }
      ++step;
    };

    const BranchResult branch = trace_branch(disc, material, cfg.loading, cfg.continuation, sink);
    s.set("branch", "status", to_string(branch.status));
    s.set("branch", "snapshots", snapshots);
    if (inj_points > 0) {
      s.set("branch", "injectivity_min_pair_ratio", min_pair_ratio);
      s.set("branch", "injectivity_pairs", pass_fail(injective));
    }
    set_verdicts(s, branch_verdicts(branch.records));
    for (std::size_t i = 0; i < branch.findings.size(); ++i)
      s.set("findings", "branch_" + std::to_string(i + 1), branch.findings[i]);
    log_line(options, "branch: " + std::string(to_string(branch.status)) + ", " +
                          std::to_string(branch.records.size()) + " records");

    if (branch.status != BranchStatus::Completed)
      s.set("branch", "failure_lambda", branch.failure_lambda);

    run_probes(s, cfg, disc, material, options);

    switch (branch.status) {
    case BranchStatus::Completed:
      return finish("completed", exit_code::success, branch.message);
    case BranchStatus::Stalled:
      return finish("stalled", exit_code::stall, branch.message);
    case BranchStatus::Inverted:
      return finish("inverted", exit_code::inversion, branch.message);
    }
    return finish("error", exit_code::failure, "unknown branch status");
  } catch (const InvertedElementError& e) {
    return finish("inverted", exit_code::inversion, e.what());
  } catch (const ConfigError& e) {
    return finish("config_error", exit_code::config, e.what());
  } catch (const std::exception& e) {
    return finish("error", exit_code::failure, e.what());
  }
}

// ------------------------------------------------------------------ summarize

std::string BranchVerdicts::parity_injectivity() const
{
  std::string out;
  const auto n = parity_events.size();
  if (n == 0)
    out = "no parity events";
  else
    out = std::to_string(n) + (n == 1 ? " parity event" : " parity events");
  out += min_det > 0.0 ? "; injectivity held" : "; injectivity not established";
  return out + " (min det = " + fixed("%.3f", min_det) + ")";
}

std::string BranchVerdicts::incompressibility() const
{
  return "incompressibility defect <= " + fixed("%.3g", max_det_dev);
}

std::string BranchVerdicts::ellipticity() const
{
  if (min_se_margin > 0.0)
    return "ellipticity margin >= " + fixed("%.3g", min_se_margin);
  return "ellipticity lost (margin " + fixed("%.3g", min_se_margin) + ")";
}

BranchVerdicts branch_verdicts(const std::vector<BranchRecord>& records)
{
  BranchVerdicts v;
  v.records = static_cast<int>(records.size());
  if (records.empty())
    return v;
  v.lambda_min = v.lambda_max = records.front().lambda;
  v.min_se_margin = records.front().se_margin;
  v.min_adn_abs = records.front().adn_min_abs;
  for (const auto& r : records) {
    v.lambda_min = std::min(v.lambda_min, r.lambda);
    v.lambda_max = std::max(v.lambda_max, r.lambda);
    v.max_u = std::max(v.max_u, r.norm_u_inf);
    v.max_gradu = std::max(v.max_gradu, r.norm_gradu_inf);
    v.max_p = std::max(v.max_p, r.norm_p_inf);
    v.min_det = std::min(v.min_det, r.min_det);
    v.max_det_dev = std::max(v.max_det_dev, r.max_det_dev);
    v.min_se_margin = std::min(v.min_se_margin, r.se_margin);
    v.min_adn_abs = std::min(v.min_adn_abs, r.adn_min_abs);
  }
  v.parity_events = parity_tracker(records);
  return v;
}

int summarize(const std::string& csv_path, std::ostream& out)
{
  std::vector<BranchRecord> records;
  try {
    records = read_branch_csv(csv_path);
  } catch (const SchemaError& e) {
    out << "schema mismatch: " << e.what() << '\n';
    return exit_code::config;
  } catch (const std::exception& e) {
    out << e.what() << '\n';
    return exit_code::failure;
  }
  if (records.empty()) {
    out << "no accepted steps\n";
    return exit_code::failure;
  }
  const BranchVerdicts v = branch_verdicts(records);
  out << "records: " << v.records << '\n'
      << "lambda range: [" << fixed("%.6g", v.lambda_min) << ", " << fixed("%.6g", v.lambda_max) << "]\n"
      << "max norm_u_inf: " << fixed("%.6g", v.max_u) << '\n'
      << "max norm_gradu_inf: " << fixed("%.6g", v.max_gradu) << '\n'
      << "max norm_p_inf: " << fixed("%.6g", v.max_p) << '\n'
      << "min det F: " << fixed("%.6g", v.min_det) << '\n'
      << "max det deviation: " << fixed("%.6g", v.max_det_dev) << '\n'
      << "min se margin: " << fixed("%.6g", v.min_se_margin) << '\n'
      << "min adn |det|: " << fixed("%.6g", v.min_adn_abs) << '\n'
      << "parity events: " << v.parity_events.size() << '\n';
  for (const auto& e : v.parity_events)
    out << "  lambda " << fixed("%.6g", e.lambda_from) << " -> " << fixed("%.6g", e.lambda_to) << ": sign "
        << e.sign_from << " -> " << e.sign_to << " (" << e.label << ")\n";
  out << "verdict: " << v.parity_injectivity() << '\n'
      << "verdict: " << v.incompressibility() << '\n'
      << "verdict: " << v.ellipticity() << '\n';
  return exit_code::success;
}

}  // namespace isobranch
