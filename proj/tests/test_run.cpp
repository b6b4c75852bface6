#include <doctest.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isobranch/output.hpp"
#include "isobranch/run.hpp"

using namespace isobranch;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string config(const std::string& name) { return std::string(ISOBRANCH_SOURCE_DIR) + "/configs/" + name; }

fs::path fresh_dir(const std::string& name)
{
  const fs::path dir = fs::path(ISOBRANCH_BINARY_DIR) / "scratch" / "run" / name;
  fs::remove_all(dir);
  return dir;
}

RunOptions into(const fs::path& dir)
{
  RunOptions o;
  o.output_directory = dir.string();
  return o;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

pt::ptree summary_of(const fs::path& dir)
{
  pt::ptree tree;
  pt::read_ini((dir / "summary.txt").string(), tree);
  return tree;
}

int shell(const std::string& command)
{
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("shear run: exit 0 and the exact homogeneous branch")
{
  const fs::path dir = fresh_dir("shear");
  REQUIRE(run(config("shear.ini"), into(dir)) == exit_code::success);
  const auto records = read_branch_csv((dir / "branch.csv").string());
  REQUIRE(records.size() > 2);
  CHECK(records.front().lambda == 0.0);
  CHECK(records.back().lambda == doctest::Approx(1.0).epsilon(1e-14));
  for (const auto& r : records) {
    CHECK(r.norm_u_inf < 1e-10);
    CHECK(r.norm_p_inf < 1e-10);
    CHECK(std::abs(r.min_det - 1.0) < 1e-12);
  }

  const auto s = summary_of(dir);
  CHECK(s.get<std::string>("run.status") == "completed");
  CHECK(s.get<int>("run.exit_code") == 0);
  CHECK(s.get<std::string>("mesh.star_shape") == "pass");
  CHECK(s.get<double>("mesh.star_shape_min") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.get<std::string>("checks.objectivity") == "pass");
  CHECK(s.get<std::string>("checks.stress_free") == "pass");
  CHECK(s.get<std::string>("checks.origin_residual_ok") == "pass");
  CHECK(s.get<std::string>("checks.homotopy") == "pass");
  CHECK(s.get<int>("branch.records") == static_cast<int>(records.size()));
  CHECK(s.get<int>("branch.parity_events") == 0);
  CHECK(s.get<std::string>("verdicts.parity_injectivity") == "no parity events; injectivity held (min det = 1.000)");

  // snapshots at accepted steps 0, 4, 8, ...
  const int expected = (static_cast<int>(records.size()) + 3) / 4;
  CHECK(s.get<int>("branch.snapshots") == expected);
  CHECK(fs::exists(dir / "snapshot_000000.vtk"));
  CHECK(fs::exists(dir / "snapshot_000004.vtk"));
  CHECK_FALSE(fs::exists(dir / "snapshot_000001.vtk"));

  std::ostringstream report;
  CHECK(summarize((dir / "branch.csv").string(), report) == exit_code::success);
  CHECK(report.str().find("verdict: no parity events; injectivity held (min det = 1.000)\n") != std::string::npos);
}

TEST_CASE("config error: exit 2 with a schema message and a summary")
{
  const fs::path dir = fresh_dir("invalid");
  CHECK(run(config("invalid_divisions.ini"), into(dir)) == exit_code::config);
  const auto s = summary_of(dir);
  CHECK(s.get<std::string>("run.status") == "config_error");
  CHECK(s.get<int>("run.exit_code") == 2);
  CHECK(s.get<std::string>("run.message") == "[mesh] divisions: value 1 outside [2, 32]");
  CHECK_FALSE(fs::exists(dir / "branch.csv"));

  const fs::path dir2 = fresh_dir("missing");
  CHECK(run(config("does_not_exist.ini"), into(dir2)) == exit_code::config);
  CHECK(summary_of(dir2).get<std::string>("run.status") == "config_error");
}

TEST_CASE("overload: exit 4 with partial CSV")
{
  const fs::path dir = fresh_dir("overload");
  CHECK(run(config("overload_inversion.ini"), into(dir)) == exit_code::inversion);
  const auto records = read_branch_csv((dir / "branch.csv").string());
  REQUIRE(records.size() >= 1);
  CHECK(records.front().lambda == 0.0);
  const auto s = summary_of(dir);
  CHECK(s.get<std::string>("run.status") == "inverted");
  CHECK(s.get<int>("run.exit_code") == 4);
  CHECK(s.get<std::string>("branch.status") == "inverted");
  CHECK(s.get<double>("branch.failure_lambda") > 0.0);
}

TEST_CASE("stall: exit 3 with partial CSV")
{
  const fs::path dir = fresh_dir("stall");
  CHECK(run(config("stall.ini"), into(dir)) == exit_code::stall);
  const auto records = read_branch_csv((dir / "branch.csv").string());
  REQUIRE(records.size() >= 1);
  const auto s = summary_of(dir);
  CHECK(s.get<std::string>("run.status") == "stalled");
  CHECK(s.get<int>("run.exit_code") == 3);
  CHECK(s.get<int>("branch.records") == static_cast<int>(records.size()));
}

TEST_CASE("identical config and seed give bit-identical artifacts")
{
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  REQUIRE(run(config("dead_load.ini"), into(a)) == exit_code::success);
  REQUIRE(run(config("dead_load.ini"), into(b)) == exit_code::success);
  const std::string csv = slurp(a / "branch.csv");
  CHECK(csv.size() > std::string(branch_csv_header).size() + 1);
  CHECK(csv == slurp(b / "branch.csv"));
  CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));
  for (const auto& entry : fs::directory_iterator(a))
    if (entry.path().extension() == ".vtk")
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));

  const auto s = summary_of(a);
  CHECK(s.get<std::string>("probes.global_min") == "pass");
  CHECK(s.get<std::string>("probes.quasiconvexity") == "pass");
  CHECK(s.get<std::string>("probes.uniqueness") == "pass");
  CHECK(s.get<std::string>("probes.uniqueness_label") == "hypotheses certified (domain star-shaped about the origin)");
}

TEST_CASE("summarize: parity events, empty input, schema mismatch")
{
  const fs::path dir = fresh_dir("summarize");
  fs::create_directories(dir);
  const fs::path p = dir / "flip.csv";
  {
    BranchCsvWriter w(p.string());
    BranchRecord r;
    r.se_margin = 1.0;
    r.adn_min_abs = 1.0;
    for (int k = 0; k < 5; ++k) {
      r.lambda = 0.1 * k;
      r.jac_det_sign = k < 3 ? 1 : -1;
      w.write(r);
    }
  }
  std::ostringstream out;
  CHECK(summarize(p.string(), out) == exit_code::success);
  const std::string text = out.str();
  CHECK(text.find("parity events: 1\n") != std::string::npos);
  CHECK(text.find("  lambda 0.2 -> 0.3: sign 1 -> -1 (possible singular point)\n") != std::string::npos);
  CHECK(text.find("verdict: 1 parity event; injectivity held (min det = 1.000)\n") != std::string::npos);
  CHECK(text.find("lambda range: [0, 0.4]\n") != std::string::npos);

  const fs::path empty = dir / "empty.csv";
  { BranchCsvWriter w(empty.string()); }
  std::ostringstream e;
  CHECK(summarize(empty.string(), e) == exit_code::failure);
  CHECK(e.str() == "no accepted steps\n");
  std::ofstream(dir / "zero.csv").close();
  std::ostringstream z;
  CHECK(summarize((dir / "zero.csv").string(), z) != 0);
  CHECK(z.str() == "no accepted steps\n");

  std::ofstream(dir / "wrong.csv") << "lambda,u\n0,0\n";
  std::ostringstream w;
  CHECK(summarize((dir / "wrong.csv").string(), w) == exit_code::config);
  CHECK(w.str().rfind("schema mismatch: ", 0) == 0);
}

TEST_CASE("verdict wording")
{
  BranchVerdicts v;
  CHECK(v.parity_injectivity() == "no parity events; injectivity held (min det = 1.000)");
  v.min_det = -0.25;
  v.parity_events.resize(2);
  CHECK(v.parity_injectivity() == "2 parity events; injectivity not established (min det = -0.250)");
  v.max_det_dev = 0.0123;
  CHECK(v.incompressibility() == "incompressibility defect <= 0.0123");
  v.min_se_margin = 0.9876;
  CHECK(v.ellipticity() == "ellipticity margin >= 0.988");
  v.min_se_margin = -0.5;
  CHECK(v.ellipticity() == "ellipticity lost (margin -0.5)");
}

TEST_CASE("command line exit codes")
{
  const std::string cli = ISOBRANCH_CLI;
  const fs::path dir = fresh_dir("cli");
  const std::string out = " -q -o " + dir.string();
  CHECK(shell(cli + " run " + config("shear.ini") + out) == 0);
  CHECK(shell(cli + " run " + config("invalid_divisions.ini") + out) == 2);
  CHECK(shell(cli + " run " + config("stall.ini") + out) == 3);
  CHECK(shell(cli + " run " + config("overload_inversion.ini") + out) == 4);
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(shell(cli + " summarize " + (dir / "branch.csv").string() + " > /dev/null") == 0);
  CHECK(shell(cli + " schema > /dev/null") == 0);
  CHECK(shell(cli + " > /dev/null 2>&1") != 0);
}
