#include "isobranch/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "isobranch/errors.hpp"

namespace isobranch {

MaterialModel MaterialConfig::build() const
{
  return model == MaterialKind::NeoHookean ? MaterialModel::neo_hookean(mu) : MaterialModel::mooney_rivlin(c1, c2);
}

namespace {

struct Field {
  SchemaEntry entry;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
  throw ConfigError(where + ": " + what);
}

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T number(const std::string& where, const std::string& raw)
{
  const std::string v = trim(raw);
  T out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size())
    bad(where, "expected a number, got '" + raw + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out))
      bad(where, "value must be finite");
  return out;
}

double real_in(const std::string& where, const std::string& raw, double lo, double hi, bool open_lo = false)
{
  const double v = number<double>(where, raw);
  if (v < lo || v > hi || (open_lo && v == lo)) {
    std::ostringstream os;
    os << "value " << v << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    bad(where, os.str());
  }
  return v;
}

int int_in(const std::string& where, const std::string& raw, int lo, int hi)
{
  const long long v = number<long long>(where, raw);
  if (v < lo || v > hi)
    bad(where, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::vector<std::string> tokens(const std::string& raw)
{
  std::string s = raw;
  for (char& c : s)
    if (c == ',')
      c = ' ';
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;)
    out.push_back(t);
  return out;
}

Vec3 vec3(const std::string& where, const std::string& raw)
{
  const auto t = tokens(raw);
  if (t.size() != 3)
    bad(where, "expected three numbers, got '" + raw + "'");
  return Vec3(number<double>(where, t[0]), number<double>(where, t[1]), number<double>(where, t[2]));
}

bool boolean(const std::string& where, const std::string& raw)
{
  const std::string v = trim(raw);
  if (v == "true")
    return true;
  if (v == "false")
    return false;
  bad(where, "expected true or false, got '" + raw + "'");
}

template <typename E>
E choice(const std::string& where, const std::string& raw, const std::vector<std::pair<std::string, E>>& options)
{
  const std::string v = trim(raw);
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name)
      return value;
    names += (names.empty() ? "" : "|") + name;
  }
  bad(where, "expected one of " + names + ", got '" + raw + "'");
}

std::string path_value(const std::string& where, const std::string& raw)
{
  const std::string v = trim(raw);
  if (v.empty())
    bad(where, "path must not be empty");
  return v;
}

constexpr double big = 1e300;

const std::vector<Field>& fields()
{
  using C = RunConfig;
  using S = std::string;
  static const std::vector<Field> table = {
      {{"material", "model", "neo_hookean|mooney_rivlin", "neo_hookean", "stored energy family"},
       [](C& c, const S& v) {
         c.material.model = choice<MaterialKind>(
             "[material] model", v,
             {{"neo_hookean", MaterialKind::NeoHookean}, {"mooney_rivlin", MaterialKind::MooneyRivlin}});
       }},
      {{"material", "mu", "real > 0", "1", "neo-Hookean shear modulus"},
       [](C& c, const S& v) { c.material.mu = real_in("[material] mu", v, 0.0, big, true); }},
      {{"material", "c1", "real >= 0", "0.5", "Mooney-Rivlin |F|^2 coefficient"},
       [](C& c, const S& v) { c.material.c1 = real_in("[material] c1", v, 0.0, big); }},
      {{"material", "c2", "real >= 0", "0", "Mooney-Rivlin |Cof F|^2 coefficient"},
       [](C& c, const S& v) { c.material.c2 = real_in("[material] c2", v, 0.0, big); }},

      {{"mesh", "extent", "3 reals > 0", "1 1 1", "box edge lengths"},
       [](C& c, const S& v) {
         const Vec3 e = vec3("[mesh] extent", v);
         if ((e.array() <= 0.0).any())
           bad("[mesh] extent", "edge lengths must be positive");
         c.mesh.extent = e;
       }},
      {{"mesh", "divisions", "3 integers in [2, 32]", "3 3 3", "cells per axis"},
       [](C& c, const S& v) {
         const auto t = tokens(v);
         if (t.size() != 3)
           bad("[mesh] divisions", "expected three integers, got '" + v + "'");
         for (int i = 0; i < 3; ++i)
           c.mesh.divisions[static_cast<std::size_t>(i)] = int_in("[mesh] divisions", t[static_cast<std::size_t>(i)], 2, 32);
       }},
      {{"mesh", "origin", "centered|corner", "centered", "box placement relative to x = 0"},
       [](C& c, const S& v) {
         c.mesh.centered = choice<bool>("[mesh] origin", v, {{"centered", true}, {"corner", false}});
       }},

      {{"loading", "boundary", "identity|shear|isochoric_stretch", "identity", "boundary map family A(lambda)"},
       [](C& c, const S& v) {
         c.loading.boundary = choice<BoundaryFamily>("[loading] boundary", v,
                                                     {{"identity", BoundaryFamily::Identity},
                                                      {"shear", BoundaryFamily::Shear},
                                                      {"isochoric_stretch", BoundaryFamily::IsochoricStretch}});
       }},
      {{"loading", "boundary_rate", "real", "1", "rate multiplying lambda in A(lambda)"},
       [](C& c, const S& v) { c.loading.boundary_rate = number<double>("[loading] boundary_rate", v); }},
      {{"loading", "body_force", "none|dead|live_centering|live_gradient", "none", "body force family"},
       [](C& c, const S& v) {
         c.loading.body_force = choice<BodyForceKind>("[loading] body_force", v,
                                                      {{"none", BodyForceKind::None},
                                                       {"dead", BodyForceKind::Dead},
                                                       {"live_centering", BodyForceKind::LiveCentering},
                                                       {"live_gradient", BodyForceKind::LiveGradient}});
       }},
      {{"loading", "force_scale", "real >= 0", "1", "body force magnitude c"},
       [](C& c, const S& v) { c.loading.force_scale = real_in("[loading] force_scale", v, 0.0, big); }},
      {{"loading", "direction", "3 reals", "0 0 1", "body force direction g"},
       [](C& c, const S& v) { c.loading.direction = vec3("[loading] direction", v); }},
      {{"loading", "profile", "3 reals", "0 0 0", "dead load magnitude gradient k: b = lambda c (1 + k.x) g"},
       [](C& c, const S& v) { c.loading.profile = vec3("[loading] profile", v); }},

      {{"continuation", "mode", "natural|arclength", "natural", "corrector parametrization"},
       [](C& c, const S& v) {
         c.continuation.mode = choice<ContinuationMode>(
             "[continuation] mode", v,
             {{"natural", ContinuationMode::Natural}, {"arclength", ContinuationMode::Arclength}});
       }},
      {{"continuation", "lambda_target", "real != 0", "1", "final load parameter"},
       [](C& c, const S& v) {
         c.continuation.lambda_target = number<double>("[continuation] lambda_target", v);
         if (c.continuation.lambda_target == 0.0)
           bad("[continuation] lambda_target", "must be nonzero");
       }},
      {{"continuation", "ds0", "real > 0", "0.1", "initial step"},
       [](C& c, const S& v) { c.continuation.ds0 = real_in("[continuation] ds0", v, 0.0, big, true); }},
      {{"continuation", "ds_min", "real > 0", "1e-4", "smallest step before a stall"},
       [](C& c, const S& v) { c.continuation.ds_min = real_in("[continuation] ds_min", v, 0.0, big, true); }},
      {{"continuation", "ds_max", "real > 0", "0.25", "largest step"},
       [](C& c, const S& v) { c.continuation.ds_max = real_in("[continuation] ds_max", v, 0.0, big, true); }},
      {{"continuation", "tolerance", "real > 0", "1e-10", "Newton residual tolerance (max norm)"},
       [](C& c, const S& v) { c.continuation.tolerance = real_in("[continuation] tolerance", v, 0.0, 1.0, true); }},
      {{"continuation", "max_iterations", "integer in [1, 100]", "12", "Newton iterations per step"},
       [](C& c, const S& v) { c.continuation.max_iterations = int_in("[continuation] max_iterations", v, 1, 100); }},
      {{"continuation", "max_steps", "integer in [1, 1000000]", "10000", "accepted steps before giving up"},
       [](C& c, const S& v) { c.continuation.max_steps = int_in("[continuation] max_steps", v, 1, 1000000); }},
      {{"continuation", "se_samples", "integer in [100, 100000]", "256", "sphere directions per strong-ellipticity audit"},
       [](C& c, const S& v) {
         c.continuation.budget.se_samples = int_in("[continuation] se_samples", v, 100, 100000);
       }},
      {{"continuation", "refine_steps", "integer in [0, 100]", "10", "local refinement steps of the ellipticity minimum"},
       [](C& c, const S& v) {
         c.continuation.budget.refine_steps = int_in("[continuation] refine_steps", v, 0, 100);
       }},
      {{"continuation", "adn_samples", "integer in [1, 100000]", "128", "directions per ADN audit"},
       [](C& c, const S& v) {
         c.continuation.budget.adn_samples = int_in("[continuation] adn_samples", v, 1, 100000);
       }},
      {{"continuation", "point_stride", "integer in [1, 27]", "1", "audit every n-th quadrature point"},
       [](C& c, const S& v) {
         c.continuation.budget.point_stride = int_in("[continuation] point_stride", v, 1, 27);
       }},
      {{"continuation", "injectivity_points", "integer in [0, 10000]", "0", "vertex images checked pairwise per record"},
       [](C& c, const S& v) {
         c.continuation.budget.injectivity_points = int_in("[continuation] injectivity_points", v, 0, 10000);
       }},

      {{"probes", "objectivity_trials", "integer in [1, 100000]", "50", "random (F, Q) pairs in the objectivity check"},
       [](C& c, const S& v) { c.probes.objectivity_trials = int_in("[probes] objectivity_trials", v, 1, 100000); }},
      {{"probes", "homotopy_sweep", "true|false", "true", "factorize the origin homotopy at mu = 0, .25, .5, .75, 1"},
       [](C& c, const S& v) { c.probes.homotopy_sweep = boolean("[probes] homotopy_sweep", v); }},
      {{"probes", "global_min", "true|false", "false", "sample W on det F = 1"},
       [](C& c, const S& v) { c.probes.global_min = boolean("[probes] global_min", v); }},
      {{"probes", "global_min_samples", "integer in [1, 10000000]", "10000", "samples for global_min"},
       [](C& c, const S& v) {
         c.probes.global_min_samples = int_in("[probes] global_min_samples", v, 1, 10000000);
       }},
      {{"probes", "quasiconvexity", "true|false", "false", "flow-based volume-preserving perturbation integral"},
       [](C& c, const S& v) { c.probes.quasiconvexity = boolean("[probes] quasiconvexity", v); }},
      {{"probes", "qc_amplitude", "real", "0.05", "vortex amplitude"},
       [](C& c, const S& v) { c.probes.qc_amplitude = number<double>("[probes] qc_amplitude", v); }},
      {{"probes", "qc_support", "real in (0, 1]", "0.8", "support half-width over mesh half-extent"},
       [](C& c, const S& v) { c.probes.qc_support = real_in("[probes] qc_support", v, 0.0, 1.0, true); }},
      {{"probes", "qc_flow_steps", "integer in [100, 100000]", "200", "RK4 steps of the time-1 flow"},
       [](C& c, const S& v) { c.probes.qc_flow_steps = int_in("[probes] qc_flow_steps", v, 100, 100000); }},
      {{"probes", "qc_cells", "integer in [1, 64]", "4", "quadrature cells per axis over the support"},
       [](C& c, const S& v) { c.probes.qc_cells = int_in("[probes] qc_cells", v, 1, 64); }},
      {{"probes", "uniqueness", "true|false", "false", "multi-start Newton at zero load"},
       [](C& c, const S& v) { c.probes.uniqueness = boolean("[probes] uniqueness", v); }},
      {{"probes", "uniqueness_starts", "integer in [1, 100000]", "20", "random starts"},
       [](C& c, const S& v) { c.probes.uniqueness_starts = int_in("[probes] uniqueness_starts", v, 1, 100000); }},
      {{"probes", "uniqueness_radius", "real >= 0", "0.05", "bound on nodal |u| of each start"},
       [](C& c, const S& v) { c.probes.uniqueness_radius = real_in("[probes] uniqueness_radius", v, 0.0, big); }},

      {{"output", "directory", "path", "out", "artifact directory, created if missing"},
       [](C& c, const S& v) { c.output.directory = path_value("[output] directory", v); }},
      {{"output", "csv", "file name", "branch.csv", "branch CSV inside the directory"},
       [](C& c, const S& v) { c.output.csv = path_value("[output] csv", v); }},
      {{"output", "summary", "file name", "summary.txt", "run summary inside the directory"},
       [](C& c, const S& v) { c.output.summary = path_value("[output] summary", v); }},
      {{"output", "vtk_every", "integer in [0, 1000000]", "0", "snapshot every k accepted steps; 0 disables"},
       [](C& c, const S& v) { c.output.vtk_every = int_in("[output] vtk_every", v, 0, 1000000); }},
      {{"output", "vtk_prefix", "file name prefix", "snapshot", "snapshots are <prefix>_<step>.vtk"},
       [](C& c, const S& v) { c.output.vtk_prefix = path_value("[output] vtk_prefix", v); }},

      {{"run", "seed", "unsigned 64-bit integer", "1", "seed for every random draw"},
       [](C& c, const S& v) { c.seed = number<std::uint64_t>("[run] seed", v); }},
      {{"run", "workers", "integer in [1, 256]", "1", "threads for element loops and probe sampling"},
       [](C& c, const S& v) { c.workers = int_in("[run] workers", v, 1, 256); }},
  };
  return table;
}

}  // namespace

const std::vector<SchemaEntry>& config_schema()
{
  static const std::vector<SchemaEntry> entries = [] {
    std::vector<SchemaEntry> out;
    for (const auto& f : fields())
      out.push_back(f.entry);
    return out;
  }();
  return entries;
}

std::string schema_markdown()
{
  const auto cell = [](const std::string& text) {
    std::string out;
    for (char c : text) {
      if (c == '|')
        out += '\\';
      out += c;
    }
    return out;
  };
  std::ostringstream os;
  std::string section;
  for (const auto& e : config_schema()) {
    if (e.section != section) {
      section = e.section;
      os << (os.tellp() > 0 ? "\n" : "") << "### [" << section << "]\n\n"
         << "| key | type | default | meaning |\n|---|---|---|---|\n";
    }
    os << "| `" << e.key << "` | " << cell(e.type) << " | `" << e.default_value << "` | " << cell(e.description)
       << " |\n";
  }
  return os.str();
}

RunConfig parse_config_text(const std::string& text)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  RunConfig cfg;
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    const auto& table = fields();
    if (std::none_of(table.begin(), table.end(), [&](const Field& f) { return f.entry.section == section; })) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("config: key '" + section + "' outside a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
        return f.entry.section == section && f.entry.key == key;
      });
      if (it == table.end())
        throw ConfigError("[" + section + "] " + key + ": unknown key");
      it->set(cfg, value.data());
      seen.insert(section + "." + key);
    }
  }

  if (cfg.material.model == MaterialKind::NeoHookean && (seen.count("material.c1") || seen.count("material.c2")))
    throw ConfigError("[material] c1/c2 apply to mooney_rivlin only; neo_hookean takes mu");
  if (cfg.material.model == MaterialKind::MooneyRivlin) {
    if (seen.count("material.mu"))
      throw ConfigError("[material] mu applies to neo_hookean only; mooney_rivlin takes c1 and c2");
    if (cfg.material.c1 + cfg.material.c2 <= 0.0)
      throw ConfigError("[material] c1 + c2 must be positive");
  }
  try {
    cfg.continuation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[continuation] ") + e.what());
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str());
}

}  // namespace isobranch
