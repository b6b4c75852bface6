#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isobranch/assembly.hpp"
#include "isobranch/continuation.hpp"
#include "isobranch/material.hpp"

namespace isobranch {

struct MaterialConfig {
  MaterialKind model = MaterialKind::NeoHookean;
  double mu = 1.0;
  double c1 = 0.5;
  double c2 = 0.0;

  MaterialModel build() const;
};

struct MeshConfig {
  Vec3 extent = Vec3::Ones();
  std::array<int, 3> divisions{3, 3, 3};
  bool centered = true;
};

struct ProbeConfig {
  int objectivity_trials = 50;
  bool homotopy_sweep = true;

  bool global_min = false;
  int global_min_samples = 10000;

  bool quasiconvexity = false;
  double qc_amplitude = 0.05;
  /// Support half-width as a fraction of the mesh half-extent.
  double qc_support = 0.8;
  int qc_flow_steps = 200;
  int qc_cells = 4;

  bool uniqueness = false;
  int uniqueness_starts = 20;
  double uniqueness_radius = 0.05;
};

struct OutputConfig {
  std::string directory = "out";
  std::string csv = "branch.csv";
  std::string summary = "summary.txt";
  /// Snapshot every k accepted steps, counting the origin as step 0. 0 disables snapshots.
  int vtk_every = 0;
  std::string vtk_prefix = "snapshot";
};

struct RunConfig {
  MaterialConfig material;
  MeshConfig mesh;
  LoadProgram loading;
  ContinuationSettings continuation;
  ProbeConfig probes;
  OutputConfig output;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// One accepted key. type is a short human-readable description of the value syntax and range.
struct SchemaEntry {
  std::string section;
  std::string key;
  std::string type;
  std::string default_value;
  std::string description;
};

const std::vector<SchemaEntry>& config_schema();

/// Markdown table of config_schema().
std::string schema_markdown();

/**
 * Sectioned key = value text. Every key must appear in config_schema(); values are
 * range-checked and cross-field constraints are applied. Throws ConfigError.
 */
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace isobranch
