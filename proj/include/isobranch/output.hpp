#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "isobranch/assembly.hpp"
#include "isobranch/continuation.hpp"

namespace isobranch {

/// Frozen column set of the branch CSV.
inline constexpr const char* branch_csv_header =
    "lambda,norm_u_inf,norm_gradu_inf,norm_p_inf,min_detF,max_det_dev,se_margin,adn_min_abs,jac_det_sign,newton_iters,"
    "ds";

/// Reals with 17 significant digits, integers as integers.
std::string format_csv_row(const BranchRecord& record);

/// Writes the header on construction and flushes after every row.
class BranchCsvWriter {
public:
  explicit BranchCsvWriter(const std::string& path);
  void write(const BranchRecord& record);

private:
  std::ofstream out_;
};

/// Throws SchemaError on a header or row mismatch. A zero-byte file reads as no records.
/// A missing file throws std::runtime_error.
std::vector<BranchRecord> read_branch_csv(const std::string& path);

/**
 * Legacy VTK unstructured grid, ASCII. Points are the deformed vertex positions
 * A x + u; point data "u" is the total displacement A x + u - x and "p" the pressure.
 */
void write_vtk(const std::string& path, const Discretization& disc, const LoadProgram& program, const State& state);

/// %.17g
std::string format_real(double v);

/// Ordered sectioned key = value document, written in the same syntax as the config.
class Summary {
public:
  void set(const std::string& section, const std::string& key, const std::string& value);
  void set(const std::string& section, const std::string& key, double value) { set(section, key, format_real(value)); }
  void set(const std::string& section, const std::string& key, int value)
  {
    set(section, key, std::to_string(value));
  }
  void set(const std::string& section, const std::string& key, bool value)
  {
    set(section, key, std::string(value ? "true" : "false"));
  }
  void set(const std::string& section, const std::string& key, const char* value)
  {
    set(section, key, std::string(value));
  }

  std::string text() const;
  void write(const std::string& path) const;

private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

}  // namespace isobranch
