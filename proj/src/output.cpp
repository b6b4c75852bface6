#include "isobranch/output.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include "isobranch/errors.hpp"

namespace isobranch {

std::string format_real(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_csv_row(const BranchRecord& r)
{
  std::ostringstream os;
  os << format_real(r.lambda) << ',' << format_real(r.norm_u_inf) << ',' << format_real(r.norm_gradu_inf) << ','
     << format_real(r.norm_p_inf) << ',' << format_real(r.min_det) << ',' << format_real(r.max_det_dev) << ','
     << format_real(r.se_margin) << ',' << format_real(r.adn_min_abs) << ',' << r.jac_det_sign << ','
     << r.newton_iters << ',' << format_real(r.ds);
  return os.str();
}

BranchCsvWriter::BranchCsvWriter(const std::string& path) : out_(path, std::ios::trunc)
{
  if (!out_)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out_ << branch_csv_header << '\n' << std::flush;
}

void BranchCsvWriter::write(const BranchRecord& record)
{
  out_ << format_csv_row(record) << '\n' << std::flush;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

double cell_real(const std::string& s, int line, int column)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size())
    throw SchemaError("branch CSV line " + std::to_string(line) + ", column " + std::to_string(column + 1) +
                      ": not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<BranchRecord> read_branch_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open branch CSV '" + path + "'");
  std::vector<BranchRecord> records;
  std::string line;
  if (!std::getline(in, line))
    return records;
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != branch_csv_header)
    throw SchemaError("branch CSV header mismatch: expected '" + std::string(branch_csv_header) + "', got '" + line +
                      "'");
  for (int n = 2; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto c = split(line);
    if (c.size() != 11)
      throw SchemaError("branch CSV line " + std::to_string(n) + ": expected 11 columns, got " +
                        std::to_string(c.size()));
    double v[11];
    for (int i = 0; i < 11; ++i)
      v[i] = cell_real(c[static_cast<std::size_t>(i)], n, i);
    BranchRecord r;
    r.lambda = v[0];
    r.norm_u_inf = v[1];
    r.norm_gradu_inf = v[2];
    r.norm_p_inf = v[3];
    r.min_det = v[4];
    r.max_det_dev = v[5];
    r.se_margin = v[6];
    r.adn_min_abs = v[7];
    r.jac_det_sign = static_cast<int>(v[8]);
    r.newton_iters = static_cast<int>(v[9]);
    r.ds = v[10];
    if (r.jac_det_sign != v[8] || r.newton_iters != v[9])
      throw SchemaError("branch CSV line " + std::to_string(n) + ": jac_det_sign and newton_iters must be integers");
    records.push_back(r);
  }
  return records;
}

void write_vtk(const std::string& path, const Discretization& disc, const LoadProgram& program, const State& state)
{
  const Mesh& mesh = disc.mesh();
  const Mat3 a = program.boundary_map(state.lambda);
  const std::size_t nv = mesh.vertices.size();

  std::vector<int> q2_of_vertex(nv, -1);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int b = 0; b < 8; ++b) {
      const auto o = shape::q1_offset(b);
      q2_of_vertex[static_cast<std::size_t>(mesh.hexes[e][b])] = mesh.q2_cells[e][2 * o[0] + 6 * o[1] + 18 * o[2]];
    }

  // VTK_HEXAHEDRON corner order in terms of local lattice offsets
  static const std::array<std::array<int, 3>, 8> vtk_corner{
      {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};
  std::array<int, 8> local{};
  for (int c = 0; c < 8; ++c)
    for (int b = 0; b < 8; ++b)
      if (shape::q1_offset(b) == vtk_corner[static_cast<std::size_t>(c)])
        local[static_cast<std::size_t>(c)] = b;

  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# vtk DataFile Version 3.0\n"
      << "isobranch lambda " << format_real(state.lambda) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  std::vector<Vec3> total(nv);
  out << "POINTS " << nv << " double\n";
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec3& x = mesh.vertices[v];
    const Vec3 fx = a * x + disc.nodal_displacement(state, q2_of_vertex[v]);
    total[v] = fx - x;
    out << format_real(fx.x()) << ' ' << format_real(fx.y()) << ' ' << format_real(fx.z()) << '\n';
  }
  const int ne = mesh.num_elements();
  out << "CELLS " << ne << ' ' << 9 * ne << '\n';
  for (int e = 0; e < ne; ++e) {
    out << 8;
    for (int c = 0; c < 8; ++c)
      out << ' ' << mesh.hexes[e][local[static_cast<std::size_t>(c)]];
    out << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e)
    out << "12\n";
  out << "POINT_DATA " << nv << "\nVECTORS u double\n";
  for (const Vec3& u : total)
    out << format_real(u.x()) << ' ' << format_real(u.y()) << ' ' << format_real(u.z()) << '\n';
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (std::size_t v = 0; v < nv; ++v)
    out << format_real(disc.vertex_pressure(state, static_cast<int>(v))) << '\n';
  if (!out)
    throw std::runtime_error("write failed for '" + path + "'");
}

void Summary::set(const std::string& section, const std::string& key, const std::string& value)
{
  std::string clean = value;
  for (char& ch : clean)
    if (ch == '\n' || ch == '\r')
      ch = ' ';
  auto sec = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
  if (sec == sections_.end()) {
    sections_.push_back({section, {}});
    sec = sections_.end() - 1;
  }
  for (auto& kv : sec->second)
    if (kv.first == key) {
      kv.second = clean;
      return;
    }
  sec->second.emplace_back(key, clean);
}

std::string Summary::text() const
{
  std::ostringstream os;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (i > 0)
      os << '\n';
    os << '[' << sections_[i].first << "]\n";
    for (const auto& [k, v] : sections_[i].second)
      os << k << " = " << v << '\n';
  }
  return os.str();
}

void Summary::write(const std::string& path) const
{
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text();
}

}  // namespace isobranch
