#include "isobranch/mesh.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isobranch/errors.hpp"

namespace isobranch {

namespace shape {

namespace {

constexpr std::array<std::array<int, 3>, 8> kVertexOffsets{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

double lagrange2(int i, double s)
{
  switch (i) {
  case 0:
    return 0.5 * s * (s - 1.0);
  case 1:
    return 1.0 - s * s;
  default:
    return 0.5 * s * (s + 1.0);
  }
}

double lagrange2_deriv(int i, double s)
{
  switch (i) {
  case 0:
    return s - 0.5;
  case 1:
    return -2.0 * s;
  default:
    return s + 0.5;
  }
}

double linear(int i, double s) { return i == 0 ? 0.5 * (1.0 - s) : 0.5 * (1.0 + s); }
double linear_deriv(int i) { return i == 0 ? -0.5 : 0.5; }

}  // namespace

std::array<int, 3> q1_offset(int a) { return kVertexOffsets[static_cast<std::size_t>(a)]; }

double q1_value(int a, const Vec3& xi)
{
  const auto& o = kVertexOffsets[static_cast<std::size_t>(a)];
  return linear(o[0], xi.x()) * linear(o[1], xi.y()) * linear(o[2], xi.z());
}

Vec3 q1_gradient(int a, const Vec3& xi)
{
  const auto& o = kVertexOffsets[static_cast<std::size_t>(a)];
  const double lx = linear(o[0], xi.x()), ly = linear(o[1], xi.y()), lz = linear(o[2], xi.z());
  return {linear_deriv(o[0]) * ly * lz, lx * linear_deriv(o[1]) * lz, lx * ly * linear_deriv(o[2])};
}

double q2_value(int a, const Vec3& xi)
{
  const int i = a % 3, j = (a / 3) % 3, k = a / 9;
  return lagrange2(i, xi.x()) * lagrange2(j, xi.y()) * lagrange2(k, xi.z());
}

Vec3 q2_gradient(int a, const Vec3& xi)
{
  const int i = a % 3, j = (a / 3) % 3, k = a / 9;
  const double lx = lagrange2(i, xi.x()), ly = lagrange2(j, xi.y()), lz = lagrange2(k, xi.z());
  return {lagrange2_deriv(i, xi.x()) * ly * lz, lx * lagrange2_deriv(j, xi.y()) * lz,
          lx * ly * lagrange2_deriv(k, xi.z())};
}

const std::array<Vec3, 27>& volume_points()
{
  static const std::array<Vec3, 27> pts = [] {
    std::array<Vec3, 27> p;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          p[static_cast<std::size_t>(i + 3 * j + 9 * k)] = Vec3(gauss_points[i], gauss_points[j], gauss_points[k]);
    return p;
  }();
  return pts;
}

const std::array<double, 27>& volume_weights()
{
  static const std::array<double, 27> w = [] {
    std::array<double, 27> out;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          out[static_cast<std::size_t>(i + 3 * j + 9 * k)] = gauss_weights[i] * gauss_weights[j] * gauss_weights[k];
    return out;
  }();
  return w;
}

}  // namespace shape

namespace {

Vec3 map_point(const Mesh& mesh, int e, const Vec3& xi)
{
  Vec3 x = Vec3::Zero();
  for (int a = 0; a < 8; ++a)
    x += shape::q1_value(a, xi) * mesh.vertices[static_cast<std::size_t>(mesh.hexes[e][a])];
  return x;
}

Mat3 map_jacobian(const Mesh& mesh, int e, const Vec3& xi)
{
  Mat3 j = Mat3::Zero();
  for (int a = 0; a < 8; ++a)
    j += mesh.vertices[static_cast<std::size_t>(mesh.hexes[e][a])] * shape::q1_gradient(a, xi).transpose();
  return j;
}

}  // namespace

int Mesh::num_boundary_vertices() const
{
  int n = 0;
  for (bool b : vertex_on_boundary)
    n += b ? 1 : 0;
  return n;
}

double Mesh::volume() const
{
  double v = 0.0;
  for (const auto& q : quadrature)
    for (double w : q.jxw)
      v += w;
  return v;
}

Vec3 Mesh::centroid() const
{
  Vec3 c = Vec3::Zero();
  double v = 0.0;
  for (const auto& q : quadrature)
    for (int n = 0; n < 27; ++n) {
      c += q.jxw[n] * q.points[n];
      v += q.jxw[n];
    }
  return c / v;
}

bool Mesh::contains(const Vec3& x, double tol) const
{
  for (const auto& hex : hexes) {
    const Vec3& lo = vertices[static_cast<std::size_t>(hex[0])];
    const Vec3& hi = vertices[static_cast<std::size_t>(hex[6])];
    if ((x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all())
      return true;
  }
  return false;
}

Mesh build_masked_box_mesh(const Vec3& extent, const std::array<int, 3>& divisions, bool center_at_origin,
                           const std::function<bool(int, int, int)>& keep)
{
  for (int d = 0; d < 3; ++d) {
    if (divisions[d] < 2)
      throw std::invalid_argument("build_box_mesh: divisions must be >= 2 in every direction");
    if (!(extent(d) > 0.0))
      throw std::invalid_argument("build_box_mesh: extents must be positive");
  }
  const auto [nx, ny, nz] = divisions;

  Mesh mesh;
  mesh.divisions = divisions;
  mesh.lower = center_at_origin ? Vec3(-0.5 * extent) : Vec3::Zero();
  mesh.cell_size = Vec3(extent.x() / nx, extent.y() / ny, extent.z() / nz);

  auto active = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz && keep(i, j, k);
  };

  // Q2 lattice has 2n+1 points per axis; vertices sit on even lattice indices.
  const int lx = 2 * nx + 1, ly = 2 * ny + 1, lz = 2 * nz + 1;
  auto lattice_id = [&](int i, int j, int k) { return i + lx * (j + ly * k); };
  auto lattice_point = [&](int i, int j, int k) {
    return Vec3(mesh.lower.x() + 0.5 * i * mesh.cell_size.x(), mesh.lower.y() + 0.5 * j * mesh.cell_size.y(),
                mesh.lower.z() + 0.5 * k * mesh.cell_size.z());
  };

  std::vector<char> q2_used(static_cast<std::size_t>(lx * ly * lz), 0);
  std::vector<char> q2_bnd(q2_used.size(), 0);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!active(i, j, k))
          continue;
        for (int c = 0; c < 3; ++c)
          for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a)
              q2_used[static_cast<std::size_t>(lattice_id(2 * i + a, 2 * j + b, 2 * k + c))] = 1;
        // boundary faces: neighbor missing
        const std::array<std::array<int, 3>, 6> nb{
            {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k}, {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}}};
        for (int f = 0; f < 6; ++f) {
          if (active(nb[f][0], nb[f][1], nb[f][2]))
            continue;
          const int axis = f / 2;
          const int side = (f % 2) * 2;
          for (int s = 0; s < 3; ++s)
            for (int t = 0; t < 3; ++t) {
              std::array<int, 3> loc{};
              loc[axis] = side;
              loc[(axis + 1) % 3] = s;
              loc[(axis + 2) % 3] = t;
              q2_bnd[static_cast<std::size_t>(lattice_id(2 * i + loc[0], 2 * j + loc[1], 2 * k + loc[2]))] = 1;
            }
        }
      }

  std::vector<int> q2_index(q2_used.size(), -1);
  std::vector<int> vertex_index(q2_used.size(), -1);
  for (int k = 0; k < lz; ++k)
    for (int j = 0; j < ly; ++j)
      for (int i = 0; i < lx; ++i) {
        const auto id = static_cast<std::size_t>(lattice_id(i, j, k));
        if (!q2_used[id])
          continue;
        q2_index[id] = static_cast<int>(mesh.q2_nodes.size());
        mesh.q2_nodes.push_back(lattice_point(i, j, k));
        mesh.q2_on_boundary.push_back(q2_bnd[id] != 0);
        if (i % 2 == 0 && j % 2 == 0 && k % 2 == 0) {
          vertex_index[id] = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(lattice_point(i, j, k));
          mesh.vertex_on_boundary.push_back(q2_bnd[id] != 0);
        }
      }

  std::vector<std::array<int, 3>> cell_of_element;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!active(i, j, k))
          continue;
        std::array<int, 8> hex{};
        for (int a = 0; a < 8; ++a) {
          const auto o = shape::q1_offset(a);
          hex[a] = vertex_index[static_cast<std::size_t>(lattice_id(2 * (i + o[0]), 2 * (j + o[1]), 2 * (k + o[2])))];
        }
        std::array<int, 27> cell{};
        for (int c = 0; c < 3; ++c)
          for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a)
              cell[static_cast<std::size_t>(a + 3 * b + 9 * c)] =
                  q2_index[static_cast<std::size_t>(lattice_id(2 * i + a, 2 * j + b, 2 * k + c))];
        mesh.hexes.push_back(hex);
        mesh.q2_cells.push_back(cell);
        cell_of_element.push_back({i, j, k});
      }
  if (mesh.hexes.empty())
    throw std::invalid_argument("build_box_mesh: no active cells");

  const auto& ref_pts = shape::volume_points();
  const auto& ref_w = shape::volume_weights();
  mesh.quadrature.resize(mesh.hexes.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto& q = mesh.quadrature[static_cast<std::size_t>(e)];
    for (int n = 0; n < 27; ++n) {
      q.points[n] = map_point(mesh, e, ref_pts[n]);
      q.jacobian[n] = map_jacobian(mesh, e, ref_pts[n]);
      const double dj = det3(q.jacobian[n]);
      if (!(dj > 0.0))
        throw std::logic_error("build_box_mesh: non-positive element Jacobian");
      q.jxw[n] = ref_w[n] * dj;
    }
  }

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [i, j, k] = cell_of_element[static_cast<std::size_t>(e)];
    const std::array<std::array<int, 3>, 6> nb{
        {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k}, {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}}};
    const Vec3 elem_center = map_point(mesh, e, Vec3::Zero());
    for (int f = 0; f < 6; ++f) {
      if (active(nb[f][0], nb[f][1], nb[f][2]))
        continue;
      const int axis = f / 2;
      const int s_axis = (axis + 1) % 3, t_axis = (axis + 2) % 3;
      BoundaryFacet facet;
      facet.element = e;
      facet.face = f;
      Vec3 xi_c = Vec3::Zero();
      xi_c(axis) = (f % 2 == 0) ? -1.0 : 1.0;
      facet.centroid = map_point(mesh, e, xi_c);
      for (int t = 0; t < 3; ++t)
        for (int s = 0; s < 3; ++s) {
          Vec3 xi = xi_c;
          xi(s_axis) = shape::gauss_points[s];
          xi(t_axis) = shape::gauss_points[t];
          const Mat3 jm = map_jacobian(mesh, e, xi);
          const Vec3 area = jm.col(s_axis).cross(jm.col(t_axis));
          facet.points[s + 3 * t] = map_point(mesh, e, xi);
          facet.weights[s + 3 * t] = shape::gauss_weights[s] * shape::gauss_weights[t] * area.norm();
          if (s == 1 && t == 1) {
            facet.normal = area.normalized();
            if (facet.normal.dot(facet.centroid - elem_center) < 0.0)
              facet.normal = -facet.normal;
          }
        }
      mesh.facets.push_back(facet);
    }
  }
  return mesh;
}

Mesh build_box_mesh(const Vec3& extent, const std::array<int, 3>& divisions, bool center_at_origin)
{
  return build_masked_box_mesh(extent, divisions, center_at_origin, [](int, int, int) { return true; });
}

StarShapeReport star_shape_check(const Mesh& mesh, const Vec3& origin)
{
  if (!mesh.contains(origin))
    throw DomainError("star_shape_check: origin lies outside the domain");
  StarShapeReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
    const auto& facet = mesh.facets[f];
    for (const Vec3& x : facet.points) {
      const double v = facet.normal.dot(x - origin);
      if (v < report.min_value) {
        report.min_value = v;
        report.argmin = x;
        report.facet = static_cast<int>(f);
      }
    }
  }
  report.passed = report.min_value > 0.0;
  return report;
}

std::vector<NodalValue> boundary_values(const Mesh& mesh, const Mat3& a)
{
  std::vector<NodalValue> out;
  const Mat3 shift = a - Mat3::Identity();
  for (std::size_t n = 0; n < mesh.vertices.size(); ++n)
    if (mesh.vertex_on_boundary[n])
      out.push_back({static_cast<int>(n), shift * mesh.vertices[n]});
  return out;
}

}  // namespace isobranch
