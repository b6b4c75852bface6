#pragma once

#include <array>
#include <functional>
#include <vector>

#include "isobranch/tensor3.hpp"

namespace isobranch {

/// Reference hexahedron [-1,1]^3 shape functions.
namespace shape {

/// 3-point Gauss rule on [-1,1].
inline constexpr std::array<double, 3> gauss_points{-0.77459666924148337704, 0.0, 0.77459666924148337704};
inline constexpr std::array<double, 3> gauss_weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

/// Vertex a of the trilinear hexahedron in VTK order, as lattice offsets in {0,1}^3.
std::array<int, 3> q1_offset(int a);
double q1_value(int a, const Vec3& xi);
Vec3 q1_gradient(int a, const Vec3& xi);

/// Q2 node a = i + 3 j + 9 k with i, j, k in {0,1,2} at reference coordinate (i-1, j-1, k-1).
double q2_value(int a, const Vec3& xi);
Vec3 q2_gradient(int a, const Vec3& xi);

/// Reference coordinates of the 27 volume Gauss points, lexicographic.
const std::array<Vec3, 27>& volume_points();
const std::array<double, 27>& volume_weights();

}  // namespace shape

struct BoundaryFacet {
  int element = -1;
  int face = -1;  // 0:-x 1:+x 2:-y 3:+y 4:-z 5:+z
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  std::array<Vec3, 9> points{};
  std::array<double, 9> weights{};
};

struct ElementQuadrature {
  std::array<Vec3, 27> points{};
  std::array<double, 27> jxw{};
  /// dx/dxi at each Gauss point.
  std::array<Mat3, 27> jacobian{};
};

/**
 * Hexahedral mesh on a structured lattice of boxes.
 *
 * Geometry and pressure live on the 8-node vertex mesh; displacement uses
 * the 27-node Q2 layer sharing the same cells.
 */
struct Mesh {
  std::array<int, 3> divisions{};
  Vec3 lower = Vec3::Zero();
  Vec3 cell_size = Vec3::Zero();

  std::vector<Vec3> vertices;
  std::vector<std::array<int, 8>> hexes;
  std::vector<bool> vertex_on_boundary;

  std::vector<Vec3> q2_nodes;
  std::vector<std::array<int, 27>> q2_cells;
  std::vector<bool> q2_on_boundary;

  std::vector<BoundaryFacet> facets;
  std::vector<ElementQuadrature> quadrature;

  int num_elements() const { return static_cast<int>(hexes.size()); }
  int num_boundary_vertices() const;
  double volume() const;
  Vec3 centroid() const;
  /// True if x lies in the closed union of the cells.
  bool contains(const Vec3& x, double tol = 1e-12) const;
};

Mesh build_box_mesh(const Vec3& extent, const std::array<int, 3>& divisions, bool center_at_origin);

/// Box lattice with only the cells (i, j, k) for which keep returns true.
Mesh build_masked_box_mesh(const Vec3& extent, const std::array<int, 3>& divisions, bool center_at_origin,
                           const std::function<bool(int, int, int)>& keep);

struct StarShapeReport {
  double min_value = 0.0;  // min n(x) . (x - origin) over boundary quadrature points
  Vec3 argmin = Vec3::Zero();
  int facet = -1;
  bool passed = false;
};

/// Throws DomainError if origin is outside the closed domain.
StarShapeReport star_shape_check(const Mesh& mesh, const Vec3& origin);

struct NodalValue {
  int node;
  Vec3 value;
};

/// (A - I) x at every boundary vertex.
std::vector<NodalValue> boundary_values(const Mesh& mesh, const Mat3& a);

}  // namespace isobranch
