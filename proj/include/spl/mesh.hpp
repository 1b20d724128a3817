#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "spl/domain.hpp"

namespace spl {

// Conforming simplicial mesh: segments on an interval, triangles on a
// rectangle or disk. Nodes are unique; boundary flags mark nodes on the
// geometric boundary, where all discrete fields vanish.
struct Mesh {
  int dim = 1;
  Eigen::MatrixXd nodes;     // n_nodes x dim
  Eigen::MatrixXi elements;  // n_elems x (dim+1)
  std::vector<uint8_t> boundary;
  std::vector<int> interior;  // indices of non-boundary nodes
  double diam = 0.0;
  Domain domain;

  int n_nodes() const { return static_cast<int>(nodes.rows()); }
  int n_elems() const { return static_cast<int>(elements.rows()); }
};

using MeshPtr = std::shared_ptr<const Mesh>;

// resolution = elements per axis (>= 2). Interval: `resolution` segments.
// Rectangle: resolution^2 cells, each split into two triangles. Disk:
// `resolution` concentric rings of triangles.
MeshPtr build_mesh(const Domain& domain, int resolution);

// Nodal P1 field over a mesh. Fields representing members of the zero-trace
// space keep zero values at boundary nodes.
struct Field {
  MeshPtr mesh;
  Eigen::VectorXd values;
  bool zero_boundary = true;

  static Field zeros(MeshPtr m);
  void enforce_zero_boundary();
  double max() const { return values.maxCoeff(); }
  double min_interior() const;
};

// Uniform refinement (each segment halved / each triangle quadrisected);
// the refined mesh's P1 space contains the coarse one.
MeshPtr refine(const Mesh& mesh);

// Linear interpolation of a coarse field onto a mesh produced by `refine`.
Field interpolate_refined(const Field& coarse, MeshPtr fine);

}  // namespace spl
