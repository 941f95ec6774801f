#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "philab/common.hpp"

namespace philab {

/// P1 element on the unit interval (2 vertices) or a structured right
/// triangle on the unit square (3 vertices). Hat-function gradients are
/// constant per element.
struct Element {
  std::array<int, 3> nodes{-1, -1, -1};
  int nverts = 0;
  double measure = 0.0;
  Eigen::MatrixXd hat_grads;   // n x nverts
  Eigen::VectorXd barycenter;  // n
};

/// Structured mesh of (0,1)^n, n in {1,2}, resolution h = 1/M per axis.
/// In 2D each cell is split into two right triangles.
class Mesh {
 public:
  static Mesh unit_interval(int M);
  static Mesh unit_square(int M);
  static Mesh make(int dim, int M);

  int dim() const { return dim_; }
  int resolution() const { return M_; }
  double h() const { return 1.0 / M_; }
  int num_nodes() const { return static_cast<int>(coords_.rows()); }
  const Eigen::MatrixXd& coords() const { return coords_; }  // nodes x n
  Eigen::VectorXd node(int i) const { return coords_.row(i).transpose(); }
  const std::vector<Element>& elements() const { return elements_; }
  bool is_boundary(int node) const { return is_boundary_[node]; }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  /// -1 for Dirichlet nodes, else index into free_nodes().
  int free_index(int node) const { return free_index_[node]; }

 private:
  Mesh() = default;
  int dim_ = 0, M_ = 0;
  Eigen::MatrixXd coords_;
  std::vector<Element> elements_;
  std::vector<bool> is_boundary_;
  std::vector<int> free_nodes_;
  std::vector<int> free_index_;
  void finalize_boundary(const std::vector<bool>& boundary);
};

}  // namespace philab
