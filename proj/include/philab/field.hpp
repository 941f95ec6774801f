#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "philab/mesh.hpp"

namespace philab {

/// Piecewise-linear-in-space, sampled-in-time vector field u on a mesh.
/// values[k] is (nodes x N); the per-element gradient of each slice is a
/// constant N x n matrix. Immutable after construction.
class SpaceTimeField {
 public:
  SpaceTimeField(std::shared_ptr<const Mesh> mesh, int components,
                 std::vector<double> times, std::vector<Eigen::MatrixXd> values)
      : mesh_(std::move(mesh)), N_(components), times_(std::move(times)),
        values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
      throw UsageError("SpaceTimeField: times/values mismatch");
    for (std::size_t k = 0; k + 1 < times_.size(); ++k)
      if (!(times_[k] < times_[k + 1]))
        throw UsageError("SpaceTimeField: times must be strictly increasing");
    for (const auto& v : values_)
      if (v.rows() != mesh_->num_nodes() || v.cols() != N_)
        throw UsageError("SpaceTimeField: slice shape mismatch");
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int components() const { return N_; }
  int num_times() const { return static_cast<int>(times_.size()); }
  const std::vector<double>& times() const { return times_; }
  double time(int k) const { return times_[k]; }
  const Eigen::MatrixXd& slice(int k) const { return values_[k]; }
  const Eigen::MatrixXd& initial_slice() const { return values_.front(); }

  /// Constant gradient of slice k on element e, as an N x n GradientMatrix.
  Eigen::MatrixXd gradient(int k, int e) const {
    const Element& el = mesh_->elements()[e];
    Eigen::MatrixXd du = Eigen::MatrixXd::Zero(N_, mesh_->dim());
    for (int v = 0; v < el.nverts; ++v)
      du.noalias() += values_[k].row(el.nodes[v]).transpose() * el.hat_grads.col(v).transpose();
    return du;
  }

  /// One-point (barycentric) value of slice k on element e.
  Eigen::VectorXd barycenter_value(int k, int e) const {
    const Element& el = mesh_->elements()[e];
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N_);
    for (int v = 0; v < el.nverts; ++v) u += values_[k].row(el.nodes[v]).transpose();
    return u / el.nverts;
  }

  /// Field with all nodal values scaled by a constant.
  SpaceTimeField scaled(double factor) const {
    std::vector<Eigen::MatrixXd> vals(values_);
    for (auto& v : vals) v *= factor;
    return SpaceTimeField(mesh_, N_, times_, std::move(vals));
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int N_;
  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> values_;
};

}  // namespace philab
