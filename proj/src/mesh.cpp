#include "philab/mesh.hpp"

namespace philab {

void Mesh::finalize_boundary(const std::vector<bool>& boundary) {
  is_boundary_ = boundary;
  free_index_.assign(num_nodes(), -1);
  for (int i = 0; i < num_nodes(); ++i) {
    if (!is_boundary_[i]) {
      free_index_[i] = static_cast<int>(free_nodes_.size());
      free_nodes_.push_back(i);
    }
  }
}

Mesh Mesh::unit_interval(int M) {
  if (M < 2) throw UsageError("Mesh: resolution M must be at least 2");
  Mesh m;
  m.dim_ = 1;
  m.M_ = M;
  const double h = 1.0 / M;
  m.coords_.resize(M + 1, 1);
  for (int i = 0; i <= M; ++i) m.coords_(i, 0) = i * h;
  m.elements_.resize(M);
  for (int e = 0; e < M; ++e) {
    Element& el = m.elements_[e];
    el.nodes = {e, e + 1, -1};
    el.nverts = 2;
    el.measure = h;
    el.hat_grads.resize(1, 2);
    el.hat_grads << -1.0 / h, 1.0 / h;
    el.barycenter.resize(1);
    el.barycenter << (e + 0.5) * h;
  }
  std::vector<bool> boundary(M + 1, false);
  boundary.front() = boundary.back() = true;
  m.finalize_boundary(boundary);
  return m;
}

Mesh Mesh::unit_square(int M) {
  if (M < 2) throw UsageError("Mesh: resolution M must be at least 2");
  Mesh m;
  m.dim_ = 2;
  m.M_ = M;
  const double h = 1.0 / M;
  const int stride = M + 1;
  m.coords_.resize(stride * stride, 2);
  for (int j = 0; j <= M; ++j)
    for (int i = 0; i <= M; ++i) {
      m.coords_(j * stride + i, 0) = i * h;
      m.coords_(j * stride + i, 1) = j * h;
    }
  auto add_triangle = [&](int a, int b, int c) {
    Element el;
    el.nodes = {a, b, c};
    el.nverts = 3;
    const Eigen::Vector2d pa = m.coords_.row(a), pb = m.coords_.row(b), pc = m.coords_.row(c);
    const Eigen::Vector2d e1 = pb - pa, e2 = pc - pa;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    el.measure = 0.5 * std::abs(det);
    // gradients of barycentric hats from the inverse affine map
    el.hat_grads.resize(2, 3);
    el.hat_grads.col(1) << e2.y() / det, -e2.x() / det;
    el.hat_grads.col(2) << -e1.y() / det, e1.x() / det;
    el.hat_grads.col(0) = -el.hat_grads.col(1) - el.hat_grads.col(2);
    el.barycenter = (pa + pb + pc) / 3.0;
    m.elements_.push_back(std::move(el));
  };
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      const int v00 = j * stride + i, v10 = v00 + 1, v01 = v00 + stride, v11 = v01 + 1;
      add_triangle(v00, v10, v01);
      add_triangle(v10, v11, v01);
    }
  std::vector<bool> boundary(stride * stride, false);
  for (int j = 0; j <= M; ++j)
    for (int i = 0; i <= M; ++i)
      if (i == 0 || j == 0 || i == M || j == M) boundary[j * stride + i] = true;
  m.finalize_boundary(boundary);
  return m;
}

Mesh Mesh::make(int dim, int M) {
  if (dim == 1) return unit_interval(M);
  if (dim == 2) return unit_square(M);
  throw UsageError("Mesh: dimension must be 1 or 2");
}

}  // namespace philab
