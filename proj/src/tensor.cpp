#include "fpois/tensor.hpp"

#include <stdexcept>

namespace fpois::tensor {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Transform along the last (contiguous) axis: view x as (m^{k-1} x m)
// row-major and right-multiply by T^T, so each line l -> T l.
void apply_last_axis(Eigen::ArrayXd& x, const Eigen::MatrixXd& t, int m, int k) {
  const std::int64_t rows = ipow(m, k - 1);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> view(x.data(), rows, m);
  RowMat out = view * t.transpose();
  view = out;
}

}  // namespace

void rotate_axes(const Eigen::ArrayXd& in, Eigen::ArrayXd& out, int m, int k) {
  const std::int64_t total = ipow(m, k);
  if (in.size() != total) throw std::invalid_argument("rotate_axes: size mismatch");
  out.resize(total);
  if (k == 1) {
    out = in;
    return;
  }
  const std::int64_t rest = total / m;
  for (int j1 = 0; j1 < m; ++j1) {
    const double* src = in.data() + j1 * rest;
    double* dst = out.data() + j1;
    for (std::int64_t r = 0; r < rest; ++r) dst[r * m] = src[r];
  }
}

void apply_axis_matrices(Eigen::ArrayXd& x, const std::vector<Eigen::MatrixXd>& t_per_axis,
                         int m, int k) {
  if (static_cast<int>(t_per_axis.size()) != k)
    throw std::invalid_argument("apply_axis_matrices: need one matrix per axis");
  Eigen::ArrayXd scratch;
  // Rotate so axis d becomes the contiguous one, then transform it; after k
  // rounds the layout is back in the original order.
  for (int d = 0; d < k; ++d) {
    rotate_axes(x, scratch, m, k);
    x.swap(scratch);
    apply_last_axis(x, t_per_axis[d], m, k);
  }
}

void apply_matrix_all_axes(Eigen::ArrayXd& x, const Eigen::MatrixXd& t, int m, int k) {
  std::vector<Eigen::MatrixXd> ts(k, t);
  apply_axis_matrices(x, ts, m, k);
}

}  // namespace fpois::tensor
