#ifndef FPOIS_TENSOR_HPP
#define FPOIS_TENSOR_HPP

#include <vector>

#include <Eigen/Core>

namespace fpois::tensor {

// Cyclic axis rotation of a hypercubic row-major tensor of side m, dim k:
// out[j_2,...,j_k,j_1] = in[j_1,...,j_k].
void rotate_axes(const Eigen::ArrayXd& in, Eigen::ArrayXd& out, int m, int k);

// y = (T_1 (x) T_2 (x) ... (x) T_k) x for a row-major tensor x of side m:
// axis d is transformed by the m-by-m matrix T_d.
void apply_axis_matrices(Eigen::ArrayXd& x, const std::vector<Eigen::MatrixXd>& t_per_axis,
                         int m, int k);

// Same with one matrix applied along every axis.
void apply_matrix_all_axes(Eigen::ArrayXd& x, const Eigen::MatrixXd& t, int m, int k);

}  // namespace fpois::tensor

#endif
