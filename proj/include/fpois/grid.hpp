#ifndef FPOIS_GRID_HPP
#define FPOIS_GRID_HPP

#include <array>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace fpois {

// Largest spatial dimension the desk-scale code paths support.
inline constexpr int kMaxDim = 8;

using MultiIndex = std::array<int, kMaxDim>;

// Regular lattice on ]0,1[^k with resolution n: interior points {1..n-1}^k,
// cells D_j = prod [j_d/n, (j_d+1)/n) indexed by {0..n-1}^k.
struct GridSpec {
  int k = 1;
  int n = 2;

  GridSpec() = default;
  GridSpec(int k_, int n_) : k(k_), n(n_) {
    if (k < 1 || k > kMaxDim) throw std::invalid_argument("GridSpec: k out of range");
    if (n < 2) throw std::invalid_argument("GridSpec: n must be >= 2");
  }

  std::int64_t interior_count() const { return ipow(n - 1, k); }
  std::int64_t cell_count() const { return ipow(n, k); }

  // kappa_n(x) = j/n for the cell D_j containing x; returns j per axis.
  int snap_axis(double x) const {
    if (x < 0.0 || x >= 1.0) throw std::invalid_argument("kappa_n: point outside [0,1)");
    int j = static_cast<int>(x * n);
    if (j >= n) j = n - 1;  // guards x*n rounding up to n
    return j;
  }

  static std::int64_t ipow(std::int64_t base, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  }

  bool operator==(const GridSpec& o) const { return k == o.k && n == o.n; }
};

// Flat row-major offset of a multi-index with `k` axes of common side `m`.
// Axis 0 varies slowest.
inline std::int64_t flat_index(const MultiIndex& idx, int k, int m) {
  std::int64_t f = 0;
  for (int d = 0; d < k; ++d) f = f * m + idx[d];
  return f;
}

inline MultiIndex unflatten(std::int64_t flat, int k, int m) {
  MultiIndex idx{};
  for (int d = k - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % m);
    flat /= m;
  }
  return idx;
}

// Odometer increment over {lo..hi}^k; returns false after the last index.
inline bool next_index(MultiIndex& idx, int k, int lo, int hi) {
  for (int d = k - 1; d >= 0; --d) {
    if (idx[d] < hi) {
      ++idx[d];
      return true;
    }
    idx[d] = lo;
  }
  return false;
}

// Real-valued function on the interior lattice points; boundary values are
// implicitly zero. values_ is a flat row-major tensor of side n-1.
class LatticeField {
 public:
  LatticeField() = default;
  explicit LatticeField(const GridSpec& g)
      : grid_(g), values_(Eigen::ArrayXd::Zero(g.interior_count())) {}
  LatticeField(const GridSpec& g, Eigen::ArrayXd v) : grid_(g), values_(std::move(v)) {
    if (values_.size() != grid_.interior_count())
      throw std::invalid_argument("LatticeField: size mismatch");
  }

  const GridSpec& grid() const { return grid_; }
  Eigen::ArrayXd& values() { return values_; }
  const Eigen::ArrayXd& values() const { return values_; }

  // idx has entries in 1..n-1
  double at(const MultiIndex& idx) const {
    MultiIndex z{};
    for (int d = 0; d < grid_.k; ++d) z[d] = idx[d] - 1;
    return values_[flat_index(z, grid_.k, grid_.n - 1)];
  }
  double& at(const MultiIndex& idx) {
    MultiIndex z{};
    for (int d = 0; d < grid_.k; ++d) z[d] = idx[d] - 1;
    return values_[flat_index(z, grid_.k, grid_.n - 1)];
  }

 private:
  GridSpec grid_;
  Eigen::ArrayXd values_;
};

// Real-valued function constant on cells D_j, j in {0..n-1}^k.
class CellField {
 public:
  CellField() = default;
  explicit CellField(const GridSpec& g)
      : grid_(g), values_(Eigen::ArrayXd::Zero(g.cell_count())) {}
  CellField(const GridSpec& g, Eigen::ArrayXd v) : grid_(g), values_(std::move(v)) {
    if (values_.size() != grid_.cell_count())
      throw std::invalid_argument("CellField: size mismatch");
  }

  const GridSpec& grid() const { return grid_; }
  Eigen::ArrayXd& values() { return values_; }
  const Eigen::ArrayXd& values() const { return values_; }

  double at(const MultiIndex& cell) const {
    return values_[flat_index(cell, grid_.k, grid_.n)];
  }
  double& at(const MultiIndex& cell) {
    return values_[flat_index(cell, grid_.k, grid_.n)];
  }

  // Value at the cell containing x (the step extension h(kappa_n(x))).
  double at_point(const double* x) const {
    MultiIndex j{};
    for (int d = 0; d < grid_.k; ++d) j[d] = grid_.snap_axis(x[d]);
    return at(j);
  }

 private:
  GridSpec grid_;
  Eigen::ArrayXd values_;
};

// Interior restriction: cell values at cells D_i, i in {1..n-1}^k.
LatticeField interior_part(const CellField& c);

// Step extension: interior values placed on their cells, zero on cells with
// any zero coordinate.
CellField cell_extension(const LatticeField& u);

// L2(D) norm of the difference of two cell-constant fields whose grids are
// nested (coarse.n divides fine.n).
double l2_cell_distance(const CellField& coarse, const CellField& fine);

// Numerical error distinct from validation errors; the CLI maps it to its
// own exit code.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpois

#endif
