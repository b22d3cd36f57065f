#include "fpois/noise.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>

#include "fpois/rng.hpp"
#include "fpois/tensor.hpp"

namespace fpois::noise {

namespace {

double pow2h(double v, double two_h) { return std::pow(std::abs(v), two_h); }

void check_h_dim(const HurstVector& h, const GridSpec& grid) {
  if (h.dim() != grid.k) throw std::invalid_argument("Hurst vector dimension != grid dimension");
}

// locate the first non-positive pivot for the error message
int failing_pivot(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= 0.0) return j;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i)
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return -1;
}

}  // namespace

double covariance_r(const HurstVector& h, const double* x, const double* y) {
  double prod = 1.0;
  for (int d = 0; d < h.dim(); ++d) {
    const double two_h = 2.0 * h[d];
    prod *= 0.5 * (pow2h(y[d], two_h) + pow2h(x[d], two_h) - pow2h(x[d] - y[d], two_h));
  }
  return prod;
}

double increment_covariance_1d(double h, double a, double b, double c, double d) {
  const double two_h = 2.0 * h;
  return 0.5 * (pow2h(b - c, two_h) + pow2h(a - d, two_h) - pow2h(a - c, two_h) -
                pow2h(b - d, two_h));
}

double increment_covariance(const HurstVector& h, const GridSpec& grid,
                            const MultiIndex& cell_i, const MultiIndex& cell_j) {
  check_h_dim(h, grid);
  const double n = grid.n;
  double prod = 1.0;
  for (int d = 0; d < grid.k; ++d) {
    prod *= increment_covariance_1d(h[d], cell_i[d] / n, (cell_i[d] + 1) / n, cell_j[d] / n,
                                    (cell_j[d] + 1) / n);
  }
  return prod;
}

Eigen::MatrixXd axis_covariance(double h, int n) {
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) = increment_covariance_1d(h, static_cast<double>(i) / n,
                                        static_cast<double>(i + 1) / n,
                                        static_cast<double>(j) / n,
                                        static_cast<double>(j + 1) / n);
  return c;
}

std::vector<Eigen::MatrixXd> build_axis_cholesky(const HurstVector& h, const GridSpec& grid) {
  check_h_dim(h, grid);
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(grid.k);
  for (int d = 0; d < grid.k; ++d) {
    if (h[d] == 0.5) {
      // independent increments: diagonal factor sqrt(1/n)
      factors.emplace_back(Eigen::MatrixXd(
          (std::sqrt(1.0 / grid.n) * Eigen::VectorXd::Ones(grid.n)).asDiagonal()));
      continue;
    }
    Eigen::MatrixXd c = axis_covariance(h[d], grid.n);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "axis covariance not positive definite: axis " << d << ", pivot "
          << failing_pivot(c);
      throw NumericalError(msg.str());
    }
    factors.emplace_back(llt.matrixL());
  }
  return factors;
}

NoiseSample sample(const HurstVector& h, const GridSpec& grid, std::uint64_t seed,
                   std::uint64_t stream_id) {
  return sample(h, grid, build_axis_cholesky(h, grid), seed, stream_id);
}

NoiseSample sample(const HurstVector& h, const GridSpec& grid,
                   const std::vector<Eigen::MatrixXd>& axis_factors, std::uint64_t seed,
                   std::uint64_t stream_id) {
  check_h_dim(h, grid);
  if (static_cast<int>(axis_factors.size()) != grid.k)
    throw std::invalid_argument("sample: need one Cholesky factor per axis");
  NoiseSample s;
  s.grid = grid;
  s.hurst = h.values();
  s.seed = seed;
  s.stream_id = stream_id;
  const std::int64_t total = grid.cell_count();
  s.increments.resize(total);
  const CounterRng rng(seed, stream_id);
  for (std::int64_t i = 0; i < total; ++i)
    s.increments[i] = rng.normal(static_cast<std::uint64_t>(i));
  tensor::apply_axis_matrices(s.increments, axis_factors, grid.n, grid.k);
  return s;
}

NoiseSample aggregate(const NoiseSample& fine, int coarse_n) {
  const GridSpec& fg = fine.grid;
  if (coarse_n < 2 || fg.n % coarse_n != 0)
    throw std::invalid_argument("aggregate: coarse resolution must divide the fine one");
  const int ratio = fg.n / coarse_n;
  NoiseSample out;
  out.grid = GridSpec(fg.k, coarse_n);
  out.hurst = fine.hurst;
  out.seed = fine.seed;
  out.stream_id = fine.stream_id;
  out.increments = Eigen::ArrayXd::Zero(out.grid.cell_count());
  MultiIndex fj{};
  const std::int64_t total = fg.cell_count();
  for (std::int64_t f = 0; f < total; ++f) {
    MultiIndex cj{};
    for (int d = 0; d < fg.k; ++d) cj[d] = fj[d] / ratio;
    out.increments[flat_index(cj, fg.k, coarse_n)] += fine.increments[f];
    next_index(fj, fg.k, 0, fg.n - 1);
  }
  return out;
}

void save_csv(const NoiseSample& s, std::ostream& out) {
  char buf[64];
  out << "# fpois noise sample\n";
  out << "# k=" << s.grid.k << " n=" << s.grid.n << "\n# h=";
  for (int d = 0; d < s.grid.k; ++d) {
    std::snprintf(buf, sizeof buf, "%.17g", s.hurst[d]);
    out << (d ? "," : "") << buf;
  }
  out << "\n# seed=" << s.seed << " stream=" << s.stream_id << "\n";
  out << "# columns: cell multi-index (" << s.grid.k << " entries), value\n";
  MultiIndex j{};
  for (std::int64_t f = 0; f < s.grid.cell_count(); ++f) {
    for (int d = 0; d < s.grid.k; ++d) out << j[d] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", s.increments[f]);
    out << buf << '\n';
    next_index(j, s.grid.k, 0, s.grid.n - 1);
  }
}

NoiseSample load_csv(std::istream& in) {
  NoiseSample s;
  std::string line;
  int k = 0, n = 0;
  bool have_kn = false, have_h = false, have_seed = false;
  while (in.peek() == '#') {
    std::getline(in, line);
    if (std::sscanf(line.c_str(), "# k=%d n=%d", &k, &n) == 2) have_kn = true;
    if (line.rfind("# h=", 0) == 0) {
      std::stringstream hs(line.substr(4));
      std::string tok;
      while (std::getline(hs, tok, ',')) s.hurst.push_back(std::stod(tok));
      have_h = true;
    }
    unsigned long long sd = 0, st = 0;
    if (std::sscanf(line.c_str(), "# seed=%llu stream=%llu", &sd, &st) == 2) {
      s.seed = sd;
      s.stream_id = st;
      have_seed = true;
    }
  }
  if (!have_kn || !have_h || !have_seed)
    throw std::invalid_argument("noise CSV: missing header fields");
  s.grid = GridSpec(k, n);
  if (static_cast<int>(s.hurst.size()) != k)
    throw std::invalid_argument("noise CSV: h length != k");
  s.increments.resize(s.grid.cell_count());
  for (std::int64_t f = 0; f < s.grid.cell_count(); ++f) {
    if (!std::getline(in, line)) throw std::invalid_argument("noise CSV: truncated");
    std::stringstream ls(line);
    std::string tok;
    MultiIndex j{};
    for (int d = 0; d < k; ++d) {
      std::getline(ls, tok, ',');
      j[d] = std::stoi(tok);
    }
    std::getline(ls, tok, ',');
    s.increments[flat_index(j, k, n)] = std::stod(tok);
  }
  return s;
}

}  // namespace fpois::noise
