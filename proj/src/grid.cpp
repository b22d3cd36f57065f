#include "fpois/grid.hpp"

namespace fpois {

LatticeField interior_part(const CellField& c) {
  const GridSpec& g = c.grid();
  LatticeField u(g);
  MultiIndex i{};
  for (int d = 0; d < g.k; ++d) i[d] = 1;
  std::int64_t f = 0;
  do {
    u.values()[f++] = c.at(i);
  } while (next_index(i, g.k, 1, g.n - 1));
  return u;
}

CellField cell_extension(const LatticeField& u) {
  const GridSpec& g = u.grid();
  CellField c(g);
  MultiIndex i{};
  for (int d = 0; d < g.k; ++d) i[d] = 1;
  std::int64_t f = 0;
  do {
    c.at(i) = u.values()[f++];
  } while (next_index(i, g.k, 1, g.n - 1));
  return c;
}

double l2_cell_distance(const CellField& a, const CellField& b) {
  const CellField& coarse = a.grid().n <= b.grid().n ? a : b;
  const CellField& fine = a.grid().n <= b.grid().n ? b : a;
  const int k = fine.grid().k;
  if (coarse.grid().k != k || fine.grid().n % coarse.grid().n != 0)
    throw std::invalid_argument("l2_cell_distance: grids must be nested");
  const int ratio = fine.grid().n / coarse.grid().n;
  const std::int64_t total = fine.grid().cell_count();
  double sum = 0.0;
  MultiIndex j{};
  for (std::int64_t f = 0; f < total; ++f) {
    MultiIndex cj{};
    for (int d = 0; d < k; ++d) cj[d] = j[d] / ratio;
    const double diff = fine.values()[f] - coarse.at(cj);
    sum += diff * diff;
    next_index(j, k, 0, fine.grid().n - 1);
  }
  return std::sqrt(sum / static_cast<double>(total));
}

}  // namespace fpois
