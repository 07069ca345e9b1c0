#include "hsumma/grid.hpp"

#include <stdexcept>
#include <string>

namespace hsumma {

GridSpec make_grid(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("make_grid: grid sides must be >= 1");
  return GridSpec{rows, cols};
}

GroupCoord GroupedGridSpec::coord_of(int rank) const {
  const int row = base.row_of(rank);
  const int col = base.col_of(rank);
  return GroupCoord{row / inner_rows(), col / inner_cols(),
                    row % inner_rows(), col % inner_cols()};
}

int GroupedGridSpec::rank_of(const GroupCoord& c) const {
  const int row = c.group_row * inner_rows() + c.inner_row;
  const int col = c.group_col * inner_cols() + c.inner_col;
  return base.rank_of(row, col);
}

GroupedGridSpec make_grouped_grid(const GridSpec& base, int group_rows, int group_cols) {
  if (group_rows < 1 || group_cols < 1)
    throw std::invalid_argument("make_grouped_grid: group counts must be >= 1");
  if (base.rows % group_rows != 0 || base.cols % group_cols != 0)
    throw std::invalid_argument(
        "make_grouped_grid: grouping " + std::to_string(group_rows) + "x" +
        std::to_string(group_cols) + " does not divide grid " +
        std::to_string(base.rows) + "x" + std::to_string(base.cols));
  return GroupedGridSpec{base, group_rows, group_cols};
}

BlockLayout make_block_layout(int n, int block, const GridSpec& grid) {
  if (n < 1) throw std::invalid_argument("make_block_layout: n must be >= 1");
  if (block < 1) throw std::invalid_argument("make_block_layout: block must be >= 1");
  if (n % block != 0)
    throw std::invalid_argument("make_block_layout: block must divide n");
  if (n % grid.rows != 0 || n % grid.cols != 0)
    throw std::invalid_argument("make_block_layout: grid sides must divide n");
  return BlockLayout{n, block, grid};
}

DistMatrix scatter_matrix(const Matrix& global, const BlockLayout& layout) {
  if (global.rows != layout.n || global.cols != layout.n)
    throw std::invalid_argument("scatter_matrix: matrix does not match layout");
  const int tr = layout.tile_rows();
  const int tc = layout.tile_cols();
  DistMatrix dist{layout, {}};
  dist.tiles.reserve(layout.grid.size());
  for (int rank = 0; rank < layout.grid.size(); ++rank) {
    const int r0 = layout.grid.row_of(rank) * tr;
    const int c0 = layout.grid.col_of(rank) * tc;
    Matrix tile(tr, tc);
    for (int i = 0; i < tr; ++i)
      for (int j = 0; j < tc; ++j) tile(i, j) = global(r0 + i, c0 + j);
    dist.tiles.push_back(std::move(tile));
  }
  return dist;
}

Matrix gather_matrix(const DistMatrix& dist) {
  const BlockLayout& layout = dist.layout;
  const int tr = layout.tile_rows();
  const int tc = layout.tile_cols();
  Matrix global(layout.n, layout.n);
  for (int rank = 0; rank < layout.grid.size(); ++rank) {
    const Matrix& tile = dist.tiles[rank];
    const int r0 = layout.grid.row_of(rank) * tr;
    const int c0 = layout.grid.col_of(rank) * tc;
    for (int i = 0; i < tr; ++i)
      for (int j = 0; j < tc; ++j) global(r0 + i, c0 + j) = tile(i, j);
  }
  return global;
}

}  // namespace hsumma
