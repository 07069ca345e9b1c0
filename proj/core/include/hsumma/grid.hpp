#pragma once

#include <vector>

#include "hsumma/matrix.hpp"

namespace hsumma {

// Logical s x t processor grid with row-major rank numbering:
// rank(row, col) = row * cols + col.
struct GridSpec {
  int rows = 1;
  int cols = 1;

  int size() const { return rows * cols; }
  int rank_of(int row, int col) const { return row * cols + col; }
  int row_of(int rank) const { return rank / cols; }
  int col_of(int rank) const { return rank % cols; }

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int rows, int cols);

// Position of a rank inside an I x J grouping of the base grid: which group
// it belongs to and where it sits inside that group.
struct GroupCoord {
  int group_row = 0;
  int group_col = 0;
  int inner_row = 0;
  int inner_col = 0;

  bool operator==(const GroupCoord&) const = default;
};

// Partition of a base grid into group_rows x group_cols contiguous
// rectangular groups, each of inner_rows() x inner_cols() ranks.
struct GroupedGridSpec {
  GridSpec base;
  int group_rows = 1;
  int group_cols = 1;

  int inner_rows() const { return base.rows / group_rows; }
  int inner_cols() const { return base.cols / group_cols; }
  int group_count() const { return group_rows * group_cols; }

  GroupCoord coord_of(int rank) const;
  int rank_of(const GroupCoord& c) const;
};

GroupedGridSpec make_grouped_grid(const GridSpec& base, int group_rows, int group_cols);

// Block-checkerboard assignment of an n x n matrix to a grid: rank (r, c)
// owns the contiguous tile of rows [r*n/s, (r+1)*n/s) and columns
// [c*n/t, (c+1)*n/t).  `block` is the panel width used by the multiplication
// pipeline; it must divide n.
struct BlockLayout {
  int n = 0;
  int block = 1;
  GridSpec grid;

  int tile_rows() const { return n / grid.rows; }
  int tile_cols() const { return n / grid.cols; }

  bool operator==(const BlockLayout&) const = default;
};

BlockLayout make_block_layout(int n, int block, const GridSpec& grid);

// A matrix distributed over a grid; tiles are indexed by rank.
struct DistMatrix {
  BlockLayout layout;
  std::vector<Matrix> tiles;
};

DistMatrix scatter_matrix(const Matrix& global, const BlockLayout& layout);
Matrix gather_matrix(const DistMatrix& dist);

}  // namespace hsumma
