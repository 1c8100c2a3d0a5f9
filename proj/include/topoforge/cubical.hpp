#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topoforge/field.hpp"

namespace topoforge {

/// Index of a cell in the doubled ("Khalimsky") lattice of a grid with
/// (2nx-1) x (2ny-1) x (2nz-1) positions, x fastest. An odd coordinate means
/// the cell spans that axis; even means it is degenerate there.
using CellId = std::uint32_t;
inline constexpr CellId kNoCell = std::numeric_limits<CellId>::max();

struct CellCoord {
  int x = 0;
  int y = 0;
  int z = 0;
};

/**
 * Cubical complex of the whole gridded box with the vertex-based (lower
 * star) filtration: every cell takes the maximum value of its vertices,
 * so every face enters no later than its cofaces.
 *
 * Cells are not materialized; ids, faces and values are computed from the
 * lattice. The filtration order is the total order
 * (value, dimension, cell id), and both persistence routines follow it.
 */
class FilteredCubicalComplex {
 public:
  /// Throws Error when an axis has fewer than 2 points or the cell count
  /// does not fit a 32-bit id.
  explicit FilteredCubicalComplex(const VolumeGrid& grid);

  const GridDims& dims() const { return dims_; }
  const Box3& bounds() const { return bounds_; }
  std::span<const double> vertex_values() const { return values_; }

  std::size_t cell_count() const { return cell_total_; }
  /// Number of cells of dimension `dim` in 0..3.
  std::size_t cell_count(int dim) const;

  int extent_x() const { return ex_; }
  int extent_y() const { return ey_; }
  int extent_z() const { return ez_; }

  CellCoord coord(CellId id) const {
    const int x = static_cast<int>(id % static_cast<CellId>(ex_));
    const CellId rest = id / static_cast<CellId>(ex_);
    return {x, static_cast<int>(rest % static_cast<CellId>(ey_)),
            static_cast<int>(rest / static_cast<CellId>(ey_))};
  }
  CellId id(CellCoord c) const {
    return static_cast<CellId>(c.x) +
           static_cast<CellId>(ex_) * (static_cast<CellId>(c.y) + static_cast<CellId>(ey_) * c.z);
  }
  static int dimension(CellCoord c) { return (c.x & 1) + (c.y & 1) + (c.z & 1); }
  int dimension(CellId id) const { return dimension(coord(id)); }

  /// Lattice vertex with the smallest coordinates among the cell's vertices.
  std::array<int, 3> anchor(CellId id) const;
  /// Bit a set when the cell spans axis a.
  int axis_mask(CellId id) const;

  /// Filtration value: max over the cell's vertices.
  double value(CellId id) const;

  /// Codimension-1 faces; returns the count written to `out`.
  int faces(CellId id, std::array<CellId, 6>& out) const;
  /// Codimension-1 cofaces; returns the count written to `out`.
  int cofaces(CellId id, std::array<CellId, 6>& out) const;

  /// Strict filtration order (value, dimension, id).
  bool precedes(CellId a, CellId b) const;

  /// All cell ids of one dimension in increasing id order.
  std::vector<CellId> cells_of_dimension(int dim) const;

  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }

 private:
  double vertex(int i, int j, int k) const {
    return values_[static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(dims_.nx) *
                       (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_.ny) * k)];
  }

  GridDims dims_;
  Box3 bounds_;
  std::vector<double> values_;
  int ex_ = 0;
  int ey_ = 0;
  int ez_ = 0;
  std::size_t cell_total_ = 0;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

FilteredCubicalComplex build_filtration(const VolumeGrid& grid);

/// One birth/death event. Essential classes have death = +inf and no
/// death cell.
struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
  CellId birth_cell = kNoCell;
  CellId death_cell = kNoCell;

  bool essential() const { return death_cell == kNoCell && death == std::numeric_limits<double>::infinity(); }
  double persistence() const { return death - birth; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct DiagramMetadata {
  GridDims dims;
  Box3 bounds = kUnitBounds;
  double value_min = 0.0;
  double value_max = 0.0;
};

/**
 * All persistence pairs of a filtration, kept sorted by
 * (dim, birth, death, birth cell). Zero-persistence pairs are retained.
 */
class PersistenceDiagramSet {
 public:
  PersistenceDiagramSet() = default;
  PersistenceDiagramSet(DiagramMetadata meta, std::vector<PersistencePair> pairs);

  const DiagramMetadata& metadata() const { return meta_; }
  std::span<const PersistencePair> pairs() const { return pairs_; }
  std::vector<PersistencePair> pairs(int dim) const;

  std::size_t finite_count() const;
  std::size_t essential_count() const;

 private:
  DiagramMetadata meta_;
  std::vector<PersistencePair> pairs_;
};

/// Persistence over Z/2 in dimensions 0..2 (3 is always empty for a
/// subcomplex of a 3D box). Dimension 0 by union-find, dimension 2 by
/// union-find on the dual voxel graph, dimension 1 by boundary-matrix
/// column reduction with clearing and compression.
PersistenceDiagramSet compute_persistence(const FilteredCubicalComplex& complex);

struct NaiveOptions {
  std::size_t max_cells = 100000;
};

/// Textbook column reduction of the full boundary matrix, no shortcuts.
/// Throws Error when the complex exceeds `max_cells`.
PersistenceDiagramSet compute_persistence_naive(const FilteredCubicalComplex& complex,
                                                const NaiveOptions& options = {});

/// Betti numbers beta_0..beta_3 of the sublevel complex at threshold t,
/// counted as pairs with birth <= t < death.
std::array<int, 4> betti_at(const PersistenceDiagramSet& pds, double t);

/// V - E + F - C over cells with value <= t.
long long euler_characteristic_at(const FilteredCubicalComplex& complex, double t);

// --- diagram TSV ------------------------------------------------------------

struct DiagramWriteOptions {
  bool keep_zero_persistence = false;
  /// Extra comment lines written after the header, without the leading '#'.
  std::vector<std::string> comments;
};

/// `# topoforge-pd v1 dims=<nx>x<ny>x<nz>` followed by one
/// `dim<TAB>birth<TAB>death` line per pair of dimension <= 2, death `inf`
/// for essential classes.
std::string format_diagram_tsv(const PersistenceDiagramSet& pds,
                               const DiagramWriteOptions& options = {});
/// Throws IoError on a missing header or malformed line.
PersistenceDiagramSet parse_diagram_tsv(std::string_view text);

}  // namespace topoforge
