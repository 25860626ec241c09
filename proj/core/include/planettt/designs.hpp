#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace planettt {

// Thrown for structurally malformed input (ragged arrays, out-of-range
// symbols, wrong arity). Property violations are reported, not thrown.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point classes of a MOLS-derived design. The declaration order is the fixed
// total order used for ids and serialization: Row < Col < SymA < SymB < SymC.
enum class PointClass : std::uint8_t { kRow, kCol, kSymA, kSymB, kSymC };

inline constexpr int kMaxPointClasses = 5;

// r_i, c_j, a_k (alpha), b_l (beta), g_m (gamma). Indices are 1-based.
struct PlanePoint {
  PointClass cls = PointClass::kRow;
  int index = 1;

  auto operator<=>(const PlanePoint&) const = default;
};

std::string to_string(PlanePoint p);
std::optional<PlanePoint> parse_plane_point(std::string_view token);

class LatinSquare {
 public:
  // Throws DesignError unless rows form an n x n array over 1..n.
  static LatinSquare from_rows(const std::vector<std::vector<int>>& rows);

  int order() const { return order_; }
  // 1-based row and column.
  int at(int row, int col) const { return cells_[(row - 1) * order_ + (col - 1)]; }
  std::vector<std::vector<int>> rows() const;

  bool operator==(const LatinSquare&) const = default;

 private:
  int order_ = 0;
  std::vector<int> cells_;
};

struct MolsSet {
  int order = 0;
  std::vector<LatinSquare> squares;

  bool operator==(const MolsSet&) const = default;
};

struct LatinViolation {
  enum class Kind { kRowRepeat, kColumnRepeat };
  Kind kind;
  int line;    // offending row or column, 1-based
  int symbol;  // repeated symbol

  std::string describe() const;
};

struct LatinReport {
  std::vector<LatinViolation> violations;
  bool ok() const { return violations.empty(); }
};

LatinReport validate_latin_square(const LatinSquare& square);

// Throws DesignError on order mismatch.
bool are_orthogonal(const LatinSquare& a, const LatinSquare& b);

// Every square Latin and every pair orthogonal.
bool is_mols(const MolsSet& mols);

// The three mutually orthogonal Latin squares of order 4 this project plays on.
const MolsSet& canonical_mols();

// p - 1 squares L_k(i, j) = k*i + j (mod p) for prime p.
MolsSet prime_mols(int p);

using Block = std::vector<PlanePoint>;  // sorted under the point order

struct BlockClass {
  std::string label;
  std::vector<std::size_t> blocks;  // indices into TransversalDesign::blocks
};

struct TransversalDesign {
  int k = 0;
  int n = 0;
  std::vector<PlanePoint> points;           // sorted
  std::vector<std::vector<PlanePoint>> groups;
  std::vector<Block> blocks;
  std::vector<BlockClass> classes;          // empty unless resolved

  bool resolved() const { return !classes.empty(); }
};

struct DesignReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

DesignReport validate_transversal_design(const TransversalDesign& td);

// TD(k+2, n): one block per cell, groups are rows, columns and each square's
// symbol set. Rejects input that is not a MOLS family.
TransversalDesign mols_to_transversal_design(const MolsSet& mols);

// RTD(k+1, n): the last square's symbol indexes the parallel classes
// (labelled g1..gn) and is dropped from the blocks. Needs k >= 2.
TransversalDesign resolve_by_last_square(const MolsSet& mols);

using PointId = int;
using Line = std::vector<PointId>;  // sorted ascending

struct ParallelClass {
  std::string label;
  std::vector<std::size_t> lines;  // indices into AffinePlane::lines
};

// Points are ids 0..n^2-1; `point_names` gives each id its token. For planes
// built from MOLS the ids follow the point order, so in the canonical plane
// r1..r4 = 0..3, c1..c4 = 4..7, a1..a4 = 8..11, b1..b4 = 12..15.
struct AffinePlane {
  int order = 0;
  std::vector<std::string> point_names;
  std::vector<Line> lines;
  std::vector<ParallelClass> classes;
  std::size_t index_class = 0;

  std::size_t num_points() const { return point_names.size(); }
  std::optional<PointId> find_point(std::string_view name) const;
  // Index of a line containing both points, if any.
  std::optional<std::size_t> line_through(PointId a, PointId b) const;
  // Class index owning `line`.
  std::size_t class_of_line(std::size_t line) const;
};

// The index class becomes the last parallel class, labelled "index".
AffinePlane build_affine_plane(const TransversalDesign& rtd);

// Field construction over Z_p for prime p <= 7; points named p1..p{p^2}.
AffinePlane affine_plane_prime(int p);

// build_affine_plane(resolve_by_last_square(canonical_mols())).
const AffinePlane& canonical_pi4();

struct PlaneViolation {
  enum class Kind {
    kPointCount,
    kLineCount,
    kLineSize,
    kBadPoint,
    kPairUncovered,
    kPairCoveredTwice,
    kClassCount,
    kClassNotPartition,
    kPointDegree,
    kIndexClass,
  };
  Kind kind;
  std::string witness;
};

const char* to_string(PlaneViolation::Kind kind);

struct PlaneReport {
  std::vector<PlaneViolation> violations;
  bool ok() const { return violations.empty(); }
  bool has(PlaneViolation::Kind kind) const;
  std::size_t count(PlaneViolation::Kind kind) const;
};

PlaneReport validate_plane(const AffinePlane& plane);

// Copy with point ids permuted: the point with old id p gets id perm[p] and
// keeps its name. Lines are re-sorted; classes keep their order.
AffinePlane relabel_plane(const AffinePlane& plane, const std::vector<PointId>& perm);
AffinePlane random_relabeling(const AffinePlane& plane, std::uint64_t seed);

}  // namespace planettt
