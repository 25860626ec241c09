#include "planettt/designs.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace planettt {

namespace {

constexpr char kClassLetters[kMaxPointClasses] = {'r', 'c', 'a', 'b', 'g'};

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

std::string join_points(const std::vector<PlanePoint>& pts) {
  std::string out = "{";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ",";
    out += to_string(pts[i]);
  }
  return out + "}";
}

std::string join_ids(const AffinePlane& plane, const Line& line) {
  std::string out = "{";
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (i) out += ",";
    const PointId p = line[i];
    out += (p >= 0 && static_cast<std::size_t>(p) < plane.num_points())
               ? plane.point_names[p]
               : "#" + std::to_string(p);
  }
  return out + "}";
}

}  // namespace

std::string to_string(PlanePoint p) {
  return std::string(1, kClassLetters[static_cast<int>(p.cls)]) + std::to_string(p.index);
}

std::optional<PlanePoint> parse_plane_point(std::string_view token) {
  if (token.size() < 2) return std::nullopt;
  const auto* letter = std::find(std::begin(kClassLetters), std::end(kClassLetters), token[0]);
  if (letter == std::end(kClassLetters)) return std::nullopt;
  int index = 0;
  for (char ch : token.substr(1)) {
    if (ch < '0' || ch > '9') return std::nullopt;
    index = index * 10 + (ch - '0');
    if (index > 1000) return std::nullopt;
  }
  if (index < 1 || token[1] == '0') return std::nullopt;
  return PlanePoint{static_cast<PointClass>(letter - std::begin(kClassLetters)), index};
}

// --- Latin squares ---------------------------------------------------------

LatinSquare LatinSquare::from_rows(const std::vector<std::vector<int>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw DesignError("latin square: empty array");
  LatinSquare sq;
  sq.order_ = n;
  sq.cells_.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n) {
      throw DesignError("latin square: row " + std::to_string(r + 1) + " has " +
                        std::to_string(rows[r].size()) + " cells, expected " + std::to_string(n));
    }
    for (int v : rows[r]) {
      if (v < 1 || v > n) {
        throw DesignError("latin square: symbol " + std::to_string(v) + " outside 1.." +
                          std::to_string(n));
      }
      sq.cells_.push_back(v);
    }
  }
  return sq;
}

std::vector<std::vector<int>> LatinSquare::rows() const {
  std::vector<std::vector<int>> out(order_);
  for (int r = 1; r <= order_; ++r) {
    for (int c = 1; c <= order_; ++c) out[r - 1].push_back(at(r, c));
  }
  return out;
}

std::string LatinViolation::describe() const {
  return std::string(kind == Kind::kRowRepeat ? "row " : "column ") + std::to_string(line) +
         " repeats symbol " + std::to_string(symbol);
}

LatinReport validate_latin_square(const LatinSquare& square) {
  LatinReport report;
  const int n = square.order();
  for (int line = 1; line <= n; ++line) {
    std::vector<int> row_count(n + 1, 0);
    for (int c = 1; c <= n; ++c) ++row_count[square.at(line, c)];
    for (int s = 1; s <= n; ++s) {
      if (row_count[s] > 1) report.violations.push_back({LatinViolation::Kind::kRowRepeat, line, s});
    }
  }
  for (int line = 1; line <= n; ++line) {
    std::vector<int> col_count(n + 1, 0);
    for (int r = 1; r <= n; ++r) ++col_count[square.at(r, line)];
    for (int s = 1; s <= n; ++s) {
      if (col_count[s] > 1) {
        report.violations.push_back({LatinViolation::Kind::kColumnRepeat, line, s});
      }
    }
  }
  return report;
}

bool are_orthogonal(const LatinSquare& a, const LatinSquare& b) {
  if (a.order() != b.order()) {
    throw DesignError("orthogonality: order " + std::to_string(a.order()) + " vs " +
                      std::to_string(b.order()));
  }
  const int n = a.order();
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      char& slot = seen[(a.at(r, c) - 1) * n + (b.at(r, c) - 1)];
      if (slot) return false;
      slot = 1;
    }
  }
  return true;
}

bool is_mols(const MolsSet& mols) {
  for (const auto& sq : mols.squares) {
    if (sq.order() != mols.order || !validate_latin_square(sq).ok()) return false;
  }
  for (std::size_t i = 0; i < mols.squares.size(); ++i) {
    for (std::size_t j = i + 1; j < mols.squares.size(); ++j) {
      if (!are_orthogonal(mols.squares[i], mols.squares[j])) return false;
    }
  }
  return true;
}

const MolsSet& canonical_mols() {
  static const MolsSet mols{
      4,
      {
          LatinSquare::from_rows({{1, 2, 3, 4}, {2, 1, 4, 3}, {3, 4, 1, 2}, {4, 3, 2, 1}}),
          LatinSquare::from_rows({{1, 2, 3, 4}, {4, 3, 2, 1}, {2, 1, 4, 3}, {3, 4, 1, 2}}),
          LatinSquare::from_rows({{1, 2, 3, 4}, {3, 4, 1, 2}, {4, 3, 2, 1}, {2, 1, 4, 3}}),
      }};
  return mols;
}

MolsSet prime_mols(int p) {
  if (!is_prime(p)) throw DesignError("prime_mols: " + std::to_string(p) + " is not prime");
  MolsSet mols{p, {}};
  for (int k = 1; k < p; ++k) {
    std::vector<std::vector<int>> rows(p, std::vector<int>(p));
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) rows[i][j] = (k * i + j) % p + 1;
    }
    mols.squares.push_back(LatinSquare::from_rows(rows));
  }
  return mols;
}

// --- Transversal designs ---------------------------------------------------

DesignReport validate_transversal_design(const TransversalDesign& td) {
  DesignReport report;
  std::map<PlanePoint, int> group_of;
  for (std::size_t g = 0; g < td.groups.size(); ++g) {
    if (static_cast<int>(td.groups[g].size()) != td.n) {
      report.violations.push_back("group " + std::to_string(g + 1) + " has wrong size");
    }
    for (const auto& p : td.groups[g]) {
      if (!group_of.emplace(p, static_cast<int>(g)).second) {
        report.violations.push_back("point " + to_string(p) + " in two groups");
      }
    }
  }
  if (static_cast<int>(td.groups.size()) != td.k) {
    report.violations.push_back("expected " + std::to_string(td.k) + " groups");
  }
  // Pair multiplicity across blocks; pairs inside a group must not occur.
  std::map<std::pair<PlanePoint, PlanePoint>, int> pair_count;
  for (const auto& block : td.blocks) {
    std::vector<int> hits(td.groups.size(), 0);
    for (const auto& p : block) {
      auto it = group_of.find(p);
      if (it == group_of.end()) {
        report.violations.push_back("block " + join_points(block) + " uses unknown point " +
                                    to_string(p));
        continue;
      }
      ++hits[it->second];
    }
    for (std::size_t g = 0; g < hits.size(); ++g) {
      if (hits[g] != 1) {
        report.violations.push_back("block " + join_points(block) + " meets group " +
                                    std::to_string(g + 1) + " in " + std::to_string(hits[g]) +
                                    " points");
      }
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (std::size_t j = i + 1; j < block.size(); ++j) ++pair_count[{block[i], block[j]}];
    }
  }
  for (std::size_t i = 0; i < td.points.size(); ++i) {
    for (std::size_t j = i + 1; j < td.points.size(); ++j) {
      const auto& a = td.points[i];
      const auto& b = td.points[j];
      const bool same_group = group_of.count(a) && group_of.count(b) && group_of[a] == group_of[b];
      const int in_blocks = pair_count.count({a, b}) ? pair_count[{a, b}] : 0;
      if (same_group ? in_blocks != 0 : in_blocks != 1) {
        report.violations.push_back("pair {" + to_string(a) + "," + to_string(b) + "} in " +
                                    std::to_string(in_blocks) + " blocks" +
                                    (same_group ? " and a group" : ""));
      }
    }
  }
  for (const auto& cls : td.classes) {
    std::set<PlanePoint> covered;
    std::size_t total = 0;
    for (std::size_t b : cls.blocks) {
      covered.insert(td.blocks[b].begin(), td.blocks[b].end());
      total += td.blocks[b].size();
    }
    if (covered.size() != td.points.size() || total != td.points.size()) {
      report.violations.push_back("class " + cls.label + " is not a parallel class");
    }
  }
  return report;
}

namespace {

TransversalDesign td_skeleton(int n, int k) {
  if (k > kMaxPointClasses) {
    throw DesignError("transversal design: at most " + std::to_string(kMaxPointClasses) +
                      " groups supported, got " + std::to_string(k));
  }
  TransversalDesign td;
  td.k = k;
  td.n = n;
  for (int g = 0; g < k; ++g) {
    std::vector<PlanePoint> group;
    for (int i = 1; i <= n; ++i) {
      group.push_back({static_cast<PointClass>(g), i});
      td.points.push_back(group.back());
    }
    td.groups.push_back(std::move(group));
  }
  return td;
}

void require_mols(const MolsSet& mols) {
  if (mols.squares.empty()) throw DesignError("no squares supplied");
  for (const auto& sq : mols.squares) {
    if (sq.order() != mols.order) throw DesignError("square order differs from family order");
  }
  if (!is_mols(mols)) throw DesignError("squares are not mutually orthogonal Latin squares");
}

}  // namespace

TransversalDesign mols_to_transversal_design(const MolsSet& mols) {
  require_mols(mols);
  const int n = mols.order;
  const int k = static_cast<int>(mols.squares.size());
  TransversalDesign td = td_skeleton(n, k + 2);
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      Block block{{PointClass::kRow, r}, {PointClass::kCol, c}};
      for (int s = 0; s < k; ++s) {
        block.push_back({static_cast<PointClass>(2 + s), mols.squares[s].at(r, c)});
      }
      td.blocks.push_back(std::move(block));
    }
  }
  return td;
}

TransversalDesign resolve_by_last_square(const MolsSet& mols) {
  if (mols.squares.size() < 2) {
    throw DesignError("resolve_by_last_square: need at least 2 squares, got " +
                      std::to_string(mols.squares.size()));
  }
  require_mols(mols);
  const int n = mols.order;
  const int k = static_cast<int>(mols.squares.size());
  const LatinSquare& last = mols.squares.back();
  TransversalDesign td = td_skeleton(n, k + 1);
  for (int m = 1; m <= n; ++m) td.classes.push_back({"g" + std::to_string(m), {}});
  // Blocks grouped by class, then by column, matching the usual tabulation.
  for (int m = 1; m <= n; ++m) {
    for (int c = 1; c <= n; ++c) {
      for (int r = 1; r <= n; ++r) {
        if (last.at(r, c) != m) continue;
        Block block{{PointClass::kRow, r}, {PointClass::kCol, c}};
        for (int s = 0; s + 1 < k; ++s) {
          block.push_back({static_cast<PointClass>(2 + s), mols.squares[s].at(r, c)});
        }
        td.classes[m - 1].blocks.push_back(td.blocks.size());
        td.blocks.push_back(std::move(block));
      }
    }
  }
  return td;
}

// --- Affine planes ---------------------------------------------------------

std::optional<PointId> AffinePlane::find_point(std::string_view name) const {
  for (std::size_t i = 0; i < point_names.size(); ++i) {
    if (point_names[i] == name) return static_cast<PointId>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> AffinePlane::line_through(PointId a, PointId b) const {
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto& line = lines[l];
    if (std::binary_search(line.begin(), line.end(), a) &&
        std::binary_search(line.begin(), line.end(), b)) {
      return l;
    }
  }
  return std::nullopt;
}

std::size_t AffinePlane::class_of_line(std::size_t line) const {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (std::find(classes[c].lines.begin(), classes[c].lines.end(), line) !=
        classes[c].lines.end()) {
      return c;
    }
  }
  throw DesignError("line " + std::to_string(line) + " belongs to no parallel class");
}

namespace {

// Sorts each class's lines lexicographically and renumbers lines so that the
// line list follows class order. Gives canonical serialization.
void canonicalize_lines(AffinePlane& plane) {
  std::vector<Line> lines;
  for (auto& cls : plane.classes) {
    std::vector<Line> own;
    for (std::size_t l : cls.lines) {
      Line line = plane.lines[l];
      std::sort(line.begin(), line.end());
      own.push_back(std::move(line));
    }
    std::sort(own.begin(), own.end());
    cls.lines.clear();
    for (auto& line : own) {
      cls.lines.push_back(lines.size());
      lines.push_back(std::move(line));
    }
  }
  plane.lines = std::move(lines);
}

}  // namespace

AffinePlane build_affine_plane(const TransversalDesign& rtd) {
  if (!rtd.resolved()) throw DesignError("build_affine_plane: design is not resolved");
  if (rtd.k != rtd.n) {
    throw DesignError("build_affine_plane: groups do not form a parallel class (k=" +
                      std::to_string(rtd.k) + ", n=" + std::to_string(rtd.n) + ")");
  }
  if (auto report = validate_transversal_design(rtd); !report.ok()) {
    throw DesignError("build_affine_plane: invalid design: " + report.violations.front());
  }
  AffinePlane plane;
  plane.order = rtd.n;
  std::vector<PlanePoint> points = rtd.points;
  std::sort(points.begin(), points.end());
  std::map<PlanePoint, PointId> id_of;
  for (const auto& p : points) {
    id_of[p] = static_cast<PointId>(plane.point_names.size());
    plane.point_names.push_back(to_string(p));
  }
  auto to_line = [&](const std::vector<PlanePoint>& pts) {
    Line line;
    for (const auto& p : pts) line.push_back(id_of.at(p));
    std::sort(line.begin(), line.end());
    return line;
  };
  for (const auto& cls : rtd.classes) {
    ParallelClass pc{cls.label, {}};
    for (std::size_t b : cls.blocks) {
      pc.lines.push_back(plane.lines.size());
      plane.lines.push_back(to_line(rtd.blocks[b]));
    }
    plane.classes.push_back(std::move(pc));
  }
  ParallelClass index{"index", {}};
  for (const auto& group : rtd.groups) {
    index.lines.push_back(plane.lines.size());
    plane.lines.push_back(to_line(group));
  }
  plane.classes.push_back(std::move(index));
  plane.index_class = plane.classes.size() - 1;
  canonicalize_lines(plane);
  if (auto report = validate_plane(plane); !report.ok()) {
    throw DesignError("build_affine_plane: result is not an affine plane: " +
                      report.violations.front().witness);
  }
  return plane;
}

AffinePlane affine_plane_prime(int p) {
  if (!is_prime(p)) throw DesignError("affine_plane_prime: " + std::to_string(p) + " is not prime");
  if (p > 7) throw DesignError("affine_plane_prime: order " + std::to_string(p) + " exceeds 7");
  AffinePlane plane;
  plane.order = p;
  for (int id = 0; id < p * p; ++id) plane.point_names.push_back("p" + std::to_string(id + 1));
  auto id = [p](int x, int y) { return x * p + y; };
  for (int m = 0; m < p; ++m) {
    ParallelClass cls{"slope" + std::to_string(m), {}};
    for (int b = 0; b < p; ++b) {
      Line line;
      for (int x = 0; x < p; ++x) line.push_back(id(x, (m * x + b) % p));
      cls.lines.push_back(plane.lines.size());
      plane.lines.push_back(std::move(line));
    }
    plane.classes.push_back(std::move(cls));
  }
  ParallelClass vertical{"index", {}};
  for (int x = 0; x < p; ++x) {
    Line line;
    for (int y = 0; y < p; ++y) line.push_back(id(x, y));
    vertical.lines.push_back(plane.lines.size());
    plane.lines.push_back(std::move(line));
  }
  plane.classes.push_back(std::move(vertical));
  plane.index_class = plane.classes.size() - 1;
  canonicalize_lines(plane);
  return plane;
}

const AffinePlane& canonical_pi4() {
  static const AffinePlane plane = build_affine_plane(resolve_by_last_square(canonical_mols()));
  return plane;
}

const char* to_string(PlaneViolation::Kind kind) {
  using Kind = PlaneViolation::Kind;
  switch (kind) {
    case Kind::kPointCount:
      return "point_count";
    case Kind::kLineCount:
      return "line_count";
    case Kind::kLineSize:
      return "line_size";
    case Kind::kBadPoint:
      return "bad_point";
    case Kind::kPairUncovered:
      return "pair_uncovered";
    case Kind::kPairCoveredTwice:
      return "pair_covered_twice";
    case Kind::kClassCount:
      return "class_count";
    case Kind::kClassNotPartition:
      return "class_not_partition";
    case Kind::kPointDegree:
      return "point_degree";
    case Kind::kIndexClass:
      return "index_class";
  }
  return "?";
}

bool PlaneReport::has(PlaneViolation::Kind kind) const { return count(kind) > 0; }

std::size_t PlaneReport::count(PlaneViolation::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [kind](const auto& v) { return v.kind == kind; }));
}

PlaneReport validate_plane(const AffinePlane& plane) {
  using Kind = PlaneViolation::Kind;
  PlaneReport report;
  const int n = plane.order;
  const std::size_t num_points = plane.num_points();
  auto add = [&](Kind kind, std::string witness) {
    report.violations.push_back({kind, std::move(witness)});
  };
  if (n < 2) add(Kind::kPointCount, "order " + std::to_string(n) + " < 2");
  if (num_points != static_cast<std::size_t>(n) * n) {
    add(Kind::kPointCount, std::to_string(num_points) + " points, expected " + std::to_string(n * n));
  }
  if (plane.lines.size() != static_cast<std::size_t>(n) * (n + 1)) {
    add(Kind::kLineCount,
        std::to_string(plane.lines.size()) + " lines, expected " + std::to_string(n * (n + 1)));
  }
  std::vector<int> degree(num_points, 0);
  std::vector<int> pair_count(num_points * num_points, 0);
  for (const auto& line : plane.lines) {
    if (static_cast<int>(line.size()) != n) {
      add(Kind::kLineSize, join_ids(plane, line) + " has " + std::to_string(line.size()) + " points");
    }
    bool bad = false;
    for (PointId p : line) {
      if (p < 0 || static_cast<std::size_t>(p) >= num_points) bad = true;
    }
    std::set<PointId> distinct(line.begin(), line.end());
    if (bad || distinct.size() != line.size()) {
      add(Kind::kBadPoint, join_ids(plane, line));
      continue;
    }
    for (PointId p : line) ++degree[p];
    for (std::size_t i = 0; i < line.size(); ++i) {
      for (std::size_t j = i + 1; j < line.size(); ++j) {
        const auto [a, b] = std::minmax(line[i], line[j]);
        ++pair_count[a * num_points + b];
      }
    }
  }
  for (std::size_t a = 0; a < num_points; ++a) {
    for (std::size_t b = a + 1; b < num_points; ++b) {
      const int c = pair_count[a * num_points + b];
      const std::string pair = "{" + plane.point_names[a] + "," + plane.point_names[b] + "}";
      if (c == 0) add(Kind::kPairUncovered, pair);
      if (c > 1) add(Kind::kPairCoveredTwice, pair + " on " + std::to_string(c) + " lines");
    }
  }
  for (std::size_t p = 0; p < num_points; ++p) {
    if (degree[p] != n + 1) {
      add(Kind::kPointDegree,
          plane.point_names[p] + " on " + std::to_string(degree[p]) + " lines");
    }
  }
  if (plane.classes.size() != static_cast<std::size_t>(n) + 1) {
    add(Kind::kClassCount, std::to_string(plane.classes.size()) + " parallel classes, expected " +
                               std::to_string(n + 1));
  }
  std::vector<int> line_owner(plane.lines.size(), 0);
  for (const auto& cls : plane.classes) {
    std::vector<int> cover(num_points, 0);
    bool bad_ref = false;
    for (std::size_t l : cls.lines) {
      if (l >= plane.lines.size()) {
        bad_ref = true;
        continue;
      }
      ++line_owner[l];
      for (PointId p : plane.lines[l]) {
        if (p >= 0 && static_cast<std::size_t>(p) < num_points) ++cover[p];
      }
    }
    const bool partition =
        !bad_ref && std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
    if (!partition) add(Kind::kClassNotPartition, "class " + cls.label);
  }
  for (std::size_t l = 0; l < plane.lines.size(); ++l) {
    if (line_owner[l] != 1) {
      add(Kind::kClassNotPartition, join_ids(plane, plane.lines[l]) + " in " +
                                        std::to_string(line_owner[l]) + " classes");
    }
  }
  if (plane.index_class >= plane.classes.size()) {
    add(Kind::kIndexClass, "index class " + std::to_string(plane.index_class) + " out of range");
  }
  return report;
}

AffinePlane relabel_plane(const AffinePlane& plane, const std::vector<PointId>& perm) {
  if (perm.size() != plane.num_points()) throw DesignError("relabel_plane: permutation size");
  std::vector<char> hit(perm.size(), 0);
  for (PointId p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= perm.size() || hit[p]) {
      throw DesignError("relabel_plane: not a permutation");
    }
    hit[p] = 1;
  }
  AffinePlane out = plane;
  for (std::size_t p = 0; p < perm.size(); ++p) out.point_names[perm[p]] = plane.point_names[p];
  for (auto& line : out.lines) {
    for (auto& p : line) p = perm[p];
    std::sort(line.begin(), line.end());
  }
  return out;
}

AffinePlane random_relabeling(const AffinePlane& plane, std::uint64_t seed) {
  std::vector<PointId> perm(plane.num_points());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return relabel_plane(plane, perm);
}

}  // namespace planettt
