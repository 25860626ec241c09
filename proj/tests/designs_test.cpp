#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "planettt/designs.hpp"

using namespace planettt;

namespace {

std::set<std::set<std::string>> named_lines(const AffinePlane& plane) {
  std::set<std::set<std::string>> out;
  for (const auto& line : plane.lines) {
    std::set<std::string> s;
    for (PointId p : line) s.insert(plane.point_names[p]);
    out.insert(s);
  }
  return out;
}

// Pairs counted by brute force over all lines.
int pair_multiplicity(const AffinePlane& plane, PointId a, PointId b) {
  int n = 0;
  for (const auto& line : plane.lines) {
    const bool has_a = std::find(line.begin(), line.end(), a) != line.end();
    const bool has_b = std::find(line.begin(), line.end(), b) != line.end();
    n += has_a && has_b;
  }
  return n;
}

}  // namespace

TEST(PlanePoint, RoundTripsTokens) {
  for (const char* tok : {"r1", "c4", "a2", "b3", "g1"}) {
    auto p = parse_plane_point(tok);
    ASSERT_TRUE(p) << tok;
    EXPECT_EQ(to_string(*p), tok);
  }
  EXPECT_FALSE(parse_plane_point("x1"));
  EXPECT_FALSE(parse_plane_point("r"));
  EXPECT_FALSE(parse_plane_point("r0"));
  EXPECT_LT((PlanePoint{PointClass::kRow, 4}), (PlanePoint{PointClass::kCol, 1}));
}

TEST(LatinSquare, RejectsRaggedAndOutOfRange) {
  EXPECT_THROW(LatinSquare::from_rows({{1, 2}, {2}}), DesignError);
  EXPECT_THROW(LatinSquare::from_rows({{1, 3}, {2, 1}}), DesignError);
  EXPECT_THROW(LatinSquare::from_rows({}), DesignError);
}

TEST(LatinSquare, FirstSquareIsLatin) {
  const auto& s1 = canonical_mols().squares[0];
  EXPECT_TRUE(validate_latin_square(s1).ok());
  EXPECT_EQ(s1.at(3, 2), 4);  // alpha_4 at r3, c2
}

TEST(LatinSquare, ReportsRepeatedSymbol) {
  const auto sq = LatinSquare::from_rows({{1, 2, 3, 4}, {2, 1, 4, 3}, {3, 4, 1, 2}, {4, 3, 1, 2}});
  const auto report = validate_latin_square(sq);
  ASSERT_FALSE(report.ok());
  const bool column3 = std::any_of(report.violations.begin(), report.violations.end(), [](const auto& v) {
    return v.kind == LatinViolation::Kind::kColumnRepeat && v.line == 3 && v.symbol == 1;
  });
  EXPECT_TRUE(column3);
}

TEST(Mols, CanonicalSquaresAreMutuallyOrthogonal) {
  const auto& m = canonical_mols();
  ASSERT_EQ(m.squares.size(), 3u);
  EXPECT_TRUE(are_orthogonal(m.squares[0], m.squares[1]));
  EXPECT_TRUE(are_orthogonal(m.squares[0], m.squares[2]));
  EXPECT_TRUE(are_orthogonal(m.squares[1], m.squares[2]));
  EXPECT_TRUE(is_mols(m));
  // The entry at r3, c2 is (r3, c2, alpha4, beta1, gamma3).
  EXPECT_EQ(m.squares[1].at(3, 2), 1);
  EXPECT_EQ(m.squares[2].at(3, 2), 3);
}

TEST(Mols, SquareIsNotOrthogonalToItself) {
  const auto& s1 = canonical_mols().squares[0];
  EXPECT_FALSE(are_orthogonal(s1, s1));
  EXPECT_THROW(are_orthogonal(s1, LatinSquare::from_rows({{1, 2}, {2, 1}})), DesignError);
}

TEST(Mols, PrimeFamilies) {
  for (int p : {2, 3, 5, 7}) {
    const auto m = prime_mols(p);
    EXPECT_EQ(m.squares.size(), static_cast<std::size_t>(p - 1));
    EXPECT_TRUE(is_mols(m)) << p;
  }
  EXPECT_THROW(prime_mols(4), DesignError);
}

TEST(TransversalDesign, FromThreeSquares) {
  const auto td = mols_to_transversal_design(canonical_mols());
  EXPECT_EQ(td.k, 5);
  EXPECT_EQ(td.n, 4);
  EXPECT_EQ(td.points.size(), 20u);
  EXPECT_EQ(td.blocks.size(), 16u);
  EXPECT_TRUE(validate_transversal_design(td).ok());
  const Block r3c2{{PointClass::kRow, 3}, {PointClass::kCol, 2}, {PointClass::kSymA, 4},
                   {PointClass::kSymB, 1}, {PointClass::kSymC, 3}};
  EXPECT_NE(std::find(td.blocks.begin(), td.blocks.end(), r3c2), td.blocks.end());
}

TEST(TransversalDesign, RejectsNonOrthogonalFamily) {
  const auto& s1 = canonical_mols().squares[0];
  EXPECT_THROW(mols_to_transversal_design(MolsSet{4, {s1, s1}}), DesignError);
}

TEST(TransversalDesign, ResolvedByLastSquare) {
  const auto rtd = resolve_by_last_square(canonical_mols());
  EXPECT_EQ(rtd.k, 4);
  EXPECT_EQ(rtd.blocks.size(), 16u);
  ASSERT_EQ(rtd.classes.size(), 4u);
  EXPECT_EQ(rtd.classes[0].label, "g1");
  EXPECT_TRUE(validate_transversal_design(rtd).ok());
  // Every class partitions the 16 points.
  for (const auto& cls : rtd.classes) {
    std::set<PlanePoint> seen;
    for (std::size_t b : cls.blocks) seen.insert(rtd.blocks[b].begin(), rtd.blocks[b].end());
    EXPECT_EQ(seen.size(), 16u) << cls.label;
  }
  EXPECT_THROW(resolve_by_last_square(MolsSet{4, {canonical_mols().squares[0]}}), DesignError);
}

TEST(AffinePlane, CanonicalPlaneShape) {
  const auto& plane = canonical_pi4();
  EXPECT_EQ(plane.order, 4);
  EXPECT_EQ(plane.num_points(), 16u);
  EXPECT_EQ(plane.lines.size(), 20u);
  EXPECT_EQ(plane.classes.size(), 5u);
  EXPECT_EQ(plane.classes[plane.index_class].label, "index");
  EXPECT_EQ(plane.point_names[0], "r1");
  EXPECT_EQ(plane.point_names[4], "c1");
  EXPECT_EQ(plane.point_names[8], "a1");
  EXPECT_EQ(plane.point_names[15], "b4");
  EXPECT_TRUE(validate_plane(plane).ok());
}

TEST(AffinePlane, EveryPairOnOneLineByBruteForce) {
  for (const AffinePlane& plane : {canonical_pi4(), affine_plane_prime(2), affine_plane_prime(3),
                                   affine_plane_prime(5)}) {
    const int n = static_cast<int>(plane.num_points());
    int pairs = 0;
    for (PointId a = 0; a < n; ++a) {
      for (PointId b = a + 1; b < n; ++b) {
        EXPECT_EQ(pair_multiplicity(plane, a, b), 1) << plane.point_names[a] << " " << plane.point_names[b];
        ++pairs;
      }
    }
    EXPECT_EQ(pairs, n * (n - 1) / 2);
  }
}

TEST(AffinePlane, LineQueries) {
  const auto& plane = canonical_pi4();
  const auto l = plane.line_through(0, 7);  // r1, c4
  ASSERT_TRUE(l);
  EXPECT_EQ(named_lines(plane).count({"r1", "c4", "a4", "b4"}), 1u);
  EXPECT_EQ(plane.lines[*l], (Line{0, 7, 11, 15}));
  EXPECT_EQ(plane.class_of_line(*plane.line_through(0, 1)), plane.index_class);
  EXPECT_EQ(plane.find_point("a3"), 10);
  EXPECT_FALSE(plane.find_point("z9"));
}

TEST(AffinePlane, PrimeFieldPlanes) {
  for (int p : {2, 3, 5, 7}) {
    const auto plane = affine_plane_prime(p);
    EXPECT_EQ(plane.num_points(), static_cast<std::size_t>(p * p));
    EXPECT_EQ(plane.lines.size(), static_cast<std::size_t>(p * (p + 1)));
    EXPECT_EQ(plane.classes.size(), static_cast<std::size_t>(p + 1));
    EXPECT_TRUE(validate_plane(plane).ok()) << p;
  }
  EXPECT_THROW(affine_plane_prime(4), DesignError);
  EXPECT_THROW(affine_plane_prime(11), DesignError);
}

TEST(AffinePlane, MolsConstructionOfOrderThree) {
  const auto plane = build_affine_plane(resolve_by_last_square(prime_mols(3)));
  EXPECT_EQ(plane.num_points(), 9u);
  EXPECT_TRUE(validate_plane(plane).ok());
}

TEST(ValidatePlane, DetectsDroppedLine) {
  AffinePlane plane = canonical_pi4();
  plane.lines.pop_back();
  for (auto& cls : plane.classes) {
    cls.lines.erase(std::remove(cls.lines.begin(), cls.lines.end(), plane.lines.size()), cls.lines.end());
  }
  const auto report = validate_plane(plane);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(report.has(PlaneViolation::Kind::kLineCount));
  EXPECT_TRUE(report.has(PlaneViolation::Kind::kPairUncovered));
  EXPECT_EQ(report.count(PlaneViolation::Kind::kPairUncovered), 6u);
}

TEST(ValidatePlane, DetectsSwappedPoint) {
  AffinePlane plane = canonical_pi4();
  // Move b1 out of r1's g1 line and put b2 in: pairs now repeat and go missing.
  plane.lines[0] = {0, 4, 8, 13};
  const auto report = validate_plane(plane);
  EXPECT_TRUE(report.has(PlaneViolation::Kind::kPairCoveredTwice));
  EXPECT_TRUE(report.has(PlaneViolation::Kind::kPairUncovered));
  EXPECT_TRUE(report.has(PlaneViolation::Kind::kClassNotPartition));
}

TEST(ValidatePlane, DetectsBadIndexClass) {
  AffinePlane plane = canonical_pi4();
  plane.index_class = 9;
  EXPECT_TRUE(validate_plane(plane).has(PlaneViolation::Kind::kIndexClass));
}

TEST(Relabel, KeepsStructureAndNames) {
  const auto& plane = canonical_pi4();
  const auto shuffled = random_relabeling(plane, 42);
  EXPECT_TRUE(validate_plane(shuffled).ok());
  EXPECT_EQ(named_lines(shuffled), named_lines(plane));
  EXPECT_NE(shuffled.point_names, plane.point_names);
  EXPECT_EQ(random_relabeling(plane, 42).point_names, shuffled.point_names);
}
