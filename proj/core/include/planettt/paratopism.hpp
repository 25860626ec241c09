#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "planettt/designs.hpp"

namespace planettt {

class ParatopismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Permutation of {1,2,3,4}; perm[i-1] is the image of i.
using Perm4 = std::array<int, 4>;

inline constexpr Perm4 kIdentity4 = {1, 2, 3, 4};

// Disjoint-cycle notation: "i" for the identity, otherwise cycles such as
// "(13)(24)" or "(2134)", the latter read as 2->1->3->4->2.
Perm4 parse_perm4(std::string_view text);
std::string format_perm4(const Perm4& perm);

// (pi, sigma_r, sigma_c, sigma_a, sigma_b) acting on the 16 points of a pair
// of MOLS(4). A point of class C and index i goes to class pi(C) with index
// sigma_{pi(C)}(i); classes are numbered Row=1, Col=2, SymA=3, SymB=4.
struct Paratopism {
  Perm4 class_perm = kIdentity4;
  std::array<Perm4, 4> sigma = {kIdentity4, kIdentity4, kIdentity4, kIdentity4};

  static Paratopism identity() { return {}; }
  static Paratopism parse(std::string_view text);

  PlanePoint apply(PlanePoint p) const;
  // As a permutation of canonical pi4 point ids (r1=0 .. b4=15).
  std::array<PointId, 16> point_map() const;
  std::string to_string() const;

  auto operator<=>(const Paratopism&) const = default;
};

// (a * b)(p) = a(b(p)).
Paratopism compose(const Paratopism& a, const Paratopism& b);
Paratopism inverse(const Paratopism& g);

// Maps every entry (r, c, alpha, beta) of the pair and re-tabulates. Throws
// ParatopismError unless `mols` is an order-4 pair.
MolsSet apply_to_mols(const Paratopism& g, const MolsSet& mols);
bool is_autoparatopism(const Paratopism& g, const MolsSet& mols);

struct PermGroup {
  std::vector<Paratopism> elements;  // sorted, contains the identity
  std::vector<Paratopism> generators;

  std::size_t order() const { return elements.size(); }
  bool contains(const Paratopism& g) const;
};

// Closure of the generators under composition.
PermGroup generate_group(const std::vector<Paratopism>& generators);

// Exhaustive: every autoparatopism of the pair that maps fixed_x onto fixed_x
// and fixed_o onto fixed_o setwise. Points are canonical pi4 ids.
PermGroup stabilizer(const MolsSet& mols, const std::vector<PointId>& fixed_x,
                     const std::vector<PointId>& fixed_o);

struct Orbit {
  PointId representative;  // minimum under the point order
  std::vector<PointId> members;
};

struct OrbitPartition {
  std::vector<Orbit> orbits;  // sorted by representative
  // For each input point: its representative and an element mapping the
  // representative onto it. Indexed by canonical id; unused ids are -1.
  std::array<PointId, 16> representative_of{};
  std::array<Paratopism, 16> witness{};

  std::vector<PointId> representatives() const;
};

OrbitPartition orbits(const PermGroup& group, const std::vector<PointId>& points);

}  // namespace planettt
