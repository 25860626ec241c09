#include "planettt/paratopism.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace planettt {

namespace {

bool is_perm(const Perm4& p) {
  std::array<bool, 4> seen{};
  for (int v : p) {
    if (v < 1 || v > 4 || seen[v - 1]) return false;
    seen[v - 1] = true;
  }
  return true;
}

Perm4 perm_compose(const Perm4& a, const Perm4& b) {
  Perm4 out{};
  for (int i = 0; i < 4; ++i) out[i] = a[b[i] - 1];
  return out;
}

Perm4 perm_inverse(const Perm4& p) {
  Perm4 out{};
  for (int i = 0; i < 4; ++i) out[p[i] - 1] = i + 1;
  return out;
}

std::vector<Perm4> all_perms() {
  std::vector<Perm4> out;
  Perm4 p = kIdentity4;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

PointId canonical_id(PlanePoint p) { return static_cast<int>(p.cls) * 4 + (p.index - 1); }
PlanePoint canonical_point(PointId id) { return {static_cast<PointClass>(id / 4), id % 4 + 1}; }

void require_pair(const MolsSet& mols) {
  if (mols.order != 4 || mols.squares.size() != 2) {
    throw ParatopismError("paratopisms act on a pair of Latin squares of order 4");
  }
  if (!is_mols(mols)) throw ParatopismError("squares are not an orthogonal Latin pair");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Perm4 parse_perm4(std::string_view text) {
  const std::string s = trim(text);
  if (s == "i") return kIdentity4;
  if (s.empty() || s.front() != '(') throw ParatopismError("bad permutation '" + s + "'");
  Perm4 perm = kIdentity4;
  std::array<bool, 4> used{};
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '(') throw ParatopismError("bad permutation '" + s + "'");
    const auto close = s.find(')', pos);
    if (close == std::string::npos) throw ParatopismError("unclosed cycle in '" + s + "'");
    std::vector<int> cycle;
    for (std::size_t i = pos + 1; i < close; ++i) {
      const int v = s[i] - '0';
      if (v < 1 || v > 4 || used[v - 1]) {
        throw ParatopismError("bad cycle element in '" + s + "'");
      }
      used[v - 1] = true;
      cycle.push_back(v);
    }
    if (cycle.empty()) throw ParatopismError("empty cycle in '" + s + "'");
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      perm[cycle[i] - 1] = cycle[(i + 1) % cycle.size()];
    }
    pos = close + 1;
  }
  return perm;
}

std::string format_perm4(const Perm4& perm) {
  std::string out;
  std::array<bool, 4> done{};
  for (int start = 1; start <= 4; ++start) {
    if (done[start - 1] || perm[start - 1] == start) continue;
    out += "(";
    for (int v = start; !done[v - 1]; v = perm[v - 1]) {
      done[v - 1] = true;
      out += static_cast<char>('0' + v);
    }
    out += ")";
  }
  return out.empty() ? "i" : out;
}

Paratopism Paratopism::parse(std::string_view text) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw ParatopismError("paratopism must be a parenthesised 5-vector: '" + s + "'");
  }
  s = s.substr(1, s.size() - 2);
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 5) {
    throw ParatopismError("paratopism needs 5 components, got " + std::to_string(parts.size()));
  }
  Paratopism g;
  g.class_perm = parse_perm4(parts[0]);
  for (int k = 0; k < 4; ++k) g.sigma[k] = parse_perm4(parts[k + 1]);
  return g;
}

PlanePoint Paratopism::apply(PlanePoint p) const {
  const int c = static_cast<int>(p.cls);
  if (c > 3 || p.index < 1 || p.index > 4) {
    throw ParatopismError("point " + planettt::to_string(p) + " is not a pi4 point");
  }
  const int d = class_perm[c] - 1;
  return {static_cast<PointClass>(d), sigma[d][p.index - 1]};
}

std::array<PointId, 16> Paratopism::point_map() const {
  std::array<PointId, 16> out{};
  for (PointId id = 0; id < 16; ++id) out[id] = canonical_id(apply(canonical_point(id)));
  return out;
}

std::string Paratopism::to_string() const {
  std::string out = "(" + format_perm4(class_perm);
  for (const auto& s : sigma) out += "," + format_perm4(s);
  return out + ")";
}

Paratopism compose(const Paratopism& a, const Paratopism& b) {
  Paratopism out;
  out.class_perm = perm_compose(a.class_perm, b.class_perm);
  const Perm4 a_inv = perm_inverse(a.class_perm);
  for (int d = 0; d < 4; ++d) out.sigma[d] = perm_compose(a.sigma[d], b.sigma[a_inv[d] - 1]);
  return out;
}

Paratopism inverse(const Paratopism& g) {
  Paratopism out;
  out.class_perm = perm_inverse(g.class_perm);
  for (int c = 0; c < 4; ++c) out.sigma[c] = perm_inverse(g.sigma[g.class_perm[c] - 1]);
  return out;
}

MolsSet apply_to_mols(const Paratopism& g, const MolsSet& mols) {
  require_pair(mols);
  if (!is_perm(g.class_perm) ||
      !std::all_of(g.sigma.begin(), g.sigma.end(), [](const Perm4& s) { return is_perm(s); })) {
    throw ParatopismError("paratopism component is not a bijection");
  }
  std::vector<std::vector<int>> first(4, std::vector<int>(4, 0));
  std::vector<std::vector<int>> second = first;
  for (int r = 1; r <= 4; ++r) {
    for (int c = 1; c <= 4; ++c) {
      const std::array<PlanePoint, 4> entry = {
          PlanePoint{PointClass::kRow, r}, PlanePoint{PointClass::kCol, c},
          PlanePoint{PointClass::kSymA, mols.squares[0].at(r, c)},
          PlanePoint{PointClass::kSymB, mols.squares[1].at(r, c)}};
      std::array<int, 4> image{};
      for (const auto& p : entry) {
        const PlanePoint q = g.apply(p);
        image[static_cast<int>(q.cls)] = q.index;
      }
      first[image[0] - 1][image[1] - 1] = image[2];
      second[image[0] - 1][image[1] - 1] = image[3];
    }
  }
  return MolsSet{4, {LatinSquare::from_rows(first), LatinSquare::from_rows(second)}};
}

bool is_autoparatopism(const Paratopism& g, const MolsSet& mols) {
  return apply_to_mols(g, mols) == mols;
}

bool PermGroup::contains(const Paratopism& g) const {
  return std::binary_search(elements.begin(), elements.end(), g);
}

PermGroup generate_group(const std::vector<Paratopism>& generators) {
  std::set<Paratopism> found{Paratopism::identity()};
  std::vector<Paratopism> frontier{Paratopism::identity()};
  while (!frontier.empty()) {
    std::vector<Paratopism> next;
    for (const auto& h : frontier) {
      for (const auto& g : generators) {
        Paratopism gh = compose(g, h);
        if (found.insert(gh).second) next.push_back(gh);
      }
    }
    frontier = std::move(next);
  }
  return PermGroup{{found.begin(), found.end()}, generators};
}

PermGroup stabilizer(const MolsSet& mols, const std::vector<PointId>& fixed_x,
                     const std::vector<PointId>& fixed_o) {
  require_pair(mols);
  // entry[r][c] = (alpha, beta), 0-based.
  std::array<std::array<std::pair<int, int>, 4>, 4> entry{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      entry[r][c] = {mols.squares[0].at(r + 1, c + 1) - 1, mols.squares[1].at(r + 1, c + 1) - 1};
    }
  }
  std::uint16_t x_mask = 0;
  std::uint16_t o_mask = 0;
  for (PointId p : fixed_x) x_mask |= static_cast<std::uint16_t>(1u << p);
  for (PointId p : fixed_o) o_mask |= static_cast<std::uint16_t>(1u << p);
  if (x_mask & o_mask) throw ParatopismError("stabilizer: fixed point sets overlap");

  const std::vector<Perm4> perms = all_perms();
  PermGroup group;
  std::array<PointId, 16> map{};
  for (const Perm4& cp : perms) {
    for (const Perm4& s0 : perms) {
      for (const Perm4& s1 : perms) {
        for (const Perm4& s2 : perms) {
          for (const Perm4& s3 : perms) {
            const std::array<const Perm4*, 4> sig = {&s0, &s1, &s2, &s3};
            for (int c = 0; c < 4; ++c) {
              const int d = cp[c] - 1;
              for (int i = 0; i < 4; ++i) map[c * 4 + i] = d * 4 + (*sig[d])[i] - 1;
            }
            auto image_mask = [&](std::uint16_t m) {
              std::uint16_t out = 0;
              for (int p = 0; p < 16; ++p) {
                if (m >> p & 1) out |= static_cast<std::uint16_t>(1u << map[p]);
              }
              return out;
            };
            if (image_mask(x_mask) != x_mask || image_mask(o_mask) != o_mask) continue;
            // Every entry must land on an entry, row by row with early exit.
            bool ok = true;
            for (int r = 0; r < 4 && ok; ++r) {
              for (int c = 0; c < 4 && ok; ++c) {
                std::array<int, 4> image{};
                image[map[r] / 4] = map[r] % 4;
                image[map[4 + c] / 4] = map[4 + c] % 4;
                image[map[8 + entry[r][c].first] / 4] = map[8 + entry[r][c].first] % 4;
                image[map[12 + entry[r][c].second] / 4] = map[12 + entry[r][c].second] % 4;
                ok = entry[image[0]][image[1]] == std::make_pair(image[2], image[3]);
              }
            }
            if (ok) {
              Paratopism g;
              g.class_perm = cp;
              g.sigma = {s0, s1, s2, s3};
              group.elements.push_back(g);
            }
          }
        }
      }
    }
  }
  std::sort(group.elements.begin(), group.elements.end());
  return group;
}

std::vector<PointId> OrbitPartition::representatives() const {
  std::vector<PointId> out;
  for (const auto& orbit : orbits) out.push_back(orbit.representative);
  return out;
}

OrbitPartition orbits(const PermGroup& group, const std::vector<PointId>& points) {
  OrbitPartition out;
  out.representative_of.fill(-1);
  std::vector<std::array<PointId, 16>> maps;
  for (const auto& g : group.elements) maps.push_back(g.point_map());
  std::vector<PointId> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (PointId p : sorted) {
    if (p < 0 || p >= 16) throw ParatopismError("orbits: point id out of range");
  }
  for (PointId p : sorted) {
    if (out.representative_of[p] != -1) continue;
    Orbit orbit{p, {}};
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const PointId q = maps[k][p];
      if (out.representative_of[q] != -1) continue;
      if (!std::binary_search(sorted.begin(), sorted.end(), q)) {
        throw ParatopismError("orbits: group does not preserve the point set");
      }
      out.representative_of[q] = p;
      out.witness[q] = group.elements[k];
      orbit.members.push_back(q);
    }
    std::sort(orbit.members.begin(), orbit.members.end());
    out.orbits.push_back(std::move(orbit));
  }
  return out;
}

}  // namespace planettt
