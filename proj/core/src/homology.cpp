#include "qlab/homology.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "qlab/manifold.hpp"

namespace qlab {

// ---- complexes

void SimplicialComplex::add(Simplex s) {
  std::sort(s.begin(), s.end());
  if (s.empty()) throw ConfigError("empty simplex");
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ConfigError("simplex with repeated vertex");
  if (s.front() < 0) throw ConfigError("negative vertex index");
  nv_ = std::max(nv_, s.back() + 1);
  const int dim = static_cast<int>(s.size()) - 1;
  if (static_cast<int>(by_dim_.size()) <= dim) by_dim_.resize(dim + 1);
  if (!by_dim_[dim].insert(s).second) return;
  dirty_ = true;
  if (dim == 0) return;
  for (int i = 0; i <= dim; ++i) {
    Simplex f;
    f.reserve(dim);
    for (int j = 0; j <= dim; ++j)
      if (j != i) f.push_back(s[j]);
    add(std::move(f));
  }
}

bool SimplicialComplex::contains(const Simplex& s) const {
  const int dim = static_cast<int>(s.size()) - 1;
  if (dim < 0 || dim >= static_cast<int>(by_dim_.size())) return false;
  return by_dim_[dim].count(s) > 0;
}

void SimplicialComplex::refresh() const {
  if (!dirty_) return;
  cache_.assign(by_dim_.size(), {});
  for (size_t d = 0; d < by_dim_.size(); ++d) cache_[d].assign(by_dim_[d].begin(), by_dim_[d].end());
  dirty_ = false;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int dim) const {
  static const std::vector<Simplex> none;
  refresh();
  if (dim < 0 || dim >= static_cast<int>(cache_.size())) return none;
  return cache_[dim];
}

long SimplicialComplex::count(int dim) const {
  if (dim < 0 || dim >= static_cast<int>(by_dim_.size())) return 0;
  return static_cast<long>(by_dim_[dim].size());
}

long SimplicialComplex::size() const {
  long s = 0;
  for (const auto& d : by_dim_) s += static_cast<long>(d.size());
  return s;
}

int SimplicialComplex::euler_characteristic() const {
  long e = 0;
  for (size_t d = 0; d < by_dim_.size(); ++d) e += (d % 2 ? -1 : 1) * static_cast<long>(by_dim_[d].size());
  return static_cast<int>(e);
}

// ---- chains

ChainComplexGF2 chain_complex(const SimplicialComplex& x, const SimplicialComplex* sub) {
  ChainComplexGF2 c;
  const int top = x.dimension();
  std::vector<std::map<Simplex, int>> index(top + 1);
  std::vector<std::vector<const Simplex*>> kept(top + 1);
  for (int d = 0; d <= top; ++d)
    for (const auto& s : x.simplices(d)) {
      if (sub && sub->contains(s)) continue;
      index[d].emplace(s, static_cast<int>(kept[d].size()));
      kept[d].push_back(&s);
    }
  c.ranks.resize(top + 1);
  c.boundary.resize(top + 1);
  for (int d = 0; d <= top; ++d) {
    c.ranks[d] = static_cast<long>(kept[d].size());
    if (d == 0) {
      c.boundary[0].assign(kept[0].size(), {});
      continue;
    }
    for (const Simplex* s : kept[d]) {
      std::vector<int> col;
      for (int i = 0; i <= d; ++i) {
        Simplex f;
        for (int j = 0; j <= d; ++j)
          if (j != i) f.push_back((*s)[j]);
        auto it = index[d - 1].find(f);
        if (it != index[d - 1].end()) col.push_back(it->second);
      }
      std::sort(col.begin(), col.end());
      c.boundary[d].push_back(std::move(col));
    }
  }
  return c;
}

namespace {

using Bits = std::vector<std::uint64_t>;

Bits to_bits(const std::vector<int>& rows, long nrows) {
  Bits b((nrows + 63) / 64, 0);
  for (int r : rows) b[r / 64] ^= std::uint64_t(1) << (r % 64);
  return b;
}

long low(const Bits& b) {
  for (long w = static_cast<long>(b.size()) - 1; w >= 0; --w)
    if (b[w]) return w * 64 + 63 - __builtin_clzll(b[w]);
  return -1;
}

}  // namespace

int gf2_rank(const std::vector<std::vector<int>>& columns, long rows) {
  // Column reduction: each pivot row owns one reduced column.
  std::vector<long> owner(rows, -1);
  std::vector<Bits> reduced;
  reduced.reserve(columns.size());
  int rank = 0;
  for (const auto& col : columns) {
    Bits b = to_bits(col, rows);
    long p = low(b);
    while (p >= 0 && owner[p] >= 0) {
      const Bits& o = reduced[owner[p]];
      for (size_t w = 0; w < b.size(); ++w) b[w] ^= o[w];
      p = low(b);
    }
    if (p >= 0) {
      owner[p] = static_cast<long>(reduced.size());
      reduced.push_back(std::move(b));
      ++rank;
    }
  }
  return rank;
}

bool ChainComplexGF2::boundary_squares_to_zero() const {
  for (size_t d = 2; d < boundary.size(); ++d)
    for (const auto& col : boundary[d]) {
      std::vector<int> acc;
      for (int f : col) acc.insert(acc.end(), boundary[d - 1][f].begin(), boundary[d - 1][f].end());
      std::sort(acc.begin(), acc.end());
      for (size_t i = 0; i < acc.size();) {
        size_t j = i;
        while (j < acc.size() && acc[j] == acc[i]) ++j;
        if ((j - i) % 2) return false;
        i = j;
      }
    }
  return true;
}

HomologyResult homology(const ChainComplexGF2& c) {
  const int top = static_cast<int>(c.ranks.size()) - 1;
  std::vector<int> rk(top + 2, 0);  // rank of the boundary out of dimension d
  for (int d = 1; d <= top; ++d) rk[d] = gf2_rank(c.boundary[d], c.ranks[d - 1]);
  HomologyResult h;
  h.chains = c.ranks;
  for (int d = 0; d <= top; ++d) {
    h.betti.push_back(static_cast<int>(c.ranks[d] - rk[d] - rk[d + 1]));
    const int sign = d % 2 ? -1 : 1;
    h.euler_chains += sign * static_cast<int>(c.ranks[d]);
    h.euler_betti += sign * h.betti.back();
  }
  if (h.betti.empty()) h.betti.push_back(0);
  return h;
}

HomologyResult homology(const SimplicialComplex& x) { return homology(chain_complex(x)); }

// ---- models

SpaceKind parse_space_kind(const std::string& s) {
  if (s == "point") return SpaceKind::Point;
  if (s == "circle") return SpaceKind::Circle;
  if (s == "sphere2") return SpaceKind::Sphere2;
  throw ConfigError("unknown space: " + s);
}

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::Point:
      return "point";
    case SpaceKind::Circle:
      return "circle";
    case SpaceKind::Sphere2:
      return "sphere2";
  }
  return "";
}

SimplicialComplex triangulate_model(SpaceKind kind, int resolution) {
  SimplicialComplex k;
  switch (kind) {
    case SpaceKind::Point:
      k.add({0});
      return k;
    case SpaceKind::Circle:
      if (resolution < 3) throw ConfigError("a simplicial circle needs at least 3 vertices");
      for (int i = 0; i < resolution; ++i) k.add({i, (i + 1) % resolution});
      return k;
    case SpaceKind::Sphere2: {
      if (resolution < 1) throw ConfigError("sphere2 resolution must be >= 1");
      // Octahedron: +-x = 0,1, +-y = 2,3, +-z = 4,5.
      for (int a : {0, 1})
        for (int b : {2, 3})
          for (int c : {4, 5}) k.add({a, b, c});
      for (int r = 1; r < resolution; ++r) k = barycentric_subdivision(k);
      return k;
    }
  }
  return k;
}

namespace {

// Finite regular cell complex: each cell lists its codimension-one faces.
struct CellComplex {
  std::vector<int> dim;
  std::vector<std::vector<int>> facets;
};

// Order complex of the face poset, built from complete flags; vertex
// labels go through `label`, simplices whose labels repeat are dropped.
SimplicialComplex flag_complex(const CellComplex& cc, const std::function<int(int)>& label) {
  const int n = static_cast<int>(cc.dim.size());
  std::vector<char> is_facet(n, 0);
  for (const auto& f : cc.facets)
    for (int c : f) is_facet[c] = 1;
  // All chains (not only maximal ones): a degenerate maximal flag can still
  // have faces whose labels are distinct.
  SimplicialComplex out;
  std::vector<int> chain;
  std::set<std::vector<int>> seen;
  std::function<void(int)> walk = [&](int cell) {
    chain.push_back(cell);
    if (cc.facets[cell].empty()) {
      // Every subchain of the complete flag is a simplex of the order complex.
      const int m = static_cast<int>(chain.size());
      for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << m); ++mask) {
        std::vector<int> lab;
        for (int i = 0; i < m; ++i)
          if (mask >> i & 1) lab.push_back(label(chain[i]));
        std::sort(lab.begin(), lab.end());
        if (std::adjacent_find(lab.begin(), lab.end()) != lab.end()) continue;
        if (seen.insert(lab).second) out.add(lab);
      }
    } else {
      for (int f : cc.facets[cell]) walk(f);
    }
    chain.pop_back();
  };
  for (int c = 0; c < n; ++c)
    if (!is_facet[c]) walk(c);
  return out;
}

// Cells of a simplicial complex: its simplices, dimension-major.
struct SimplexCells {
  CellComplex cells;
  std::vector<Simplex> simplex;
};

SimplexCells cells_of(const SimplicialComplex& k) {
  SimplexCells out;
  std::map<Simplex, int> id;
  for (int d = 0; d <= k.dimension(); ++d)
    for (const auto& s : k.simplices(d)) {
      id.emplace(s, static_cast<int>(out.simplex.size()));
      out.simplex.push_back(s);
      out.cells.dim.push_back(d);
      std::vector<int> f;
      if (d > 0)
        for (int i = 0; i <= d; ++i) {
          Simplex t;
          for (int j = 0; j <= d; ++j)
            if (j != i) t.push_back(s[j]);
          f.push_back(id.at(t));
        }
      out.cells.facets.push_back(std::move(f));
    }
  return out;
}

}  // namespace

SimplicialComplex barycentric_subdivision(const SimplicialComplex& k) {
  auto sc = cells_of(k);
  return flag_complex(sc.cells, [](int c) { return c; });
}

BarycenterComplexPair barycenter_complex(const SimplicialComplex& m, int d) {
  if (d < 1 || d > 2) throw ConfigError("barycenter spaces are built for d = 1, 2 only");
  BarycenterComplexPair p;
  p.d = d;
  if (d == 1) {
    p.ambient = m;
    return p;
  }
  auto sc = cells_of(m);
  const int nk = static_cast<int>(sc.simplex.size());
  // Product cells (a, b, e) of M x M x [0,1]; e = 0, 1 are the ends and 2 the edge.
  auto pid = [&](int a, int b, int e) { return (a * nk + b) * 3 + e; };
  CellComplex prod;
  prod.dim.resize(static_cast<size_t>(nk) * nk * 3);
  prod.facets.resize(prod.dim.size());
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b)
      for (int e = 0; e < 3; ++e) {
        const int id = pid(a, b, e);
        prod.dim[id] = sc.cells.dim[a] + sc.cells.dim[b] + (e == 2);
        auto& f = prod.facets[id];
        for (int fa : sc.cells.facets[a]) f.push_back(pid(fa, b, e));
        for (int fb : sc.cells.facets[b]) f.push_back(pid(a, fb, e));
        if (e == 2) {
          f.push_back(pid(a, b, 0));
          f.push_back(pid(a, b, 1));
        }
      }
  // Vertex quotient. Labels below nk are cells of M (the degenerate locus);
  // the rest are swap classes of off-diagonal edge cells.
  auto label = [&](int id) {
    const int e = id % 3, ab = id / 3, a = ab / nk, b = ab % nk;
    if (a == b) return a;           // (x, x, t) ~ x
    if (e == 0) return b;           // (x, y, 0) ~ y
    if (e == 1) return a;           // (x, y, 1) ~ (y, x, 0) ~ x
    const int lo = std::min(a, b), hi = std::max(a, b);
    return nk + lo * nk + hi;       // (x, y, t) ~ (y, x, 1 - t)
  };
  SimplicialComplex raw = flag_complex(prod, label);
  // Compact relabeling that keeps the cells of M first.
  std::map<int, int> relabel;
  for (int v = 0; v < raw.vertex_count(); ++v)
    if (raw.contains({v})) relabel.emplace(v, static_cast<int>(relabel.size()));
  SimplicialComplex amb;
  for (int dim = raw.dimension(); dim >= 0; --dim)
    for (const auto& s : raw.simplices(dim)) {
      Simplex t;
      for (int v : s) t.push_back(relabel.at(v));
      amb.add(t);
    }
  p.ambient = std::move(amb);
  int m_count = 0;
  for (const auto& [v, r] : relabel)
    if (v < nk) m_count = std::max(m_count, r + 1);
  for (int dim = 0; dim <= p.ambient.dimension(); ++dim)
    for (const auto& s : p.ambient.simplices(dim))
      if (s.back() < m_count) p.sub.add(s);
  for (int dim = 0; dim <= p.sub.dimension(); ++dim) {
    const auto& all = p.ambient.simplices(dim);
    for (const auto& s : p.sub.simplices(dim)) {
      p.inclusion.push_back(std::lower_bound(all.begin(), all.end(), s) - all.begin());
      p.inclusion_dim.push_back(dim);
    }
  }
  return p;
}

HomologyResult homology(const BarycenterComplexPair& pair, bool relative) {
  return homology(chain_complex(pair.ambient, relative ? &pair.sub : nullptr));
}

void write_simplices(std::ostream& os, const SimplicialComplex& x) {
  for (int d = 0; d <= x.dimension(); ++d)
    for (const auto& s : x.simplices(d)) {
      for (size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
      os << '\n';
    }
}

SimplicialComplex read_simplices(std::istream& is) {
  SimplicialComplex x;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Simplex s;
    std::string tok;
    while (ls >> tok) {
      size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 0) throw ConfigError("bad vertex on line " + std::to_string(lineno));
      s.push_back(v);
    }
    if (!s.empty()) x.add(s);
  }
  return x;
}

}  // namespace qlab
