#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qlab {

using Simplex = std::vector<int>;  // sorted vertex indices

class SimplicialComplex {
 public:
  explicit SimplicialComplex(int vertices = 0) : nv_(vertices) {}

  // Adds the simplex and all of its faces.
  void add(Simplex s);
  bool contains(const Simplex& s) const;
  int vertex_count() const { return nv_; }
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  // Sorted lexicographically.
  const std::vector<Simplex>& simplices(int dim) const;
  long count(int dim) const;
  long size() const;
  int euler_characteristic() const;

 private:
  int nv_;
  std::vector<std::set<Simplex>> by_dim_;
  mutable std::vector<std::vector<Simplex>> cache_;
  mutable bool dirty_ = true;
  void refresh() const;
};

// Boundary matrices over GF(2); column j of boundary[d] lists the rows (in
// dimension d-1) of the faces of simplex j.
struct ChainComplexGF2 {
  std::vector<long> ranks;  // number of chains per dimension
  std::vector<std::vector<std::vector<int>>> boundary;
  bool boundary_squares_to_zero() const;
};

// Chains of x modulo the chains of sub (sub may be null).
ChainComplexGF2 chain_complex(const SimplicialComplex& x, const SimplicialComplex* sub = nullptr);

int gf2_rank(const std::vector<std::vector<int>>& columns, long rows);

struct HomologyResult {
  std::vector<int> betti;
  std::vector<long> chains;
  int euler_chains = 0;
  int euler_betti = 0;
};

HomologyResult homology(const ChainComplexGF2& c);
HomologyResult homology(const SimplicialComplex& x);

enum class SpaceKind { Point, Circle, Sphere2 };
SpaceKind parse_space_kind(const std::string& s);
std::string to_string(SpaceKind k);

// circle: resolution vertices (>= 3); sphere2: the octahedron subdivided
// barycentrically resolution - 1 times (resolution >= 1); point ignores it.
SimplicialComplex triangulate_model(SpaceKind kind, int resolution);

SimplicialComplex barycentric_subdivision(const SimplicialComplex& k);

struct BarycenterComplexPair {
  int d = 1;
  SimplicialComplex ambient;
  SimplicialComplex sub;             // the degenerate locus, one order lower
  std::vector<long> inclusion;       // per sub simplex (dimension-major, sorted), index in ambient's list
  std::vector<int> inclusion_dim;    // matching dimension
};

BarycenterComplexPair barycenter_complex(const SimplicialComplex& m, int d);
HomologyResult homology(const BarycenterComplexPair& pair, bool relative);

// One simplex per line, vertex indices ascending, dimension-major order.
void write_simplices(std::ostream& os, const SimplicialComplex& x);
SimplicialComplex read_simplices(std::istream& is);

}  // namespace qlab
