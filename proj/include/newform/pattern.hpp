#pragma once
#include <climits>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newform/glgroup.hpp"
#include "newform/local.hpp"

namespace newform {

// Entrywise valuation conditions: val(x_ij) >= bound, x_ii = 1 mod p^cong, optional unit determinant.
struct PatternGroup {
  static constexpr int kNone = INT_MIN;

  unsigned n = 0;
  std::vector<int> bound;  // kNone = unbounded
  std::vector<int> cong;   // diagonal only; 0 = no condition
  bool det_unit = true;

  int b(unsigned i, unsigned j) const { return bound[i * n + j]; }
  int& b(unsigned i, unsigned j) { return bound[i * n + j]; }
  int c(unsigned i) const { return cong[i * n + i]; }
  int& c(unsigned i) { return cong[i * n + i]; }

  bool contains(const WindowMatrix& x) const;
  bool operator==(const PatternGroup& o) const {
    return n == o.n && bound == o.bound && cong == o.cong && det_unit == o.det_unit;
  }
  std::string str() const;
};

PatternGroup full_K(unsigned n);
PatternGroup conductor_subgroup(unsigned n, int m);
WindowMatrix sigma(const LocalRing& R, unsigned n);
WindowMatrix sigma_mn(const LocalRing& R, int m, unsigned n);
// g P g^{-1} for monomial g
PatternGroup conjugate_pattern(const PatternGroup& P, const WindowMatrix& g);
PatternGroup pattern_intersect(const PatternGroup& P, const PatternGroup& Q);
// [P : Q] for integral Q <= P
std::uint64_t pattern_index(const Field& F, const PatternGroup& P, const PatternGroup& Q);
// representatives y of the right cosets Q y in P
std::vector<WindowMatrix> pattern_transversal(const LocalRing& R, const PatternGroup& P, const PatternGroup& Q);
// residues of P mod p, by enumeration of the free entries
std::vector<FqMatrix> pattern_reduction(const Field& F, const PatternGroup& P);
// random element of an integral pattern group; digits below bound + depth
WindowMatrix random_pattern_element(const LocalRing& R, const PatternGroup& P, std::mt19937_64& rng, int depth);

// H = K(m) ∩ Σ^{-1} K Σ, transversal of H \ K(m) with y_0 = 1
std::vector<WindowMatrix> support_transversal(const LocalRing& R, unsigned n, int m);
// y_0 kept, the others permuted and left-multiplied by random elements of H
std::vector<WindowMatrix> shuffled_transversal(const LocalRing& R, unsigned n, int m, std::uint64_t seed);

struct SupportWitness {
  int v = 0;            // g = pi^v k Σ y
  WindowMatrix k;
  std::size_t y = 0;    // index into the transversal
};
std::optional<SupportWitness> support_membership(const WindowMatrix& g, int m,
                                                 const std::vector<WindowMatrix>& transversal);

enum class Family { A1, A2, B, C, D };
Family family_from_string(const std::string& s);  // UnknownFamily
std::string family_name(Family f);

struct CosetRep {
  Family tag;
  std::vector<int> alpha;                      // alpha_1..alpha_{n-1} (B, C, D, A2·B)
  unsigned j = 0;                              // A2 block index
  std::vector<std::vector<fq_t>> residues;     // pi-adic digit lists
  WindowMatrix mat;
  std::string csv() const;
};

// diag exponents e_p = alpha_{n-p}, e_n = 0
std::vector<int> alpha_exponents(const std::vector<int>& alpha);
// nondecreasing (strict for D) chains with alpha_{n-1} <= bound
std::vector<std::vector<int>> alpha_chains(unsigned n, int bound, bool strict, bool positive);

// A1, A2 residues mod p^m; B, C, D with alpha_{n-1} <= truncation
void enumerate_family(Family tag, const LocalRing& R, unsigned n, int m, int truncation,
                      const std::function<void(const CosetRep&)>& fn);
std::uint64_t family_count(Family tag, std::uint32_t q, unsigned n, int m, int truncation);
// C members with a fixed alpha
std::uint64_t c_block_count(std::uint32_t q, const std::vector<int>& alpha);
CosetRep c_block_member(const LocalRing& R, const std::vector<int>& alpha, std::uint64_t index);
// A2 members with block index j, in enumeration order
std::uint64_t a2_count(std::uint32_t q, unsigned n, int m, unsigned j);
CosetRep a2_member(const LocalRing& R, unsigned n, int m, unsigned j, std::uint64_t index);
CosetRep a2_times_b(const LocalRing& R, const CosetRep& a, const std::vector<int>& alpha);

struct PartitionReport {
  unsigned n = 0;
  std::uint32_t q = 0;
  int m = 0;
  std::uint64_t a1 = 0, a2 = 0, orbit = 0;
  bool pass = false;
};
PartitionReport verify_coset_partition(const Field& F, LocalRing::Mode mode, unsigned n, int m);

struct ReductionImage {
  bool exact = false;
  std::vector<gidx> elements;  // exact image
  unsigned block = 0;          // contains N_{block, n-block}
  std::size_t witnesses = 0;   // checked witness matrices
};
// K ∩ g K(m) g^{-1} modulo p
ReductionImage reduction_image(const GLGroup& G, const LocalRing& R, const CosetRep& g, int m);
std::vector<gidx> diagonal_image(const GLGroup& G, const std::vector<int>& alpha, int m);

}  // namespace newform
