#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "newform/characters.hpp"

namespace newform {

// x -> zeta_p^{Tr(c x)}
struct AdditiveCharacter {
  fq_t c = 1;
  std::vector<std::uint64_t> values;  // indexed by x in F_q
  std::uint64_t operator()(fq_t x) const { return values[x]; }
};

AdditiveCharacter make_additive_character(const Field& F, const ModField& K, fq_t c = 1);

// Value arrays indexed by the enumeration of GL_n(F_q).
using ValueArray = std::vector<std::uint64_t>;

struct WhittakerVector {
  ValueArray values;  // f(ug) = psi(u) f(g)
};

struct BesselTable {
  std::size_t row = 0;
  AdditiveCharacter psi;
  ValueArray values;
};

// Right cosets U\G: every g is written as upart[g] * reps[coset[g]].
struct UnipotentCosets {
  std::vector<gidx> unipotent;  // U, sorted
  std::vector<gidx> reps;
  std::vector<std::uint32_t> coset;
  std::vector<gidx> upart;
};
UnipotentCosets unipotent_cosets(const GLGroup& G);

// psi(u) on U via the superdiagonal sum
std::uint64_t psi_on_u(const GLGroup& G, const AdditiveCharacter& psi, gidx u);

BesselTable bessel_from_character(const GroupContext& ctx, std::size_t row, const AdditiveCharacter& psi);
BesselTable bessel_via_model(const GroupContext& ctx, std::size_t row, const AdditiveCharacter& psi,
                             std::size_t coset_bound = 4096);

struct PropertyVerdict {
  std::string name;
  bool pass = true;
  std::string witness;  // first counterexample, empty on pass
};
std::vector<PropertyVerdict> check_bessel_properties(const GroupContext& ctx, const BesselTable& B);

ValueArray bessel_bop_average(const GroupContext& ctx, const BesselTable& B);

WhittakerVector random_whittaker_vector(const GroupContext& ctx, const UnipotentCosets& cos,
                                        const AdditiveCharacter& psi, std::mt19937_64& rng);
bool is_left_equivariant(const GroupContext& ctx, const AdditiveCharacter& psi, const ValueArray& f);
bool averaging_lemma_check(const GroupContext& ctx, const AdditiveCharacter& psi, const ValueArray& alpha, gidx g);

// The finite-group factor B(kbar) of the Gelfand Whittaker function.
std::uint64_t gelfand_whittaker_finite(const GroupContext& ctx, const BesselTable& B, const FqMatrix& kbar);

}  // namespace newform
