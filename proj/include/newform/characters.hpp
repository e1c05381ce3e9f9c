#pragma once
#include <cstdint>
#include <memory>
#include <vector>

#include "newform/glgroup.hpp"

namespace newform {

struct ClassData {
  std::vector<gidx> reps;               // least index in class; classes ordered by it
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint32_t> class_of;  // element index -> class
  std::vector<std::uint32_t> inverse;   // class of g^-1
  std::uint32_t identity_class = 0;
  std::size_t count() const { return reps.size(); }
};

ClassData conjugacy_classes(const GLGroup& G);

struct CharacterTable {
  ModField K;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint64_t>> values;  // rows x classes
  std::vector<std::uint64_t> degree;
  std::vector<bool> cuspidal;
  std::size_t rows() const { return values.size(); }
};

// Rows sorted by (degree, value vector).
CharacterTable dixon_character_table(const GLGroup& G, const ClassData& C, const ModField& K,
                                     std::uint64_t seed = 0);

// Throws InconsistentOrthogonality on failure.
void check_orthogonality(const GLGroup& G, const ClassData& C, const CharacterTable& T);

// Group, classes and table together; the shared handle used downstream.
struct GroupContext {
  std::shared_ptr<const GLGroup> G;
  ModField K;
  ClassData classes;
  CharacterTable table;

  std::uint64_t chi(std::size_t row, gidx g) const { return table.values[row][classes.class_of[g]]; }
  std::vector<std::size_t> cuspidal_rows() const;
  std::size_t contragredient(std::size_t row) const;  // by value-vector equality
};

std::shared_ptr<const GroupContext> make_context(unsigned n, const Field& F, std::uint64_t seed = 0,
                                                 std::uint64_t enum_bound = GLGroup::kDefaultBound);
// Builds a context around an already computed table (cache loads); re-verifies it.
std::shared_ptr<const GroupContext> make_context_from_table(std::shared_ptr<const GLGroup> G, ModField K,
                                                            CharacterTable T);

bool is_cuspidal(const GLGroup& G, const ClassData& C, const std::vector<std::uint64_t>& row,
                 const ModField& K);

// <chi|_H, 1> lifted to [0, l); H given as element indices and checked to be a group.
std::uint64_t invariant_dim(const GroupContext& ctx, std::size_t row, const std::vector<gidx>& H);
// Throws NotAGroup unless H is a subgroup.
void verify_subgroup(const GLGroup& G, const std::vector<gidx>& H);

// omega(s) for s = 1..q-1 (index s-1), i.e. chi(s*1)/deg.
std::vector<std::uint64_t> central_character(const GroupContext& ctx, std::size_t row);

// Regular characters of F_{q^2}^x: theta_j(eps^a) = zeta^{aj}; orbit reps j <= jq mod q^2-1.
std::vector<std::uint64_t> regular_theta_orbits(std::uint64_t q);
// Class function (per class) of the cuspidal representation attached to theta_j.
std::vector<std::uint64_t> gl2_cuspidal_oracle(const GroupContext& ctx, std::uint64_t j);

}  // namespace newform
