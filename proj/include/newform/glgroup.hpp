#pragma once
#include <cstdint>
#include <vector>

#include "newform/field.hpp"
#include "newform/matrix.hpp"

namespace newform {

using gidx = std::uint32_t;

// GL_n(F_q) in row-major radix order: entry (0,0) is the most significant digit.
class GLGroup {
 public:
  static constexpr std::uint64_t kDefaultBound = 1000000;

  GLGroup(unsigned n, Field F, std::uint64_t bound = kDefaultBound);

  unsigned n() const { return n_; }
  const Field& field() const { return F_; }
  std::size_t size() const { return codes_.size(); }
  FqMatrix element(gidx i) const;
  const fq_t* entries(gidx i) const { return &elems_[std::size_t(i) * n_ * n_]; }
  gidx index_of(const FqMatrix& m) const;  // throws if singular
  gidx index_of_entries(const fq_t* e) const;
  gidx identity() const { return id_; }
  gidx mul(gidx a, gidx b) const;
  gidx inv(gidx a) const { return inv_[a]; }
  gidx conj(gidx g, gidx x) const { return mul(mul(g, x), inv(g)); }  // g x g^-1
  fq_t det(gidx a) const { return det_[a]; }
  bool has_mul_table() const { return !mul_.empty(); }

  // subgroups as sorted index lists
  std::vector<gidx> unipotent_upper() const;
  std::vector<gidx> block_lower_unipotent(unsigned n1) const;  // N_{n1,n-n1}
  std::vector<gidx> mirabolic() const;
  std::vector<gidx> bop() const;    // lower Borel of GL_{n-1}, embedded as diag(b,1)
  std::vector<gidx> center() const;  // scalars, ordered by scalar value
  gidx scalar(fq_t s) const;
  // sum over the superdiagonal of an upper unitriangular element
  fq_t superdiag_sum(gidx u) const;

 private:
  std::uint64_t code_of(const fq_t* e) const;
  unsigned n_;
  Field F_;
  std::vector<std::uint64_t> codes_;  // sorted
  std::vector<fq_t> elems_;
  std::vector<std::int32_t> dense_;  // code -> index or -1
  std::vector<gidx> inv_;
  std::vector<fq_t> det_;
  std::vector<gidx> mul_;
  gidx id_ = 0;
};

}  // namespace newform
