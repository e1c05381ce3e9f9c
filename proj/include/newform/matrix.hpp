#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "newform/field.hpp"

namespace newform {

struct FqMatrix {
  unsigned n = 0;
  std::vector<fq_t> a;  // row-major

  FqMatrix() = default;
  explicit FqMatrix(unsigned dim) : n(dim), a(dim * dim, 0) {}
  static FqMatrix identity(unsigned dim);
  fq_t& at(unsigned i, unsigned j) { return a[i * n + j]; }
  fq_t at(unsigned i, unsigned j) const { return a[i * n + j]; }
  bool operator==(const FqMatrix& o) const { return n == o.n && a == o.a; }
};

FqMatrix mat_mul(const Field& F, const FqMatrix& x, const FqMatrix& y);
fq_t mat_det(const Field& F, const FqMatrix& x);
fq_t mat_trace(const Field& F, const FqMatrix& x);
FqMatrix mat_inv(const Field& F, const FqMatrix& x);  // SingularMatrix
FqMatrix mat_scalar(const Field& F, unsigned n, fq_t s);
FqMatrix companion(const Field& F, const std::vector<fq_t>& monic);  // low-to-high, monic

// Dense matrices over the computation field.
struct ModMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint64_t> a;
  ModMatrix() = default;
  ModMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
  std::uint64_t& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

ModMatrix mod_mul(const ModField& K, const ModMatrix& x, const ModMatrix& y);
// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> mod_rref(const ModField& K, ModMatrix& m);
std::size_t mod_rank(const ModField& K, ModMatrix m);
// Basis of the right nullspace {v : m v = 0}, one vector per row of the result.
ModMatrix mod_nullspace(const ModField& K, ModMatrix m);
std::optional<std::vector<std::uint64_t>> mod_solve(const ModField& K, const ModMatrix& m,
                                                    const std::vector<std::uint64_t>& rhs);
ModMatrix mod_inv(const ModField& K, const ModMatrix& m);
std::uint64_t mod_det(const ModField& K, ModMatrix m);
// coefficients low to high, monic, degree = rows
std::vector<std::uint64_t> mod_charpoly(const ModField& K, const ModMatrix& m);
std::uint64_t poly_eval(const ModField& K, const std::vector<std::uint64_t>& f, std::uint64_t x);

}  // namespace newform
