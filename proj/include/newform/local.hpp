#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "newform/field.hpp"
#include "newform/matrix.hpp"

namespace newform {

// pi^{-B} o / pi^N o over either F_q((t)) or Q_p.
class LocalRing {
 public:
  enum class Mode { Equal, Mixed };

  LocalRing(Field F, Mode mode, int B, int N, int psi_level = 0);
  // B = (n-1)(m+1), N = 2n(m+1) + B
  static LocalRing default_window(Field F, unsigned n, int m, Mode mode = Mode::Equal);

  const Field& residue() const { return F_; }
  Mode mode() const { return mode_; }
  int B() const { return B_; }
  int N() const { return N_; }
  int psi_level() const { return psi_level_; }
  std::uint32_t p() const { return F_.p(); }
  std::string describe() const;

 private:
  Field F_;
  Mode mode_;
  int B_, N_, psi_level_;
};

// An element known modulo pi^prec; prec == kExact marks an exact finite expansion.
class Scalar {
 public:
  static constexpr int kExact = 1 << 28;

  explicit Scalar(const LocalRing& R) : R_(&R) {}  // exact zero
  static Scalar zero(const LocalRing& R) { return Scalar(R); }
  static Scalar one(const LocalRing& R) { return monomial(R, 1, 0); }
  static Scalar monomial(const LocalRing& R, fq_t c, int e);
  // sum of d[i] pi^{lo+i}; exact in equal characteristic, known mod pi^N in mixed
  static Scalar from_digits(const LocalRing& R, int lo, const std::vector<fq_t>& d);
  static Scalar from_int(const LocalRing& R, std::int64_t v);

  const LocalRing& ring() const { return *R_; }
  bool is_exact() const { return prec_ >= kExact; }
  bool known_zero() const { return coef_.empty(); }
  int prec() const { return prec_; }
  int lo() const { return lo_; }
  const std::vector<fq_t>& digits() const { return coef_; }

  // WindowOverflow if the value is zero to its known precision but not exactly zero
  int val() const;
  // val >= b, decided or WindowOverflow
  bool val_at_least(int b) const;
  bool is_unit() const { return val_at_least(0) && !val_at_least(1); }
  fq_t digit(int d) const;  // coefficient of pi^d
  fq_t residue() const;     // NotIntegral if val < 0

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator-() const;
  Scalar operator*(const Scalar& o) const;
  Scalar inv() const;
  Scalar shift(int k) const;  // times pi^k
  Scalar truncate(int prec) const;  // forget digits at and above prec
  // equality as far as both precisions allow
  bool same(const Scalar& o) const;
  std::string str() const;

 private:
  void normalize();
  const LocalRing* R_;
  int lo_ = 0;
  std::vector<fq_t> coef_;
  int prec_ = kExact;
};

class WindowMatrix {
 public:
  WindowMatrix(const LocalRing& R, unsigned n);
  static WindowMatrix identity(const LocalRing& R, unsigned n);
  static WindowMatrix diag_powers(const LocalRing& R, const std::vector<int>& e);  // diag(pi^e_i)
  static WindowMatrix lift(const LocalRing& R, const FqMatrix& m);                   // constant lift

  unsigned n() const { return n_; }
  const LocalRing& ring() const { return *R_; }
  Scalar& at(unsigned i, unsigned j) { return a_[i * n_ + j]; }
  const Scalar& at(unsigned i, unsigned j) const { return a_[i * n_ + j]; }

  WindowMatrix operator*(const WindowMatrix& o) const;
  WindowMatrix operator+(const WindowMatrix& o) const;
  WindowMatrix operator-(const WindowMatrix& o) const;
  WindowMatrix scaled(const Scalar& s) const;
  WindowMatrix shift(int k) const;  // times pi^k
  WindowMatrix inverse() const;     // SingularMatrix / WindowOverflow
  int det_val() const;
  Scalar det() const;
  int min_val() const;  // over all entries
  bool is_integral() const;
  bool in_K() const;  // integral with unit determinant
  FqMatrix reduce() const;  // NotIntegral
  bool is_monomial() const;
  std::string str() const;

 private:
  const LocalRing* R_;
  unsigned n_;
  std::vector<Scalar> a_;
};

// o / p^m as a ring, for fast work with residues (partition checks).
class ResidueRing {
 public:
  ResidueRing(const Field& F, LocalRing::Mode mode, int m);
  int m() const { return m_; }
  std::uint64_t size() const { return size_; }  // q^m
  // elements are integers 0..q^m-1 whose base-q digits are the pi-adic digits
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t neg(std::uint64_t a) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv(std::uint64_t a) const;  // a must be a unit
  bool is_unit(std::uint64_t a) const { return m_ > 0 && a % F_.q() != 0; }
  int val(std::uint64_t a) const;  // m for zero
  std::vector<fq_t> digits(std::uint64_t a) const;
  std::uint64_t from_digits(const std::vector<fq_t>& d) const;

 private:
  Field F_;
  LocalRing::Mode mode_;
  int m_;
  std::uint64_t size_;
  std::vector<std::uint32_t> add_t_, mul_t_;  // small rings only
};

}  // namespace newform
