#include "newform/glgroup.hpp"

#include <algorithm>

#include "newform/errors.hpp"

namespace newform {

namespace {
constexpr std::uint64_t kDenseLimit = 1ull << 24;
constexpr std::size_t kMulTableLimit = 2048;
}  // namespace

GLGroup::GLGroup(unsigned n, Field F, std::uint64_t bound) : n_(n), F_(std::move(F)) {
  if (n == 0) throw InvalidArgument("dimension must be positive");
  const std::uint64_t order = gl_order(n, F_.q());
  if (order > bound)
    throw EnumerationBoundExceeded("|GL_" + std::to_string(n) + "(F_" + std::to_string(F_.q()) +
                                   ")| = " + std::to_string(order) + " exceeds bound");
  const unsigned nn = n * n;
  const std::uint64_t q = F_.q();
  std::uint64_t total = 1;
  for (unsigned i = 0; i < nn; ++i) total *= q;

  codes_.reserve(order);
  elems_.reserve(order * nn);
  FqMatrix m(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (unsigned i = nn; i-- > 0;) {
      m.a[i] = static_cast<fq_t>(c % q);
      c /= q;
    }
    fq_t d = mat_det(F_, m);
    if (!d) continue;
    codes_.push_back(code);
    elems_.insert(elems_.end(), m.a.begin(), m.a.end());
    det_.push_back(d);
  }
  if (codes_.size() != order) throw InconsistentOrthogonality("enumeration count mismatch");
  if (total <= kDenseLimit) {
    dense_.assign(total, -1);
    for (std::size_t i = 0; i < codes_.size(); ++i) dense_[codes_[i]] = static_cast<std::int32_t>(i);
  }
  id_ = index_of(FqMatrix::identity(n));
  inv_.resize(order);
  for (gidx i = 0; i < order; ++i) inv_[i] = index_of(mat_inv(F_, element(i)));
  if (order <= kMulTableLimit) {
    std::vector<gidx> tab(order * order);
    for (gidx i = 0; i < order; ++i)
      for (gidx j = 0; j < order; ++j) tab[std::size_t(i) * order + j] = mul(i, j);
    mul_ = std::move(tab);
  }
}

std::uint64_t GLGroup::code_of(const fq_t* e) const {
  std::uint64_t c = 0;
  for (unsigned i = 0; i < n_ * n_; ++i) c = c * F_.q() + e[i];
  return c;
}

FqMatrix GLGroup::element(gidx i) const {
  FqMatrix m(n_);
  std::copy_n(entries(i), n_ * n_, m.a.begin());
  return m;
}

gidx GLGroup::index_of_entries(const fq_t* e) const {
  const std::uint64_t c = code_of(e);
  if (!dense_.empty()) {
    std::int32_t r = dense_[c];
    if (r < 0) throw SingularMatrix("matrix is not in GL_n(F_q)");
    return static_cast<gidx>(r);
  }
  auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
  if (it == codes_.end() || *it != c) throw SingularMatrix("matrix is not in GL_n(F_q)");
  return static_cast<gidx>(it - codes_.begin());
}

gidx GLGroup::index_of(const FqMatrix& m) const { return index_of_entries(m.a.data()); }

gidx GLGroup::mul(gidx a, gidx b) const {
  if (!mul_.empty()) return mul_[std::size_t(a) * codes_.size() + b];
  const fq_t* x = entries(a);
  const fq_t* y = entries(b);
  fq_t r[64] = {};
  const unsigned n = n_;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned k = 0; k < n; ++k) {
      fq_t v = x[i * n + k];
      if (!v) continue;
      for (unsigned j = 0; j < n; ++j) r[i * n + j] = F_.add(r[i * n + j], F_.mul(v, y[k * n + j]));
    }
  return index_of_entries(r);
}

std::vector<gidx> GLGroup::unipotent_upper() const {
  std::vector<gidx> out;
  for (gidx g = 0; g < size(); ++g) {
    const fq_t* e = entries(g);
    bool ok = true;
    for (unsigned i = 0; i < n_ && ok; ++i)
      for (unsigned j = 0; j <= i && ok; ++j) ok = e[i * n_ + j] == (i == j ? 1u : 0u);
    if (ok) out.push_back(g);
  }
  return out;
}

std::vector<gidx> GLGroup::block_lower_unipotent(unsigned n1) const {
  std::vector<gidx> out;
  for (gidx g = 0; g < size(); ++g) {
    const fq_t* e = entries(g);
    bool ok = true;
    for (unsigned i = 0; i < n_ && ok; ++i)
      for (unsigned j = 0; j < n_ && ok; ++j) {
        if (i >= n1 && j < n1) continue;  // free block
        ok = e[i * n_ + j] == (i == j ? 1u : 0u);
      }
    if (ok) out.push_back(g);
  }
  return out;
}

std::vector<gidx> GLGroup::mirabolic() const {
  std::vector<gidx> out;
  for (gidx g = 0; g < size(); ++g) {
    const fq_t* e = entries(g) + (n_ - 1) * n_;
    bool ok = e[n_ - 1] == 1;
    for (unsigned j = 0; j + 1 < n_ && ok; ++j) ok = e[j] == 0;
    if (ok) out.push_back(g);
  }
  return out;
}

std::vector<gidx> GLGroup::bop() const {
  std::vector<gidx> out;
  for (gidx g = 0; g < size(); ++g) {
    const fq_t* e = entries(g);
    bool ok = e[n_ * n_ - 1] == 1;
    for (unsigned i = 0; i < n_ && ok; ++i)
      for (unsigned j = 0; j < n_ && ok; ++j) {
        if (i == j) continue;
        if (i == n_ - 1 || j == n_ - 1 || j > i) ok = e[i * n_ + j] == 0;
      }
    if (ok) out.push_back(g);
  }
  return out;
}

gidx GLGroup::scalar(fq_t s) const { return index_of(mat_scalar(F_, n_, s)); }

std::vector<gidx> GLGroup::center() const {
  std::vector<gidx> out;
  for (fq_t s = 1; s < F_.q(); ++s) out.push_back(scalar(s));
  return out;
}

fq_t GLGroup::superdiag_sum(gidx u) const {
  const fq_t* e = entries(u);
  fq_t s = 0;
  for (unsigned i = 0; i + 1 < n_; ++i) s = F_.add(s, e[i * n_ + i + 1]);
  return s;
}

}  // namespace newform
