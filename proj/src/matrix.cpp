#include "newform/matrix.hpp"

#include "newform/errors.hpp"

namespace newform {

FqMatrix FqMatrix::identity(unsigned dim) {
  FqMatrix m(dim);
  for (unsigned i = 0; i < dim; ++i) m.at(i, i) = 1;
  return m;
}

FqMatrix mat_mul(const Field& F, const FqMatrix& x, const FqMatrix& y) {
  const unsigned n = x.n;
  FqMatrix r(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned k = 0; k < n; ++k) {
      fq_t xik = x.at(i, k);
      if (!xik) continue;
      for (unsigned j = 0; j < n; ++j) r.at(i, j) = F.add(r.at(i, j), F.mul(xik, y.at(k, j)));
    }
  return r;
}

fq_t mat_det(const Field& F, const FqMatrix& x) {
  FqMatrix m = x;
  const unsigned n = m.n;
  fq_t det = 1;
  for (unsigned c = 0; c < n; ++c) {
    unsigned piv = c;
    while (piv < n && m.at(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (unsigned j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
      det = F.neg(det);
    }
    fq_t d = m.at(c, c);
    det = F.mul(det, d);
    fq_t di = F.inv(d);
    for (unsigned i = c + 1; i < n; ++i) {
      fq_t f = F.mul(m.at(i, c), di);
      if (!f) continue;
      for (unsigned j = c; j < n; ++j) m.at(i, j) = F.sub(m.at(i, j), F.mul(f, m.at(c, j)));
    }
  }
  return det;
}

fq_t mat_trace(const Field& F, const FqMatrix& x) {
  fq_t t = 0;
  for (unsigned i = 0; i < x.n; ++i) t = F.add(t, x.at(i, i));
  return t;
}

FqMatrix mat_inv(const Field& F, const FqMatrix& x) {
  const unsigned n = x.n;
  FqMatrix m = x, r = FqMatrix::identity(n);
  for (unsigned c = 0; c < n; ++c) {
    unsigned piv = c;
    while (piv < n && m.at(piv, c) == 0) ++piv;
    if (piv == n) throw SingularMatrix("matrix over F_q is singular");
    for (unsigned j = 0; j < n; ++j) {
      std::swap(m.at(piv, j), m.at(c, j));
      std::swap(r.at(piv, j), r.at(c, j));
    }
    fq_t di = F.inv(m.at(c, c));
    for (unsigned j = 0; j < n; ++j) {
      m.at(c, j) = F.mul(m.at(c, j), di);
      r.at(c, j) = F.mul(r.at(c, j), di);
    }
    for (unsigned i = 0; i < n; ++i) {
      if (i == c) continue;
      fq_t f = m.at(i, c);
      if (!f) continue;
      for (unsigned j = 0; j < n; ++j) {
        m.at(i, j) = F.sub(m.at(i, j), F.mul(f, m.at(c, j)));
        r.at(i, j) = F.sub(r.at(i, j), F.mul(f, r.at(c, j)));
      }
    }
  }
  return r;
}

FqMatrix mat_scalar(const Field&, unsigned n, fq_t s) {
  FqMatrix m(n);
  for (unsigned i = 0; i < n; ++i) m.at(i, i) = s;
  return m;
}

FqMatrix companion(const Field& F, const std::vector<fq_t>& monic) {
  const unsigned n = static_cast<unsigned>(monic.size()) - 1;
  FqMatrix m(n);
  for (unsigned i = 1; i < n; ++i) m.at(i, i - 1) = 1;
  for (unsigned i = 0; i < n; ++i) m.at(i, n - 1) = F.neg(monic[i]);
  return m;
}

ModMatrix mod_mul(const ModField& K, const ModMatrix& x, const ModMatrix& y) {
  ModMatrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      std::uint64_t v = x.at(i, k);
      if (!v) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r.at(i, j) = K.add(r.at(i, j), K.mul(v, y.at(k, j)));
    }
  return r;
}

std::vector<std::size_t> mod_rref(const ModField& K, ModMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols && row < m.rows; ++c) {
    std::size_t piv = row;
    while (piv < m.rows && m.at(piv, c) == 0) ++piv;
    if (piv == m.rows) continue;
    if (piv != row)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(row, j));
    std::uint64_t inv = K.inv(m.at(row, c));
    for (std::size_t j = c; j < m.cols; ++j) m.at(row, j) = K.mul(m.at(row, j), inv);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row) continue;
      std::uint64_t f = m.at(i, c);
      if (!f) continue;
      for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) = K.sub(m.at(i, j), K.mul(f, m.at(row, j)));
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

std::size_t mod_rank(const ModField& K, ModMatrix m) { return mod_rref(K, m).size(); }

ModMatrix mod_nullspace(const ModField& K, ModMatrix m) {
  auto piv = mod_rref(K, m);
  std::vector<bool> is_piv(m.cols, false);
  for (auto c : piv) is_piv[c] = true;
  ModMatrix out(m.cols - piv.size(), m.cols);
  std::size_t r = 0;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_piv[f]) continue;
    out.at(r, f) = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) out.at(r, piv[i]) = K.neg(m.at(i, f));
    ++r;
  }
  return out;
}

std::optional<std::vector<std::uint64_t>> mod_solve(const ModField& K, const ModMatrix& m,
                                                    const std::vector<std::uint64_t>& rhs) {
  ModMatrix aug(m.rows, m.cols + 1);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = rhs[i];
  }
  auto piv = mod_rref(K, aug);
  if (!piv.empty() && piv.back() == m.cols) return std::nullopt;
  std::vector<std::uint64_t> x(m.cols, 0);
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug.at(i, m.cols);
  return x;
}

ModMatrix mod_inv(const ModField& K, const ModMatrix& m) {
  const std::size_t n = m.rows;
  ModMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  auto piv = mod_rref(K, aug);
  if (piv.size() < n || piv[n - 1] != n - 1) throw SingularMatrix("matrix over F_l is singular");
  ModMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.at(i, j) = aug.at(i, n + j);
  return r;
}

std::uint64_t mod_det(const ModField& K, ModMatrix m) {
  const std::size_t n = m.rows;
  std::uint64_t det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m.at(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
      det = K.neg(det);
    }
    det = K.mul(det, m.at(c, c));
    std::uint64_t inv = K.inv(m.at(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      std::uint64_t f = K.mul(m.at(i, c), inv);
      if (!f) continue;
      for (std::size_t j = c; j < n; ++j) m.at(i, j) = K.sub(m.at(i, j), K.mul(f, m.at(c, j)));
    }
  }
  return det;
}

std::vector<std::uint64_t> mod_charpoly(const ModField& K, const ModMatrix& m0) {
  // reduce to upper Hessenberg form, then the standard recurrence
  const std::size_t n = m0.rows;
  ModMatrix h = m0;
  for (std::size_t c = 0; c + 2 <= n; ++c) {
    std::size_t piv = c + 1;
    while (piv < n && h.at(piv, c) == 0) ++piv;
    if (piv == n) continue;
    if (piv != c + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h.at(piv, j), h.at(c + 1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h.at(i, piv), h.at(i, c + 1));
    }
    std::uint64_t inv = K.inv(h.at(c + 1, c));
    for (std::size_t i = c + 2; i < n; ++i) {
      std::uint64_t f = K.mul(h.at(i, c), inv);
      if (!f) continue;
      for (std::size_t j = 0; j < n; ++j) h.at(i, j) = K.sub(h.at(i, j), K.mul(f, h.at(c + 1, j)));
      for (std::size_t r = 0; r < n; ++r) h.at(r, c + 1) = K.add(h.at(r, c + 1), K.mul(f, h.at(r, i)));
    }
  }
  // p_k(x) = charpoly of leading k x k block
  std::vector<std::vector<std::uint64_t>> p(n + 1);
  p[0] = {1};
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::uint64_t> cur(k + 1, 0);
    // (x - h_kk) p_{k-1}
    for (std::size_t i = 0; i < k; ++i) {
      cur[i + 1] = K.add(cur[i + 1], p[k - 1][i]);
      cur[i] = K.sub(cur[i], K.mul(h.at(k - 1, k - 1), p[k - 1][i]));
    }
    std::uint64_t prod = 1;
    for (std::size_t i = 1; i < k; ++i) {
      // - prod(h_{k,k-1}..h_{k-i+1,k-i}) * h_{k-i,k} * p_{k-i-1}
      prod = K.mul(prod, h.at(k - i, k - i - 1));
      std::uint64_t coef = K.mul(prod, h.at(k - i - 1, k - 1));
      if (!coef) continue;
      const auto& pp = p[k - i - 1];
      for (std::size_t j = 0; j < pp.size(); ++j) cur[j] = K.sub(cur[j], K.mul(coef, pp[j]));
    }
    p[k] = std::move(cur);
  }
  return p[n];
}

std::uint64_t poly_eval(const ModField& K, const std::vector<std::uint64_t>& f, std::uint64_t x) {
  std::uint64_t r = 0;
  for (std::size_t i = f.size(); i-- > 0;) r = K.add(K.mul(r, x), f[i]);
  return r;
}

}  // namespace newform
