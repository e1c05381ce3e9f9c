#include <algorithm>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/pattern.hpp"

namespace newform {

Family family_from_string(const std::string& s) {
  if (s == "A1") return Family::A1;
  if (s == "A2") return Family::A2;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  throw UnknownFamily("unknown family tag '" + s + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::A1: return "A1";
    case Family::A2: return "A2";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
  }
  return "?";
}

std::string CosetRep::csv() const {
  std::ostringstream s;
  s << family_name(tag) << ",";
  for (std::size_t i = 0; i < alpha.size(); ++i) s << (i ? "|" : "") << alpha[i];
  s << "," << j << ",";
  for (std::size_t i = 0; i < residues.size(); ++i) {
    s << (i ? "|" : "");
    for (fq_t d : residues[i]) s << d << ".";
  }
  return s.str();
}

std::vector<int> alpha_exponents(const std::vector<int>& alpha) {
  const std::size_t n = alpha.size() + 1;
  std::vector<int> e(n, 0);
  for (std::size_t p = 0; p + 1 < n; ++p) e[p] = alpha[n - 2 - p];
  return e;
}

std::vector<std::vector<int>> alpha_chains(unsigned n, int bound, bool strict, bool positive) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int lo) {
    if (cur.size() + 1 == n) {
      out.push_back(cur);
      return;
    }
    for (int a = lo; a <= bound; ++a) {
      cur.push_back(a);
      rec(strict ? a + 1 : a);
      cur.pop_back();
    }
  };
  rec(positive ? 1 : 0);
  return out;
}

namespace {

std::uint64_t upow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::vector<fq_t> to_digits(std::uint64_t v, std::uint32_t q, int len) {
  std::vector<fq_t> d(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) {
    d[i] = static_cast<fq_t>(v % q);
    v /= q;
  }
  return d;
}

// odometer over per-slot ranges [0, size)
template <class F>
void odometer(const std::vector<std::uint64_t>& sizes, F&& fn) {
  for (auto s : sizes)
    if (s == 0) return;
  std::vector<std::uint64_t> ctr(sizes.size(), 0);
  while (true) {
    fn(ctr);
    std::size_t k = sizes.size();
    while (true) {
      if (k == 0) return;
      --k;
      if (++ctr[k] < sizes[k]) break;
      ctr[k] = 0;
    }
  }
}

// residue value with the unit / p-divisible constraint applied by index
std::uint64_t unit_value(std::uint64_t idx, std::uint32_t q) { return (idx / (q - 1)) * q + idx % (q - 1) + 1; }
std::uint64_t pdiv_value(std::uint64_t idx, std::uint32_t q) { return idx * q; }

CosetRep make_a1(const LocalRing& R, unsigned n, int m, const std::vector<std::uint64_t>& vals) {
  CosetRep c{Family::A1, {}, 0, {}, WindowMatrix::identity(R, n)};
  const std::uint32_t q = R.residue().q();
  for (unsigned p = 0; p < n; ++p) {
    auto d = to_digits(vals[p], q, m);
    c.mat.at(n - 1, p) = Scalar::from_digits(R, 0, d);
    c.residues.push_back(std::move(d));
  }
  return c;
}

// row r0 = (w1, w2, w3, x), last row e_{r0}
CosetRep make_a2(const LocalRing& R, unsigned n, int m, unsigned j, const std::vector<std::uint64_t>& row) {
  CosetRep c{Family::A2, {}, j, {}, WindowMatrix::identity(R, n)};
  const std::uint32_t q = R.residue().q();
  const unsigned r0 = n - j - 1;
  c.mat.at(r0, r0) = Scalar(R);
  c.mat.at(n - 1, n - 1) = Scalar(R);
  c.mat.at(n - 1, r0) = Scalar::one(R);
  for (unsigned col = 0; col < n; ++col) {
    auto d = to_digits(row[col], q, m);
    c.mat.at(r0, col) = Scalar::from_digits(R, 0, d);
    c.residues.push_back(std::move(d));
  }
  return c;
}

CosetRep make_diag(const LocalRing& R, Family tag, const std::vector<int>& alpha) {
  return CosetRep{tag, alpha, 0, {}, WindowMatrix::diag_powers(R, alpha_exponents(alpha))};
}

}  // namespace

std::uint64_t c_block_count(std::uint32_t q, const std::vector<int>& alpha) {
  std::uint64_t c = 1;
  for (int a : alpha) c *= upow(q, a);
  return c - 1;
}

CosetRep c_block_member(const LocalRing& R, const std::vector<int>& alpha, std::uint64_t index) {
  const std::uint32_t q = R.residue().q();
  const unsigned n = static_cast<unsigned>(alpha.size() + 1);
  CosetRep c = make_diag(R, Family::C, alpha);
  std::uint64_t v = index + 1;  // skip the diagonal member
  // v_i for alpha_i sits at position n - i (1-based)
  std::vector<std::vector<fq_t>> vs(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const std::uint64_t s = upow(q, alpha[i]);
    vs[i] = to_digits(v % s, q, alpha[i]);
    v /= s;
  }
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const unsigned pos = n - 1 - static_cast<unsigned>(i + 1);
    c.mat.at(n - 1, pos) = Scalar::from_digits(R, 0, vs[i]);
  }
  c.residues = std::move(vs);
  return c;
}

namespace {
std::vector<std::uint64_t> a2_sizes(std::uint32_t q, unsigned n, int m, unsigned j) {
  const std::uint64_t S = upow(q, m);
  const unsigned r0 = n - j - 1;
  std::vector<std::uint64_t> sizes(n);
  for (unsigned col = 0; col < n; ++col) sizes[col] = col < r0 ? S : (col + 1 < n ? S / q : S - S / q);
  return sizes;
}
}  // namespace

std::uint64_t a2_count(std::uint32_t q, unsigned n, int m, unsigned j) {
  std::uint64_t c = 1;
  for (auto s : a2_sizes(q, n, m, j)) c *= s;
  return c;
}

CosetRep a2_member(const LocalRing& R, unsigned n, int m, unsigned j, std::uint64_t index) {
  const std::uint32_t q = R.residue().q();
  const auto sizes = a2_sizes(q, n, m, j);
  const unsigned r0 = n - j - 1;
  std::vector<std::uint64_t> row(n);
  for (unsigned col = n; col-- > 0;) {
    const std::uint64_t c = index % sizes[col];
    index /= sizes[col];
    row[col] = col < r0 ? c : (col + 1 < n ? pdiv_value(c, q) : unit_value(c, q));
  }
  return make_a2(R, n, m, j, row);
}

CosetRep a2_times_b(const LocalRing& R, const CosetRep& a, const std::vector<int>& alpha) {
  if (a.tag != Family::A2) throw InvalidArgument("a2_times_b needs an A2 representative");
  CosetRep c = a;
  c.alpha = alpha;
  c.mat = WindowMatrix::diag_powers(R, alpha_exponents(alpha)) * a.mat;
  return c;
}

void enumerate_family(Family tag, const LocalRing& R, unsigned n, int m, int truncation,
                      const std::function<void(const CosetRep&)>& fn) {
  const std::uint32_t q = R.residue().q();
  const std::uint64_t S = upow(q, m);
  switch (tag) {
    case Family::A1: {
      std::vector<std::uint64_t> sizes(n, S);
      sizes[n - 1] = S - S / q;
      odometer(sizes, [&](const std::vector<std::uint64_t>& c) {
        auto vals = c;
        vals[n - 1] = unit_value(c[n - 1], q);
        fn(make_a1(R, n, m, vals));
      });
      return;
    }
    case Family::A2: {
      for (unsigned j = 1; j < n; ++j) {
        const unsigned r0 = n - j - 1;
        std::vector<std::uint64_t> sizes(n);
        for (unsigned col = 0; col < n; ++col) sizes[col] = col < r0 ? S : (col + 1 < n ? S / q : S - S / q);
        odometer(sizes, [&](const std::vector<std::uint64_t>& c) {
          std::vector<std::uint64_t> row(n);
          for (unsigned col = 0; col < n; ++col)
            row[col] = col < r0 ? c[col] : (col + 1 < n ? pdiv_value(c[col], q) : unit_value(c[col], q));
          fn(make_a2(R, n, m, j, row));
        });
      }
      return;
    }
    case Family::B:
      for (const auto& a : alpha_chains(n, truncation, false, false)) fn(make_diag(R, Family::B, a));
      return;
    case Family::C:
      for (const auto& a : alpha_chains(n, truncation, false, false)) {
        const std::uint64_t cnt = c_block_count(q, a);
        for (std::uint64_t i = 0; i < cnt; ++i) fn(c_block_member(R, a, i));
      }
      return;
    case Family::D:
      for (const auto& a : alpha_chains(n, m - 1, true, true)) fn(make_diag(R, Family::D, a));
      return;
  }
  throw UnknownFamily("unknown family");
}

std::uint64_t family_count(Family tag, std::uint32_t q, unsigned n, int m, int truncation) {
  switch (tag) {
    case Family::A1:
      return upow(q, m * static_cast<int>(n - 1)) * (upow(q, m) - upow(q, m - 1));
    case Family::A2: {
      std::uint64_t t = 0;
      for (unsigned j = 1; j < n; ++j)
        t += upow(q, m * static_cast<int>(n - j - 1)) * upow(q, m - 1) * upow(q, (m - 1) * static_cast<int>(j - 1)) *
             (upow(q, m) - upow(q, m - 1));
      return t;
    }
    case Family::B:
      return alpha_chains(n, truncation, false, false).size();
    case Family::C: {
      std::uint64_t t = 0;
      for (const auto& a : alpha_chains(n, truncation, false, false)) t += c_block_count(q, a);
      return t;
    }
    case Family::D:
      return alpha_chains(n, m - 1, true, true).size();
  }
  throw UnknownFamily("unknown family");
}

namespace {

// y with y a = e_n over o / p^m
bool solve_last_row(const ResidueRing& A, std::vector<std::uint64_t> a, unsigned n, std::vector<std::uint64_t>& y) {
  // columns of M = a^T
  std::vector<std::uint64_t> M(n * (n + 1));
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) M[i * (n + 1) + j] = a[j * n + i];
    M[i * (n + 1) + n] = i + 1 == n ? 1 : 0;
  }
  const unsigned w = n + 1;
  for (unsigned c = 0; c < n; ++c) {
    unsigned piv = n;
    for (unsigned r = c; r < n; ++r)
      if (A.is_unit(M[r * w + c])) {
        piv = r;
        break;
      }
    if (piv == n) return false;
    if (piv != c)
      for (unsigned j = 0; j < w; ++j) std::swap(M[piv * w + j], M[c * w + j]);
    const std::uint64_t inv = A.inv(M[c * w + c]);
    for (unsigned j = 0; j < w; ++j) M[c * w + j] = A.mul(M[c * w + j], inv);
    for (unsigned r = 0; r < n; ++r) {
      if (r == c || M[r * w + c] == 0) continue;
      const std::uint64_t f = M[r * w + c];
      for (unsigned j = 0; j < w; ++j) M[r * w + j] = A.sub(M[r * w + j], A.mul(f, M[c * w + j]));
    }
  }
  y.resize(n);
  for (unsigned i = 0; i < n; ++i) y[i] = M[i * w + n];
  return true;
}

}  // namespace

PartitionReport verify_coset_partition(const Field& F, LocalRing::Mode mode, unsigned n, int m) {
  if (m < 1) throw InvalidArgument("partition check needs m >= 1");
  const ResidueRing A(F, mode, m);
  const std::uint32_t q = F.q();
  const std::uint64_t S = A.size();
  const std::uint64_t total = upow(S, static_cast<int>(n));
  if (total > 50000000ull) throw EnumerationBoundExceeded("orbit too large");
  PartitionReport rep;
  rep.n = n;
  rep.q = q;
  rep.m = m;
  std::vector<std::uint8_t> hit(total, 0);
  std::vector<std::uint64_t> y;

  auto record = [&](const std::vector<std::uint64_t>& a, const char* fam) {
    if (!solve_last_row(A, a, n, y)) throw PartitionFailure(std::string(fam) + " member not invertible mod p");
    std::uint64_t key = 0;
    for (unsigned i = n; i-- > 0;) key = key * S + y[i];
    if (hit[key]) {
      std::ostringstream s;
      s << "vector hit twice (" << fam << "):";
      for (auto v : y) s << " " << v;
      throw PartitionFailure(s.str());
    }
    hit[key] = 1;
  };

  std::vector<std::uint64_t> a(n * n, 0);
  {
    std::vector<std::uint64_t> sizes(n, S);
    sizes[n - 1] = S - S / q;
    odometer(sizes, [&](const std::vector<std::uint64_t>& c) {
      std::fill(a.begin(), a.end(), 0);
      for (unsigned i = 0; i + 1 < n; ++i) a[i * n + i] = 1;
      for (unsigned p = 0; p + 1 < n; ++p) a[(n - 1) * n + p] = c[p];
      a[(n - 1) * n + n - 1] = unit_value(c[n - 1], q);
      record(a, "A1");
      ++rep.a1;
    });
  }
  for (unsigned j = 1; j < n; ++j) {
    const unsigned r0 = n - j - 1;
    std::vector<std::uint64_t> sizes(n);
    for (unsigned col = 0; col < n; ++col) sizes[col] = col < r0 ? S : (col + 1 < n ? S / q : S - S / q);
    odometer(sizes, [&](const std::vector<std::uint64_t>& c) {
      std::fill(a.begin(), a.end(), 0);
      for (unsigned i = 0; i + 1 < n; ++i)
        if (i != r0) a[i * n + i] = 1;
      for (unsigned col = 0; col < n; ++col)
        a[r0 * n + col] = col < r0 ? c[col] : (col + 1 < n ? pdiv_value(c[col], q) : unit_value(c[col], q));
      a[(n - 1) * n + r0] = 1;
      record(a, "A2");
      ++rep.a2;
    });
  }
  // targets: vectors with a unit coordinate
  for (std::uint64_t key = 0; key < total; ++key) {
    std::uint64_t k = key;
    bool unit = false;
    for (unsigned i = 0; i < n; ++i) {
      unit |= A.is_unit(k % S);
      k /= S;
    }
    if (unit) ++rep.orbit;
    if (unit != static_cast<bool>(hit[key])) {
      std::ostringstream s;
      s << (unit ? "orbit vector missed" : "non-orbit vector hit") << ": key " << key;
      throw PartitionFailure(s.str());
    }
  }
  rep.pass = rep.a1 + rep.a2 == rep.orbit;
  if (!rep.pass) throw PartitionFailure("family sizes do not add up to the orbit");
  return rep;
}

std::vector<gidx> diagonal_image(const GLGroup& G, const std::vector<int>& alpha, int m) {
  const unsigned n = G.n();
  const auto e = alpha_exponents(alpha);
  std::vector<char> free(n * n, 0);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      if (i == j) {
        free[i * n + j] = (i + 1 < n || m == 0) ? 1 : 0;
        continue;
      }
      const int b = (i + 1 == n) ? m : 0;
      free[i * n + j] = b + e[i] - e[j] <= 0;
    }
  std::vector<gidx> out;
  for (gidx g = 0; g < G.size(); ++g) {
    const fq_t* x = G.entries(g);
    bool ok = true;
    for (unsigned k = 0; k < n * n && ok; ++k) {
      if (free[k]) continue;
      ok = x[k] == (k / n == k % n ? 1u : 0u);
    }
    if (ok) out.push_back(g);
  }
  return out;
}

namespace {

void check_witness(const PatternGroup& Km, const WindowMatrix& g, const WindowMatrix& ginv, const WindowMatrix& X,
                   const FqMatrix& expect, const std::string& what) {
  if (!Km.contains(X)) throw WitnessConjugationFailure(what + ": witness not in K(m): " + X.str());
  const WindowMatrix Y = g * X * ginv;
  if (!Y.in_K()) throw WitnessConjugationFailure(what + ": conjugate not in K: " + Y.str());
  if (!(Y.reduce() == expect)) throw WitnessConjugationFailure(what + ": conjugate reduces wrongly: " + Y.str());
}

std::vector<fq_t> prime_basis(const Field& F) {
  std::vector<fq_t> b;
  fq_t v = 1;
  for (unsigned i = 0; i < F.k(); ++i) {
    b.push_back(v);
    v *= F.p();
  }
  return b;
}

}  // namespace

ReductionImage reduction_image(const GLGroup& G, const LocalRing& R, const CosetRep& g, int m) {
  const unsigned n = G.n();
  const Field& F = G.field();
  ReductionImage img;
  if (g.tag == Family::B || g.tag == Family::D) {
    img.exact = true;
    img.elements = diagonal_image(G, g.alpha, m);
    return img;
  }
  const PatternGroup Km = conductor_subgroup(n, m);
  const WindowMatrix ginv = g.mat.inverse();
  const auto e = alpha_exponents(g.alpha);
  const auto basis = prime_basis(F);

  if (g.tag == Family::C) {
    unsigned p0 = n;
    for (unsigned p = 0; p + 1 < n; ++p)
      if (!g.mat.at(n - 1, p).known_zero()) p0 = p;
    if (p0 == n) throw InvalidArgument("C representative with zero last row is diagonal");
    const Scalar vinv = g.mat.at(n - 1, p0).inv();
    for (fq_t c : basis)
      for (unsigned s = 0; s <= p0; ++s) {
        WindowMatrix X = WindowMatrix::identity(R, n);
        X.at(p0, s) = X.at(p0, s) + Scalar::monomial(R, c, e[s]) * vinv;
        FqMatrix E = FqMatrix::identity(n);
        E.at(n - 1, s) = c;
        check_witness(Km, g.mat, ginv, X, E, "C last-row generator");
        ++img.witnesses;
        for (unsigned r = p0 + 1; r + 1 < n; ++r) {
          WindowMatrix Xr = WindowMatrix::identity(R, n);
          Xr.at(r, s) = Scalar::monomial(R, c, e[s] - e[r]);
          FqMatrix Er = FqMatrix::identity(n);
          Er.at(r, s) = c;
          check_witness(Km, g.mat, ginv, Xr, Er, "C block generator");
          ++img.witnesses;
        }
      }
    img.block = p0 + 1;
    return img;
  }

  if (g.tag == Family::A2 && g.alpha.size() + 1 == n) {
    const unsigned r0 = n - g.j - 1;
    for (fq_t c : basis)
      for (unsigned s = 0; s + 1 < n; ++s) {
        // target last row c e_s; row r0 of X absorbs the correction
        std::vector<Scalar> t(n, Scalar(R));
        t[s] = Scalar::monomial(R, c, 0);
        WindowMatrix X = WindowMatrix::identity(R, n);
        for (unsigned col = 0; col < n; ++col) {
          if (col == r0) continue;
          Scalar d = t[r0] * g.mat.at(r0, col);
          if (col + 1 < n) d = d + t[col].shift(e[col]);
          X.at(r0, col) = d;
        }
        FqMatrix E = FqMatrix::identity(n);
        E.at(n - 1, s) = c;
        check_witness(Km, g.mat, ginv, X, E, "A2·B last-row generator");
        ++img.witnesses;
      }
    img.block = n - 1;
    return img;
  }
  throw InvalidArgument("reduction image needs a B, C, D or A2·B representative");
}

}  // namespace newform
