#include <algorithm>
#include <set>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/pattern.hpp"

namespace newform {

bool PatternGroup::contains(const WindowMatrix& x) const {
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      if (b(i, j) != kNone && !x.at(i, j).val_at_least(b(i, j))) return false;
      if (i == j && c(i) > 0 && !(x.at(i, i) - Scalar::one(x.ring())).val_at_least(c(i))) return false;
    }
  if (det_unit) {
    if (x.is_integral()) return mat_det(x.ring().residue(), x.reduce()) != 0;
    try {
      if (x.det_val() != 0) return false;
    } catch (const SingularMatrix&) {
      return false;
    }
  }
  return true;
}

std::string PatternGroup::str() const {
  std::ostringstream s;
  s << "[";
  for (unsigned i = 0; i < n; ++i) {
    s << (i ? "; " : "");
    for (unsigned j = 0; j < n; ++j) {
      s << (j ? "," : "");
      if (b(i, j) == kNone)
        s << "-inf";
      else
        s << b(i, j);
      if (i == j && c(i) > 0) s << "(1+p^" << c(i) << ")";
    }
  }
  s << "]";
  return s.str();
}

PatternGroup full_K(unsigned n) {
  PatternGroup P;
  P.n = n;
  P.bound.assign(n * n, 0);
  P.cong.assign(n * n, 0);
  return P;
}

PatternGroup conductor_subgroup(unsigned n, int m) {
  if (m < 0) throw InvalidArgument("conductor subgroup needs m >= 0");
  PatternGroup P = full_K(n);
  for (unsigned j = 0; j + 1 < n; ++j) P.b(n - 1, j) = m;
  P.c(n - 1) = m;
  return P;
}

WindowMatrix sigma(const LocalRing& R, unsigned n) { return sigma_mn(R, 0, n); }

WindowMatrix sigma_mn(const LocalRing& R, int m, unsigned n) {
  std::vector<int> e(n);
  for (unsigned i = 0; i < n; ++i) e[i] = (m + 1) * static_cast<int>(n - 1 - i);
  if (e[0] >= R.N()) throw WindowOverflow("diagonal exponent exceeds the window");
  return WindowMatrix::diag_powers(R, e);
}

PatternGroup conjugate_pattern(const PatternGroup& P, const WindowMatrix& g) {
  if (!g.is_monomial()) throw NotMonomial("conjugating element is not monomial");
  const unsigned n = P.n;
  std::vector<unsigned> sg(n);
  std::vector<int> v(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      if (!g.at(i, j).known_zero()) {
        sg[i] = j;
        v[i] = g.at(i, j).val();
      }
  PatternGroup Q = P;
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      const int b = P.b(sg[i], sg[j]);
      Q.b(i, j) = b == PatternGroup::kNone ? b : b + v[i] - v[j];
    }
    Q.c(i) = P.c(sg[i]);
  }
  return Q;
}

PatternGroup pattern_intersect(const PatternGroup& P, const PatternGroup& Q) {
  if (P.n != Q.n) throw InvalidArgument("pattern dimensions differ");
  PatternGroup I = P;
  for (std::size_t i = 0; i < P.bound.size(); ++i) {
    I.bound[i] = std::max(P.bound[i], Q.bound[i]);
    I.cong[i] = std::max(P.cong[i], Q.cong[i]);
  }
  I.det_unit = P.det_unit || Q.det_unit;
  return I;
}

namespace {

void require_integral(const PatternGroup& P) {
  for (int b : P.bound)
    if (b < 0) throw NotASubgroup("pattern group is not contained in K");
}

// lowest pi-adic level of the congruence kernel at (i, j)
int kernel_level(const PatternGroup& P, unsigned i, unsigned j) {
  int l = std::max(1, P.b(i, j));
  if (i == j) l = std::max(l, P.c(i));
  return l;
}

void require_contained(const PatternGroup& P, const PatternGroup& Q) {
  require_integral(P);
  require_integral(Q);
  for (unsigned i = 0; i < P.n; ++i)
    for (unsigned j = 0; j < P.n; ++j) {
      if (Q.b(i, j) < P.b(i, j)) throw NotASubgroup("Q is not contained in P at entry bounds");
      if (i == j && Q.c(i) < P.c(i)) throw NotASubgroup("Q is not contained in P at a diagonal congruence");
    }
}

std::uint64_t code(const Field& F, const FqMatrix& x) {
  std::uint64_t c = 0;
  for (fq_t v : x.a) c = c * F.q() + v;
  return c;
}

}  // namespace

std::vector<FqMatrix> pattern_reduction(const Field& F, const PatternGroup& P) {
  require_integral(P);
  const unsigned n = P.n;
  std::vector<unsigned> free_pos;
  FqMatrix base(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      if (i == j && P.c(i) >= 1)
        base.at(i, i) = 1;
      else if (P.b(i, j) == 0)
        free_pos.push_back(i * n + j);
    }
  double total = 1;
  for (std::size_t k = 0; k < free_pos.size(); ++k) total *= F.q();
  if (total > 2e7) throw EnumerationBoundExceeded("pattern reduction too large to enumerate");
  std::vector<FqMatrix> out;
  FqMatrix x = base;
  std::vector<fq_t> ctr(free_pos.size(), 0);
  while (true) {
    for (std::size_t k = 0; k < free_pos.size(); ++k) x.a[free_pos[k]] = ctr[k];
    if (mat_det(F, x) != 0) out.push_back(x);
    std::size_t k = free_pos.size();
    while (k > 0) {
      --k;
      if (++ctr[k] < F.q()) break;
      ctr[k] = 0;
      if (k == 0) return out;
    }
    if (free_pos.empty()) return out;
  }
}

std::uint64_t pattern_index(const Field& F, const PatternGroup& P, const PatternGroup& Q) {
  require_contained(P, Q);
  const auto Pb = pattern_reduction(F, P);
  const auto Qb = pattern_reduction(F, Q);
  if (Pb.size() % Qb.size()) throw NotASubgroup("reduction orders do not divide");
  std::uint64_t idx = Pb.size() / Qb.size();
  for (unsigned i = 0; i < P.n; ++i)
    for (unsigned j = 0; j < P.n; ++j)
      for (int l = kernel_level(P, i, j); l < kernel_level(Q, i, j); ++l) idx *= F.q();
  return idx;
}

std::vector<WindowMatrix> pattern_transversal(const LocalRing& R, const PatternGroup& P, const PatternGroup& Q) {
  const Field& F = R.residue();
  const std::uint64_t index = pattern_index(F, P, Q);
  const unsigned n = P.n;

  // Qbar \ Pbar, smallest element of each orbit
  auto Pb = pattern_reduction(F, P);
  const auto Qb = pattern_reduction(F, Q);
  Pb.insert(Pb.begin(), FqMatrix::identity(n));  // y_0 = 1
  std::set<std::uint64_t> seen;
  std::vector<FqMatrix> top;
  for (const auto& r : Pb) {
    if (seen.count(code(F, r))) continue;
    top.push_back(r);
    for (const auto& h : Qb) seen.insert(code(F, mat_mul(F, h, r)));
  }

  // kernel part: affine lifts over the freed levels
  struct Slot {
    unsigned i, j;
    int level;
  };
  std::vector<Slot> slots;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      for (int l = kernel_level(P, i, j); l < kernel_level(Q, i, j); ++l) slots.push_back({i, j, l});
  std::vector<WindowMatrix> kernel;
  std::vector<fq_t> ctr(slots.size(), 0);
  while (true) {
    WindowMatrix k = WindowMatrix::identity(R, n);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (ctr[s]) k.at(slots[s].i, slots[s].j) = k.at(slots[s].i, slots[s].j) + Scalar::monomial(R, ctr[s], slots[s].level);
    kernel.push_back(k);
    std::size_t s = slots.size();
    bool done = true;
    while (s > 0) {
      --s;
      if (++ctr[s] < F.q()) {
        done = false;
        break;
      }
      ctr[s] = 0;
    }
    if (done) break;
  }

  std::vector<WindowMatrix> out;
  for (const auto& r : top) {
    const WindowMatrix rl = WindowMatrix::lift(R, r);
    for (const auto& k : kernel) out.push_back(k * rl);
  }
  if (out.size() != index)
    throw VerificationFailure("transversal has " + std::to_string(out.size()) + " elements, index is " +
                              std::to_string(index));
  // distinct cosets
  std::vector<WindowMatrix> inv;
  for (const auto& y : out) inv.push_back(y.inverse());
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (Q.contains(out[b] * inv[a]))
        throw VerificationFailure("transversal elements " + std::to_string(a) + ", " + std::to_string(b) +
                                  " share a coset");
  return out;
}

WindowMatrix random_pattern_element(const LocalRing& R, const PatternGroup& P, std::mt19937_64& rng, int depth) {
  require_integral(P);
  const Field& F = R.residue();
  const unsigned n = P.n;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    WindowMatrix x(R, n);
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) {
        const int lo = (i == j && P.c(i) > 0) ? std::max(P.c(i), P.b(i, j)) : P.b(i, j);
        std::vector<fq_t> d(static_cast<std::size_t>(std::max(0, depth)));
        for (auto& v : d) v = static_cast<fq_t>(rng() % F.q());
        Scalar s = lo < R.N() ? Scalar::from_digits(R, lo, d) : Scalar(R);
        if (i == j && P.c(i) > 0) s = s + Scalar::one(R);
        x.at(i, j) = s;
      }
    if (P.contains(x)) return x;
  }
  throw SearchBudgetExceeded("no random element found in pattern group");
}

std::vector<WindowMatrix> support_transversal(const LocalRing& R, unsigned n, int m) {
  const PatternGroup Km = conductor_subgroup(n, m);
  const PatternGroup H = pattern_intersect(Km, conjugate_pattern(full_K(n), sigma(R, n).inverse()));
  return pattern_transversal(R, Km, H);
}

std::vector<WindowMatrix> shuffled_transversal(const LocalRing& R, unsigned n, int m, std::uint64_t seed) {
  auto T = support_transversal(R, n, m);
  const PatternGroup Km = conductor_subgroup(n, m);
  const PatternGroup H = pattern_intersect(Km, conjugate_pattern(full_K(n), sigma(R, n).inverse()));
  std::mt19937_64 rng(seed);
  std::shuffle(T.begin() + 1, T.end(), rng);
  for (std::size_t i = 1; i < T.size(); ++i) T[i] = random_pattern_element(R, H, rng, m + 1) * T[i];
  return T;
}

std::optional<SupportWitness> support_membership(const WindowMatrix& g, int m,
                                                 const std::vector<WindowMatrix>& transversal) {
  (void)m;
  const LocalRing& R = g.ring();
  const unsigned n = g.n();
  const int D = g.det_val() - static_cast<int>(n * (n - 1) / 2);
  if (((D % static_cast<int>(n)) + static_cast<int>(n)) % static_cast<int>(n) != 0) return std::nullopt;
  const int v = (D - (((D % static_cast<int>(n)) + static_cast<int>(n)) % static_cast<int>(n))) / static_cast<int>(n);
  const WindowMatrix sinv = sigma(R, n).inverse();
  const WindowMatrix h = g.shift(-v);
  for (std::size_t i = 0; i < transversal.size(); ++i) {
    WindowMatrix k = h * transversal[i].inverse() * sinv;
    if (k.in_K()) return SupportWitness{v, k, i};
  }
  return std::nullopt;
}

}  // namespace newform
