#include "newform/characters.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>

#include "newform/errors.hpp"
#include "newform/matrix.hpp"

namespace newform {

ClassData conjugacy_classes(const GLGroup& G) {
  const unsigned n = G.n();
  const Field& F = G.field();
  std::vector<gidx> gens;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      if (i == j) continue;
      FqMatrix t = FqMatrix::identity(n);
      t.at(i, j) = 1;
      gens.push_back(G.index_of(t));
    }
  if (F.q() > 2) {
    FqMatrix d = FqMatrix::identity(n);
    d.at(0, 0) = F.primitive();
    gens.push_back(G.index_of(d));
  }

  constexpr std::uint32_t kUnset = ~0u;
  ClassData C;
  C.class_of.assign(G.size(), kUnset);
  std::deque<gidx> queue;
  for (gidx g = 0; g < G.size(); ++g) {
    if (C.class_of[g] != kUnset) continue;
    const auto c = static_cast<std::uint32_t>(C.reps.size());
    C.reps.push_back(g);
    std::uint64_t size = 1;
    C.class_of[g] = c;
    queue.push_back(g);
    while (!queue.empty()) {
      gidx x = queue.front();
      queue.pop_front();
      for (gidx s : gens) {
        gidx y = G.conj(s, x);
        if (C.class_of[y] == kUnset) {
          C.class_of[y] = c;
          ++size;
          queue.push_back(y);
        }
      }
    }
    C.sizes.push_back(size);
  }
  C.inverse.resize(C.count());
  for (std::size_t c = 0; c < C.count(); ++c) C.inverse[c] = C.class_of[G.inv(C.reps[c])];
  C.identity_class = C.class_of[G.identity()];
  return C;
}

namespace {

struct Space {
  ModMatrix basis;  // rows, in RREF
  std::vector<std::size_t> piv;
};

Space make_space(const ModField& K, ModMatrix rows) {
  Space s;
  s.piv = mod_rref(K, rows);
  s.basis = ModMatrix(s.piv.size(), rows.cols);
  std::copy_n(rows.a.begin(), s.piv.size() * rows.cols, s.basis.a.begin());
  return s;
}

// matrix of A restricted to the invariant space S, acting on columns
ModMatrix restrict_to(const ModField& K, const ModMatrix& A, const Space& S) {
  const std::size_t r = S.basis.rows, c = A.cols;
  ModMatrix R(r, r);
  std::vector<std::uint64_t> v(c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      std::uint64_t acc = 0;
      for (std::size_t l = 0; l < c; ++l) acc = K.add(acc, K.mul(A.at(k, l), S.basis.at(i, l)));
      v[k] = acc;
    }
    for (std::size_t t = 0; t < r; ++t) R.at(t, i) = v[S.piv[t]];
  }
  return R;
}

std::vector<std::uint64_t> distinct_roots(const ModField& K, const std::vector<std::uint64_t>& f) {
  std::vector<std::uint64_t> roots;
  const std::size_t deg = f.size() - 1;
  for (std::uint64_t x = 0; x < K.ell() && roots.size() < deg; ++x)
    if (poly_eval(K, f, x) == 0) roots.push_back(x);
  return roots;
}

std::uint64_t isqrt(std::uint64_t v) {
  std::uint64_t r = 0;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

CharacterTable dixon_character_table(const GLGroup& G, const ClassData& C, const ModField& K, std::uint64_t seed) {
  const std::size_t c = C.count();
  std::vector<ModMatrix> A(c, ModMatrix(c, c));
  for (std::size_t l = 0; l < c; ++l) {
    const gidx z = C.reps[l];
    for (gidx x = 0; x < G.size(); ++x) {
      gidx y = G.mul(G.inv(x), z);
      auto& e = A[C.class_of[x]].at(C.class_of[y], l);
      e = K.add(e, 1);
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<Space> work, done;
  {
    ModMatrix I(c, c);
    for (std::size_t i = 0; i < c; ++i) I.at(i, i) = 1;
    work.push_back(make_space(K, I));
  }
  constexpr int kRandomBudget = 64;
  while (!work.empty()) {
    Space S = std::move(work.back());
    work.pop_back();
    const std::size_t r = S.basis.rows;
    if (r == 1) {
      done.push_back(std::move(S));
      continue;
    }
    std::vector<ModMatrix> R(c);
    for (std::size_t j = 0; j < c; ++j) R[j] = restrict_to(K, A[j], S);
    bool split = false;
    for (int attempt = 0; attempt < static_cast<int>(c) + kRandomBudget && !split; ++attempt) {
      ModMatrix M(r, r);
      if (attempt < static_cast<int>(c)) {
        M = R[attempt];
      } else {
        for (std::size_t j = 0; j < c; ++j) {
          std::uint64_t w = rng() % K.ell();
          for (std::size_t t = 0; t < r * r; ++t) M.a[t] = K.add(M.a[t], K.mul(w, R[j].a[t]));
        }
      }
      auto roots = distinct_roots(K, mod_charpoly(K, M));
      if (roots.size() < 2) continue;
      std::size_t total = 0;
      std::vector<Space> parts;
      for (auto lambda : roots) {
        ModMatrix D = M;
        for (std::size_t i = 0; i < r; ++i) D.at(i, i) = K.sub(D.at(i, i), lambda);
        ModMatrix N = mod_nullspace(K, D);
        ModMatrix full(N.rows, c);
        for (std::size_t t = 0; t < N.rows; ++t)
          for (std::size_t i = 0; i < r; ++i) {
            std::uint64_t co = N.at(t, i);
            if (!co) continue;
            for (std::size_t l = 0; l < c; ++l)
              full.at(t, l) = K.add(full.at(t, l), K.mul(co, S.basis.at(i, l)));
          }
        total += N.rows;
        parts.push_back(make_space(K, full));
      }
      if (total != r) throw InconsistentOrthogonality("class operator is not diagonalizable");
      for (auto& p : parts) work.push_back(std::move(p));
      split = true;
    }
    if (!split) throw EigenspaceSplitFailure("random-combination budget exhausted");
  }

  CharacterTable T;
  T.K = K;
  T.seed = seed;
  const std::uint64_t order = G.size();
  for (auto& S : done) {
    std::vector<std::uint64_t> w(c);
    for (std::size_t l = 0; l < c; ++l) w[l] = S.basis.at(0, l);
    const std::uint64_t wid = w[C.identity_class];
    if (!wid) throw InconsistentOrthogonality("eigenvector vanishes at the identity class");
    const std::uint64_t inv_wid = K.inv(wid);
    for (auto& x : w) x = K.mul(x, inv_wid);
    std::uint64_t s = 0;
    for (std::size_t l = 0; l < c; ++l)
      s = K.add(s, K.mul(K.mul(w[l], w[C.inverse[l]]), K.inv(C.sizes[l] % K.ell())));
    const std::uint64_t d2 = K.mul(order % K.ell(), K.inv(s));
    const std::uint64_t d = isqrt(d2);
    if (d * d != d2 || d == 0) throw InconsistentOrthogonality("degree square does not lift to a square");
    std::vector<std::uint64_t> row(c);
    for (std::size_t l = 0; l < c; ++l) row[l] = K.mul(K.mul(d, w[l]), K.inv(C.sizes[l] % K.ell()));
    T.values.push_back(std::move(row));
    T.degree.push_back(d);
  }
  std::vector<std::size_t> perm(T.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (T.degree[a] != T.degree[b]) return T.degree[a] < T.degree[b];
    return T.values[a] < T.values[b];
  });
  CharacterTable sorted;
  sorted.K = K;
  sorted.seed = seed;
  for (auto i : perm) {
    sorted.values.push_back(T.values[i]);
    sorted.degree.push_back(T.degree[i]);
  }
  for (auto& row : sorted.values) sorted.cuspidal.push_back(is_cuspidal(G, C, row, K));
  check_orthogonality(G, C, sorted);
  return sorted;
}

void check_orthogonality(const GLGroup& G, const ClassData& C, const CharacterTable& T) {
  const ModField& K = T.K;
  const std::size_t c = C.count();
  if (T.rows() != c) throw InconsistentOrthogonality("row count differs from class count");
  const std::uint64_t order = G.size() % K.ell();
  std::uint64_t sum_d2 = 0;
  for (std::size_t i = 0; i < c; ++i) {
    sum_d2 += T.degree[i] * T.degree[i];
    if (T.values[i][C.identity_class] != T.degree[i] % K.ell())
      throw InconsistentOrthogonality("degree differs from value at identity");
    for (std::size_t j = 0; j < c; ++j) {
      std::uint64_t s = 0;
      for (std::size_t l = 0; l < c; ++l)
        s = K.add(s, K.mul(C.sizes[l] % K.ell(), K.mul(T.values[i][l], T.values[j][C.inverse[l]])));
      if (s != (i == j ? order : 0)) throw InconsistentOrthogonality("row orthogonality fails");
    }
  }
  if (sum_d2 != G.size()) throw InconsistentOrthogonality("sum of squared degrees differs from |G|");
  for (std::size_t k = 0; k < c; ++k)
    for (std::size_t l = 0; l < c; ++l) {
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < c; ++i) s = K.add(s, K.mul(T.values[i][k], T.values[i][C.inverse[l]]));
      std::uint64_t want = k == l ? K.mul(order, K.inv(C.sizes[k] % K.ell())) : 0;
      if (s != want) throw InconsistentOrthogonality("column orthogonality fails");
    }
}

bool is_cuspidal(const GLGroup& G, const ClassData& C, const std::vector<std::uint64_t>& row, const ModField& K) {
  // maximal parabolics suffice: smaller parabolics have larger radicals
  for (unsigned n1 = 1; n1 < G.n(); ++n1) {
    std::uint64_t s = 0;
    for (gidx u : G.block_lower_unipotent(n1)) s = K.add(s, row[C.class_of[u]]);
    if (s) return false;
  }
  return true;
}

std::vector<std::size_t> GroupContext::cuspidal_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows(); ++i)
    if (table.cuspidal[i]) out.push_back(i);
  return out;
}

std::size_t GroupContext::contragredient(std::size_t row) const {
  std::vector<std::uint64_t> v(classes.count());
  for (std::size_t l = 0; l < v.size(); ++l) v[l] = table.values[row][classes.inverse[l]];
  for (std::size_t i = 0; i < table.rows(); ++i)
    if (table.values[i] == v) return i;
  throw InconsistentOrthogonality("contragredient row not found");
}

std::shared_ptr<const GroupContext> make_context(unsigned n, const Field& F, std::uint64_t seed,
                                                 std::uint64_t enum_bound) {
  auto G = std::make_shared<const GLGroup>(n, F, enum_bound);
  auto ctx = std::make_shared<GroupContext>();
  ctx->G = G;
  ctx->K = make_computation_field(n, F);
  ctx->classes = conjugacy_classes(*G);
  ctx->table = dixon_character_table(*G, ctx->classes, ctx->K, seed);
  return ctx;
}

std::shared_ptr<const GroupContext> make_context_from_table(std::shared_ptr<const GLGroup> G, ModField K,
                                                            CharacterTable T) {
  auto ctx = std::make_shared<GroupContext>();
  ctx->G = std::move(G);
  ctx->K = K;
  ctx->classes = conjugacy_classes(*ctx->G);
  T.K = K;
  T.cuspidal.clear();
  for (auto& row : T.values) T.cuspidal.push_back(is_cuspidal(*ctx->G, ctx->classes, row, K));
  check_orthogonality(*ctx->G, ctx->classes, T);
  ctx->table = std::move(T);
  return ctx;
}

void verify_subgroup(const GLGroup& G, const std::vector<gidx>& H) {
  std::vector<char> in(G.size(), 0), reached(G.size(), 0);
  for (gidx h : H) {
    if (in[h]) throw NotAGroup("duplicate element in subgroup list");
    in[h] = 1;
  }
  if (!in[G.identity()]) throw NotAGroup("identity missing");
  std::vector<gidx> gens, list{G.identity()};
  reached[G.identity()] = 1;
  std::vector<gidx> sorted = H;
  std::sort(sorted.begin(), sorted.end());
  std::size_t cursor = 0;
  while (list.size() < H.size()) {
    while (reached[sorted[cursor]]) ++cursor;
    gens.push_back(sorted[cursor]);
    std::deque<gidx> queue(list.begin(), list.end());
    while (!queue.empty()) {
      gidx x = queue.front();
      queue.pop_front();
      for (gidx s : gens) {
        gidx y = G.mul(x, s);
        if (!in[y]) throw NotAGroup("product leaves the subgroup");
        if (!reached[y]) {
          reached[y] = 1;
          list.push_back(y);
          queue.push_back(y);
        }
      }
    }
  }
}

std::uint64_t invariant_dim(const GroupContext& ctx, std::size_t row, const std::vector<gidx>& H) {
  verify_subgroup(*ctx.G, H);
  const ModField& K = ctx.K;
  if (H.size() % K.ell() == 0) throw NonInvertibleOrder("|H| vanishes in F_l");
  std::uint64_t s = 0;
  for (gidx h : H) s = K.add(s, ctx.chi(row, h));
  return K.mul(s, K.inv(H.size() % K.ell()));
}

std::vector<std::uint64_t> central_character(const GroupContext& ctx, std::size_t row) {
  const ModField& K = ctx.K;
  const std::uint64_t dinv = K.inv(ctx.table.degree[row] % K.ell());
  std::vector<std::uint64_t> out;
  for (fq_t s = 1; s < ctx.G->field().q(); ++s) out.push_back(K.mul(ctx.chi(row, ctx.G->scalar(s)), dinv));
  return out;
}

std::vector<std::uint64_t> regular_theta_orbits(std::uint64_t q) {
  const std::uint64_t Q = q * q - 1;
  std::vector<std::uint64_t> out;
  for (std::uint64_t j = 0; j < Q; ++j)
    if (j < j * q % Q) out.push_back(j);
  return out;
}

namespace {

// F_{q^2} = F_q[y]/(y^2 - s y - r), element u + v y encoded as u + v q
struct QuadExt {
  const Field& F;
  fq_t s = 0, r = 0;
  std::vector<std::uint32_t> log;
  explicit QuadExt(const Field& f) : F(f) {
    const fq_t q = F.q();
    bool found = false;
    for (fq_t ss = 0; ss < q && !found; ++ss)
      for (fq_t rr = 0; rr < q && !found; ++rr) {
        bool root = false;
        for (fq_t x = 0; x < q && !root; ++x) root = F.sub(F.mul(x, x), F.add(F.mul(ss, x), rr)) == 0;
        if (!root) {
          s = ss;
          r = rr;
          found = true;
        }
      }
    const std::uint64_t Q = std::uint64_t(q) * q - 1;
    for (std::uint32_t g = 1; g <= Q; ++g) {
      std::vector<std::uint32_t> lg(Q + 1, ~0u);
      std::uint32_t x = 1;
      std::uint64_t e = 0;
      while (lg[x] == ~0u) {
        lg[x] = static_cast<std::uint32_t>(e++);
        x = mul(x, g);
      }
      if (e == Q) {
        log = std::move(lg);
        return;
      }
    }
    throw SearchBudgetExceeded("no generator of F_{q^2}^x");
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    const fq_t q = F.q();
    fq_t u1 = a % q, v1 = a / q, u2 = b % q, v2 = b / q;
    fq_t vv = F.mul(v1, v2);
    fq_t u = F.add(F.mul(u1, u2), F.mul(vv, r));
    fq_t v = F.add(F.add(F.mul(u1, v2), F.mul(u2, v1)), F.mul(vv, s));
    return u + v * q;
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    const fq_t q = F.q();
    return F.add(a % q, b % q) + F.add(a / q, b / q) * q;
  }
};

}  // namespace

std::vector<std::uint64_t> gl2_cuspidal_oracle(const GroupContext& ctx, std::uint64_t j) {
  const GLGroup& G = *ctx.G;
  if (G.n() != 2) throw InvalidArgument("gl2_cuspidal_oracle needs n = 2");
  const Field& F = G.field();
  const ModField& K = ctx.K;
  const std::uint64_t q = F.q(), Q = q * q - 1;
  if (j % Q == (j * q) % Q) throw NonRegularTheta("theta_j equals its Frobenius twist");
  QuadExt E(F);
  const std::uint64_t zeta = K.root_of_unity(Q);
  auto theta = [&](std::uint32_t x) { return K.pow(zeta, (std::uint64_t(E.log[x]) * j) % Q); };

  std::vector<std::uint64_t> out;
  for (gidx rep : ctx.classes.reps) {
    const fq_t* e = G.entries(rep);
    const fq_t a = e[0], b = e[1], c = e[2], d = e[3];
    const fq_t t = F.add(a, d), det = G.det(rep);
    if (b == 0 && c == 0 && a == d) {
      out.push_back(K.mul((q - 1) % K.ell(), theta(a)));
      continue;
    }
    std::vector<fq_t> roots;
    for (fq_t x = 0; x < q; ++x)
      if (F.add(F.sub(F.mul(x, x), F.mul(t, x)), det) == 0) roots.push_back(x);
    if (roots.size() == 2) {
      out.push_back(0);
    } else if (roots.size() == 1) {
      out.push_back(K.neg(theta(roots[0])));
    } else {
      // elliptic: a root of x^2 - t x + det in F_{q^2}
      std::uint32_t lambda = ~0u;
      const std::uint32_t tq = t, dq = det;
      for (std::uint32_t x = static_cast<std::uint32_t>(q); x < q * q && lambda == ~0u; ++x) {
        std::uint32_t val = E.add(E.mul(x, x), E.add(E.mul(F.neg(tq), x), dq));
        if (val == 0) lambda = x;
      }
      if (lambda == ~0u) throw InconsistentOrthogonality("elliptic eigenvalue not found");
      std::uint64_t th = theta(lambda);
      out.push_back(K.neg(K.add(th, K.pow(th, q))));
    }
  }
  return out;
}

}  // namespace newform
