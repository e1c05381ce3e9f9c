#include "newform/bessel.hpp"

#include <algorithm>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/matrix.hpp"

namespace newform {

AdditiveCharacter make_additive_character(const Field& F, const ModField& K, fq_t c) {
  if (c == 0) throw InvalidArgument("additive character needs a unit c");
  AdditiveCharacter psi;
  psi.c = c;
  const std::uint64_t zp = K.root_of_unity(F.p());
  for (fq_t x = 0; x < F.q(); ++x) psi.values.push_back(K.pow(zp, F.trace(F.mul(c, x))));
  return psi;
}

UnipotentCosets unipotent_cosets(const GLGroup& G) {
  UnipotentCosets c;
  c.unipotent = G.unipotent_upper();
  c.coset.assign(G.size(), ~0u);
  c.upart.assign(G.size(), 0);
  for (gidx g = 0; g < G.size(); ++g) {
    if (c.coset[g] != ~0u) continue;
    const auto id = static_cast<std::uint32_t>(c.reps.size());
    c.reps.push_back(g);
    for (gidx u : c.unipotent) {
      gidx x = G.mul(u, g);
      c.coset[x] = id;
      c.upart[x] = u;
    }
  }
  return c;
}

std::uint64_t psi_on_u(const GLGroup& G, const AdditiveCharacter& psi, gidx u) { return psi(G.superdiag_sum(u)); }

BesselTable bessel_from_character(const GroupContext& ctx, std::size_t row, const AdditiveCharacter& psi) {
  if (!ctx.table.cuspidal[row]) throw NotCuspidal("row " + std::to_string(row) + " is not cuspidal");
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  const auto U = G.unipotent_upper();
  std::vector<std::uint64_t> psi_inv;
  for (gidx u : U) psi_inv.push_back(K.inv(psi_on_u(G, psi, u)));
  const std::uint64_t uinv = K.inv(U.size() % K.ell());
  BesselTable B;
  B.row = row;
  B.psi = psi;
  B.values.resize(G.size());
  for (gidx a = 0; a < G.size(); ++a) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < U.size(); ++i) s = K.add(s, K.mul(psi_inv[i], ctx.chi(row, G.mul(a, U[i]))));
    B.values[a] = K.mul(s, uinv);
  }
  return B;
}

BesselTable bessel_via_model(const GroupContext& ctx, std::size_t row, const AdditiveCharacter& psi,
                             std::size_t coset_bound) {
  if (!ctx.table.cuspidal[row]) throw NotCuspidal("row " + std::to_string(row) + " is not cuspidal");
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  const auto cos = unipotent_cosets(G);
  const std::size_t R = cos.reps.size();
  if (R > coset_bound) throw EnumerationBoundExceeded("too many cosets for the induced model");
  const std::uint64_t d = ctx.table.degree[row];
  const std::uint64_t scale = K.mul(d % K.ell(), K.inv(G.size() % K.ell()));

  // central projector on the basis delta_r of ind_U^G(psi)
  ModMatrix P(R, R);
  for (std::size_t s = 0; s < R; ++s)
    for (gidx h = 0; h < G.size(); ++h) {
      gidx sh = G.mul(cos.reps[s], h);
      std::uint64_t v = K.mul(ctx.chi(row, G.inv(h)), psi_on_u(G, psi, cos.upart[sh]));
      auto& e = P.at(s, cos.coset[sh]);
      e = K.add(e, v);
    }
  for (auto& e : P.a) e = K.mul(e, scale);

  // image = column space; rows of the RREF of the transpose
  ModMatrix Pt(R, R);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j) Pt.at(i, j) = P.at(j, i);
  auto piv = mod_rref(K, Pt);
  if (piv.size() != d) throw ProjectionRankMismatch("isotypic rank " + std::to_string(piv.size()) +
                                                    " differs from degree " + std::to_string(d));
  const std::size_t r = piv.size();

  // right (U, psi)-equivariance inside the image
  ModMatrix eq(R * cos.unipotent.size(), r);
  std::size_t line = 0;
  for (std::size_t s = 0; s < R; ++s)
    for (gidx u : cos.unipotent) {
      gidx su = G.mul(cos.reps[s], u);
      const std::uint64_t a = psi_on_u(G, psi, cos.upart[su]);
      const std::uint64_t b = psi_on_u(G, psi, u);
      for (std::size_t i = 0; i < r; ++i)
        eq.at(line, i) = K.sub(K.mul(a, Pt.at(i, cos.coset[su])), K.mul(b, Pt.at(i, s)));
      ++line;
    }
  ModMatrix N = mod_nullspace(K, eq);
  if (N.rows != 1) throw ProjectionRankMismatch("bi-equivariant line has dimension " + std::to_string(N.rows));

  std::vector<std::uint64_t> f(R, 0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t s = 0; s < R; ++s) f[s] = K.add(f[s], K.mul(N.at(0, i), Pt.at(i, s)));
  BesselTable B;
  B.row = row;
  B.psi = psi;
  B.values.resize(G.size());
  for (gidx g = 0; g < G.size(); ++g) B.values[g] = K.mul(psi_on_u(G, psi, cos.upart[g]), f[cos.coset[g]]);
  const std::uint64_t at1 = B.values[G.identity()];
  if (!at1) throw ProjectionRankMismatch("bi-equivariant vector vanishes at the identity");
  const std::uint64_t inv1 = K.inv(at1);
  for (auto& v : B.values) v = K.mul(v, inv1);
  return B;
}

namespace {
std::string elem_str(const GLGroup& G, gidx g) {
  std::ostringstream s;
  s << "g#" << g << "[";
  for (unsigned i = 0; i < G.n() * G.n(); ++i) s << (i ? "," : "") << G.entries(g)[i];
  s << "]";
  return s.str();
}
}  // namespace

std::vector<PropertyVerdict> check_bessel_properties(const GroupContext& ctx, const BesselTable& B) {
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  std::vector<PropertyVerdict> out;
  const auto U = G.unipotent_upper();
  std::vector<char> in_u(G.size(), 0);
  for (gidx u : U) in_u[u] = 1;

  PropertyVerdict b1{"B1", true, ""};
  for (gidx p : G.mirabolic()) {
    if ((B.values[p] != 0) != static_cast<bool>(in_u[p])) {
      b1.pass = false;
      b1.witness = elem_str(G, p);
      break;
    }
  }
  out.push_back(b1);

  PropertyVerdict b2{"B2", true, ""};
  const BesselTable ref = bessel_from_character(ctx, B.row, B.psi);
  if (B.values[G.identity()] != 1) {
    b2.pass = false;
    b2.witness = "B(1) != 1";
  }
  for (gidx g = 0; g < G.size() && b2.pass; ++g) {
    if (ref.values[g] != B.values[g]) {
      b2.pass = false;
      b2.witness = "trace formula differs at " + elem_str(G, g);
    }
    for (gidx u : U) {
      std::uint64_t pu = psi_on_u(G, B.psi, u);
      if (B.values[G.mul(u, g)] != K.mul(pu, B.values[g]) || B.values[G.mul(g, u)] != K.mul(pu, B.values[g])) {
        b2.pass = false;
        b2.witness = "equivariance fails at " + elem_str(G, g);
        break;
      }
    }
  }
  out.push_back(b2);

  PropertyVerdict b3{"B3", true, ""};
  const auto omega = central_character(ctx, B.row);
  for (fq_t s = 1; s < G.field().q() && b3.pass; ++s) {
    gidx z = G.scalar(s);
    for (gidx a = 0; a < G.size(); ++a)
      if (B.values[G.mul(a, z)] != K.mul(omega[s - 1], B.values[a])) {
        b3.pass = false;
        b3.witness = elem_str(G, a) + " z=" + std::to_string(s);
        break;
      }
  }
  out.push_back(b3);

  PropertyVerdict b4{"B4", true, ""};
  const std::size_t dual = ctx.contragredient(B.row);
  const auto psi_inv = make_additive_character(G.field(), K, G.field().neg(B.psi.c));
  const BesselTable Bd = bessel_from_character(ctx, dual, psi_inv);
  for (gidx a = 0; a < G.size(); ++a)
    if (B.values[G.inv(a)] != Bd.values[a]) {
      b4.pass = false;
      b4.witness = elem_str(G, a);
      break;
    }
  out.push_back(b4);
  return out;
}

ValueArray bessel_bop_average(const GroupContext& ctx, const BesselTable& B) {
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  const auto bop = G.bop();
  ValueArray f(G.size(), 0);
  for (gidx g = 0; g < G.size(); ++g) {
    std::uint64_t s = 0;
    for (gidx b : bop) s = K.add(s, B.values[G.mul(g, b)]);
    f[g] = s;
  }
  return f;
}

WhittakerVector random_whittaker_vector(const GroupContext& ctx, const UnipotentCosets& cos,
                                        const AdditiveCharacter& psi, std::mt19937_64& rng) {
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  std::vector<std::uint64_t> base(cos.reps.size());
  for (auto& v : base) v = rng() % K.ell();
  WhittakerVector w;
  w.values.resize(G.size());
  for (gidx g = 0; g < G.size(); ++g) w.values[g] = K.mul(psi_on_u(G, psi, cos.upart[g]), base[cos.coset[g]]);
  return w;
}

bool is_left_equivariant(const GroupContext& ctx, const AdditiveCharacter& psi, const ValueArray& f) {
  const GLGroup& G = *ctx.G;
  for (gidx u : G.unipotent_upper()) {
    const std::uint64_t pu = psi_on_u(G, psi, u);
    for (gidx g = 0; g < G.size(); ++g)
      if (f[G.mul(u, g)] != ctx.K.mul(pu, f[g])) return false;
  }
  return true;
}

bool averaging_lemma_check(const GroupContext& ctx, const AdditiveCharacter& psi, const ValueArray& alpha, gidx g) {
  const GLGroup& G = *ctx.G;
  const ModField& K = ctx.K;
  const auto U = G.unipotent_upper();
  const auto bop = G.bop();
  std::uint64_t s = 0;
  for (gidx u : U) {
    const std::uint64_t w = K.inv(psi_on_u(G, psi, u));
    const gidx ug = G.mul(u, g);
    std::uint64_t inner = 0;
    for (gidx b : bop) inner = K.add(inner, alpha[G.mul(b, ug)]);
    s = K.add(s, K.mul(w, inner));
  }
  s = K.mul(s, K.inv(U.size() % K.ell()));
  return s == alpha[g];
}

std::uint64_t gelfand_whittaker_finite(const GroupContext& ctx, const BesselTable& B, const FqMatrix& kbar) {
  return B.values[ctx.G->index_of(kbar)];
}

}  // namespace newform
