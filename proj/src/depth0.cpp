#include "newform/depth0.hpp"

#include <algorithm>

#include "newform/errors.hpp"

namespace newform {

std::shared_ptr<const DepthZeroRep> DepthZeroRep::make(std::shared_ptr<const GroupContext> ctx, std::size_t row,
                                                       std::uint64_t omega_pi, fq_t psi_c, std::uint64_t shuffle_seed,
                                                       int window_extra) {
  std::shared_ptr<DepthZeroRep> r(new DepthZeroRep());
  r->ctx_ = std::move(ctx);
  const GLGroup& G = *r->ctx_->G;
  const ModField& K = r->ctx_->K;
  const unsigned n = G.n();
  if (n < 2) throw InvalidArgument("depth-zero newforms need n >= 2");
  if (omega_pi % K.ell() == 0) throw InvalidArgument("omega_pi(varpi) must be nonzero");
  r->row_ = row;
  r->omega_ = omega_pi % K.ell();
  const int nn = static_cast<int>(n);
  const int B = 4 * nn + window_extra;
  r->R_ = std::make_shared<LocalRing>(G.field(), LocalRing::Mode::Equal, B, B + 6 * nn + window_extra, 1);
  const LocalRing& R = *r->R_;

  const auto psi = make_additive_character(G.field(), K, psi_c);
  r->B_ = bessel_from_character(*r->ctx_, row, psi);
  r->Bdual_.resize(G.size());
  for (gidx x = 0; x < G.size(); ++x) r->Bdual_[x] = r->B_.values[G.inv(x)];
  r->bop_ = G.bop();
  r->F_ = bessel_bop_average(*r->ctx_, r->B_);
  r->Fdual_.assign(G.size(), 0);
  r->S2_.assign(G.size(), 0);
  for (gidx x = 0; x < G.size(); ++x)
    for (gidx b : r->bop_) {
      r->Fdual_[x] = K.add(r->Fdual_[x], r->Bdual_[G.mul(x, b)]);
      r->S2_[x] = K.add(r->S2_[x], r->F_[G.mul(b, x)]);
    }
  for (gidx b : r->bop_) r->bop_lift_.push_back(WindowMatrix::lift(R, G.element(b)));

  r->S_ = sigma(R, n);
  r->T_ = shuffle_seed ? shuffled_transversal(R, n, nn, shuffle_seed) : support_transversal(R, n, nn);
  const WindowMatrix sinv = r->S_->inverse();
  for (const auto& y : r->T_) r->YS_.push_back(y.inverse() * sinv);

  const WindowMatrix one = WindowMatrix::identity(R, n);
  const std::uint64_t w1 = r->whittaker_u_integral(one);
  const std::uint64_t w2 = r->whittaker_k_integral(one);
  if (!w1 || !w2) throw VerificationFailure("Whittaker newform vanishes at the identity");
  r->w1_norm_inv_ = K.inv(w1);
  r->w2_norm_inv_ = K.inv(w2);
  return r;
}

std::uint64_t DepthZeroRep::omega_power(int v) const {
  const ModField& K = ctx_->K;
  return v >= 0 ? K.pow(omega_, static_cast<std::uint64_t>(v)) : K.pow(K.inv(omega_), static_cast<std::uint64_t>(-v));
}

namespace {
int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
}  // namespace

std::optional<std::pair<int, gidx>> DepthZeroRep::in_ZK(const WindowMatrix& h) const {
  const int nn = static_cast<int>(n());
  const int dv = h.det_val();
  if (dv % nn != 0) return std::nullopt;
  const int v = dv / nn;
  const WindowMatrix k = h.shift(-v);
  if (!k.in_K()) return std::nullopt;
  return std::make_pair(v, G().index_of(k.reduce()));
}

std::optional<std::pair<int, gidx>> DepthZeroRep::support_decompose(const WindowMatrix& g) const {
  const int nn = static_cast<int>(n());
  const int D = g.det_val() - nn * (nn - 1) / 2;
  if (D - nn * floor_div(D, nn) != 0) return std::nullopt;
  const int v = D / nn;
  const WindowMatrix h = g.shift(-v);
  for (const auto& ys : YS_) {
    const WindowMatrix k = h * ys;
    if (k.in_K()) return std::make_pair(v, G().index_of(k.reduce()));
  }
  return std::nullopt;
}

ValueArray DepthZeroRep::newform_eval(const WindowMatrix& g) const {
  const GLGroup& Gr = G();
  ValueArray out(Gr.size(), 0);
  const auto d = support_decompose(g);
  if (!d) return out;
  const std::uint64_t w = omega_power(d->first);
  for (gidx x = 0; x < Gr.size(); ++x) out[x] = K().mul(w, F_[Gr.mul(x, d->second)]);
  return out;
}

ValueArray DepthZeroRep::newform_integral_eval(const WindowMatrix& g) const {
  const GLGroup& Gr = G();
  const ModField& Kf = K();
  ValueArray out(Gr.size(), 0);
  for (const auto& ys : YS_) {
    const WindowMatrix h = g * ys;
    for (const auto& b : bop_lift_) {
      const auto z = in_ZK(h * b);
      if (!z) continue;
      const std::uint64_t w = omega_power(z->first);
      for (gidx x = 0; x < Gr.size(); ++x) out[x] = Kf.add(out[x], Kf.mul(w, B_.values[Gr.mul(x, z->second)]));
    }
  }
  return out;
}

std::uint64_t DepthZeroRep::pairing(const ValueArray& W, const ValueArray& Wd) const {
  const ModField& Kf = K();
  std::uint64_t s = 0;
  for (std::size_t x = 0; x < W.size(); ++x)
    if (W[x] && Wd[x]) s = Kf.add(s, Kf.mul(W[x], Wd[x]));
  const std::uint64_t u = G().unipotent_upper().size();
  return Kf.mul(s, Kf.inv(u % Kf.ell()));
}

std::uint64_t DepthZeroRep::matrix_coeff_direct(const WindowMatrix& g) const {
  const ModField& Kf = K();
  std::uint64_t s = 0;
  const WindowMatrix& S = *S_;
  for (const auto& y : T_) s = Kf.add(s, pairing(newform_eval(S * y * g), Fdual_));
  return s;
}

std::uint64_t DepthZeroRep::coefficient_constant() const {
  const ModField& Kf = K();
  const std::uint64_t u = G().unipotent_upper().size();
  const std::uint64_t d = ctx_->table.degree[row_];
  return Kf.mul(G().size() % Kf.ell(), Kf.inv(Kf.mul(u % Kf.ell(), d % Kf.ell())));
}

std::uint64_t DepthZeroRep::single_coset_coefficient() const { return pairing(F_, Bdual_); }

std::uint64_t DepthZeroRep::matrix_coeff_formula(const WindowMatrix& g) const {
  const ModField& Kf = K();
  const WindowMatrix& S = *S_;
  std::uint64_t s = 0;
  for (const auto& yj : T_) {
    const WindowMatrix left = S * yj * g;
    for (const auto& ys : YS_) {
      const auto z = in_ZK(left * ys);
      if (!z) continue;
      s = Kf.add(s, Kf.mul(omega_power(z->first), S2_[z->second]));
    }
  }
  return Kf.mul(s, coefficient_constant());
}

std::uint64_t DepthZeroRep::psi(const Scalar& x) const { return B_.psi(x.digit(-1)); }
std::uint64_t DepthZeroRep::psi_prime(const Scalar& x) const { return B_.psi(x.digit(0)); }

std::uint64_t DepthZeroRep::gelfand_whittaker(const WindowMatrix& h) const {
  const unsigned nn = n();
  const LocalRing& R = *R_;
  // column operations from the bottom row: h k' upper triangular
  WindowMatrix T = h;
  for (unsigned r = nn; r-- > 0;) {
    unsigned best = nn;
    int bv = 0;
    for (unsigned c = 0; c <= r; ++c) {
      const Scalar& x = T.at(r, c);
      if (x.known_zero()) continue;
      if (best == nn || x.lo() < bv) {
        best = c;
        bv = x.lo();
      }
    }
    if (best == nn) throw WindowOverflow("Iwasawa pivot undetermined");
    if (best != r)
      for (unsigned i = 0; i < nn; ++i) std::swap(T.at(i, best), T.at(i, r));
    const Scalar pinv = T.at(r, r).inv();
    for (unsigned c = 0; c < r; ++c) {
      const Scalar f = T.at(r, c) * pinv;
      if (f.known_zero()) continue;
      for (unsigned i = 0; i < nn; ++i) T.at(i, c) = T.at(i, c) - f * T.at(i, r);
      T.at(r, c) = Scalar(R);
    }
  }
  const int e = T.at(0, 0).val();
  for (unsigned i = 1; i < nn; ++i)
    if (T.at(i, i).val() != e) return 0;
  WindowMatrix u = WindowMatrix::identity(R, nn);
  for (unsigned i = 0; i < nn; ++i)
    for (unsigned j = i + 1; j < nn; ++j) u.at(i, j) = T.at(i, j) * T.at(j, j).inv();
  Scalar sd(R);
  for (unsigned i = 0; i + 1 < nn; ++i) sd = sd + u.at(i, i + 1);
  const WindowMatrix k0 = (u.inverse() * h).shift(-e);
  if (!k0.in_K()) throw VerificationFailure("Iwasawa decomposition left K");
  const ModField& Kf = K();
  return Kf.mul(Kf.mul(omega_power(e), psi_prime(sd)), B_.values[G().index_of(k0.reduce())]);
}

namespace {

// upper unitriangular matrices whose entries have digits at exponents [lo(i,j), hi)
template <class Fn>
void for_each_polar_unipotent(const LocalRing& R, unsigned n, int P, bool deep, Fn&& fn) {
  struct Slot {
    unsigned i, j;
    int e;
  };
  std::vector<Slot> slots;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i + 1; j < n; ++j) {
      const int top = deep ? -static_cast<int>(j - i) : 0;
      for (int e = -P; e < top; ++e) slots.push_back({i, j, e});
    }
  const std::uint32_t q = R.residue().q();
  double total = 1;
  for (std::size_t s = 0; s < slots.size(); ++s) total *= q;
  if (total > 4e6) throw EnumerationBoundExceeded("unipotent enumeration too large");
  std::vector<fq_t> ctr(slots.size(), 0);
  while (true) {
    WindowMatrix u = WindowMatrix::identity(R, n);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (ctr[s]) u.at(slots[s].i, slots[s].j) = u.at(slots[s].i, slots[s].j) + Scalar::monomial(R, ctr[s], slots[s].e);
    fn(u);
    std::size_t s = slots.size();
    bool done = true;
    while (s > 0) {
      --s;
      if (++ctr[s] < q) {
        done = false;
        break;
      }
      ctr[s] = 0;
    }
    if (done) return;
  }
}

}  // namespace

std::uint64_t DepthZeroRep::whittaker_u_integral(const WindowMatrix& g) const {
  const int nn = static_cast<int>(n());
  const int dv = g.det_val();
  if (dv % nn != 0) return 0;
  const int v = dv / nn;
  const int L = v - (nn - 1) + g.inverse().min_val();
  const int P = std::max(0, -L);
  const ModField& Kf = K();
  std::uint64_t s = 0;
  for_each_polar_unipotent(*R_, n(), P, false, [&](const WindowMatrix& u) {
    Scalar sd(*R_);
    for (unsigned i = 0; i + 1 < n(); ++i) sd = sd + u.at(i, i + 1);
    const std::uint64_t c = matrix_coeff_direct(u * g);
    if (c) s = Kf.add(s, Kf.mul(Kf.inv(psi(sd)), c));
  });
  return s;
}

std::uint64_t DepthZeroRep::whittaker_k_integral(const WindowMatrix& g) const {
  const ModField& Kf = K();
  std::uint64_t s = 0;
  const WindowMatrix Sg = *S_ * g;
  for (const auto& ys : YS_) {
    const WindowMatrix h = Sg * ys;
    for (const auto& b : bop_lift_) s = Kf.add(s, gelfand_whittaker(h * b));
  }
  return s;
}

std::uint64_t DepthZeroRep::whittaker_newform(const WindowMatrix& g) const {
  return K().mul(whittaker_u_integral(g), w1_norm_inv_);
}

std::uint64_t DepthZeroRep::whittaker_newform_k(const WindowMatrix& g) const {
  return K().mul(whittaker_k_integral(g), w2_norm_inv_);
}

bool DepthZeroRep::in_whittaker_support(const WindowMatrix& g) const {
  const int nn = static_cast<int>(n());
  const int dv = g.det_val();
  if (dv % nn != 0) return false;
  const int v = dv / nn;
  const int L = v - (nn - 1) + g.inverse().min_val();
  const int P = std::max(0, -L) + nn - 1;
  bool found = false;
  const WindowMatrix& S = *S_;
  for_each_polar_unipotent(*R_, n(), P, true, [&](const WindowMatrix& w) {
    if (!found && support_decompose(S * w * g)) found = true;
  });
  return found;
}

WindowMatrix DepthZeroRep::random_K(std::mt19937_64& rng) const {
  return random_pattern_element(*R_, full_K(n()), rng, 3);
}

WindowMatrix DepthZeroRep::random_Kn(std::mt19937_64& rng) const {
  return random_pattern_element(*R_, conductor_subgroup(n(), static_cast<int>(n())), rng, 3);
}

WindowMatrix DepthZeroRep::random_support_point(std::mt19937_64& rng) const {
  const int z = static_cast<int>(rng() % 3) - 1;
  return (random_K(rng) * *S_ * random_Kn(rng)).shift(z);
}

WindowMatrix DepthZeroRep::random_sigma_conj(std::mt19937_64& rng) const {
  return S_->inverse() * random_K(rng) * *S_;
}

WindowMatrix DepthZeroRep::random_unipotent(std::mt19937_64& rng, int poles) const {
  WindowMatrix u = WindowMatrix::identity(*R_, n());
  const std::uint32_t q = G().field().q();
  for (unsigned i = 0; i < n(); ++i)
    for (unsigned j = i + 1; j < n(); ++j) {
      std::vector<fq_t> d(static_cast<std::size_t>(poles + 2));
      for (auto& x : d) x = static_cast<fq_t>(rng() % q);
      u.at(i, j) = Scalar::from_digits(*R_, -poles, d);
    }
  return u;
}

WindowMatrix DepthZeroRep::random_whittaker_support(std::mt19937_64& rng) const {
  const int z = static_cast<int>(rng() % 3) - 1;
  return (random_unipotent(rng, 1) * random_sigma_conj(rng) * random_Kn(rng)).shift(z);
}

}  // namespace newform
