#pragma once
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newform/bessel.hpp"
#include "newform/characters.hpp"
#include "newform/pattern.hpp"

namespace newform {

// Mackey sum for dim π^{K(m)}, π induced from a cuspidal row
struct MackeyReport {
  int m = 0;
  std::uint64_t total = 0;
  std::vector<std::pair<std::vector<int>, std::uint64_t>> diagonal;  // alpha -> invariant dimension
  std::uint64_t diagonal_symbolic = 0;  // diagonals with alpha_{n-1} >= m checked to contain N_{1,n-1}
  std::uint64_t c_members = 0, c_certified = 0;    // family C: size, witnesses checked
  std::uint64_t a2_members = 0, a2_certified = 0;  // A2·B
  std::uint64_t d_count = 0;
};

struct MackeyOptions {
  std::uint64_t block_budget = 2000;  // certify every member of smaller blocks
  std::uint64_t samples = 64;         // seeded samples in larger blocks
  std::uint64_t seed = 1;
};

MackeyReport mackey_dimension(const GroupContext& ctx, std::size_t row, int m, const MackeyOptions& opt = {});
std::uint64_t mackey_contribution(const GroupContext& ctx, std::size_t row, const LocalRing& R, const CosetRep& g,
                                  int m);
std::uint64_t oldform_dimension(const GroupContext& ctx, std::size_t row, int m, const MackeyOptions& opt = {});
// c(π): checks vanishing below n and dimension one at n
int conductor_depth_zero(const GroupContext& ctx, std::size_t row, const MackeyOptions& opt = {});

class DepthZeroRep {
 public:
  // shuffle_seed = 0 keeps the canonical transversal
  static std::shared_ptr<const DepthZeroRep> make(std::shared_ptr<const GroupContext> ctx, std::size_t row,
                                                  std::uint64_t omega_pi = 1, fq_t psi_c = 1,
                                                  std::uint64_t shuffle_seed = 0, int window_extra = 0);

  const GroupContext& ctx() const { return *ctx_; }
  const GLGroup& G() const { return *ctx_->G; }
  const ModField& K() const { return ctx_->K; }
  const LocalRing& ring() const { return *R_; }
  unsigned n() const { return ctx_->G->n(); }
  std::size_t row() const { return row_; }
  std::uint64_t omega_pi() const { return omega_; }
  const BesselTable& bessel() const { return B_; }
  const ValueArray& bop_average() const { return F_; }
  const std::vector<WindowMatrix>& transversal() const { return T_; }
  const WindowMatrix& Sigma() const { return *S_; }

  std::uint64_t omega_power(int v) const;
  // h = pi^v k with k in K
  std::optional<std::pair<int, gidx>> in_ZK(const WindowMatrix& h) const;
  // g = pi^v k Σ y_i
  std::optional<std::pair<int, gidx>> support_decompose(const WindowMatrix& g) const;

  ValueArray newform_eval(const WindowMatrix& g) const;
  ValueArray newform_integral_eval(const WindowMatrix& g) const;
  // ⟨W, W'⟩ = |U|^{-1} Σ_G W W'
  std::uint64_t pairing(const ValueArray& W, const ValueArray& Wdual) const;
  std::uint64_t matrix_coeff_direct(const WindowMatrix& g) const;
  std::uint64_t matrix_coeff_formula(const WindowMatrix& g) const;
  std::uint64_t coefficient_constant() const;       // |G| / (|U| dim τ)
  std::uint64_t single_coset_coefficient() const;   // ⟨f_new(Σ), 𝓑∨(1)⟩

  std::uint64_t psi(const Scalar& x) const;        // conductor o
  std::uint64_t psi_prime(const Scalar& x) const;  // conductor p
  std::uint64_t gelfand_whittaker(const WindowMatrix& h) const;
  std::uint64_t whittaker_u_integral(const WindowMatrix& g) const;  // unnormalized
  std::uint64_t whittaker_k_integral(const WindowMatrix& g) const;  // unnormalized
  std::uint64_t whittaker_newform(const WindowMatrix& g) const;     // W(1) = 1
  std::uint64_t whittaker_newform_k(const WindowMatrix& g) const;   // second expression, W(1) = 1
  bool in_whittaker_support(const WindowMatrix& g) const;

  // samplers
  WindowMatrix random_K(std::mt19937_64& rng) const;
  WindowMatrix random_Kn(std::mt19937_64& rng) const;  // K(n)
  WindowMatrix random_support_point(std::mt19937_64& rng) const;  // z k Σ y
  WindowMatrix random_sigma_conj(std::mt19937_64& rng) const;     // Σ^{-1} k Σ
  WindowMatrix random_whittaker_support(std::mt19937_64& rng) const;
  WindowMatrix random_unipotent(std::mt19937_64& rng, int poles) const;

 private:
  DepthZeroRep() = default;
  std::shared_ptr<const GroupContext> ctx_;
  std::shared_ptr<LocalRing> R_;
  std::size_t row_ = 0;
  std::uint64_t omega_ = 1;
  BesselTable B_;
  ValueArray Bdual_, F_, Fdual_, S2_;
  std::vector<gidx> bop_;
  std::vector<WindowMatrix> T_, YS_;  // y_i and y_i^{-1} Σ^{-1}
  std::vector<WindowMatrix> bop_lift_;
  std::optional<WindowMatrix> S_;
  std::uint64_t w1_norm_inv_ = 1, w2_norm_inv_ = 1;
};

}  // namespace newform
