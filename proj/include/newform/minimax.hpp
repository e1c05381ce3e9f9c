#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newform/bessel.hpp"
#include "newform/local.hpp"
#include "newform/pattern.hpp"

namespace newform {

// Unramified minimax stratum [Lambda, m, 0, beta] with beta = pi^{-m} gamma,
// gamma the companion matrix of a monic P over o with irreducible reduction.
// Equal characteristic only; m odd.
struct StratumData {
  unsigned n = 0;
  int m = 0;
  int e = 1, f = 0;
  std::shared_ptr<const LocalRing> R;
  std::vector<std::vector<fq_t>> poly;  // digits of c_0..c_{n-1}, P = X^n + sum c_i X^i
  std::vector<fq_t> residue_poly;       // reduction of P, low to high, monic
  std::vector<WindowMatrix> gamma_powers;  // gamma^k, k < n: an o-basis of o_E (B' basis)
  std::optional<WindowMatrix> gamma, beta;  // B' basis
  std::optional<WindowMatrix> beta_companion;  // basis {beta^k}
  std::vector<Scalar> a;               // minimal polynomial of beta, a_0..a_{n-1}
  ModField K;                          // coefficients: contains the p-th roots of unity
  AdditiveCharacter psibar;            // on F_q, Tr(c x) nonzero for x = 1

  const LocalRing& ring() const { return *R; }
  const Field& residue() const { return R->residue(); }
  int level() const { return m / 2 + 1; }        // U^{floor(m/2)+1}
  int j_level() const { return (m + 1) / 2; }    // U^{floor((m+1)/2)}
  int conductor() const { return static_cast<int>(n) * (m + 1); }
};

enum class Basis { Companion, Bprime };

// poly: digit lists of c_0..c_{n-1}; empty picks the first irreducible residue polynomial.
// ReducibleResiduePolynomial, EvenM, MixedModeUnsupported.
StratumData build_stratum(unsigned n, int m, const Field& F,
                          std::optional<std::vector<std::vector<fq_t>>> poly = std::nullopt);
StratumData random_stratum(unsigned n, int m, const Field& F, std::mt19937_64& rng, int depth = 3);

bool residue_irreducible(const Field& F, const std::vector<fq_t>& monic);  // low to high
// coefficients of det(X - x), low to high, monic
std::vector<Scalar> characteristic_polynomial(const WindowMatrix& x);

struct StratumInvariants {
  bool a0_valuation = false;   // val(a_0) = -mn
  bool ai_bounds = false;      // val(a_i) >= -m(n-i)
  bool residue_generates = false;  // gamma mod p has irreducible characteristic polynomial
  bool charpoly_matches = false;   // char poly of beta equals the stored a_i
  bool ok() const { return a0_valuation && ai_bounds && residue_generates && charpoly_matches; }
};
StratumInvariants verify_stratum(const StratumData& S);

// filtration U^r(Lambda) written in the given basis
PatternGroup filtration_pattern(const StratumData& S, int r, Basis b);
bool in_filtration(const StratumData& S, const WindowMatrix& x, int r, Basis b);
// coordinates in the companion basis from B' coordinates and back
WindowMatrix to_companion(const StratumData& S, const WindowMatrix& x);
WindowMatrix to_bprime(const StratumData& S, const WindowMatrix& x);

// residue of Tr(beta (x - 1)) at pi^0; psi_beta(x) = psibar(that)
fq_t psi_beta_argument(const StratumData& S, const WindowMatrix& x, Basis b);
// NotInFiltration unless x in U^{floor(m/2)+1}
std::uint64_t psi_beta_eval(const StratumData& S, const WindowMatrix& x, Basis b);
// the explicit entry formula (superdiagonal, last row, corner)
std::uint64_t psi_beta_formula(const StratumData& S, const WindowMatrix& x, Basis b);
// psi(pi^{-m} sum u_{i,i+1}) on upper unipotent u
std::uint64_t psi_tm(const StratumData& S, const WindowMatrix& u);

enum class ECoset { UnitsTimesU, OnePlusPE };
// j in o_E^x U^r, resp. (1 + p_E) U^r, decided modulo p^r
bool membership_E_coset(const StratumData& S, const WindowMatrix& j, int r, ECoset variant);
// x in o_E with x = 1 mod p^r
bool in_one_plus_pE(const StratumData& S, const WindowMatrix& x, int r);

// conjugated K_n(c) patterns
PatternGroup sigma_conductor_pattern(const StratumData& S, const WindowMatrix& Sigma, int c);
PatternGroup minimax_pattern(const StratumData& S);    // Sigma_{m,n} K_n(n(m+1)) Sigma_{m,n}^{-1}
PatternGroup companion_pattern(const StratumData& S);  // Sigma_n K_n(n(1+m)) Sigma_n^{-1}

// x = u l with u upper unitriangular, l lower triangular; nullopt if a pivot is not a unit
std::optional<std::pair<WindowMatrix, WindowMatrix>> ul_factor(const WindowMatrix& x);

struct CheckReport {
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t drawn = 0, accepted = 0, counterexamples = 0;
  bool pass() const { return counterexamples == 0 && accepted > 0; }
  CheckReport& operator+=(const CheckReport& o);
};

struct MinimaxOptions {
  std::uint64_t samples = 10000;  // accepted samples per check
  std::uint64_t seed = 0;
  unsigned threads = 0;           // 0: hardware concurrency, capped at 8
  unsigned batches = 16;
  int depth = 4;                  // random digits past each bound
  bool strict = true;             // CounterexampleFound on failure
};

CheckReport check_lemma_psibeta(const StratumData& S, const MinimaxOptions& opt = {});
CheckReport check_multiplicativity(const StratumData& S, const MinimaxOptions& opt = {});

struct IntersectionReport {
  CheckReport core;   // p x u in the pattern forces x in 1 + p_E^r, 1 <= r <= m+1
  CheckReport part1;  // H^1 cap Q inside U^{floor(m/2)+1}
  CheckReport part2;  // equals part1 for m odd
  CheckReport part3;  // J cap Q inside J^1
  bool pass() const { return core.pass() && part1.pass() && part2.pass() && part3.pass(); }
};
IntersectionReport check_intersections(const StratumData& S, const MinimaxOptions& opt = {});

struct ThetaReport {
  CheckReport theta;  // Psi(u) psi_beta(u') = 1 on factorized samples
  int conductor = 0;
  bool conductor_ok = false;  // n(m+1) = n(1 + m/e)
  bool pass() const { return theta.pass() && conductor_ok; }
};
ThetaReport check_theta_triviality(const StratumData& S, const MinimaxOptions& opt = {});

int minimax_conductor(unsigned n, int m, int e = 1);

// Candidate Sigma for the general construction, tested against the two properties
// required of it: theta_psi trivial on its domain cut with Sigma K_n(c) Sigma^{-1},
// and J cap Sigma K_n(c) Sigma^{-1} = J^1 cap Sigma K_n(c) Sigma^{-1}.
struct SigmaCandidate {
  std::string name;
  std::function<WindowMatrix(const StratumData&)> make;  // monomial
};
SigmaCandidate sigma_mn_candidate();
struct CandidateReport {
  std::string name;
  CheckReport property1, property2;
  bool pass() const { return property1.pass() && property2.pass(); }
};
CandidateReport check_sigma_candidate(const StratumData& S, const SigmaCandidate& c, MinimaxOptions opt = {});

}  // namespace newform
