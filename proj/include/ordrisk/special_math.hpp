#pragma once

// Deterministic numerical primitives shared by every other module: normal
// distribution functions, overflow-safe logistic/logit kernels, a safeguarded
// bracketed root finder, a Nelder-Mead simplex minimizer, and a reproducible
// random number generator with derived per-task streams.

#include <cstdint>
#include <functional>
#include <vector>

namespace ordrisk {

/// Convergence tolerances shared by iterative routines.
struct ToleranceConfig {
  double abs_tol = 1e-10;  ///< absolute convergence tolerance (> 0)
  double rel_tol = 1e-12;  ///< relative convergence tolerance (>= 0)
  int max_iter = 200;      ///< iteration budget (>= 1)

  /// Throws std::invalid_argument when a field violates its invariant.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Scalar kernels
// ---------------------------------------------------------------------------

/// e^s / (1 + e^s), evaluated in a branch form that never overflows.
double logistic(double s);

/// log(p / (1 - p)); throws std::invalid_argument outside (0, 1).
double logit(double p);

/// log(1 + e^s) without overflow for large |s|.
double log1p_exp(double s);

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal CDF via the complementary error function; absolute error
/// well below 1e-12 over |x| <= 8.
double std_normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double std_normal_sf(double x);

/// log Phi(x), stable for arbitrarily deep lower tails.
double log_std_normal_cdf(double x);

/// log(1 - Phi(x)) = log Phi(-x).
double log_std_normal_sf(double x);

/// Inverse CDF, solved from std_normal_cdf by bracketed root finding.
/// Throws std::invalid_argument outside (0, 1).
double std_normal_quantile(double p);

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct RootResult {
  double x = 0.0;        ///< located root
  double f_at_x = 0.0;   ///< residual at the root
  int iterations = 0;
  bool converged = false;
};

/// Locates the root of a continuous strictly monotone f on [lo, hi] by
/// safeguarded bracketing: a secant/false-position step is accepted only when
/// it stays inside the current bracket, otherwise the step bisects, so
/// convergence is guaranteed. Succeeds when |f(x)| <= abs_tol or the bracket
/// width falls below rel_tol*|x| + abs_tol.
///
/// Throws std::invalid_argument when f(lo) and f(hi) have the same sign (and
/// neither endpoint is already within abs_tol of a root), and
/// std::runtime_error carrying the best bracket when max_iter is exceeded.
RootResult find_root_monotone(const std::function<double(double)>& f, double lo,
                              double hi, const ToleranceConfig& cfg);

// ---------------------------------------------------------------------------
// Derivative-free minimization
// ---------------------------------------------------------------------------

struct SimplexResult {
  std::vector<double> x;  ///< best vertex found
  double f = 0.0;         ///< objective at x
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;  ///< false when max_iter was exhausted first
};

/// Nelder-Mead simplex minimization with the standard reflection/expansion/
/// contraction/shrink coefficients. Deterministic given x0 and cfg. Converges
/// when the simplex diameter drops to abs_tol (with rel_tol applied to the
/// objective spread as a secondary test); exceeding max_iter returns the best
/// vertex with converged = false rather than throwing.
///
/// `initial_steps` sets the per-coordinate offsets of the starting simplex;
/// pass an empty vector for the default 0.05 * max(|x0_i|, 1).
SimplexResult minimize_simplex(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const ToleranceConfig& cfg,
    const std::vector<double>& initial_steps = {});

// ---------------------------------------------------------------------------
// Reproducible random numbers
// ---------------------------------------------------------------------------

/// Small deterministic generator (splitmix64 core) with 53-bit uniforms and
/// Box-Muller normals. The standard library distributions are
/// implementation-defined, which would break the bit-identical reproducibility
/// the solvers promise, so the artifact owns its generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from (seed, stream); used to give every
  /// optimizer start and every cross-validation repeat its own generator.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal deviate (Box-Muller; caches the spare).
  double normal();

  /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Deterministic Fisher-Yates shuffle driven by `rng`.
void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng);

}  // namespace ordrisk
