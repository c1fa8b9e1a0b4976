#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "negadep/boxes.hpp"
#include "negadep/counting.hpp"
#include "negadep/gfnet.hpp"
#include "negadep/randomize.hpp"

namespace negadep::dependence {

struct EmptyFamily : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Randomizer { scramble, shift };

/// Empirical pair probability: mean and standard error over replicates.
struct PairProbability {
  double estimate = 0;
  double se = 0;
  long replicates = 0;
};

/// Exact pair-probability machinery bound to one deterministic point set.
/// Caches the gamma table and the weighted counting sums across boxes, so
/// evaluating many boxes against one net stays cheap.
class Calculator {
 public:
  explicit Calculator(PointSet ps);

  const PointSet& points() const { return ps_; }
  bool verified_net() const { return verified_; }

  /// H_n(1_k) = m_b(k)/(n-1) * b^{-|k|}.
  Rat h_elementary(const counting::IndexVec& k) const;
  /// H_n(A) = sum_k t_k C_b(k) for A anchored at the origin.
  Rat h_anchored(const boxes::Box& A) const;
  /// H_n(A) = sum_{k,J} alpha~_{k,J} m~_b(k,d,J) for any box.
  Rat h_unanchored(const boxes::Box& A) const;
  /// Cross-route: H_n(A) = sum_i psi_i V_i(A x A) with the joint-density
  /// constants psi_i recovered from the exact-gamma counts n_b.
  Rat h_via_psi(const boxes::Box& A) const;

  Rat m_tilde_cached(const counting::IndexVec& k, const counting::IndexVec& d,
                     uint32_t J) const;

 private:
  PointSet ps_;
  counting::GammaTable gt_;
  bool verified_;
  mutable std::map<std::vector<int>, Rat> cache_;
  mutable std::mutex mu_;
};

/// Unbiased pair estimator over R randomization replicates: per replicate
/// (N_A^2 - N_A)/(n(n-1)) with N_A the number of points inside A.
PairProbability h_empirical(const boxes::Box& A, const PointSet& ps,
                            Randomizer how, long R, uint64_t seed);

/// Per-replicate sample means of the indicator of A (for variance studies).
std::vector<double> replicate_means(const boxes::Box& A, const PointSet& ps,
                                    Randomizer how, long R, uint64_t seed);

struct BoxGap {
  boxes::Box box;
  Rat vol2;
  Rat h;        // exact mode
  Rat gap;      // h - vol2 (exact mode)
  double h_emp = 0, se = 0;
  bool exact = true;
};

struct IndexReport {
  std::vector<BoxGap> gaps;
  long argmax = -1;
  Rat max_gap;
  bool exact = true;
  bool verified_net = false;
};

/// sup over the supplied family of H_n(A) - Vol^2(A).
IndexReport pairwise_index(const PointSet& ps, const std::vector<boxes::Box>& family,
                           bool exact, Randomizer how = Randomizer::scramble,
                           long R = 0, uint64_t seed = 0);

struct VarianceReport {
  Rat mu;                 // Vol(A)
  Rat h;                  // H_n(A), exact
  Rat var_analytic;       // mu(1-mu)/n + (H-mu^2)(n-1)/n
  Rat mc_bound;           // mu(1-mu)/n
  Rat decomposition_term; // (H-mu^2)(n-1)/n
  bool var_le_mc = false;
  double var_empirical = 0;
  double se_var = 0;
  long replicates = 0;
};

VarianceReport variance_compare(const boxes::Box& A, const PointSet& ps,
                                Randomizer how, long R, uint64_t seed);

/// The two-dimensional example set {(i/5, i/5), (i/5, ((i+1) mod 5)/5)} with
/// A = [0,1/10) x [0,2/5): exact shifted pair probability, Vol^2 and the
/// C_b table.
struct ShiftExample {
  PointSet points;
  boxes::Box box;
  Rat h_shift_exact;  // 1/450
  Rat vol2;           // 1/625
  std::vector<std::pair<counting::IndexVec, Rat>> cb_table;
};

ShiftExample shift_example();

/// Random boxes with depth-p endpoints drawn uniformly (a < A on the grid).
std::vector<boxes::Box> random_box_family(long b, long s, long depth, long count,
                                          uint64_t seed);
/// Random intervals with depth <= p endpoints (for decomposition studies).
boxes::BoxInterval random_interval(long b, long depth, uint64_t& state);

}  // namespace negadep::dependence
