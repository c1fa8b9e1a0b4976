#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negadep/gfnet.hpp"
#include "negadep/rational.hpp"

namespace negadep::lemmas {

struct BadIndices : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Grid ranges for the exhaustive / randomized certificates.
struct GridSpec {
  std::vector<long> bases = {2, 3, 5, 7, 11, 13};
  long smax = 6;   // caps s and |J|
  long kmax = 8;   // componentwise k (and d) cap
  long mslack = 2; // m ranges up to 2|J| + |k| + mslack
  long trials = 1000;
  uint64_t seed = 0x5eedULL;

  std::string describe() const;
};

/// Machine-checked verdict for one lemma over one grid. Passing means the
/// counterexample list is empty; the tightest margin witness is kept for
/// inspection either way.
struct LemmaCertificate {
  std::string lemma;
  std::string grid;
  long checked = 0;
  bool exact = true;  // false when quadrature or SE tolerances are involved
  std::vector<std::string> failures;  // first 100 recorded
  std::string tightest_point;
  Rat tightest_margin;
  bool has_tightest = false;
  std::string note;

  bool passed() const { return failures.empty(); }
  void record(bool ok, const std::string& point, const Rat& margin);
  void fail(const std::string& point);
  void count_only() { ++checked; }
};

/// h_{j,i}(l) = b^{j+i-l}/(b-1)^{j-i} * C(j-i-1, l-2i).
Rat h_eval(long j, long i, long l, long b);
/// The piecewise g_{j,i}(l) built from h.
Rat g_eval(long j, long i, long l, long b);
std::pair<Rat, Rat> h_g_eval(long j, long i, long l, long b);

/// G(m,s,J,k,d) = sum over proper subsets I of J of
/// g_{|J|,|I|}(m - |k|_{I*} - |d|_J). Coordinates are 0-based bits of J.
Rat G_eval(long b, long m, const std::vector<int>& k, const std::vector<int>& d,
           uint32_t J, long s);

/// R(b,s) of the half-binomial-sum lemma.
Rat R_eval(long b, long s);
/// Q(b,k,s) alternating sum.
Rat Q_eval(long b, long k, long s);

/// Admissibility of a weighted-sums instance X (0-based, w rows, l columns):
/// positive staircase support, decreasing row sums, increasing within column.
bool staircase_admissible(const std::vector<std::vector<Rat>>& X, long w, long l);

LemmaCertificate check_g_bound(const GridSpec& grid = {});
LemmaCertificate check_Q(const GridSpec& grid = {});
LemmaCertificate check_Mtilde(const std::vector<PointSet>& nets,
                              const GridSpec& grid = {});
LemmaCertificate check_G_propositions(const GridSpec& grid = {});
LemmaCertificate check_weighted_sums(const GridSpec& grid = {});
LemmaCertificate check_vol_lemma(const GridSpec& grid = {});
LemmaCertificate check_volcondprob(const std::vector<PointSet>& nets,
                                   const GridSpec& grid = {});
LemmaCertificate check_identities(const GridSpec& grid = {});
LemmaCertificate check_psi_bound(const std::vector<PointSet>& nets,
                                 const GridSpec& grid = {});

std::vector<std::string> lemma_ids();
LemmaCertificate run_one(const std::string& id, const GridSpec& grid = {});
std::vector<LemmaCertificate> run_all(const GridSpec& grid = {});

}  // namespace negadep::lemmas
