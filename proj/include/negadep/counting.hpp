#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negadep/gfnet.hpp"
#include "negadep/rational.hpp"

namespace negadep::counting {

struct InsufficientDigits : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using IndexVec = std::vector<int>;

/// Per-coordinate digit-agreement counts between one reference point and
/// every other point of a deterministic set. Ties over all E digits are
/// reported as infinity.
class GammaTable {
 public:
  GammaTable(const PointSet& ps, long ref = 0);

  long n() const { return n_; }
  long s() const { return s_; }
  long ref() const { return ref_; }
  /// gamma between the reference point and point l in coordinate j.
  int gamma(long l, long j) const { return g_[l * s_ + j]; }

 private:
  long n_, s_, ref_;
  std::vector<int> g_;
};

long sum(const IndexVec& k);
long sum_on(const IndexVec& k, uint32_t mask);

/// Number of points u_l != u_ref with gamma(u_ref, u_l) >= k componentwise.
long m_b(const IndexVec& k, const PointSet& ps, long ref = 0);
long m_b(const IndexVec& k, const GammaTable& gt);

/// Generalized count: gamma >= k_j + d_j + c on I, gamma >= k_j on J^c,
/// gamma == d_j exactly on J ∩ I^c.
long m_b_general(const IndexVec& k, const IndexVec& d, long c, uint32_t J,
                 uint32_t I, const PointSet& ps, long ref = 0);
long m_b_general(const IndexVec& k, const IndexVec& d, long c, uint32_t J,
                 uint32_t I, const GammaTable& gt);

/// Number of points with gamma exactly i componentwise, via
/// inclusion-exclusion over m_b.
long n_b(const IndexVec& i, const GammaTable& gt);
long n_b(const IndexVec& i, const PointSet& ps, long ref = 0);

/// C_b(k) = b^{|k|} m_b(k) / (n-1).
Rat c_b(const IndexVec& k, const PointSet& ps);
Rat c_b(const IndexVec& k, const GammaTable& gt, long b);

/// psi_m = b^{|k|_{I*}+|d|_J+|J|+|I|} (b-1)^{|I|-|J|} m_b(k,d,2,J,I)/(n-1).
Rat psi_m(const IndexVec& k, const IndexVec& d, uint32_t J, uint32_t I,
          const GammaTable& gt, long b);
Rat psi_m(const IndexVec& k, const IndexVec& d, uint32_t J, uint32_t I,
          const PointSet& ps);

/// m~_b(k,d,J) = 2^{-|J|} sum_{I subset J} psi_m(k,d,J,I) / ... (the
/// weighted sum of counting numbers whose bound by 1 drives the main
/// inequality). For J = empty this equals C_b(k).
Rat m_tilde(const IndexVec& k, const IndexVec& d, uint32_t J,
            const GammaTable& gt, long b);
Rat m_tilde(const IndexVec& k, const IndexVec& d, uint32_t J, const PointSet& ps);

/// Closed forms for a (0,m,s)-net.
long m_b_net_closed(const IndexVec& k, long b, long m);
/// Exact inclusion-exclusion value of m_b(k,d,c,J,I) on a (0,m,s)-net.
Int m_b_general_net_closed(const IndexVec& k, const IndexVec& d, long c,
                           uint32_t J, uint32_t I, long b, long m);
/// Same but from scalar data (|k|_{I*}, |d|_J, sizes); used by the lemma
/// grids where no concrete net exists.
Int m_b_general_net_closed_scalar(long b, long m, long kIstar, long dJ, long c,
                                  long Isize, long Jsize);
Rat m_tilde_net_closed(const IndexVec& k, const IndexVec& d, uint32_t J, long b,
                       long m, long s);

/// One row of the diagnostics grid.
struct CountingRow {
  IndexVec k, d;
  uint32_t J = 0, I = 0;
  long brute = 0;
  Int closed_form;
  bool closed_is_exact = false;  // false on non-nets
  Rat cb;
  Rat psi;
  Rat mtilde;
  bool bound_ok = false;  // m~ <= 1 at this row
};

struct CountingReport {
  long b = 0, s = 0, m = 0, n = 0;
  bool verified_net = false;
  std::vector<CountingRow> rows;
};

/// Evaluates the full grid |k| <= kmax, |d|_J <= dmax over all (J, I).
CountingReport diagnose(const PointSet& ps, long kmax, long dmax);

/// CSV with rational and floating renderings; provenance lines are prefixed
/// with '#'.
void write_csv(const CountingReport& report, std::ostream& os,
               const std::string& provenance = "");

}  // namespace negadep::counting
