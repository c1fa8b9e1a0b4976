#include "negadep/counting.hpp"

#include <functional>
#include <ostream>

#include "negadep/boxes.hpp"

namespace negadep::counting {

GammaTable::GammaTable(const PointSet& ps, long ref)
    : n_(ps.n), s_(ps.s), ref_(ref) {
  if (ref < 0 || ref >= ps.n) throw std::invalid_argument("GammaTable: bad reference");
  if (ps.n < 2) throw std::invalid_argument("GammaTable: need at least two points");
  g_.assign(static_cast<std::size_t>(n_) * s_, 0);
  const uint8_t* base = ps.digits.data();
  const std::size_t coordlen = ps.E;
  for (long l = 0; l < n_; ++l)
    for (long j = 0; j < s_; ++j) {
      const uint8_t* x = base + (static_cast<std::size_t>(ref) * s_ + j) * coordlen;
      const uint8_t* y = base + (static_cast<std::size_t>(l) * s_ + j) * coordlen;
      g_[l * s_ + j] = boxes::gamma_digits(x, y, ps.E);
    }
}

long sum(const IndexVec& k) {
  long t = 0;
  for (int v : k) t += v;
  return t;
}

long sum_on(const IndexVec& k, uint32_t mask) {
  long t = 0;
  for (std::size_t j = 0; j < k.size(); ++j)
    if ((mask >> j) & 1) t += k[j];
  return t;
}

long m_b(const IndexVec& k, const GammaTable& gt) {
  if (static_cast<long>(k.size()) != gt.s())
    throw std::invalid_argument("m_b: dimension mismatch");
  long count = 0;
  for (long l = 0; l < gt.n(); ++l) {
    if (l == gt.ref()) continue;
    bool ok = true;
    for (long j = 0; j < gt.s() && ok; ++j) ok = gt.gamma(l, j) >= k[j];
    count += ok;
  }
  return count;
}

long m_b(const IndexVec& k, const PointSet& ps, long ref) {
  for (int v : k)
    if (v > ps.E) throw InsufficientDigits("m_b: k exceeds digit depth E");
  return m_b(k, GammaTable(ps, ref));
}

long m_b_general(const IndexVec& k, const IndexVec& d, long c, uint32_t J,
                 uint32_t I, const GammaTable& gt) {
  const long s = gt.s();
  if (static_cast<long>(k.size()) != s || static_cast<long>(d.size()) != s)
    throw std::invalid_argument("m_b_general: dimension mismatch");
  if (I & ~J) throw std::invalid_argument("m_b_general: I must be inside J");
  long count = 0;
  for (long l = 0; l < gt.n(); ++l) {
    if (l == gt.ref()) continue;
    bool ok = true;
    for (long j = 0; j < s && ok; ++j) {
      int g = gt.gamma(l, j);
      if ((I >> j) & 1)
        ok = g >= k[j] + d[j] + c;
      else if (!((J >> j) & 1))
        ok = g >= k[j];
      else
        ok = g == d[j];
    }
    count += ok;
  }
  return count;
}

long m_b_general(const IndexVec& k, const IndexVec& d, long c, uint32_t J,
                 uint32_t I, const PointSet& ps, long ref) {
  return m_b_general(k, d, c, J, I, GammaTable(ps, ref));
}

long n_b(const IndexVec& i, const GammaTable& gt) {
  const long s = gt.s();
  long total = 0;
  IndexVec k(i);
  for (uint32_t e = 0; e < (1u << s); ++e) {
    for (long j = 0; j < s; ++j) k[j] = i[j] + ((e >> j) & 1);
    long sign = __builtin_popcount(e) % 2 == 0 ? 1 : -1;
    total += sign * m_b(k, gt);
  }
  return total;
}

long n_b(const IndexVec& i, const PointSet& ps, long ref) {
  return n_b(i, GammaTable(ps, ref));
}

Rat c_b(const IndexVec& k, const GammaTable& gt, long b) {
  return rat_pow(b, sum(k)) * rat(m_b(k, gt), gt.n() - 1);
}

Rat c_b(const IndexVec& k, const PointSet& ps) {
  return c_b(k, GammaTable(ps, 0), ps.b);
}

Rat psi_m(const IndexVec& k, const IndexVec& d, uint32_t J, uint32_t I,
          const GammaTable& gt, long b) {
  const long s = gt.s();
  uint32_t all = (s >= 32) ? ~0u : ((1u << s) - 1);
  uint32_t Istar = I | (all & ~J);
  long Jsize = __builtin_popcount(J), Isize = __builtin_popcount(I);
  long count = m_b_general(k, d, 2, J, I, gt);
  if (count == 0) return Rat(0);
  Rat v = rat_pow(b, sum_on(k, Istar) + sum_on(d, J) + Jsize + Isize);
  v *= rat_pow(Rat(b - 1), Isize - Jsize);
  v *= rat(count, gt.n() - 1);
  return v;
}

Rat psi_m(const IndexVec& k, const IndexVec& d, uint32_t J, uint32_t I,
          const PointSet& ps) {
  return psi_m(k, d, J, I, GammaTable(ps, 0), ps.b);
}

Rat m_tilde(const IndexVec& k, const IndexVec& d, uint32_t J,
            const GammaTable& gt, long b) {
  long Jsize = __builtin_popcount(J);
  Rat total(0);
  // iterate subsets I of J
  uint32_t I = 0;
  for (;;) {
    total += psi_m(k, d, J, I, gt, b);
    if (I == J) break;
    I = (I - J) & J;  // next subset
  }
  return total / rat_pow(Rat(2), Jsize);
}

Rat m_tilde(const IndexVec& k, const IndexVec& d, uint32_t J, const PointSet& ps) {
  return m_tilde(k, d, J, GammaTable(ps, 0), ps.b);
}

long m_b_net_closed(const IndexVec& k, long b, long m) {
  long K = sum(k);
  if (K > m) return 0;
  Int v = ipow(b, m - K) - 1;
  return v.get_si();
}

Int m_b_general_net_closed_scalar(long b, long m, long kIstar, long dJ, long c,
                                  long Isize, long Jsize) {
  long w = Jsize - Isize;  // |I*^c| = |J ∩ I^c|
  long M = m - kIstar - dJ - c * Isize;
  Int total(0);
  for (long j = 0; j <= w; ++j) {
    Int term(0);
    if (M - j > 0) term = ipow(b, M - j) - 1;
    if (j % 2 == 0)
      total += binom(w, j) * term;
    else
      total -= binom(w, j) * term;
  }
  return total;
}

Int m_b_general_net_closed(const IndexVec& k, const IndexVec& d, long c,
                           uint32_t J, uint32_t I, long b, long m) {
  const long s = static_cast<long>(k.size());
  uint32_t all = (s >= 32) ? ~0u : ((1u << s) - 1);
  uint32_t Istar = I | (all & ~J);
  return m_b_general_net_closed_scalar(b, m, sum_on(k, Istar), sum_on(d, J), c,
                                       __builtin_popcount(I),
                                       __builtin_popcount(J));
}

Rat m_tilde_net_closed(const IndexVec& k, const IndexVec& d, uint32_t J, long b,
                       long m, long s) {
  uint32_t all = (s >= 32) ? ~0u : ((1u << s) - 1);
  long Jsize = __builtin_popcount(J);
  Int nm1 = ipow(b, m) - 1;
  Rat total(0);
  uint32_t I = 0;
  for (;;) {
    uint32_t Istar = I | (all & ~J);
    long Isize = __builtin_popcount(I);
    Int count = m_b_general_net_closed(k, d, 2, J, I, b, m);
    if (count != 0) {
      Rat v = rat_pow(b, sum_on(k, Istar) + sum_on(d, J) + Jsize + Isize);
      v *= rat_pow(Rat(b - 1), Isize - Jsize);
      v *= rat(count, nm1);
      total += v;
    }
    if (I == J) break;
    I = (I - J) & J;
  }
  return total / rat_pow(Rat(2), Jsize);
}

namespace {

// Enumerates all s-vectors with |v| <= cap restricted to the subset mask
// (coordinates outside the mask stay 0).
void for_each_vec(long s, uint32_t mask, long cap,
                  const std::function<void(const IndexVec&)>& fn) {
  IndexVec v(s, 0);
  std::function<void(long, long)> rec = [&](long j, long rem) {
    if (j == s) {
      fn(v);
      return;
    }
    if (!((mask >> j) & 1)) {
      v[j] = 0;
      rec(j + 1, rem);
      return;
    }
    for (long x = 0; x <= rem; ++x) {
      v[j] = static_cast<int>(x);
      rec(j + 1, rem - x);
    }
  };
  rec(0, cap);
}

}  // namespace

CountingReport diagnose(const PointSet& ps, long kmax, long dmax) {
  CountingReport rep;
  rep.b = ps.b;
  rep.s = ps.s;
  rep.m = ps.m;
  rep.n = ps.n;
  rep.verified_net = verify_tms_net(ps, 0);
  GammaTable gt(ps, 0);
  uint32_t all = (ps.s >= 32) ? ~0u : ((1u << ps.s) - 1);
  for (uint32_t J = 0;; J = ((J - all) & all)) {
    for_each_vec(ps.s, all, kmax, [&](const IndexVec& k) {
      for_each_vec(ps.s, J, dmax, [&](const IndexVec& d) {
        Rat mt = m_tilde(k, d, J, gt, ps.b);
        uint32_t I = 0;
        for (;;) {
          CountingRow row;
          row.k = k;
          row.d = d;
          row.J = J;
          row.I = I;
          row.brute = m_b_general(k, d, 2, J, I, gt);
          row.closed_form = m_b_general_net_closed(k, d, 2, J, I, ps.b, ps.m);
          row.closed_is_exact = rep.verified_net;
          row.cb = c_b(k, gt, ps.b);
          row.psi = psi_m(k, d, J, I, gt, ps.b);
          row.mtilde = mt;
          row.bound_ok = mt <= 1;
          rep.rows.push_back(std::move(row));
          if (I == J) break;
          I = (I - J) & J;
        }
      });
    });
    if (J == all) break;
  }
  return rep;
}

namespace {

std::string vec_str(const IndexVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s + ")";
}

std::string mask_str(uint32_t mask, long s) {
  std::string out = "{";
  bool first = true;
  for (long j = 0; j < s; ++j)
    if ((mask >> j) & 1) {
      if (!first) out += ';';
      out += std::to_string(j + 1);
      first = false;
    }
  return out + "}";
}

}  // namespace

void write_csv(const CountingReport& report, std::ostream& os,
               const std::string& provenance) {
  if (!provenance.empty()) os << "# " << provenance << '\n';
  os << "# b=" << report.b << " s=" << report.s << " m=" << report.m
     << " n=" << report.n << " verified_net=" << report.verified_net << '\n';
  os << "kvec,dvec,J,I,brute,closed_form,C_b,C_b_float,psi,psi_float,"
        "m_tilde,m_tilde_float,bound_ok\n";
  for (const auto& r : report.rows) {
    os << vec_str(r.k) << ',' << vec_str(r.d) << ',' << mask_str(r.J, report.s)
       << ',' << mask_str(r.I, report.s) << ',' << r.brute << ','
       << r.closed_form.get_str() << ',' << rat_str(r.cb) << ','
       << rat_double(r.cb) << ',' << rat_str(r.psi) << ',' << rat_double(r.psi)
       << ',' << rat_str(r.mtilde) << ',' << rat_double(r.mtilde) << ','
       << (r.bound_ok ? 1 : 0) << '\n';
  }
}

}  // namespace negadep::counting
