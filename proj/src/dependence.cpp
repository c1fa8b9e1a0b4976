#include "negadep/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "negadep/parallel.hpp"

namespace negadep::dependence {

using boxes::Box;
using boxes::BoxInterval;
using counting::IndexVec;

Calculator::Calculator(PointSet ps)
    : ps_(std::move(ps)), gt_(ps_, 0), verified_(verify_tms_net(ps_, 0)) {}

Rat Calculator::h_elementary(const IndexVec& k) const {
  return rat(counting::m_b(k, gt_), ps_.n - 1) * rat_pow(ps_.b, -counting::sum(k));
}

Rat Calculator::m_tilde_cached(const IndexVec& k, const IndexVec& d,
                               uint32_t J) const {
  std::vector<int> key;
  key.reserve(1 + k.size() + d.size());
  key.push_back(static_cast<int>(J));
  key.insert(key.end(), k.begin(), k.end());
  for (std::size_t j = 0; j < d.size(); ++j)
    key.push_back((J >> j) & 1 ? d[j] : 0);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Rat v = counting::m_tilde(k, d, J, gt_, ps_.b);
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.emplace(std::move(key), std::move(v)).first->second;
}

Rat Calculator::h_anchored(const Box& A) const {
  for (const auto& f : A.f)
    if (f.a != 0) throw boxes::NotAnchored("h_anchored requires an origin-anchored box");
  // Anchored boxes are a special case of the product decomposition: every
  // coordinate contributes only tau coefficients, so J stays empty and
  // m~_b(k,d,{}) = C_b(k).
  return h_unanchored(A);
}

Rat Calculator::h_unanchored(const Box& A) const {
  if (A.b != ps_.b) throw boxes::BaseMismatch("box base differs from point set");
  auto pc = boxes::product_coeffs(A);
  IndexVec d(pc.d.begin(), pc.d.end());
  Rat H(0);
  for (const auto& term : pc.terms) {
    IndexVec k(term.k.begin(), term.k.end());
    H += term.coeff * m_tilde_cached(k, d, term.J);
  }
  return H;
}

Rat Calculator::h_via_psi(const Box& A) const {
  if (A.b != ps_.b) throw boxes::BaseMismatch("box base differs from point set");
  const long s = ps_.s;
  const long b = ps_.b;
  // gamma between distinct points of a digital net is at most m-1 per
  // coordinate, so n_b vanishes outside [0, m-1]^s.
  long cap = std::max<long>(ps_.m, 1);
  std::vector<boxes::VolumeVector> vv;
  vv.reserve(s);
  for (const auto& f : A.f) vv.push_back(boxes::volume_vector(f));
  Rat H(0);
  IndexVec i(s, 0);
  Rat scale = rat_pow(Rat(b) / Rat(b - 1), s);
  std::function<void(long)> rec = [&](long j) {
    if (j == s) {
      long nb = counting::n_b(i, gt_);
      if (nb == 0) return;
      Rat psi = scale * rat_pow(b, counting::sum(i)) * rat(nb, ps_.n - 1);
      Rat v(1);
      for (long t = 0; t < s; ++t) v *= vv[t].entry(i[t]);
      H += psi * v;
      return;
    }
    for (long x = 0; x < cap; ++x) {
      i[j] = static_cast<int>(x);
      rec(j + 1);
    }
  };
  rec(0);
  return H;
}

namespace {

/// Exact containment test of truncated digit expansions against one
/// interval: points carry E digits, endpoints may be arbitrary rationals.
struct IntervalDigitTest {
  std::vector<uint8_t> lo, hi;
  bool lo_has_tail = false;   // endpoint a has nonzero digits beyond E
  bool hi_has_tail = false;
  bool hi_is_one = false;

  IntervalDigitTest(const BoxInterval& itv, long E) {
    lo = expand(itv.b, itv.a, E, lo_has_tail);
    if (itv.A == 1) {
      hi_is_one = true;
    } else {
      hi = expand(itv.b, itv.A, E, hi_has_tail);
    }
  }

  static std::vector<uint8_t> expand(long b, const Rat& x, long E, bool& tail) {
    std::vector<uint8_t> d(E, 0);
    Int num = x.get_num(), den = x.get_den();
    for (long l = 0; l < E; ++l) {
      num *= b;
      Int q = num / den;
      d[l] = static_cast<uint8_t>(q.get_si());
      num -= q * den;
    }
    tail = num != 0;
    return d;
  }

  bool contains(const uint8_t* x, long E) const {
    int cl = std::memcmp(x, lo.data(), E);
    if (cl < 0) return false;
    if (cl == 0 && lo_has_tail) return false;  // x equals the truncation of a > x
    if (hi_is_one) return true;
    int ch = std::memcmp(x, hi.data(), E);
    if (ch > 0) return false;
    if (ch == 0 && !hi_has_tail) return false;  // x == A exactly
    return true;
  }
};

struct BoxDigitTest {
  std::vector<IntervalDigitTest> per_coord;
  long E;

  BoxDigitTest(const Box& A, long E_) : E(E_) {
    per_coord.reserve(A.f.size());
    for (const auto& f : A.f) per_coord.emplace_back(f, E_);
  }

  long count_inside(const PointSet& ps) const {
    long N = 0;
    for (long i = 0; i < ps.n; ++i) {
      bool in = true;
      for (long j = 0; j < ps.s && in; ++j)
        in = per_coord[j].contains(
            ps.digits.data() + (static_cast<std::size_t>(i) * ps.s + j) * ps.E,
            ps.E);
      N += in;
    }
    return N;
  }
};

std::vector<long> replicate_counts(const Box& A, const PointSet& ps,
                                   Randomizer how, long R, uint64_t seed) {
  if (R < 1) throw std::invalid_argument("need at least one replicate");
  BoxDigitTest test(A, ps.E);
  std::vector<long> counts(R);
  parallel_for(static_cast<std::size_t>(R), [&](std::size_t rep) {
    ScrambleSeed sd{seed, static_cast<uint64_t>(rep)};
    PointSet rnd = how == Randomizer::scramble ? owen_scramble(ps, sd)
                                               : digital_shift(ps, sd);
    counts[rep] = test.count_inside(rnd);
  });
  return counts;
}

}  // namespace

PairProbability h_empirical(const Box& A, const PointSet& ps, Randomizer how,
                            long R, uint64_t seed) {
  if (R < 2) throw std::invalid_argument("h_empirical: R >= 2");
  auto counts = replicate_counts(A, ps, how, R, seed);
  const double denom = static_cast<double>(ps.n) * (ps.n - 1);
  double mean = 0;
  for (long c : counts) mean += (static_cast<double>(c) * c - c) / denom;
  mean /= R;
  double ss = 0;
  for (long c : counts) {
    double e = (static_cast<double>(c) * c - c) / denom - mean;
    ss += e * e;
  }
  double sd = std::sqrt(ss / (R - 1));
  return {mean, sd / std::sqrt(static_cast<double>(R)), R};
}

std::vector<double> replicate_means(const Box& A, const PointSet& ps,
                                    Randomizer how, long R, uint64_t seed) {
  auto counts = replicate_counts(A, ps, how, R, seed);
  std::vector<double> means(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    means[i] = static_cast<double>(counts[i]) / ps.n;
  return means;
}

IndexReport pairwise_index(const PointSet& ps, const std::vector<Box>& family,
                           bool exact, Randomizer how, long R, uint64_t seed) {
  if (family.empty()) throw EmptyFamily("pairwise_index: empty box family");
  IndexReport rep;
  rep.exact = exact;
  rep.gaps.resize(family.size());
  if (exact) {
    Calculator calc(ps);
    rep.verified_net = calc.verified_net();
    parallel_for(family.size(), [&](std::size_t i) {
      BoxGap g;
      g.box = family[i];
      Rat vol = g.box.volume();
      g.vol2 = vol * vol;
      g.h = calc.h_unanchored(g.box);
      g.gap = g.h - g.vol2;
      g.exact = true;
      rep.gaps[i] = std::move(g);
    });
  } else {
    rep.verified_net = verify_tms_net(ps, 0);
    for (std::size_t i = 0; i < family.size(); ++i) {
      BoxGap g;
      g.box = family[i];
      Rat vol = g.box.volume();
      g.vol2 = vol * vol;
      auto est = h_empirical(g.box, ps, how, R, seed + i);
      g.h_emp = est.estimate;
      g.se = est.se;
      g.exact = false;
      g.gap = Rat(0);
      rep.gaps[i] = std::move(g);
    }
  }
  if (rep.exact) {
    for (std::size_t i = 0; i < rep.gaps.size(); ++i)
      if (rep.argmax < 0 || rep.gaps[i].gap > rep.max_gap) {
        rep.max_gap = rep.gaps[i].gap;
        rep.argmax = static_cast<long>(i);
      }
  } else {
    double best = 0;
    for (std::size_t i = 0; i < rep.gaps.size(); ++i) {
      double g = rep.gaps[i].h_emp - rat_double(rep.gaps[i].vol2);
      if (rep.argmax < 0 || g > best) {
        best = g;
        rep.argmax = static_cast<long>(i);
      }
    }
  }
  return rep;
}

VarianceReport variance_compare(const Box& A, const PointSet& ps, Randomizer how,
                                long R, uint64_t seed) {
  VarianceReport vr;
  Calculator calc(ps);
  vr.mu = A.volume();
  vr.h = calc.h_unanchored(A);
  Rat n(ps.n);
  vr.mc_bound = vr.mu * (Rat(1) - vr.mu) / n;
  vr.decomposition_term = (vr.h - vr.mu * vr.mu) * Rat(ps.n - 1) / n;
  vr.var_analytic = vr.mc_bound + vr.decomposition_term;
  vr.var_le_mc = vr.var_analytic <= vr.mc_bound;
  if (R >= 2) {
    auto means = replicate_means(A, ps, how, R, seed);
    double mean = 0;
    for (double m : means) mean += m;
    mean /= R;
    double m2 = 0, m4 = 0;
    for (double m : means) {
      double e = m - mean;
      m2 += e * e;
      m4 += e * e * e * e;
    }
    double s2 = m2 / (R - 1);
    m4 /= R;
    double var_of_s2 = (m4 - (R - 3.0) / (R - 1.0) * s2 * s2) / R;
    vr.var_empirical = s2;
    vr.se_var = std::sqrt(std::max(var_of_s2, 0.0));
    vr.replicates = R;
  }
  return vr;
}

ShiftExample shift_example() {
  ShiftExample ex;
  const long b = 5, s = 2, E = 21;
  std::vector<std::vector<Rat>> pts;
  for (long i = 0; i < 5; ++i) {
    pts.push_back({rat(i, 5), rat(i, 5)});
    pts.push_back({rat(i, 5), rat((i + 1) % 5, 5)});
  }
  ex.points = PointSet::from_values(b, s, pts, E);
  ex.box = Box(b, {BoxInterval(b, Rat(0), rat(1, 10)),
                   BoxInterval(b, Rat(0), rat(2, 5))});
  // Conditioning argument: the two first digits of the shift agree with
  // probability 1/5; the pair landing in the two stacked squares is one of
  // the 45 unordered pairs; the remaining digits put both points inside A
  // with probability 1/2.
  ex.h_shift_exact = rat(1, 5) * rat(1, 45) * rat(1, 2);
  Rat vol = ex.box.volume();
  ex.vol2 = vol * vol;
  // The set is specified at one-digit resolution, so the published counting
  // numbers read digit agreement at depth 1 (tied coordinates count as one
  // shared digit, not infinitely many).
  auto cb_at_depth1 = [&](const IndexVec& k) -> Rat {
    long count = 0;
    for (std::size_t l = 1; l < pts.size(); ++l) {
      bool ok = true;
      for (long j = 0; j < s && ok; ++j) {
        int g = boxes::gamma_b(b, pts[0][j], pts[l][j]);
        int trunc = g == boxes::kGammaInf ? 1 : std::min(g, 1);
        ok = trunc >= k[j];
      }
      count += ok;
    }
    return rat_pow(b, counting::sum(k)) * rat(count, static_cast<long>(pts.size()) - 1);
  };
  for (IndexVec k : std::vector<IndexVec>{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}})
    ex.cb_table.emplace_back(k, cb_at_depth1(k));
  return ex;
}

BoxInterval random_interval(long b, long depth, uint64_t& state) {
  auto next = [&state] {
    state = detail::splitmix64(state);
    return state;
  };
  Int grid = ipow(b, depth);
  long g = grid.get_si();
  for (;;) {
    long u = static_cast<long>(next() % static_cast<uint64_t>(g + 1));
    long v = static_cast<long>(next() % static_cast<uint64_t>(g + 1));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    return BoxInterval(b, rat(u, g), rat(v, g));
  }
}

std::vector<Box> random_box_family(long b, long s, long depth, long count,
                                   uint64_t seed) {
  std::vector<Box> out;
  out.reserve(count);
  uint64_t state = detail::splitmix64(seed ^ 0x5bf0361c75a13feULL);
  for (long i = 0; i < count; ++i) {
    std::vector<BoxInterval> fs;
    fs.reserve(s);
    for (long j = 0; j < s; ++j) fs.push_back(random_interval(b, depth, state));
    out.emplace_back(b, std::move(fs));
  }
  return out;
}

}  // namespace negadep::dependence
