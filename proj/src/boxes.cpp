#include "negadep/boxes.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace negadep::boxes {

int gamma_b(long b, const Rat& x, const Rat& y) {
  if (x < 0 || x >= 1 || y < 0 || y >= 1)
    throw std::invalid_argument("gamma_b: arguments must lie in [0,1)");
  if (x == y) return kGammaInf;
  Rat xx = x, yy = y;
  int i = 0;
  for (;;) {
    xx *= b;
    yy *= b;
    Int dx = rat_floor(xx), dy = rat_floor(yy);
    if (dx != dy) return i;
    xx -= Rat(dx);
    yy -= Rat(dy);
    ++i;
  }
}

int gamma_digits(const uint8_t* x, const uint8_t* y, long len) {
  for (long l = 0; l < len; ++l)
    if (x[l] != y[l]) return static_cast<int>(l);
  return kGammaInf;
}

long badic_depth(long b, const Rat& x) {
  Int den = x.get_den();
  long p = 0;
  while (den != 1) {
    Int g;
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), Int(b).get_mpz_t());
    if (g == 1)
      throw std::domain_error("value " + x.get_str() + " is not base-" +
                              std::to_string(b) + " rational");
    den /= g;
    ++p;
  }
  return p;
}

bool is_badic(long b, const Rat& x) {
  try {
    badic_depth(b, x);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

BRational BRational::from_rat(long b, const Rat& x) {
  if (x < 0 || x > 1) throw std::invalid_argument("BRational: value outside [0,1]");
  BRational r;
  r.depth = badic_depth(b, x);
  r.num = Int(x * Rat(ipow(b, r.depth)));
  return r;
}

Rat BRational::value(long b) const { return rat(num, ipow(b, depth)); }

BoxInterval::BoxInterval(long base, Rat lo, Rat hi) : b(base), a(std::move(lo)), A(std::move(hi)) {
  if (b < 2) throw std::invalid_argument("BoxInterval: base must be >= 2");
  if (a < 0 || A > 1 || !(a < A))
    throw EmptyInterval("interval [" + a.get_str() + "," + A.get_str() +
                        ") is empty or out of range");
}

long BoxInterval::depth() const {
  return std::max(badic_depth(b, a), badic_depth(b, A));
}

Box::Box(long base, std::vector<BoxInterval> factors) : b(base), f(std::move(factors)) {
  if (f.empty()) throw EmptyInterval("box has no factors");
  for (const auto& itv : f)
    if (itv.b != b) throw BaseMismatch("box factor base mismatch");
}

Rat Box::volume() const {
  Rat v(1);
  for (const auto& itv : f) v *= itv.length();
  return v;
}

bool Box::contains(const std::vector<Rat>& x) const {
  if (static_cast<long>(x.size()) != s()) return false;
  for (long j = 0; j < s(); ++j)
    if (!f[j].contains(x[j])) return false;
  return true;
}

Rat VolumeVector::entry(long i) const {
  if (i < 0) return Rat(0);
  if (i <= q()) return prefix[i];
  return tail_c * rat_pow(b, -i);
}

Rat VolumeVector::tail_sum(long r) const {
  if (r < 0) r = 0;
  if (r > q()) return tail_c * rat_pow(b, 1 - r) / Rat(b - 1);
  Rat s(0);
  for (long i = r; i <= q(); ++i) s += prefix[i];
  return s + tail_c * rat_pow(b, -q()) / Rat(b - 1);
}

bool VolumeVector::operator==(const VolumeVector& o) const {
  if (b != o.b || tail_c != o.tail_c) return false;
  long qm = std::max(q(), o.q());
  for (long i = 0; i <= qm; ++i)
    if (entry(i) != o.entry(i)) return false;
  return true;
}

namespace {

// sum over depth-i cells c of len(A ∩ c) * len(B ∩ c); exact, O(1) cells
// inspected (only the four boundary cells can be partial).
Rat overlap_sum(const BoxInterval& A, const BoxInterval& B, long i) {
  const long b = A.b;
  Rat bi(ipow(b, i));
  Rat w = rat(Int(1), ipow(b, i));
  Int loA = rat_floor(A.a * bi), hiA = rat_ceil(A.A * bi) - 1;
  Int loB = rat_floor(B.a * bi), hiB = rat_ceil(B.A * bi) - 1;
  Int lo = loA > loB ? loA : loB;
  Int hi = hiA < hiB ? hiA : hiB;
  if (lo > hi) return Rat(0);
  std::set<Int> special;
  for (const Int& j : {loA, hiA, loB, hiB})
    if (j >= lo && j <= hi) special.insert(j);
  Rat total = Rat(Int(hi - lo + 1 - static_cast<long>(special.size()))) * w * w;
  for (const Int& j : special) {
    Rat cl = Rat(j) * w;
    Rat cu = cl + w;
    Rat la = (A.A < cu ? A.A : cu) - (A.a > cl ? A.a : cl);
    Rat lb = (B.A < cu ? B.A : cu) - (B.a > cl ? B.a : cl);
    total += la * lb;
  }
  return total;
}

void trim_zeros(std::vector<Rat>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

}  // namespace

VolumeVector volume_vector_pair(const BoxInterval& A, const BoxInterval& B) {
  if (A.b != B.b) throw BaseMismatch("volume_vector_pair: base mismatch");
  const long b = A.b;
  long q = std::max(A.depth(), B.depth());
  VolumeVector V;
  V.b = b;
  V.prefix.resize(q + 1);
  Rat Si = overlap_sum(A, B, 0);
  for (long i = 0; i <= q; ++i) {
    Rat Snext = overlap_sum(A, B, i + 1);
    V.prefix[i] = Si - Snext;
    Si = Snext;
  }
  Rat lo = A.a > B.a ? A.a : B.a;
  Rat hi = A.A < B.A ? A.A : B.A;
  Rat common = hi > lo ? hi - lo : Rat(0);
  V.tail_c = common * Rat(b - 1) / Rat(b);
  return V;
}

VolumeVector volume_vector(const BoxInterval& A) { return volume_vector_pair(A, A); }

Rat volume_vector_box(const Box& A, const std::vector<long>& i) {
  if (static_cast<long>(i.size()) != A.s())
    throw std::invalid_argument("volume_vector_box: index dimension mismatch");
  Rat v(1);
  for (long j = 0; j < A.s(); ++j) {
    if (v == 0) return v;
    v *= volume_vector(A.f[j]).entry(i[j]);
  }
  return v;
}

UnanchoredForm parse_unanchored(const BoxInterval& itv) {
  const long b = itv.b;
  if (itv.a == 0 && itv.A == 1)
    throw FullInterval("[0,1) routes to the anchored decomposition");
  if (itv.a == 0) throw AnchoredInterval("interval anchored at the origin");
  if (itv.A == 1)
    throw AnchoredInterval("right endpoint 1; reflected to the anchored path");
  // Deepest cell whose interior contains the closure of the interval.
  long delta = 0;
  for (;;) {
    Rat scale(ipow(b, delta + 1));
    Rat ta = itv.a * scale;
    Int h = rat_floor(ta);
    if (ta > Rat(h) && itv.A * scale < Rat(h) + 1)
      ++delta;
    else
      break;
  }
  const long r = delta + 1;
  Rat cellw = rat(Int(1), ipow(b, r - 1));
  Int h = rat_floor(itv.a / cellw);
  Rat arel = itv.a - Rat(h) * cellw;
  Rat Rrel = itv.A - Rat(h) * cellw;
  Rat br(ipow(b, r));
  Int g = rat_ceil(arel * br);
  Int G = rat_floor(Rrel * br);
  UnanchoredForm f;
  f.r = r;
  f.h = h;
  f.g = g.get_si();
  f.G = G.get_si();
  f.z = Rat(g) / br - arel;
  f.Z = Rrel - Rat(G) / br;
  Rat cw = Rat(1) / br;
  if (!(1 <= f.g && f.g <= f.G && f.G <= b - 1) || f.z < 0 || f.z >= cw ||
      f.Z < 0 || f.Z >= cw)
    throw std::logic_error("parse_unanchored: minimal form violated");
  return f;
}

Rat DecompCoefficients::sum() const {
  Rat s(0);
  for (const auto& x : alpha) s += x;
  for (const auto& x : tau) s += x;
  return s;
}

namespace {

DecompCoefficients anchored_from_volume(const VolumeVector& V, long b) {
  DecompCoefficients dc;
  dc.kind = DecompCoefficients::Kind::anchored;
  dc.b = b;
  dc.r = 1;
  const long p = V.q();
  dc.tau.assign(p + 1, Rat(0));
  Rat bm1(b - 1);
  dc.tau[0] = Rat(b) * V.entry(0) / bm1;
  for (long k = 1; k <= p; ++k)
    dc.tau[k] = (Rat(b) * V.entry(k) - V.entry(k - 1)) / bm1;
  for (const auto& t : dc.tau)
    if (t < 0) throw std::logic_error("anchored coefficients must be nonnegative");
  trim_zeros(dc.tau);
  return dc;
}

}  // namespace

DecompCoefficients anchored_coeffs(const BoxInterval& A) {
  if (A.a != 0) throw NotAnchored("anchored_coeffs requires [0, x)");
  return anchored_from_volume(volume_vector(A), A.b);
}

DecompCoefficients unanchored_decompose(const BoxInterval& itv) {
  const long b = itv.b;
  if (itv.a == 0) return anchored_coeffs(itv);
  if (itv.A == 1) {
    // [a,1) has the volume vector of [0,1-a): reflection within [0,1)
    // preserves the number of shared digits almost everywhere.
    BoxInterval refl(b, Rat(0), Rat(1) - itv.a);
    return anchored_coeffs(refl);
  }
  UnanchoredForm form = parse_unanchored(itv);
  VolumeVector V = volume_vector(itv);
  const long r = form.r;
  const long p = V.q();
  auto Vi = [&](long i) { return V.entry(i); };
  DecompCoefficients dc;
  dc.kind = DecompCoefficients::Kind::unanchored;
  dc.b = b;
  dc.r = r;
  Rat bm1(b - 1);
  if (Vi(r - 1) <= Rat(b) * Vi(r)) {
    dc.tau.assign(p + 1, Rat(0));
    for (long k = std::max<long>(r - 1, 0); k <= p; ++k)
      dc.tau[k] = (Rat(b) * Vi(k) - Vi(k - 1)) / bm1;
  } else {
    std::vector<Rat> taubar(p + 1, Rat(0));
    if (r <= p) taubar[r] = Rat(b) * Vi(r) / bm1;
    for (long k = r + 1; k <= p; ++k)
      taubar[k] = (Rat(b) * Vi(k) - Vi(k - 1)) / bm1;
    // Greedy allocation: abar_k/2 = min(taubar_k, remaining deficit),
    // feasible by Lemma (iii) of the volume-vector properties.
    Rat deficit = Vi(r - 1) - Rat(b) * Vi(r);
    std::vector<Rat> abar(p + 1, Rat(0));
    Rat rem = deficit;
    for (long k = r + 1; k <= p && rem > 0; ++k) {
      Rat take = taubar[k] < rem ? taubar[k] : rem;
      abar[k] = Rat(2) * take;
      rem -= take;
    }
    if (rem != 0)
      throw std::logic_error("unanchored_decompose: greedy allocation infeasible");
    dc.tau.assign(p + 1, Rat(0));
    if (r - 1 >= 0 && r <= p) dc.tau[r - 1] = Rat(b) * taubar[r];
    for (long k = r + 1; k <= p; ++k) dc.tau[k] = taubar[k] - abar[k] / 2;
    dc.alpha.assign(std::max<long>(p - r, 0) + 1, Rat(0));
    for (long k = r + 1; k <= p; ++k) dc.alpha[k - (r + 1)] = abar[k];
    trim_zeros(dc.alpha);
  }
  for (const auto& t : dc.tau)
    if (t < 0) throw std::logic_error("decomposition tau must be nonnegative");
  for (const auto& a : dc.alpha)
    if (a < 0) throw std::logic_error("decomposition alpha must be nonnegative");
  trim_zeros(dc.tau);
  return dc;
}

VolumeVector reconstruct_volume(const DecompCoefficients& dc) {
  const long b = dc.b;
  const long r = dc.r;
  long last_tau = static_cast<long>(dc.tau.size()) - 1;
  long last_alpha = static_cast<long>(dc.alpha.size()) - 1;
  long q = std::max<long>({last_tau, last_alpha >= 0 ? last_alpha + r + 1 : 0, r - 1, 0});
  VolumeVector V;
  V.b = b;
  V.prefix.assign(q + 1, Rat(0));
  Rat bm1(b - 1);
  for (long k = 0; k <= last_tau; ++k) {
    if (dc.tau[k] == 0) continue;
    for (long i = k; i <= q; ++i)
      V.prefix[i] += dc.tau[k] * bm1 * rat_pow(b, -(i - k + 1));
  }
  for (long k = 0; k <= last_alpha; ++k) {
    if (dc.alpha[k] == 0) continue;
    V.prefix[r - 1] += dc.alpha[k] / 2;
    for (long i = k + r + 1; i <= q; ++i)
      V.prefix[i] += dc.alpha[k] * bm1 / (Rat(2) * rat_pow(b, i - k - r));
  }
  V.tail_c = Rat(0);
  for (long k = 0; k <= last_tau; ++k)
    V.tail_c += dc.tau[k] * bm1 * rat_pow(b, k - 1);
  for (long k = 0; k <= last_alpha; ++k)
    V.tail_c += dc.alpha[k] * bm1 * rat_pow(b, k + r) / 2;
  return V;
}

BoxInterval elementary_unanchored(long b, long d, long k) {
  if (d < 0 || k < 0) throw std::invalid_argument("elementary_unanchored: d,k >= 0");
  Rat center = rat(Int(1), ipow(b, d + 1));
  Rat half = rat(Int(1), ipow(b, 2 + k + d));
  return BoxInterval(b, center - half, center + half);
}

BoxInterval elementary_unanchored_half(long b, long d, long k, int half) {
  Rat center = rat(Int(1), ipow(b, d + 1));
  Rat hw = rat(Int(1), ipow(b, 2 + k + d));
  if (half == 1) return BoxInterval(b, center - hw, center);
  if (half == 2) return BoxInterval(b, center, center + hw);
  throw std::invalid_argument("half must be 1 or 2");
}

BoxInterval elementary_anchored(long b, long k) {
  if (k < 0) throw std::invalid_argument("elementary_anchored: k >= 0");
  return BoxInterval(b, Rat(0), rat(Int(1), ipow(b, k)));
}

Rat ProductCoefficients::total() const {
  Rat t(0);
  for (const auto& term : terms) t += term.coeff;
  return t;
}

ProductCoefficients product_coeffs(const Box& A) {
  const long s = A.s();
  ProductCoefficients pc;
  pc.s = s;
  pc.d.resize(s);
  std::vector<DecompCoefficients> per(s);
  for (long j = 0; j < s; ++j) {
    per[j] = unanchored_decompose(A.f[j]);
    pc.d[j] = static_cast<int>(per[j].r - 1);
  }
  // Cartesian product over nonzero (k, alpha|tau) choices per coordinate.
  struct Choice {
    int k;
    bool is_alpha;
    Rat value;
  };
  std::vector<std::vector<Choice>> choices(s);
  for (long j = 0; j < s; ++j) {
    for (long k = 0; k < static_cast<long>(per[j].tau.size()); ++k)
      if (per[j].tau[k] != 0)
        choices[j].push_back({static_cast<int>(k), false, per[j].tau[k]});
    for (long k = 0; k < static_cast<long>(per[j].alpha.size()); ++k)
      if (per[j].alpha[k] != 0)
        choices[j].push_back({static_cast<int>(k), true, per[j].alpha[k]});
  }
  std::vector<int> kvec(s, 0);
  std::vector<std::size_t> pos(s, 0);
  std::function<void(long, uint32_t, const Rat&)> rec = [&](long j, uint32_t J,
                                                            const Rat& coeff) {
    if (j == s) {
      pc.terms.push_back({kvec, J, coeff});
      return;
    }
    for (const auto& c : choices[j]) {
      kvec[j] = c.k;
      rec(j + 1, c.is_alpha ? (J | (1u << j)) : J, coeff * c.value);
    }
  };
  rec(0, 0, Rat(1));
  return pc;
}

namespace {

void validate_region(const RegionSpec& spec) {
  if (spec.s < 1 || spec.s > 30) throw MalformedRegion("bad dimension");
  if (static_cast<long>(spec.k.size()) != spec.s ||
      static_cast<long>(spec.d.size()) != spec.s)
    throw MalformedRegion("k/d dimension mismatch");
  for (long j = 0; j < spec.s; ++j)
    if (spec.k[j] < 0 || spec.d[j] < 0) throw MalformedRegion("negative index");
  uint32_t all = spec.s >= 32 ? ~0u : ((1u << spec.s) - 1);
  if (spec.J & ~all) throw MalformedRegion("J outside coordinate range");
  if (spec.hasI && (spec.I & ~spec.J)) throw MalformedRegion("I must be inside J");
  if (spec.hasK && (spec.K & ~spec.J)) throw MalformedRegion("K must be inside J");
  bool needI = spec.kind == RegionKind::E || spec.kind == RegionKind::Etilde ||
               spec.kind == RegionKind::F || spec.kind == RegionKind::FK ||
               spec.kind == RegionKind::F1 || spec.kind == RegionKind::F2;
  bool needK = spec.kind == RegionKind::Etilde || spec.kind == RegionKind::FK;
  if (needI && !spec.hasI) throw MalformedRegion("region requires subset I");
  if (needK && !spec.hasK) throw MalformedRegion("region requires subset K");
}

}  // namespace

std::vector<std::pair<BoxInterval, BoxInterval>> region_factors(const RegionSpec& spec) {
  validate_region(spec);
  const long b = spec.b;
  BoxInterval full(b, Rat(0), Rat(1));
  std::vector<std::pair<BoxInterval, BoxInterval>> out;
  out.reserve(spec.s);
  for (long j = 0; j < spec.s; ++j) {
    bool inJ = (spec.J >> j) & 1, inI = (spec.I >> j) & 1, inK = (spec.K >> j) & 1;
    auto one_k = [&] { return elementary_anchored(b, spec.k[j]); };
    auto one_kd2 = [&] { return elementary_anchored(b, spec.k[j] + spec.d[j] + 2); };
    auto Y = [&] { return elementary_unanchored(b, spec.d[j], spec.k[j]); };
    auto Yh = [&](int h) {
      return elementary_unanchored_half(b, spec.d[j], spec.k[j], h);
    };
    switch (spec.kind) {
      case RegionKind::D:
        out.emplace_back(inJ ? Y() : one_k(), inJ ? Y() : one_k());
        break;
      case RegionKind::E:
        if (inI)
          out.emplace_back(one_kd2(), one_kd2());
        else if (!inJ)
          out.emplace_back(one_k(), one_k());
        else
          out.emplace_back(full, full);
        break;
      case RegionKind::Etilde:
        if (inI && inK)
          out.emplace_back(Yh(2), Yh(2));
        else if (inI)
          out.emplace_back(Yh(1), Yh(1));
        else if (!inJ)
          out.emplace_back(one_k(), one_k());
        else
          out.emplace_back(full, full);
        break;
      case RegionKind::F:
        if (inI)
          out.emplace_back(one_kd2(), one_kd2());
        else if (!inJ)
          out.emplace_back(one_k(), one_k());
        else
          out.emplace_back(Yh(1), Yh(2));
        break;
      case RegionKind::FK:
        if (inI && inK)
          out.emplace_back(Yh(2), Yh(2));
        else if (inI)
          out.emplace_back(Yh(1), Yh(1));
        else if (!inJ)
          out.emplace_back(one_k(), one_k());
        else if (inK)
          out.emplace_back(Yh(1), Yh(2));
        else
          out.emplace_back(Yh(2), Yh(1));
        break;
      case RegionKind::F1:
        if (inI)
          out.emplace_back(one_kd2(), full);
        else if (!inJ)
          out.emplace_back(one_k(), full);
        else
          out.emplace_back(Yh(1), full);
        break;
      case RegionKind::F2:
        if (inI)
          out.emplace_back(full, one_kd2());
        else if (!inJ)
          out.emplace_back(full, one_k());
        else
          out.emplace_back(full, Yh(2));
        break;
    }
  }
  return out;
}

Rat region_volume(const RegionSpec& spec) {
  validate_region(spec);
  long ksum = 0, kd2J = 0, Jsize = 0;
  for (long j = 0; j < spec.s; ++j) {
    ksum += spec.k[j];
    if ((spec.J >> j) & 1) {
      kd2J += spec.d[j] + 2;
      ++Jsize;
    }
  }
  if (spec.kind == RegionKind::D)
    return rat_pow(Rat(2), 2 * Jsize) * rat_pow(spec.b, -2 * (ksum + kd2J));
  if (spec.kind == RegionKind::F1) return rat_pow(spec.b, -(ksum + kd2J));
  Rat v(1);
  for (const auto& [u, w] : region_factors(spec)) {
    if (spec.kind == RegionKind::F2)
      v *= w.length();
    else
      v *= u.length() * w.length();
  }
  return v;
}

bool region_contains(const RegionSpec& spec, const std::vector<Rat>& u,
                     const std::vector<Rat>& v) {
  auto factors = region_factors(spec);
  if (static_cast<long>(u.size()) != spec.s || static_cast<long>(v.size()) != spec.s)
    throw MalformedRegion("point dimension mismatch");
  for (long j = 0; j < spec.s; ++j) {
    if (!factors[j].first.contains(u[j])) return false;
    if (!factors[j].second.contains(v[j])) return false;
  }
  return true;
}

}  // namespace negadep::boxes
