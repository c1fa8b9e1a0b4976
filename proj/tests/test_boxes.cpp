#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "negadep/boxes.hpp"
#include "negadep/dependence.hpp"
#include "negadep/randomize.hpp"
#include "oracle_helpers.hpp"

using namespace negadep;
using boxes::Box;
using boxes::BoxInterval;

TEST_CASE("gamma_b on values") {
  CHECK(boxes::gamma_b(2, rat(3, 8), rat(3, 8)) == boxes::kGammaInf);
  CHECK(boxes::gamma_b(2, rat(1, 4), rat(3, 8)) == 2);
  CHECK(boxes::gamma_b(2, rat(1, 4), rat(3, 8)) ==
        oracle::floor_gamma(2, rat(1, 4), rat(3, 8)));
  CHECK(boxes::gamma_b(10, rat(123, 1000), rat(456, 1000)) == 0);
}

TEST_CASE("gamma_b symmetry and translation invariance") {
  uint64_t state = 99;
  auto next = [&state] { return state = detail::splitmix64(state); };
  for (long trial = 0; trial < 200; ++trial) {
    long b = std::vector<long>{2, 3, 5}[next() % 3];
    long p = 2 + next() % 3;
    Int den = ipow(b, p);
    long d = den.get_si();
    Rat x = rat(next() % d, d), y = rat(next() % d, d);
    int g = boxes::gamma_b(b, x, y);
    CHECK(g == boxes::gamma_b(b, y, x));
    CHECK(g == oracle::floor_gamma(b, x, y));
    if (g == boxes::kGammaInf) continue;
    // translate within a depth-k cell by a multiple of its width
    long k = g;  // x, y share exactly the depth-k cell
    Int cellw_den = ipow(b, k);
    Rat cellw = rat(Int(1), cellw_den);
    long room = cellw_den.get_si() - 1 - rat_floor(x / cellw).get_si();
    if (room <= 0) continue;
    Rat q = Rat(static_cast<long>(next() % static_cast<uint64_t>(room)) + 1);
    CHECK(boxes::gamma_b(b, x + q * cellw, y + q * cellw) == g);
  }
}

TEST_CASE("BRational canonical form") {
  auto r = boxes::BRational::from_rat(3, rat(5, 9));
  CHECK(r.num == 5);
  CHECK(r.depth == 2);
  auto t = boxes::BRational::from_rat(3, rat(3, 9));
  CHECK(t.num == 1);
  CHECK(t.depth == 1);
  CHECK(t.value(3) == rat(1, 3));
  CHECK_THROWS_AS(boxes::BRational::from_rat(3, rat(1, 2)), std::domain_error);
  CHECK(boxes::badic_depth(2, rat(3, 8)) == 3);
}

TEST_CASE("interval validation") {
  CHECK_THROWS_AS(BoxInterval(3, rat(1, 3), rat(1, 3)), boxes::EmptyInterval);
  CHECK_THROWS_AS(BoxInterval(3, rat(2, 3), rat(1, 3)), boxes::EmptyInterval);
  CHECK_THROWS_AS(BoxInterval(3, rat(-1, 3), rat(1, 3)), boxes::EmptyInterval);
}

TEST_CASE("volume vector of the unit interval") {
  for (long b : {2L, 3L, 5L}) {
    auto V = boxes::volume_vector(BoxInterval(b, Rat(0), Rat(1)));
    for (long i = 0; i <= 6; ++i)
      CHECK(V.entry(i) == Rat(b - 1) * rat_pow(b, -(i + 1)));
    CHECK(V.total() == 1);
  }
}

TEST_CASE("volume vector of anchored elementary intervals matches Z_k") {
  for (long b : {2L, 3L}) {
    for (long k = 0; k <= 3; ++k) {
      auto V = boxes::volume_vector(boxes::elementary_anchored(b, k));
      Rat norm = rat_pow(b, 2 * k);
      for (long i = 0; i < k; ++i) CHECK(V.entry(i) == 0);
      for (long i = k; i <= k + 4; ++i)
        CHECK(norm * V.entry(i) == Rat(b - 1) * rat_pow(b, -(i - k + 1)));
    }
  }
}

TEST_CASE("volume vector of Y_0^(0) in base 3") {
  auto V = boxes::volume_vector(BoxInterval(3, rat(2, 9), rat(4, 9)));
  CHECK(V.entry(0) == rat(2, 81));
  CHECK(V.entry(1) == 0);
  CHECK(V.entry(2) == rat(4, 243));
  CHECK(V.total() == rat(4, 81));
}

TEST_CASE("volume vector against the enumeration and pair-counting oracles") {
  uint64_t state = 31337;
  for (long b : {2L, 3L}) {
    for (long trial = 0; trial < 25; ++trial) {
      BoxInterval A = dependence::random_interval(b, 3, state);
      BoxInterval B = dependence::random_interval(b, 3, state);
      auto V = boxes::volume_vector_pair(A, B);
      for (long i = 0; i <= 5; ++i)
        CHECK(V.entry(i) == oracle::enumerate_overlap(A, B, i) -
                                oracle::enumerate_overlap(A, B, i + 1));
      long Q = 5;
      auto oc = oracle::pair_count_volume(A, B, Q);
      for (long i = 0; i < Q; ++i) CHECK(V.entry(i) == oc.entries[i]);
      CHECK(V.tail_sum(Q) == oc.tail);
      // symmetry in the two arguments
      CHECK(V == boxes::volume_vector_pair(B, A));
    }
  }
}

TEST_CASE("volume vector normalization: total equals the squared length") {
  uint64_t state = 777;
  for (long b : {2L, 3L, 5L})
    for (long trial = 0; trial < 100; ++trial) {
      BoxInterval A = dependence::random_interval(b, 4, state);
      auto V = boxes::volume_vector(A);
      CHECK(V.total() == A.length() * A.length());
    }
}

TEST_CASE("volume_vector_box entries") {
  Box full(3, {BoxInterval(3, Rat(0), Rat(1)), BoxInterval(3, Rat(0), Rat(1))});
  CHECK(boxes::volume_vector_box(full, {0, 0}) == rat(4, 9));
  Box mixed(3, {BoxInterval(3, Rat(0), rat(1, 3)), BoxInterval(3, Rat(0), Rat(1))});
  CHECK(boxes::volume_vector_box(mixed, {0, 0}) == 0);  // zero factor annihilates
  // s = 1 reduces to the interval entry
  Box one(3, {BoxInterval(3, rat(2, 9), rat(4, 9))});
  CHECK(boxes::volume_vector_box(one, {2}) == rat(4, 243));
}

TEST_CASE("anchored coefficients of [0,1) and elementary intervals") {
  for (long b : {2L, 3L, 5L}) {
    auto dc = boxes::anchored_coeffs(BoxInterval(b, Rat(0), Rat(1)));
    REQUIRE(dc.tau.size() == 1);
    CHECK(dc.tau[0] == 1);
  }
  auto dc = boxes::anchored_coeffs(BoxInterval(3, Rat(0), rat(1, 3)));
  REQUIRE(dc.tau.size() == 2);
  CHECK(dc.tau[0] == 0);
  CHECK(dc.tau[1] == rat(1, 9));
}

TEST_CASE("anchored coefficients reconstruct the volume vector exactly") {
  uint64_t state = 4242;
  for (long b : {2L, 3L, 5L})
    for (long trial = 0; trial < 100; ++trial) {
      state = detail::splitmix64(state);
      long depth = 1 + static_cast<long>(state % 4);
      Int den = ipow(b, depth);
      long d = den.get_si();
      state = detail::splitmix64(state);
      long num = 1 + static_cast<long>(state % static_cast<uint64_t>(d));
      BoxInterval A(b, Rat(0), rat(num, d));
      auto dc = boxes::anchored_coeffs(A);
      CHECK(dc.sum() == A.length() * A.length());
      CHECK(boxes::reconstruct_volume(dc) == boxes::volume_vector(A));
    }
  CHECK_THROWS_AS(boxes::anchored_coeffs(BoxInterval(3, rat(1, 3), rat(2, 3))),
                  boxes::NotAnchored);
}

TEST_CASE("parse_unanchored on the worked examples") {
  auto f = boxes::parse_unanchored(BoxInterval(3, rat(2, 9), rat(4, 9)));
  CHECK(f.r == 1);
  CHECK(f.h == 0);
  CHECK(f.g == 1);
  CHECK(f.G == 1);
  CHECK(f.z == rat(1, 9));
  CHECK(f.Z == rat(1, 9));

  auto g = boxes::parse_unanchored(BoxInterval(3, rat(1, 3), rat(2, 3)));
  CHECK(g.r == 1);
  CHECK(g.h == 0);
  CHECK(g.g == 1);
  CHECK(g.G == 2);
  CHECK(g.z == 0);
  CHECK(g.Z == 0);

  // the finest strictly containing cell of [1/9+1/27, 2/9) is [0,1/3)
  auto h = boxes::parse_unanchored(BoxInterval(3, rat(4, 27), rat(2, 9)));
  CHECK(h.r == 2);
  CHECK(h.h == 0);
  CHECK(h.g == 2);  // reconstruction forces g=2, z=2/27
  CHECK(h.z == rat(2, 27));
  CHECK(h.G == 2);
  CHECK(h.Z == 0);

  CHECK_THROWS_AS(boxes::parse_unanchored(BoxInterval(3, Rat(0), rat(1, 3))),
                  boxes::AnchoredInterval);
  CHECK_THROWS_AS(boxes::parse_unanchored(BoxInterval(3, Rat(0), Rat(1))),
                  boxes::FullInterval);
  CHECK_THROWS_AS(boxes::parse_unanchored(BoxInterval(3, rat(1, 3), Rat(1))),
                  boxes::AnchoredInterval);
}

TEST_CASE("parse_unanchored reconstruction and minimality on random intervals") {
  uint64_t state = 555;
  for (long b : {2L, 3L, 5L})
    for (long trial = 0; trial < 200; ++trial) {
      BoxInterval A = dependence::random_interval(b, 4, state);
      if (A.a == 0 || A.A == 1) continue;
      auto f = boxes::parse_unanchored(A);
      Rat cellw = rat_pow(b, -(f.r - 1));
      CHECK(Rat(f.h) * cellw + Rat(f.g) * rat_pow(b, -f.r) - f.z == A.a);
      CHECK(Rat(f.h) * cellw + Rat(f.G) * rat_pow(b, -f.r) + f.Z == A.A);
      CHECK(f.h >= 0);
      CHECK(f.h < ipow(b, f.r - 1));
      CHECK(1 <= f.g);
      CHECK(f.g <= f.G);
      CHECK(f.G <= b - 1);
    }
}

TEST_CASE("unanchored decomposition of Y_0^(0) in base 3") {
  auto dc = boxes::unanchored_decompose(BoxInterval(3, rat(2, 9), rat(4, 9)));
  CHECK(dc.kind == boxes::DecompCoefficients::Kind::unanchored);
  CHECK(dc.r == 1);
  REQUIRE(dc.alpha.size() == 1);
  CHECK(dc.alpha[0] == rat(4, 81));
  for (const auto& t : dc.tau) CHECK(t == 0);
  CHECK(dc.sum() == rat(4, 81));
}

TEST_CASE("anchored routing in unanchored_decompose") {
  BoxInterval A(3, Rat(0), rat(2, 9));
  auto via_anchor = boxes::anchored_coeffs(A);
  auto via_route = boxes::unanchored_decompose(A);
  CHECK(via_route.kind == boxes::DecompCoefficients::Kind::anchored);
  CHECK(via_route.tau == via_anchor.tau);
}

TEST_CASE("decomposition soundness on random intervals") {
  uint64_t state = 90210;
  for (long b : {2L, 3L, 5L})
    for (long trial = 0; trial < 300; ++trial) {
      BoxInterval A = dependence::random_interval(b, b == 5 ? 3 : 4, state);
      auto dc = boxes::unanchored_decompose(A);
      for (const auto& x : dc.alpha) CHECK(x >= 0);
      for (const auto& x : dc.tau) CHECK(x >= 0);
      CHECK(dc.sum() == A.length() * A.length());
      CHECK(boxes::reconstruct_volume(dc) == boxes::volume_vector(A));
    }
}

TEST_CASE("cell-anchored intervals decompose like their translate") {
  uint64_t state = 2024;
  for (long b : {2L, 3L}) {
    for (long trial = 0; trial < 50; ++trial) {
      state = detail::splitmix64(state);
      long cd = 1 + static_cast<long>(state % 2);  // cell depth
      Int cells = ipow(b, cd);
      state = detail::splitmix64(state);
      long cell = static_cast<long>(state % static_cast<uint64_t>(cells.get_si()));
      if (cell == 0) continue;  // anchored at origin is the anchored route
      state = detail::splitmix64(state);
      long sub = 1 + static_cast<long>(state % static_cast<uint64_t>(b * b - 1));
      Rat lo = rat(cell, cells.get_si());
      Int subden = cells * ipow(b, 2);
      Rat hi = lo + rat(Int(sub), subden);
      if (hi > 1) continue;
      BoxInterval A(b, lo, hi);
      BoxInterval T(b, Rat(0), hi - lo);
      auto dca = boxes::unanchored_decompose(A);
      auto dct = boxes::anchored_coeffs(T);
      // identical tau sequence, no alpha part
      for (const auto& x : dca.alpha) CHECK(x == 0);
      std::vector<Rat> ta = dca.tau, tt = dct.tau;
      ta.resize(std::max(ta.size(), tt.size()), Rat(0));
      tt.resize(ta.size(), Rat(0));
      CHECK(ta == tt);
    }
  }
}

TEST_CASE("right-anchored intervals route through the reflection") {
  uint64_t state = 808;
  for (long b : {2L, 3L, 5L})
    for (long trial = 0; trial < 30; ++trial) {
      state = detail::splitmix64(state);
      long depth = 1 + static_cast<long>(state % 3);
      Int den = ipow(b, depth);
      state = detail::splitmix64(state);
      long num = 1 + static_cast<long>(state % static_cast<uint64_t>(den.get_si() - 1));
      BoxInterval A(b, rat(num, den.get_si()), Rat(1));
      auto dc = boxes::unanchored_decompose(A);
      CHECK(dc.kind == boxes::DecompCoefficients::Kind::anchored);
      // reflection is only legitimate if it reproduces the volume vector
      CHECK(boxes::reconstruct_volume(dc) == boxes::volume_vector(A));
      CHECK(dc.sum() == A.length() * A.length());
    }
}

TEST_CASE("elementary unanchored intervals and their halves") {
  auto Y = boxes::elementary_unanchored(3, 0, 0);
  CHECK(Y.a == rat(2, 9));
  CHECK(Y.A == rat(4, 9));
  for (long b : {2L, 3L, 5L})
    for (long d = 0; d <= 2; ++d)
      for (long k = 0; k <= 2; ++k) {
        auto y = boxes::elementary_unanchored(b, d, k);
        CHECK(y.length() == Rat(2) * rat_pow(b, -(2 + k + d)));
        auto y1 = boxes::elementary_unanchored_half(b, d, k, 1);
        auto y2 = boxes::elementary_unanchored_half(b, d, k, 2);
        CHECK(y1.a == y.a);
        CHECK(y1.A == rat_pow(b, -(d + 1)));
        CHECK(y2.a == rat_pow(b, -(d + 1)));
        CHECK(y2.A == y.A);
        CHECK(y1.length() == y2.length());
      }
}

TEST_CASE("product coefficients") {
  // single factor: terms are exactly the alpha/tau lists
  Box one(3, {BoxInterval(3, rat(2, 9), rat(4, 9))});
  auto pc1 = boxes::product_coeffs(one);
  REQUIRE(pc1.terms.size() == 1);
  CHECK(pc1.terms[0].J == 1);
  CHECK(pc1.terms[0].k == std::vector<int>{0});
  CHECK(pc1.terms[0].coeff == rat(4, 81));
  CHECK(pc1.d == std::vector<int>{0});

  Box sq(3, {BoxInterval(3, rat(2, 9), rat(4, 9)), BoxInterval(3, rat(2, 9), rat(4, 9))});
  auto pc2 = boxes::product_coeffs(sq);
  REQUIRE(pc2.terms.size() == 1);
  CHECK(pc2.terms[0].J == 3);
  CHECK(pc2.terms[0].coeff == rat(4, 81) * rat(4, 81));
  CHECK(pc2.d == std::vector<int>{0, 0});
  CHECK(pc2.total() == sq.volume() * sq.volume());

  uint64_t state = 11;
  for (long trial = 0; trial < 40; ++trial) {
    auto fam = dependence::random_box_family(3, 3, 3, 1, state += trial);
    auto pc = boxes::product_coeffs(fam[0]);
    CHECK(pc.total() == fam[0].volume() * fam[0].volume());
    for (const auto& t : pc.terms) CHECK(t.coeff > 0);
  }
}

TEST_CASE("region volumes") {
  boxes::RegionSpec spec;
  spec.b = 3;
  spec.s = 1;
  spec.k = {0};
  spec.d = {0};
  spec.J = 1;
  spec.kind = boxes::RegionKind::D;
  CHECK(boxes::region_volume(spec) == rat(4, 81));
  CHECK(boxes::region_volume(spec) == rat(4, 81));
  auto Y = boxes::elementary_unanchored(3, 0, 0);
  CHECK(boxes::region_volume(spec) == Y.length() * Y.length());

  // J empty: product of elementary squares
  boxes::RegionSpec empty;
  empty.b = 3;
  empty.s = 2;
  empty.k = {1, 2};
  empty.d = {0, 0};
  empty.J = 0;
  empty.kind = boxes::RegionKind::D;
  CHECK(boxes::region_volume(empty) == rat_pow(3, -2 * 3));

  // F1 with I = J
  boxes::RegionSpec f1;
  f1.b = 3;
  f1.s = 2;
  f1.k = {1, 0};
  f1.d = {0, 1};
  f1.J = 2;  // coordinate 2
  f1.I = 2;
  f1.hasI = true;
  f1.kind = boxes::RegionKind::F1;
  long ksum = 1, kd2J = 0 + (1 + 2);
  CHECK(boxes::region_volume(f1) == rat_pow(3, -(ksum + kd2J)));
  // formula agrees with the direct product of factor lengths
  Rat direct(1);
  for (const auto& [u, v] : boxes::region_factors(f1)) direct *= u.length();
  CHECK(boxes::region_volume(f1) == direct);
}

TEST_CASE("region membership") {
  boxes::RegionSpec spec;
  spec.b = 3;
  spec.s = 2;
  spec.k = {0, 1};
  spec.d = {0, 0};
  spec.J = 3;
  spec.kind = boxes::RegionKind::D;
  // the center of the Y product belongs to D
  std::vector<Rat> center = {rat(1, 3), rat(1, 3)};
  CHECK(boxes::region_contains(spec, center, center));

  // u in Y_{k,1}, v in Y_{k,2} lies in F(k,d,J,I={}) for s=1
  boxes::RegionSpec f;
  f.b = 3;
  f.s = 1;
  f.k = {0};
  f.d = {0};
  f.J = 1;
  f.I = 0;
  f.hasI = true;
  f.kind = boxes::RegionKind::F;
  std::vector<Rat> u = {rat(5, 18)}, v = {rat(7, 18)};
  CHECK(boxes::region_contains(f, u, v));
  CHECK_FALSE(boxes::region_contains(f, v, u));

  boxes::RegionSpec bad = f;
  bad.I = 2;  // outside J
  CHECK_THROWS_AS(boxes::region_contains(bad, u, v), boxes::MalformedRegion);
}

TEST_CASE("F1 volume agrees with Monte Carlo membership within 4 SE") {
  boxes::RegionSpec f1;
  f1.b = 3;
  f1.s = 2;
  f1.k = {1, 0};
  f1.d = {0, 0};
  f1.J = 1;
  f1.I = 0;
  f1.hasI = true;
  f1.kind = boxes::RegionKind::F1;
  double vol = rat_double(boxes::region_volume(f1));
  uint64_t state = 17;
  const long N = 200000;
  long hits = 0;
  const long grid = 3 * 3 * 3 * 3 * 3 * 3 * 3;  // depth-7 sampling grid
  for (long t = 0; t < N; ++t) {
    std::vector<Rat> u(2), v(2);
    for (long j = 0; j < 2; ++j) {
      state = detail::splitmix64(state);
      u[j] = rat(static_cast<long>(state % grid), grid);
      state = detail::splitmix64(state);
      v[j] = rat(static_cast<long>(state % grid), grid);
    }
    hits += boxes::region_contains(f1, u, v);
  }
  double est = static_cast<double>(hits) / N;
  double se = std::sqrt(vol * (1 - vol) / N);
  CHECK(std::abs(est - vol) <= 4 * se);
}
