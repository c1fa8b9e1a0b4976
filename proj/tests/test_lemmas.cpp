#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "negadep/lemmas.hpp"

using namespace negadep;
using lemmas::GridSpec;

TEST_CASE("h and g evaluation") {
  // l <= 2i gives zero
  CHECK(lemmas::g_eval(4, 1, 2, 3) == 0);
  CHECK(lemmas::g_eval(4, 1, 1, 3) == 0);
  // l = 2i+1 hits the power case
  CHECK(lemmas::g_eval(4, 1, 3, 3) == rat_pow(rat(3, 2), 2));
  // b=3, j=4, i=0, l=3: 1 + 3/16
  auto [h, g] = lemmas::h_g_eval(4, 0, 3, 3);
  CHECK(h == rat(3, 16));
  CHECK(g == Rat(1) + rat(3, 16));
  // even l in range and l >= i+j give one
  CHECK(lemmas::g_eval(5, 1, 4, 7) == 1);
  CHECK(lemmas::g_eval(3, 0, 5, 7) == 1);
  CHECK_THROWS_AS(lemmas::g_eval(2, 2, 1, 3), lemmas::BadIndices);
  CHECK_THROWS_AS(lemmas::h_eval(2, -1, 1, 3), lemmas::BadIndices);
}

TEST_CASE("G evaluation") {
  // m = 2|J|-1, k = d = 0 attains 2^{|J|}-1
  for (long js : {1L, 2L, 3L, 4L}) {
    std::vector<int> zero(js, 0);
    uint32_t J = (1u << js) - 1;
    CHECK(lemmas::G_eval(7, 2 * js - 1, zero, zero, J, js) ==
          rat_pow(Rat(2), js) - 1);
  }
  // m < |d|_J forces zero
  std::vector<int> k = {0, 0}, d = {3, 2};
  CHECK(lemmas::G_eval(5, 4, k, d, 3, 2) == 0);
}

TEST_CASE("G matches the explicit odd-m formula with k = d = 0") {
  // independent re-derivation of the three-sum expression
  auto formula = [](long m, long s, long b) -> Rat {
    Rat total(0);
    for (long j = 0; m >= 3 && j <= (m - 3) / 2; ++j) total += Rat(binom(s, j));
    for (long j = std::max<long>(0, m - s + 1); m >= 3 && j <= (m - 3) / 2; ++j)
      total += Rat(binom(s, j)) * rat_pow(b, s + j - m) /
               rat_pow(Rat(b - 1), s - j) * Rat(binom(s - j - 1, m - 2 * j));
    total += Rat(binom(s, (m - 1) / 2)) *
             rat_pow(Rat(b) / Rat(b - 1), s - (m - 1) / 2 - 1);
    return total;
  };
  for (long b : {5L, 7L, 11L})
    for (long s = 3; s <= std::min(b, 6L); ++s)
      for (long m = 1; m <= 2 * s - 3; m += 2) {
        std::vector<int> zero(s, 0);
        uint32_t J = (1u << s) - 1;
        CHECK(lemmas::G_eval(b, m, zero, zero, J, s) == formula(m, s, b));
      }
}

TEST_CASE("R and Q evaluation") {
  for (long b = 2; b <= 10; ++b) {
    CHECK(lemmas::R_eval(b, 2) == rat(1, 4) * rat_pow(Rat(b) / Rat(b - 1), 2));
    if (b >= 3)
      CHECK(lemmas::R_eval(b, 3) == rat(1, 8) * rat_pow(Rat(b) / Rat(b - 1), 3));
  }
  for (long b = 2; b <= 8; ++b)
    for (long s = 2; s <= b; ++s) {
      CHECK(lemmas::Q_eval(b, 0, s) == 0);
      if (s > 1) CHECK(lemmas::Q_eval(b, 1, s) == b - 1);
    }
}

TEST_CASE("staircase admissibility filter") {
  // spec counterexample: rows (1,1,1)/(2,2,0) violate decreasing row sums
  std::vector<std::vector<Rat>> bad = {{Rat(1), Rat(1), Rat(1)},
                                       {Rat(2), Rat(2), Rat(0)}};
  CHECK_FALSE(lemmas::staircase_admissible(bad, 2, 3));
  std::vector<std::vector<Rat>> good = {{Rat(2), Rat(2), Rat(1)},
                                        {Rat(3), Rat(2), Rat(0)}};
  CHECK(lemmas::staircase_admissible(good, 2, 3));
  // zero inside the staircase support is inadmissible
  std::vector<std::vector<Rat>> hole = {{Rat(2), Rat(0), Rat(1)},
                                        {Rat(3), Rat(2), Rat(0)}};
  CHECK_FALSE(lemmas::staircase_admissible(hole, 2, 3));
}

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.bases = {2, 3, 5};
  g.smax = 4;
  g.kmax = 4;
  g.trials = 60;
  g.seed = 314159;
  return g;
}

void check_pass(const lemmas::LemmaCertificate& cert) {
  INFO(cert.lemma, ": ", cert.failures.empty() ? "" : cert.failures.front());
  CHECK(cert.passed());
  CHECK(cert.checked > 0);
}

}  // namespace

TEST_CASE("certificates pass on reduced grids") {
  check_pass(lemmas::check_g_bound(small_grid()));
  check_pass(lemmas::check_Q(small_grid()));
  check_pass(lemmas::check_G_propositions(small_grid()));
  check_pass(lemmas::check_weighted_sums(small_grid()));
  check_pass(lemmas::check_vol_lemma(small_grid()));
  check_pass(lemmas::check_identities(small_grid()));
}

TEST_CASE("net-backed certificates pass on small nets") {
  check_pass(lemmas::check_Mtilde({faure_net(3, 2, 2)}, small_grid()));
  check_pass(lemmas::check_psi_bound({faure_net(3, 2, 2)}, small_grid()));
  check_pass(lemmas::check_volcondprob({faure_net(2, 2, 2)}, small_grid()));
}

TEST_CASE("volume-vector lemma attains equality on Y_0^(0) in base 3") {
  // V_0 - b(b-2)/(b-1) V_1 = 2/81 - (3/2)*0 equals the tail sum from r=1
  negadep::boxes::BoxInterval A(3, rat(2, 9), rat(4, 9));
  auto V = negadep::boxes::volume_vector(A);
  auto f = negadep::boxes::parse_unanchored(A);
  REQUIRE(f.r == 1);
  Rat lhs = V.entry(0) - Rat(3) * Rat(1) / Rat(2) * V.entry(1);
  CHECK(lhs == rat(2, 81));
  CHECK(V.tail_sum(1) == rat(2, 81));
  CHECK(lhs == V.tail_sum(1));  // margin exactly zero
}

TEST_CASE("g-bound certificate records the equality witness at l = 2i+1") {
  auto cert = lemmas::check_g_bound(small_grid());
  REQUIRE(cert.has_tightest);
  CHECK(cert.tightest_margin == 0);
}

TEST_CASE("certificates report counterexamples honestly") {
  // feed a non-net to the Mtilde checker: the certificate must fail
  std::vector<std::vector<Rat>> pts = {{rat(0, 1), rat(0, 1)},
                                       {rat(0, 1), rat(1, 2)},
                                       {rat(1, 2), rat(0, 1)},
                                       {rat(1, 2), rat(1, 2)}};
  // 4 points but NOT a (0,2,2)-net in base 2 (duplicated projections)
  PointSet bad = PointSet::from_values(2, 2, pts, 6);
  auto cert = lemmas::check_Mtilde({bad}, small_grid());
  CHECK_FALSE(cert.passed());
}

TEST_CASE("lemma registry") {
  auto ids = lemmas::lemma_ids();
  CHECK(ids.size() == 9);
  CHECK_THROWS_AS(lemmas::run_one("nope", small_grid()), std::invalid_argument);
}
