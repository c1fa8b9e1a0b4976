#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "negadep/counting.hpp"
#include "negadep/gfnet.hpp"

using namespace negadep;
using counting::GammaTable;
using counting::IndexVec;

namespace {

// reference point of a (0,m,s)-net is arbitrary; loop them all
template <typename F>
void for_all_refs(const PointSet& ps, F f) {
  for (long ref = 0; ref < ps.n; ++ref) f(GammaTable(ps, ref));
}

}  // namespace

TEST_CASE("m_b matches the net closed form and is reference invariant") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  CHECK(counting::m_b({1, 0}, gt) == 2);  // 3^{2-1} - 1
  CHECK(counting::m_b({0, 0}, gt) == ps.n - 1);
  CHECK(counting::m_b({2, 1}, gt) == 0);  // |k| > m
  for_all_refs(ps, [&](const GammaTable& g) {
    for (int k1 = 0; k1 <= 4; ++k1)
      for (int k2 = 0; k2 + k1 <= 4; ++k2)
        CHECK(counting::m_b({k1, k2}, g) ==
              counting::m_b_net_closed({k1, k2}, ps.b, ps.m));
  });
}

TEST_CASE("m_b_general reduces to m_b when J is empty") {
  PointSet ps = faure_net(3, 3, 2);
  GammaTable gt(ps, 0);
  for (int k1 = 0; k1 <= 2; ++k1)
    for (int k2 = 0; k2 <= 2; ++k2)
      for (int k3 = 0; k3 <= 2; ++k3) {
        IndexVec k = {k1, k2, k3}, d = {0, 0, 0};
        CHECK(counting::m_b_general(k, d, 2, 0, 0, gt) == counting::m_b(k, gt));
      }
}

TEST_CASE("m_b_general matches the inclusion-exclusion closed form on nets") {
  for (auto [b, s, m] : {std::tuple<long, long, long>{3, 3, 2}, {2, 2, 4}, {5, 2, 2}}) {
    PointSet ps = faure_net(b, s, m);
    GammaTable gt(ps, 0);
    uint32_t all = (1u << s) - 1;
    IndexVec k(s, 0), d(s, 0);
    for (uint32_t J = 0; J <= all; ++J)
      for (uint32_t I = J;; I = (I - 1) & J) {
        for (int ka = 0; ka <= 2; ++ka)
          for (int da = 0; da <= 2; ++da) {
            for (long j = 0; j < s; ++j) {
              k[j] = (j % 2 == 0) ? ka : 0;
              d[j] = ((J >> j) & 1) ? da : 0;
            }
            CHECK(Int(counting::m_b_general(k, d, 2, J, I, gt)) ==
                  counting::m_b_general_net_closed(k, d, 2, J, I, b, m));
          }
        if (I == 0) break;
      }
  }
}

TEST_CASE("m_b_general is reference invariant on nets") {
  PointSet ps = faure_net(3, 2, 2);
  IndexVec k = {1, 0}, d = {0, 1};
  uint32_t J = 2, I = 0;
  long first = counting::m_b_general(k, d, 2, J, I, GammaTable(ps, 0));
  for_all_refs(ps, [&](const GammaTable& g) {
    CHECK(counting::m_b_general(k, d, 2, J, I, g) == first);
  });
}

TEST_CASE("n_b partitions the other points") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  CHECK(counting::n_b({0, 0}, gt) == 4);  // 8 - 2*2 + 0
  long total = 0;
  for (int i1 = 0; i1 <= ps.m; ++i1)
    for (int i2 = 0; i2 <= ps.m; ++i2) total += counting::n_b({i1, i2}, gt);
  CHECK(total == ps.n - 1);
  CHECK(counting::n_b({5, 0}, gt) == 0);  // beyond the net resolution
  for (const auto& i : {IndexVec{0, 1}, IndexVec{1, 1}, IndexVec{2, 0}})
    CHECK(counting::n_b(i, gt) >= 0);
}

TEST_CASE("C_b basics") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  CHECK(counting::c_b({0, 0}, gt, ps.b) == 1);
  for (int k1 = 0; k1 <= 2; ++k1)
    for (int k2 = 0; k2 + k1 <= 2; ++k2) {
      Rat c = counting::c_b({k1, k2}, gt, ps.b);
      CHECK(c <= 1);
      long K = k1 + k2;
      CHECK(c == rat_pow(ps.b, K) * rat(counting::m_b_net_closed({k1, k2}, ps.b, ps.m),
                                        ps.n - 1));
    }
}

TEST_CASE("psi_m basics") {
  PointSet ps = faure_net(3, 3, 2);
  GammaTable gt(ps, 0);
  const long b = ps.b;
  // zero count gives zero psi
  IndexVec bigk = {4, 4, 4}, d0 = {0, 0, 0};
  CHECK(counting::psi_m(bigk, d0, 1, 0, gt, b) == 0);
  // I = J: psi equals the (eq:psiJJ) expression when the exponent is >= 0
  IndexVec k = {0, 0, 0}, d = {0, 0, 0};
  uint32_t J = 1;
  Rat lhs = counting::psi_m(k, d, J, J, gt, b);
  long expo = ps.m - 0 - 0 - 2 * 1;
  Int numer = expo >= 0 ? Int(ipow(b, expo) - 1) : Int(0);
  Rat rhs = rat_pow(b, 0 + 0 + 2 * 1) * rat(numer, Int(ps.n - 1));
  CHECK(lhs == rhs);
  // brute-force count plugged into the weighted form
  IndexVec kk = {0, 0, 0};
  uint32_t Jb = 1, Ib = 0;
  long cnt = counting::m_b_general(kk, d0, 2, Jb, Ib, gt);
  Rat expect = rat_pow(b, 0 + 0 + 1 + 0) * rat_pow(Rat(b - 1), -1) * rat(cnt, ps.n - 1);
  CHECK(counting::psi_m(kk, d0, Jb, Ib, gt, b) == expect);
}

TEST_CASE("m_tilde reduces to C_b for empty J") {
  PointSet ps = faure_net(3, 2, 3);
  GammaTable gt(ps, 0);
  for (int k1 = 0; k1 <= 3; ++k1)
    for (int k2 = 0; k2 + k1 <= 3; ++k2)
      CHECK(counting::m_tilde({k1, k2}, {0, 0}, 0, gt, ps.b) ==
            counting::c_b({k1, k2}, gt, ps.b));
}

TEST_CASE("m_tilde from four brute counts on Faure(3,2,2)") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  IndexVec k = {0, 0}, d = {0, 0};
  uint32_t J = 3;
  // manual evaluation of the weighted sum over I in {{},{1},{2},{1,2}}
  Rat manual(0);
  for (uint32_t I : {0u, 1u, 2u, 3u}) {
    long cnt = counting::m_b_general(k, d, 2, J, I, gt);
    long Is = __builtin_popcount(I);
    manual += rat_pow(ps.b, 0 + 0 + 2 + Is) * rat_pow(Rat(ps.b - 1), Is - 2) *
              rat(cnt, ps.n - 1);
  }
  manual /= 4;
  CHECK(counting::m_tilde(k, d, J, gt, ps.b) == manual);
  CHECK(manual <= 1);
}

TEST_CASE("m_tilde stays below one on a small full grid") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  for (uint32_t J = 0; J <= 3; ++J)
    for (int k1 = 0; k1 <= 3; ++k1)
      for (int k2 = 0; k2 + k1 <= 3; ++k2)
        for (int d1 = 0; d1 <= 3; ++d1)
          for (int d2 = 0; d2 + d1 <= 3; ++d2) {
            IndexVec d = {((J >> 0) & 1) ? d1 : 0, ((J >> 1) & 1) ? d2 : 0};
            CHECK(counting::m_tilde({k1, k2}, d, J, gt, ps.b) <= 1);
          }
}

TEST_CASE("m_tilde_net_closed matches the brute evaluation on a net") {
  PointSet ps = faure_net(3, 2, 2);
  GammaTable gt(ps, 0);
  for (uint32_t J = 0; J <= 3; ++J)
    for (int k1 = 0; k1 <= 2; ++k1)
      for (int k2 = 0; k2 <= 2; ++k2)
        for (int da = 0; da <= 2; ++da) {
          IndexVec k = {k1, k2};
          IndexVec d = {((J >> 0) & 1) ? da : 0, ((J >> 1) & 1) ? da : 0};
          CHECK(counting::m_tilde(k, d, J, gt, ps.b) ==
                counting::m_tilde_net_closed(k, d, J, ps.b, ps.m, ps.s));
        }
}

TEST_CASE("insufficient digits are rejected") {
  PointSet ps = faure_net(3, 2, 2);
  CHECK_THROWS_AS(counting::m_b({ps.E + 1, 0}, ps, 0), counting::InsufficientDigits);
}

TEST_CASE("diagnose emits a consistent CSV report") {
  PointSet ps = faure_net(3, 2, 2);
  auto report = counting::diagnose(ps, 2, 2);
  CHECK(report.verified_net);
  CHECK(!report.rows.empty());
  for (const auto& row : report.rows) {
    CHECK(row.bound_ok);
    CHECK(Int(row.brute) == row.closed_form);
  }
  std::ostringstream os;
  counting::write_csv(report, os, "negadep test");
  std::string csv = os.str();
  CHECK(csv.find("# negadep test") == 0);
  CHECK(csv.find("kvec,dvec,J,I,brute,closed_form") != std::string::npos);
  long lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == static_cast<long>(report.rows.size()) + 3);
}
