#include "negadep/gfnet.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace negadep {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeBase::PrimeBase(long base) : b(base) {
  if (!is_prime(base))
    throw NonPrimeBase("base " + std::to_string(base) + " is not prime");
}

Rat PointSet::coord(long i, long j) const {
  Rat x(0);
  Rat scale = rat(1, b);
  Rat p = scale;
  for (long l = 0; l < E; ++l) {
    if (digit(i, j, l) != 0) x += Rat(static_cast<long>(digit(i, j, l))) * p;
    p *= scale;
  }
  return x;
}

PointSet PointSet::from_values(long b, long s,
                               const std::vector<std::vector<Rat>>& pts, long E) {
  PointSet ps;
  ps.b = b;
  ps.s = s;
  ps.E = E;
  ps.n = static_cast<long>(pts.size());
  ps.digits.assign(static_cast<std::size_t>(ps.n) * s * E, 0);
  long maxdepth = 0;
  for (long i = 0; i < ps.n; ++i) {
    if (static_cast<long>(pts[i].size()) != s)
      throw std::invalid_argument("from_values: wrong dimension");
    for (long j = 0; j < s; ++j) {
      Rat x = pts[i][j];
      if (x < 0 || x >= 1) throw std::invalid_argument("from_values: value outside [0,1)");
      for (long l = 0; l < E && x != 0; ++l) {
        x *= b;
        Int d = rat_floor(x);
        ps.digit(i, j, l) = static_cast<uint8_t>(d.get_si());
        x -= Rat(d);
        if (x != 0 && l > maxdepth) maxdepth = l;
      }
      if (x != 0)
        throw std::invalid_argument("from_values: value needs more than E digits");
    }
  }
  ps.m = maxdepth + 1;
  return ps;
}

GeneratingMatrices build_faure_matrices(PrimeBase base, long s, long m) {
  const long b = base.b;
  if (s < 1 || m < 1) throw std::invalid_argument("build_faure_matrices: s, m >= 1");
  if (s > b)
    throw DimensionExceedsBase("dimension " + std::to_string(s) +
                               " exceeds base " + std::to_string(b));
  // Upper-triangular Pascal matrix mod b.
  std::vector<long> pascal(m * m, 0);
  for (long r = 0; r < m; ++r)
    for (long c = r; c < m; ++c)
      pascal[r * m + c] = mpz_class(binom(c, r) % b).get_si();

  GeneratingMatrices gm;
  gm.b = b;
  gm.s = s;
  gm.m = m;
  gm.mats.resize(s);
  std::vector<long> cur(m * m, 0);
  for (long r = 0; r < m; ++r) cur[r * m + r] = 1;  // Pascal^0
  for (long j = 0; j < s; ++j) {
    gm.mats[j].resize(m * m);
    for (long e = 0; e < m * m; ++e) gm.mats[j][e] = static_cast<uint8_t>(cur[e]);
    // cur <- cur * pascal mod b
    std::vector<long> next(m * m, 0);
    for (long r = 0; r < m; ++r)
      for (long c = 0; c < m; ++c) {
        long acc = 0;
        for (long t = 0; t < m; ++t) acc += cur[r * m + t] * pascal[t * m + c];
        next[r * m + c] = acc % b;
      }
    cur.swap(next);
  }
  return gm;
}

PointSet generate_net(const GeneratingMatrices& gm, long E) {
  if (E < gm.m) throw std::invalid_argument("generate_net: E < m");
  PointSet ps;
  ps.b = gm.b;
  ps.s = gm.s;
  ps.m = gm.m;
  ps.E = E;
  Int npoints = ipow(gm.b, gm.m);
  ps.n = npoints.get_si();
  ps.digits.assign(static_cast<std::size_t>(ps.n) * gm.s * E, 0);
  std::vector<long> idx_digits(gm.m, 0);
  for (long i = 0; i < ps.n; ++i) {
    {
      long v = i;
      for (long c = 0; c < gm.m; ++c) {
        idx_digits[c] = v % gm.b;
        v /= gm.b;
      }
    }
    for (long j = 0; j < gm.s; ++j) {
      const auto& mat = gm.mats[j];
      for (long r = 0; r < gm.m; ++r) {
        long acc = 0;
        for (long c = 0; c < gm.m; ++c) acc += mat[r * gm.m + c] * idx_digits[c];
        ps.digit(i, j, r) = static_cast<uint8_t>(acc % gm.b);
      }
    }
  }
  return ps;
}

PointSet faure_net(long b, long s, long m, long E) {
  if (E < 0) E = default_digit_depth(m);
  return generate_net(build_faure_matrices(PrimeBase(b), s, m), E);
}

namespace {

// Smallest m with b^m == n, or -1.
long net_depth(long b, long n) {
  long m = 0, v = 1;
  while (v < n) {
    v *= b;
    ++m;
  }
  return v == n ? m : -1;
}

// Checks all k-elementary intervals for one composition vector k.
bool check_composition(const PointSet& ps, const std::vector<long>& k,
                       long expected) {
  long total = 1;
  for (long j = 0; j < ps.s; ++j)
    for (long t = 0; t < k[j]; ++t) total *= ps.b;
  std::vector<long> counts(total, 0);
  for (long i = 0; i < ps.n; ++i) {
    long key = 0;
    for (long j = 0; j < ps.s; ++j)
      for (long t = 0; t < k[j]; ++t) key = key * ps.b + ps.digit(i, j, t);
    ++counts[key];
  }
  for (long c : counts)
    if (c != expected) return false;
  return true;
}

// Enumerates compositions of K into s nonnegative parts.
bool for_each_composition(long K, long s,
                          const std::function<bool(const std::vector<long>&)>& fn) {
  std::vector<long> k(s, 0);
  std::function<bool(long, long)> rec = [&](long pos, long rem) -> bool {
    if (pos == s - 1) {
      k[pos] = rem;
      return fn(k);
    }
    for (long v = 0; v <= rem; ++v) {
      k[pos] = v;
      if (!rec(pos + 1, rem - v)) return false;
    }
    return true;
  };
  return rec(0, K);
}

}  // namespace

bool verify_tms_net(const PointSet& ps, long t) {
  long m = net_depth(ps.b, ps.n);
  if (m < 0) return false;
  if (t < 0 || t > m) return false;
  if (ps.E < m) throw std::invalid_argument("verify_tms_net: fewer than m digits");
  long expected = 1;
  for (long i = 0; i < t; ++i) expected *= ps.b;
  return for_each_composition(m - t, ps.s, [&](const std::vector<long>& k) {
    return check_composition(ps, k, expected);
  });
}

bool verify_all_elementary(const PointSet& ps) {
  long m = net_depth(ps.b, ps.n);
  if (m < 0) return false;
  for (long K = 0; K <= m; ++K) {
    long expected = 1;
    for (long i = 0; i < m - K; ++i) expected *= ps.b;
    bool ok = for_each_composition(K, ps.s, [&](const std::vector<long>& k) {
      return check_composition(ps, k, expected);
    });
    if (!ok) return false;
  }
  return true;
}

void save_net(std::ostream& os, const GeneratingMatrices& gm, const PointSet* points) {
  long E = points ? points->E : default_digit_depth(gm.m);
  os << gm.b << ' ' << gm.s << ' ' << gm.m << ' ' << E << ' ' << 0 << '\n';
  for (long j = 0; j < gm.s; ++j)
    for (long r = 0; r < gm.m; ++r) {
      for (long c = 0; c < gm.m; ++c)
        os << (c ? " " : "") << static_cast<int>(gm.at(j, r, c));
      os << '\n';
    }
  if (points) {
    for (long i = 0; i < points->n; ++i) {
      os << i << ':';
      for (long j = 0; j < points->s; ++j) {
        os << (j ? " | " : " ");
        for (long l = 0; l < points->E; ++l)
          os << (l ? " " : "") << static_cast<int>(points->digit(i, j, l));
      }
      os << '\n';
    }
  }
}

NetFile load_net(std::istream& is) {
  NetFile nf;
  long b, s, m, E, t;
  if (!(is >> b >> s >> m >> E >> t)) throw std::runtime_error("net file: bad header");
  nf.gm.b = b;
  nf.gm.s = s;
  nf.gm.m = m;
  nf.E = E;
  nf.t = t;
  nf.gm.mats.assign(s, std::vector<uint8_t>(m * m));
  for (long j = 0; j < s; ++j)
    for (long e = 0; e < m * m; ++e) {
      long v;
      if (!(is >> v) || v < 0 || v >= b)
        throw std::runtime_error("net file: bad matrix entry");
      nf.gm.mats[j][e] = static_cast<uint8_t>(v);
    }
  // Optional point dump, lines of the form "i: d .. d | d .. d".
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<long>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    for (char& ch : line)
      if (ch == ':' || ch == '|') ch = ' ';
    std::istringstream ls(line);
    std::vector<long> vals;
    long v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    rows.push_back(std::move(vals));
  }
  if (!rows.empty()) {
    PointSet ps;
    ps.b = b;
    ps.s = s;
    ps.m = m;
    ps.E = E;
    ps.n = static_cast<long>(rows.size());
    ps.digits.assign(static_cast<std::size_t>(ps.n) * s * E, 0);
    for (long i = 0; i < ps.n; ++i) {
      const auto& vals = rows[i];
      if (static_cast<long>(vals.size()) != 1 + s * E)
        throw std::runtime_error("net file: bad point dump row");
      for (long j = 0; j < s; ++j)
        for (long l = 0; l < E; ++l) {
          long d = vals[1 + j * E + l];
          if (d < 0 || d >= b) throw std::runtime_error("net file: bad digit");
          ps.digit(i, j, l) = static_cast<uint8_t>(d);
        }
    }
    nf.points = std::move(ps);
  }
  return nf;
}

void save_net_file(const std::string& path, const GeneratingMatrices& gm,
                   const PointSet* points) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  save_net(os, gm, points);
}

NetFile load_net_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_net(is);
}

}  // namespace negadep
