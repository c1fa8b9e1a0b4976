#include "negadep/randomize.hpp"

namespace negadep {

PointSet owen_scramble(const PointSet& ps, ScrambleSeed seed) {
  return detail::owen_scramble_with(ps, seed, detail::HashPerms{});
}

std::vector<std::vector<uint8_t>> shift_vector(long b, long s, long E,
                                               ScrambleSeed seed) {
  std::vector<std::vector<uint8_t>> v(s, std::vector<uint8_t>(E));
  for (long j = 0; j < s; ++j) {
    uint64_t h = detail::node_root(seed, j) ^ 0xa5a5a5a5a5a5a5a5ULL;
    for (long l = 0; l < E; ++l) {
      h = detail::splitmix64(h);
      v[j][l] = static_cast<uint8_t>(h % static_cast<uint64_t>(b));
    }
  }
  return v;
}

PointSet digital_shift(const PointSet& ps, ScrambleSeed seed) {
  PointSet out = ps;
  out.provenance = PointSet::Provenance::shifted;
  out.seed = seed.seed;
  out.replicate = seed.replicate;
  auto v = shift_vector(ps.b, ps.s, ps.E, seed);
  for (long i = 0; i < ps.n; ++i)
    for (long j = 0; j < ps.s; ++j)
      for (long l = 0; l < ps.E; ++l)
        out.digit(i, j, l) =
            static_cast<uint8_t>((ps.digit(i, j, l) + v[j][l]) % ps.b);
  return out;
}

}  // namespace negadep
