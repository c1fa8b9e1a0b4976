#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "negadep/gfnet.hpp"

namespace negadep {

/// (seed, replicate_index) fully determines every random permutation or
/// digit drawn; distinct replicate indices give independent streams.
struct ScrambleSeed {
  uint64_t seed = 0;
  uint64_t replicate = 0;
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix2(uint64_t a, uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 1)));
}

/// Stable hash of (seed, replicate, coordinate): root of the per-coordinate
/// permutation tree.
inline uint64_t node_root(ScrambleSeed s, long coordinate) {
  uint64_t h = splitmix64(s.seed);
  h = mix2(h, splitmix64(s.replicate * 0xda942042e4dd58b5ULL + 1));
  h = mix2(h, static_cast<uint64_t>(coordinate) + 0x632be59bd9b4e019ULL);
  return h;
}

/// Extends a tree node state by one observed digit.
inline uint64_t node_child(uint64_t state, uint8_t digit) {
  return mix2(state, static_cast<uint64_t>(digit) + 1);
}

/// Draws a uniform permutation of {0..b-1} from the node state
/// (Fisher-Yates on a splitmix64 stream).
struct HashPerms {
  void operator()(uint64_t state, long b, uint8_t* perm) const {
    for (long i = 0; i < b; ++i) perm[i] = static_cast<uint8_t>(i);
    uint64_t h = state;
    for (long i = b - 1; i > 0; --i) {
      h = splitmix64(h);
      long j = static_cast<long>(h % static_cast<uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
  }
};

struct IdentityPerms {
  void operator()(uint64_t, long b, uint8_t* perm) const {
    for (long i = 0; i < b; ++i) perm[i] = static_cast<uint8_t>(i);
  }
};

/// Nested uniform scrambling: digit l of each coordinate is permuted by a
/// permutation depending on all preceding digits of that coordinate.
/// Walks the prefix tree of the point set, deriving each node's permutation
/// lazily from its state; nothing is stored between digits.
template <typename PermSource>
PointSet owen_scramble_with(const PointSet& ps, ScrambleSeed seed,
                            const PermSource& perms) {
  PointSet out = ps;
  out.provenance = PointSet::Provenance::scrambled;
  out.seed = seed.seed;
  out.replicate = seed.replicate;
  const long b = ps.b;
  std::vector<uint8_t> perm(b);
  std::vector<long> group, bucket_of(ps.n);
  std::vector<std::vector<long>> buckets(b);
  for (long j = 0; j < ps.s; ++j) {
    group.resize(ps.n);
    std::iota(group.begin(), group.end(), 0);
    // Iterative DFS over (node state, digit level, point group).
    struct Frame {
      uint64_t state;
      long level;
      std::vector<long> pts;
    };
    std::vector<Frame> stack;
    stack.push_back({node_root(seed, j), 0, group});
    while (!stack.empty()) {
      Frame fr = std::move(stack.back());
      stack.pop_back();
      if (fr.level >= ps.E) continue;
      perms(fr.state, b, perm.data());
      for (auto& bk : buckets) bk.clear();
      for (long i : fr.pts) {
        uint8_t d = ps.digit(i, j, fr.level);
        out.digit(i, j, fr.level) = perm[d];
        buckets[d].push_back(i);
      }
      for (long d = 0; d < b; ++d) {
        if (buckets[d].empty()) continue;
        stack.push_back({node_child(fr.state, static_cast<uint8_t>(d)),
                         fr.level + 1, buckets[d]});
      }
    }
  }
  return out;
}

}  // namespace detail

/// Owen nested uniform scrambling of a deterministic point set.
PointSet owen_scramble(const PointSet& ps, ScrambleSeed seed);

/// Digitwise addition mod b of one shared random vector v with E digits per
/// coordinate; the same v is applied to every point.
PointSet digital_shift(const PointSet& ps, ScrambleSeed seed);

/// The shift vector used by digital_shift for the given seed (for tests).
std::vector<std::vector<uint8_t>> shift_vector(long b, long s, long E,
                                               ScrambleSeed seed);

}  // namespace negadep
