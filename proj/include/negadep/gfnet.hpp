#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "negadep/rational.hpp"

namespace negadep {

struct NonPrimeBase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionExceedsBase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Prime base b >= 2, primality checked by trial division at construction.
struct PrimeBase {
  long b;
  explicit PrimeBase(long base);
};

bool is_prime(long n);

/// One m x m generator matrix per coordinate, entries in {0,..,b-1}.
/// Matrices are applied to the base-b digit vector of the point index.
struct GeneratingMatrices {
  long b = 2;
  long s = 1;
  long m = 1;
  // mats[j] is row-major m*m; digit l of coordinate j of point i is
  // sum_c mats[j][l*m+c] * digit_c(i) mod b.
  std::vector<std::vector<uint8_t>> mats;

  uint8_t at(long j, long row, long col) const { return mats[j][row * m + col]; }
};

/// Points stored as per-coordinate digit arrays of uniform length E;
/// exact coordinate value is sum_l digit_l b^{-l}.
struct PointSet {
  enum class Provenance { deterministic, scrambled, shifted };

  long b = 2;
  long s = 1;
  long m = 0;  // net digit depth; n == b^m for generated nets
  long E = 0;  // digits stored per coordinate
  long n = 0;
  Provenance provenance = Provenance::deterministic;
  uint64_t seed = 0;
  uint64_t replicate = 0;
  std::vector<uint8_t> digits;  // n * s * E, digit(i,j,l) at ((i*s)+j)*E+l

  uint8_t digit(long i, long j, long l) const {
    return digits[(static_cast<std::size_t>(i) * s + j) * E + l];
  }
  uint8_t& digit(long i, long j, long l) {
    return digits[(static_cast<std::size_t>(i) * s + j) * E + l];
  }
  /// Exact value of coordinate j of point i.
  Rat coord(long i, long j) const;

  /// Ad-hoc point set from exact coordinate values (each must have a finite
  /// base-b expansion of length <= E).
  static PointSet from_values(long b, long s,
                              const std::vector<std::vector<Rat>>& pts, long E);
};

/// Faure generator matrices: C_j = (j-1)-th power of the upper-triangular
/// Pascal matrix mod b. Requires s <= b.
GeneratingMatrices build_faure_matrices(PrimeBase b, long s, long m);

/// Default digit depth leaves room for randomization below the net resolution.
inline long default_digit_depth(long m) { return m + 20; }

/// Deterministic digital net: b^m points, digits beyond position m are zero.
PointSet generate_net(const GeneratingMatrices& gm, long E);

/// Convenience: Faure net with default depth.
PointSet faure_net(long b, long s, long m, long E = -1);

/// True iff every k-elementary interval with |k| = m - t contains exactly
/// b^t points. Uses the first m digits of each coordinate.
bool verify_tms_net(const PointSet& ps, long t);

/// Stronger exhaustive check: every k-elementary interval with |k| <= m
/// contains exactly b^{m-|k|} points.
bool verify_all_elementary(const PointSet& ps);

/// Net file format: header "b s m E t", s blocks of m rows of m digits,
/// then an optional point dump.
void save_net(std::ostream& os, const GeneratingMatrices& gm,
              const PointSet* points = nullptr);
struct NetFile {
  GeneratingMatrices gm;
  long E = 0;
  long t = 0;
  std::optional<PointSet> points;
};
NetFile load_net(std::istream& is);

void save_net_file(const std::string& path, const GeneratingMatrices& gm,
                   const PointSet* points = nullptr);
NetFile load_net_file(const std::string& path);

}  // namespace negadep
