#pragma once

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negadep/rational.hpp"

namespace negadep::boxes {

struct BaseMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptyInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotAnchored : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct AnchoredInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FullInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct MalformedRegion : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// gamma_b(x,x) = infinity.
constexpr int kGammaInf = INT_MAX;

/// Number of initial base-b digits shared by x and y in [0,1); kGammaInf
/// iff x == y. Well defined from floors, so terminating expansions are safe.
int gamma_b(long b, const Rat& x, const Rat& y);

/// Digit-array variant: first index where the arrays differ, kGammaInf if
/// all len digits agree.
int gamma_digits(const uint8_t* x, const uint8_t* y, long len);

/// Exact base-b rational num / b^depth, canonical (num not divisible by b
/// unless depth == 0).
struct BRational {
  Int num;
  long depth = 0;

  static BRational from_rat(long b, const Rat& x);  // throws if not b-adic
  Rat value(long b) const;
};

/// Smallest p >= 0 with x * b^p integral; throws std::domain_error if none.
long badic_depth(long b, const Rat& x);
bool is_badic(long b, const Rat& x);

/// Half-open interval [a, A) with 0 <= a < A <= 1 over base b.
/// Exact-arithmetic operations additionally require b-adic endpoints.
struct BoxInterval {
  long b = 2;
  Rat a, A;

  BoxInterval() = default;
  BoxInterval(long base, Rat lo, Rat hi);
  Rat length() const { return A - a; }
  long depth() const;  // max endpoint b-adic depth
  bool contains(const Rat& x) const { return x >= a && x < A; }
};

/// s-dimensional product of intervals sharing one base.
struct Box {
  long b = 2;
  std::vector<BoxInterval> f;

  Box() = default;
  Box(long base, std::vector<BoxInterval> factors);
  long s() const { return static_cast<long>(f.size()); }
  Rat volume() const;
  bool contains(const std::vector<Rat>& x) const;
};

/// The sequence V_i = vol((A x B) ∩ D_i) stored as an exact prefix V_0..V_q
/// plus the exact geometric tail V_i = tail_c * b^{-i} for i > q.
struct VolumeVector {
  long b = 2;
  std::vector<Rat> prefix;
  Rat tail_c;

  long q() const { return static_cast<long>(prefix.size()) - 1; }
  Rat entry(long i) const;
  Rat tail_sum(long r) const;  // sum_{i >= r} V_i
  Rat total() const { return tail_sum(0); }
  bool operator==(const VolumeVector& o) const;
};

/// V(A x A) for an interval.
VolumeVector volume_vector(const BoxInterval& A);
/// V(A x B) for two intervals over the same base.
VolumeVector volume_vector_pair(const BoxInterval& A, const BoxInterval& B);
/// Product-structure entry V_i(A x A) = prod_j V_{i_j}(A_j x A_j).
Rat volume_vector_box(const Box& A, const std::vector<long>& i);

/// A = [h b^{-r+1} + g b^{-r} - z, h b^{-r+1} + G b^{-r} + Z) with minimal r;
/// h is the index of the depth-(r-1) cell whose interior contains A.
struct UnanchoredForm {
  long r = 1;
  Int h;
  long g = 1, G = 1;
  Rat z, Z;
};

UnanchoredForm parse_unanchored(const BoxInterval& A);

/// Nonnegative coefficients of V(A x A) = sum_k alpha_k W_k^{(r-1)}
///                                      + sum_k tau_k Z_k,
/// where Z_k and W_k^{(r-1)} are the normalized volume vectors of the
/// anchored elementary k-interval and the elementary unanchored
/// (r-1,k)-interval. Anchored kind has alpha identically zero.
struct DecompCoefficients {
  enum class Kind { anchored, unanchored };
  Kind kind = Kind::anchored;
  long b = 2;
  long r = 1;
  std::vector<Rat> alpha;
  std::vector<Rat> tau;

  Rat sum() const;
};

/// Coefficients t_k for A = [0, x) (Kind::anchored, alpha empty).
DecompCoefficients anchored_coeffs(const BoxInterval& A);

/// Full routing: anchored / reflected right-anchored intervals go through
/// the anchored path, everything else through the two-case unanchored
/// construction.
DecompCoefficients unanchored_decompose(const BoxInterval& A);

/// Rebuilds the volume vector from coefficients (exact, incl. tail).
VolumeVector reconstruct_volume(const DecompCoefficients& dc);

/// Y_k^{(d)} = [b^{-(d+1)} - b^{-(2+k+d)}, b^{-(d+1)} + b^{-(2+k+d)}).
BoxInterval elementary_unanchored(long b, long d, long k);
/// Lower/upper half of Y_k^{(d)}, split at b^{-(d+1)}; half is 1 or 2.
BoxInterval elementary_unanchored_half(long b, long d, long k, int half);
/// 1_k = [0, b^{-k}).
BoxInterval elementary_anchored(long b, long k);

/// alpha~_{k,J} = prod_{j in J} alpha^{(j)}_{k_j} prod_{j notin J} tau^{(j)}_{k_j},
/// stored sparsely; d_j = r_j - 1 per coordinate.
struct ProductCoefficients {
  struct Term {
    std::vector<int> k;
    uint32_t J = 0;
    Rat coeff;
  };
  long s = 0;
  std::vector<int> d;
  std::vector<Term> terms;

  Rat total() const;
};

ProductCoefficients product_coeffs(const Box& A);

/// Region families of the unanchored analysis. E and Etilde constrain only
/// the coordinates they mention; remaining coordinates are [0,1) factors.
/// F1/F2 are the one-sided projections of F.
enum class RegionKind { D, E, Etilde, F, FK, F1, F2 };

struct RegionSpec {
  long b = 2;
  long s = 1;
  std::vector<int> k, d;
  uint32_t J = 0;
  uint32_t I = 0;
  uint32_t K = 0;
  bool hasI = false;
  bool hasK = false;
  RegionKind kind = RegionKind::D;
};

/// Per-coordinate (U-side, V-side) interval factors.
std::vector<std::pair<BoxInterval, BoxInterval>> region_factors(const RegionSpec& spec);

/// Vol(D) and Vol(F1) by the closed formulas; other kinds by direct products.
/// F1/F2 volumes are s-dimensional, the rest 2s-dimensional.
Rat region_volume(const RegionSpec& spec);

/// Membership of the pair (u, v); for F1/F2 only the matching side is tested.
bool region_contains(const RegionSpec& spec, const std::vector<Rat>& u,
                     const std::vector<Rat>& v);

}  // namespace negadep::boxes
