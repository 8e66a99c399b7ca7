#pragma once
// Permutations of {1, ..., n-1} and the three orthomorphism predicates.
//
// A permutation sigma of {1, ..., n-1} is an orthomorphism of Z/n when the
// combined map x -> x op sigma(x) (mod n) is again a permutation of
// {1, ..., n-1}, for op one of +, *, ^. Exponents are applied as written,
// never reduced mod anything, so x^sigma(x) means literal repeated squaring.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ortho {

using std::int64_t;

// Raised when an internal invariant the code relies on fails to hold; callers
// treat it as a hard error, not a recoverable condition.
struct consistency_error : std::logic_error {
  using std::logic_error::logic_error;
};

enum class OrthoKind { Additive, Multiplicative, Exponential };

const char* to_string(OrthoKind kind);
OrthoKind kind_from_string(std::string_view s);

struct Permutation {
  int64_t n = 2;                // modulus; domain is {1, ..., n-1}
  std::vector<int64_t> map;     // map[i] = sigma(i + 1), so map.size() == n - 1

  Permutation() = default;
  Permutation(int64_t n_, std::vector<int64_t> map_);

  int64_t sigma(int64_t x) const { return map[x - 1]; }

  // All values in [1, n-1]; does not require bijectivity.
  bool well_formed() const;
  // well_formed plus each value hit exactly once.
  bool is_bijection() const;
};

// Image vector of the combined map; entry i is (i+1) op sigma(i+1) mod n, a
// value in [0, n-1]. A 0 entry is retained here so callers can report it.
std::vector<int64_t> combined_map(const Permutation& sigma, OrthoKind kind);

// True iff sigma is a bijection of {1, ..., n-1} and the combined map is too.
// A combined-map value of 0 simply makes this false; it is not an error.
bool is_orthomorphism(const Permutation& sigma, OrthoKind kind);

struct OrthoCertificate {
  int64_t n = 2;
  OrthoKind kind = OrthoKind::Additive;
  Permutation sigma;
  std::vector<int64_t> image;   // combined map values, each in [1, n-1]
};

// Builds a certificate, recomputing the image. Throws consistency_error if
// sigma is not actually an orthomorphism of the requested kind.
OrthoCertificate make_certificate(Permutation sigma, OrthoKind kind);

struct VerifyOutcome {
  bool ok = false;
  int64_t failed_index = 0;     // first x in [1, n-1] at which the check failed, 0 if n/a
  std::string reason;
};

// Recomputes the combined map and checks sigma bijectivity, image agreement
// with the stored image, and image bijectivity. Reports the first failure.
VerifyOutcome verify_certificate(const OrthoCertificate& cert);

}  // namespace ortho
