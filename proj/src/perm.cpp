#include "ortho/perm.hpp"

#include "ortho/numth.hpp"

namespace ortho {

const char* to_string(OrthoKind kind) {
  switch (kind) {
    case OrthoKind::Additive: return "additive";
    case OrthoKind::Multiplicative: return "multiplicative";
    case OrthoKind::Exponential: return "exponential";
  }
  throw std::invalid_argument("to_string: bad OrthoKind");
}

OrthoKind kind_from_string(std::string_view s) {
  if (s == "additive") return OrthoKind::Additive;
  if (s == "multiplicative") return OrthoKind::Multiplicative;
  if (s == "exponential") return OrthoKind::Exponential;
  throw std::invalid_argument("unknown orthomorphism kind: " + std::string(s));
}

Permutation::Permutation(int64_t n_, std::vector<int64_t> map_) : n(n_), map(std::move(map_)) {
  if (n < 2) throw std::invalid_argument("Permutation: modulus must be >= 2");
  if ((int64_t)map.size() != n - 1)
    throw std::invalid_argument("Permutation: map must have exactly n-1 entries");
}

bool Permutation::well_formed() const {
  if (n < 2 || (int64_t)map.size() != n - 1) return false;
  for (int64_t v : map)
    if (v < 1 || v > n - 1) return false;
  return true;
}

bool Permutation::is_bijection() const {
  if (!well_formed()) return false;
  std::vector<char> seen(n, 0);
  for (int64_t v : map) {
    if (seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

std::vector<int64_t> combined_map(const Permutation& sigma, OrthoKind kind) {
  if (!sigma.well_formed())
    throw std::invalid_argument("combined_map: permutation values out of range");
  std::vector<int64_t> image(sigma.n - 1);
  for (int64_t x = 1; x <= sigma.n - 1; ++x) {
    int64_t s = sigma.sigma(x);
    switch (kind) {
      case OrthoKind::Additive: image[x - 1] = (x + s) % sigma.n; break;
      case OrthoKind::Multiplicative: image[x - 1] = x * s % sigma.n; break;
      case OrthoKind::Exponential: image[x - 1] = numth::mod_pow(x, s, sigma.n); break;
    }
  }
  return image;
}

bool is_orthomorphism(const Permutation& sigma, OrthoKind kind) {
  if (!sigma.is_bijection()) return false;
  std::vector<int64_t> image = combined_map(sigma, kind);
  std::vector<char> seen(sigma.n, 0);
  for (int64_t v : image) {
    if (v == 0 || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

OrthoCertificate make_certificate(Permutation sigma, OrthoKind kind) {
  if (!is_orthomorphism(sigma, kind))
    throw consistency_error("make_certificate: sigma is not an orthomorphism of kind " +
                            std::string(to_string(kind)));
  OrthoCertificate cert;
  cert.n = sigma.n;
  cert.kind = kind;
  cert.image = combined_map(sigma, kind);
  cert.sigma = std::move(sigma);
  return cert;
}

VerifyOutcome verify_certificate(const OrthoCertificate& cert) {
  const Permutation& sigma = cert.sigma;
  if (cert.n < 2 || sigma.n != cert.n || (int64_t)sigma.map.size() != cert.n - 1 ||
      (int64_t)cert.image.size() != cert.n - 1)
    return {false, 0, "malformed certificate shape"};
  if (!sigma.well_formed()) return {false, 0, "sigma values out of range"};

  std::vector<char> seen(cert.n, 0);
  for (int64_t x = 1; x <= cert.n - 1; ++x) {
    int64_t v = sigma.sigma(x);
    if (seen[v]) return {false, x, "sigma repeats value " + std::to_string(v)};
    seen[v] = 1;
  }

  std::vector<int64_t> image = combined_map(sigma, cert.kind);
  for (int64_t x = 1; x <= cert.n - 1; ++x) {
    if (image[x - 1] == 0)
      return {false, x, "combined map hits 0 at x = " + std::to_string(x)};
    if (image[x - 1] != cert.image[x - 1])
      return {false, x,
              "stored image disagrees with recomputed value at x = " + std::to_string(x)};
  }
  std::fill(seen.begin(), seen.end(), 0);
  for (int64_t x = 1; x <= cert.n - 1; ++x) {
    int64_t v = image[x - 1];
    if (seen[v]) return {false, x, "combined map repeats value " + std::to_string(v)};
    seen[v] = 1;
  }
  return {true, 0, ""};
}

}  // namespace ortho
