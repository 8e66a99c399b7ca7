#include "ortho/numth.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ortho::numth {

FactoredInt factorize(int64_t m) {
  if (m < 1) throw std::invalid_argument("factorize: argument must be >= 1, got " + std::to_string(m));
  FactoredInt out;
  out.value = m;
  for (int64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.factors.emplace_back(p, e);
  }
  if (m > 1) out.factors.emplace_back(m, 1);
  return out;
}

bool is_squarefree(const FactoredInt& f) {
  for (const auto& [p, e] : f.factors)
    if (e > 1) return false;
  return true;
}

bool is_squarefree(int64_t m) { return is_squarefree(factorize(m)); }

std::vector<int64_t> divisors(const FactoredInt& f) {
  std::vector<int64_t> out{1};
  for (const auto& [p, e] : f.factors) {
    size_t base = out.size();
    int64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int64_t rank(int64_t x, int64_t n) {
  if (n < 1) throw std::invalid_argument("rank: modulus must be >= 1");
  int64_t r = ((x % n) + n) % n;
  return r == 0 ? n : std::gcd(r, n);
}

int64_t totient(int64_t m) {
  FactoredInt f = factorize(m);
  int64_t t = m;
  for (const auto& [p, e] : f.factors) t = t / p * (p - 1);
  return t;
}

int64_t mod_pow(int64_t x, int64_t e, int64_t n) {
  if (n < 1) throw std::invalid_argument("mod_pow: modulus must be >= 1");
  if (e < 0) throw std::invalid_argument("mod_pow: exponent must be >= 0");
  int64_t base = ((x % n) + n) % n;
  int64_t acc = 1 % n;
  while (e > 0) {
    if (e & 1) acc = acc * base % n;
    base = base * base % n;
    e >>= 1;
  }
  return acc;
}

bool is_prime(int64_t m) {
  if (m < 2) return false;
  for (int64_t p = 2; p * p <= m; ++p)
    if (m % p == 0) return false;
  return true;
}

int64_t primitive_root(int64_t p) {
  if (p < 3 || !is_prime(p))
    throw std::invalid_argument("primitive_root: need an odd prime, got " + std::to_string(p));
  FactoredInt f = factorize(p - 1);
  for (int64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [q, e] : f.factors) {
      if (mod_pow(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root: no generator found (non-prime input?)");
}

std::vector<int64_t> dlog_table(int64_t g, int64_t p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("dlog_table: modulus must be an odd prime");
  std::vector<int64_t> table(p, -1);
  int64_t acc = 1;
  for (int64_t t = 0; t < p - 1; ++t) {
    if (table[acc] != -1)
      throw std::invalid_argument("dlog_table: base is not a primitive root mod " + std::to_string(p));
    table[acc] = t;
    acc = acc * (g % p) % p;
  }
  return table;
}

int64_t dlog(int64_t g, int64_t y, int64_t p) {
  int64_t r = ((y % p) + p) % p;
  if (r == 0) throw std::invalid_argument("dlog: argument is 0 mod p, no discrete log exists");
  return dlog_table(g, p)[r];
}

}  // namespace ortho::numth
