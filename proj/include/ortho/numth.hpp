#pragma once
// Elementary number theory kernels used throughout the toolkit.
// Everything here is for desk-scale moduli (n well below 10^6), so trial
// division and table-based discrete logs are the right tools.

#include <cstdint>
#include <utility>
#include <vector>

namespace ortho::numth {

using std::int64_t;

struct FactoredInt {
  int64_t value = 1;
  std::vector<std::pair<int64_t, int>> factors;  // (prime, exponent), primes ascending
};

// Trial-division factorization. m >= 1; factorize(1) has an empty factor list.
FactoredInt factorize(int64_t m);

bool is_squarefree(const FactoredInt& f);
bool is_squarefree(int64_t m);

// All divisors of f.value, sorted ascending.
std::vector<int64_t> divisors(const FactoredInt& f);

// gcd(x mod n, n) taken in [1, n]; rank(0, n) == n.
int64_t rank(int64_t x, int64_t n);

int64_t totient(int64_t m);

// x^e mod n by square-and-multiply; e >= 0, mod_pow(x, 0, n) == 1 mod n.
int64_t mod_pow(int64_t x, int64_t e, int64_t n);

bool is_prime(int64_t m);

// Smallest generator of (Z/p)^x for an odd prime p. Throws otherwise.
int64_t primitive_root(int64_t p);

// Discrete log base g modulo an odd prime p: returns t in [0, p-2] with
// g^t = y (mod p). g must be a primitive root and y must not be 0 mod p.
int64_t dlog(int64_t g, int64_t y, int64_t p);

// Full dlog table for one prime: table[y] = dlog of y, indexed by y in [1, p-1].
std::vector<int64_t> dlog_table(int64_t g, int64_t p);

}  // namespace ortho::numth
