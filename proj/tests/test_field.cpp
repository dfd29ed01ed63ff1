#include <doctest.h>

#include <random>

#include "ree/field.hpp"

using namespace ree;

namespace {

// Polynomials over F_3 as coefficient vectors, low degree first.
using P3 = std::vector<int>;

P3 mulmod(const P3& a, const P3& b, const P3& monic) {
  int n = static_cast<int>(monic.size()) - 1;
  P3 r(2 * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % 3;
  for (int d = 2 * n - 1; d >= n; --d) {
    int c = r[d];
    if (!c) continue;
    for (int k = 0; k <= n; ++k) r[d - n + k] = ((r[d - n + k] - c * monic[k]) % 3 + 3) % 3;
  }
  r.resize(n);
  return r;
}

bool primitive(const P3& monic, int q) {
  int n = static_cast<int>(monic.size()) - 1;
  P3 x(n, 0), one(n, 0), p(n, 0);
  x[1] = 1;
  one[0] = 1;
  p = one;
  for (int k = 1; k < q; ++k) {
    p = mulmod(p, x, monic);
    if (p == one) return k == q - 1;
  }
  return false;
}

}  // namespace

TEST_CASE("modulus is the least primitive cubic and quintic") {
  for (int m : {1, 2}) {
    Field f(m);
    int n = 2 * m + 1, q = static_cast<int>(f.q());
    int found = -1;
    for (int code = 0; code < q && found < 0; ++code) {
      P3 monic(n + 1, 0);
      int c = code;
      for (int i = 0; i < n; ++i, c /= 3) monic[i] = c % 3;
      monic[n] = 1;
      if (monic[0] != 0 && primitive(monic, q)) found = code;
    }
    CHECK(static_cast<int>(f.modulus_code()) == found);
  }
}

TEST_CASE("field axioms on random elements") {
  Field f(2);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    auto a = static_cast<Field::Elem>(rng() % f.q()), b = static_cast<Field::Elem>(rng() % f.q()),
         c = static_cast<Field::Elem>(rng() % f.q());
    CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
    CHECK(f.add(a, f.neg(a)) == 0);
    CHECK(f.frobenius(f.add(a, b)) == f.add(f.frobenius(a), f.frobenius(b)));
    CHECK(f.twist(f.twist(f.frobenius(a))) == a);
    CHECK(f.twist3(f.twist3(a)) == f.frobenius(a));
    if (a != 0) {
      CHECK(f.mul(a, f.inv(a)) == 1);
      CHECK(f.pow(a, -3) == f.inv(f.mul(a, f.mul(a, a))));
    }
  }
}

TEST_CASE("integers embed through their residue mod 3") {
  Field f(1);
  CHECK(f.from_int(-1) == f.neg(1));
  CHECK(f.from_int(5) == f.neg(1));
  CHECK(f.from_int(3) == 0);
  CHECK_THROWS_AS(f.inv(0), ArithmeticError);
}

TEST_CASE("square roots and discrete logarithms") {
  Field f(1);
  for (Field::Elem a = 1; a < f.q(); ++a) {
    auto r = f.sqrt(a);
    CHECK(r.has_value() == f.is_square(a));
    if (r) CHECK(f.mul(*r, *r) == a);
  }
  Field g(3);
  for (std::uint64_t k : {0ull, 1ull, 17ull, 1000ull, 2185ull}) CHECK(g.discrete_log(g.omega(), g.omega_pow(k)) == k);
  CHECK(g.order(g.omega()) == g.q() - 1);
  CHECK(g.order(g.neg(1)) == 2);
}

TEST_CASE("proper subfields of GF(3^5) and GF(3^3)") {
  Field f(1), g(2);
  CHECK(f.in_proper_subfield(f.neg(1)));
  CHECK_FALSE(f.in_proper_subfield(f.omega()));
  CHECK(g.in_proper_subfield(1));
  CHECK_FALSE(g.in_proper_subfield(g.omega()));
}

TEST_CASE("factorization") {
  auto fs = factorize(26);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].prime == 2);
  CHECK(fs[1].prime == 13);
  std::uint64_t prod = 1;
  for (auto [p, e] : factorize(2187ull * 2187 * 2187 + 1))
    for (int i = 0; i < e; ++i) prod *= p;
  CHECK(prod == 2187ull * 2187 * 2187 + 1);
}
