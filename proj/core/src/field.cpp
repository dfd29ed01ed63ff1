#include "ree/field.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace ree {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 a, u64 e, u64 n) {
  u64 r = 1 % n;
  a %= n;
  while (e) {
    if (e & 1) r = mulmod(r, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for 64-bit inputs.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<PrimePower> factorize(std::uint64_t n) {
  std::vector<u64> primes;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  for (u64 p : kSmall) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  factor_into(n, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> result;
  for (u64 p : primes) {
    if (!result.empty() && result.back().prime == p)
      ++result.back().exponent;
    else
      result.push_back({p, 1});
  }
  return result;
}

Field::Field(int m) : m_(m), n_(2 * m + 1) {
  if (m < 1 || m > 6) throw std::invalid_argument("Field: m must be in [1, 6], got " + std::to_string(m));
  q_ = 1;
  for (int i = 0; i < n_; ++i) q_ *= 3;
  t_ = 1;
  for (int i = 0; i < m_; ++i) t_ *= 3;
  half_ = (q_ - 1) / 2;
  qm1_factors_ = factorize(q_ - 1);

  log_.assign(q_, 0);
  exp_.assign(2 * static_cast<std::size_t>(q_ - 1), 0);

  // Search the lower coefficients in increasing integer encoding; the first
  // polynomial in which x has multiplicative order q - 1 is primitive.
  std::vector<int> digits(n_);
  for (std::uint32_t code = 1; code < q_; ++code) {
    if (code % 3 == 0) continue;  // constant term must be nonzero
    std::uint32_t c = code;
    for (int i = 0; i < n_; ++i) {
      digits[i] = static_cast<int>(c % 3);
      c /= 3;
    }
    // Walk powers of x: reduce x^n = -(c_{n-1} x^{n-1} + ... + c_0).
    std::vector<int> cur(n_, 0);
    cur[0] = 1;
    std::uint32_t k = 0;
    bool primitive = true;
    for (k = 0; k < q_ - 1; ++k) {
      std::uint32_t enc = 0, p3 = 1;
      for (int i = 0; i < n_; ++i) {
        enc += static_cast<std::uint32_t>(cur[i]) * p3;
        p3 *= 3;
      }
      if (k > 0 && enc == 1) {
        primitive = false;
        break;
      }
      exp_[k] = enc;
      int top = cur[n_ - 1];
      for (int i = n_ - 1; i > 0; --i) cur[i] = cur[i - 1];
      cur[0] = 0;
      if (top) {
        for (int i = 0; i < n_; ++i) cur[i] = ((cur[i] - top * digits[i]) % 3 + 3) % 3;
      }
    }
    if (!primitive) continue;
    modulus_ = digits;
    modulus_code_ = code;
    break;
  }
  if (modulus_.empty()) throw std::logic_error("Field: no primitive polynomial found");

  for (std::uint32_t k = 0; k < q_ - 1; ++k) {
    log_[exp_[k]] = k;
    exp_[k + q_ - 1] = exp_[k];
  }

  // zech[d] = log(1 + omega^d), with kNone where 1 + omega^d = 0.
  zech_.assign(q_ - 1, kNone);
  for (std::uint32_t d = 0; d < q_ - 1; ++d) {
    std::uint32_t e = exp_[d];
    // Add 1 to the constant digit.
    std::uint32_t c0 = e % 3;
    std::uint32_t s = e - c0 + (c0 + 1) % 3;
    if (s != 0) zech_[d] = log_[s];
  }

  frob_pow_.resize(n_);
  std::uint64_t p = 1;
  for (int k = 0; k < n_; ++k) {
    frob_pow_[k] = p % (q_ - 1);
    p *= 3;
  }
}

Field::Elem Field::from_int(long long v) const {
  long long r = ((v % 3) + 3) % 3;
  return static_cast<Elem>(r);
}

Field::Elem Field::pow_log(Elem a, std::uint64_t e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  u64 l = static_cast<u64>(log_[a]) * (e % (q_ - 1)) % (q_ - 1);
  return exp_[l];
}

Field::Elem Field::pow(Elem a, long long e) const {
  if (e >= 0) return pow_log(a, static_cast<u64>(e));
  if (a == 0) throw ArithmeticError("negative power of zero");
  long long r = e % static_cast<long long>(q_ - 1);
  if (r < 0) r += q_ - 1;
  return pow_log(a, static_cast<u64>(r));
}

Field::Elem Field::pow_u(Elem a, unsigned __int128 e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  return pow_log(a, static_cast<u64>(e % (q_ - 1)));
}

Field::Elem Field::frobenius_power(Elem a, int k) const {
  k %= n_;
  if (k < 0) k += n_;
  if (a == 0) return 0;
  u64 l = static_cast<u64>(log_[a]) * frob_pow_[k] % (q_ - 1);
  return exp_[l];
}

std::optional<Field::Elem> Field::sqrt(Elem a) const {
  if (a == 0) return Elem{0};
  if (!is_square(a)) return std::nullopt;
  // q = 3 (mod 4), so a^((q+1)/4) is a root.
  Elem r = pow_log(a, (static_cast<u64>(q_) + 1) / 4);
  Elem r2 = neg(r);
  return std::min(r, r2);
}

std::optional<std::uint64_t> Field::discrete_log(Elem base, Elem x) const {
  if (base == 0 || x == 0) throw ArithmeticError("discrete_log: zero argument");
  const u64 n = order(base);
  u64 s = 1;
  while (s * s < n) ++s;
  // Baby steps: x * base^-j.
  std::unordered_map<Elem, u64> baby;
  baby.reserve(s * 2);
  Elem binv = inv(base);
  Elem cur = x;
  for (u64 j = 0; j < s; ++j) {
    baby.emplace(cur, j);
    cur = mul(cur, binv);
  }
  // Giant steps: base^(i s).
  Elem giant = pow_log(base, s);
  Elem g = 1;
  for (u64 i = 0; i <= s; ++i) {
    auto it = baby.find(g);
    if (it != baby.end()) {
      u64 k = (i * s + it->second) % n;
      return k;
    }
    g = mul(g, giant);
  }
  return std::nullopt;
}

std::uint64_t Field::order(Elem a) const {
  if (a == 0) throw ArithmeticError("order of zero");
  u64 o = q_ - 1;
  for (const auto& pp : qm1_factors_) {
    for (int i = 0; i < pp.exponent; ++i) {
      if (pow_log(a, o / pp.prime) == 1)
        o /= pp.prime;
      else
        break;
    }
  }
  return o;
}

bool Field::in_proper_subfield(Elem a) const {
  for (int d = 1; d < n_; ++d) {
    if (n_ % d == 0 && frobenius_power(a, d) == a) return true;
  }
  return false;
}

std::vector<int> Field::coefficients(Elem a) const {
  std::vector<int> c(n_);
  for (int i = 0; i < n_; ++i) {
    c[i] = static_cast<int>(a % 3);
    a /= 3;
  }
  return c;
}

Field::Elem Field::from_coefficients(const std::vector<int>& c) const {
  Elem e = 0, p = 1;
  for (int i = 0; i < n_; ++i) {
    int d = i < static_cast<int>(c.size()) ? ((c[i] % 3) + 3) % 3 : 0;
    e += static_cast<Elem>(d) * p;
    p *= 3;
  }
  return e;
}

std::uint32_t Field::log_omega(Elem a) const {
  if (a == 0) throw ArithmeticError("log of zero");
  return log_[a];
}

}  // namespace ree
