#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ree {

/// Raised for arithmetic that has no answer (inverse of zero and similar).
class ArithmeticError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Prime-power factorization entry.
struct PrimePower {
  std::uint64_t prime;
  int exponent;
};

std::vector<PrimePower> factorize(std::uint64_t n);

/**
 * The field GF(3^(2m+1)).
 *
 * Elements are identified with their canonical integer encoding
 * sum(c_i * 3^i) over the polynomial basis 1, x, ..., x^(2m). The modulus is
 * the least primitive monic polynomial of degree 2m+1 when the lower
 * coefficients are read as such an integer.
 *
 * Arithmetic runs through logarithm, antilogarithm and Zech tables that are
 * built once from polynomial arithmetic modulo the modulus. Instances are
 * immutable after construction.
 */
class Field {
public:
  using Elem = std::uint32_t;

  explicit Field(int m);

  static std::shared_ptr<const Field> make(int m) { return std::make_shared<const Field>(m); }

  int m() const { return m_; }
  int degree() const { return n_; }
  std::uint32_t q() const { return q_; }
  /// 3^m
  std::uint64_t t() const { return t_; }
  /// Coefficients c_0..c_{n-1} of the modulus x^n + c_{n-1}x^{n-1} + ... + c_0.
  const std::vector<int>& modulus() const { return modulus_; }
  /// Encoding of the modulus' lower part, i.e. sum(c_i * 3^i).
  std::uint32_t modulus_code() const { return modulus_code_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  /// The class of x, a primitive element.
  Elem omega() const { return exp_[1]; }
  /// Embed an integer via its residue mod 3.
  Elem from_int(long long v) const;
  bool valid(std::uint64_t code) const { return code < q_; }

  Elem add(Elem a, Elem b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    std::uint32_t la = log_[a], lb = log_[b];
    std::uint32_t d = lb >= la ? lb - la : lb + (q_ - 1) - la;
    std::uint32_t z = zech_[d];
    if (z == kNone) return 0;
    return exp_[la + z];
  }
  Elem neg(Elem a) const {
    if (a == 0) return 0;
    return exp_[log_[a] + half_];
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elem inv(Elem a) const {
    if (a == 0) throw ArithmeticError("inverse of zero in GF(3^" + std::to_string(n_) + ")");
    std::uint32_t l = log_[a];
    return l == 0 ? 1 : exp_[(q_ - 1) - l];
  }
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  /// a^e for any integer exponent (negative requires a != 0).
  Elem pow(Elem a, long long e) const;
  Elem pow_u(Elem a, unsigned __int128 e) const;

  /// x -> x^3
  Elem frobenius(Elem a) const { return pow_log(a, 3); }
  /// x -> x^(3^k), k taken mod 2m+1
  Elem frobenius_power(Elem a, int k) const;
  /// x -> x^t
  Elem twist(Elem a) const { return frobenius_power(a, m_); }
  /// x -> x^(3t); equals untwist
  Elem twist3(Elem a) const { return frobenius_power(a, m_ + 1); }
  /// Inverse of twist, x -> x^(3^(m+1)).
  Elem untwist(Elem a) const { return frobenius_power(a, m_ + 1); }

  bool is_square(Elem a) const { return a == 0 || (log_[a] % 2 == 0); }
  /// Square root as x^((q+1)/4); the smaller encoding of the two roots.
  std::optional<Elem> sqrt(Elem a) const;

  /// Baby-step giant-step discrete logarithm of x to the given base.
  std::optional<std::uint64_t> discrete_log(Elem base, Elem x) const;
  /// Multiplicative order of a nonzero element.
  std::uint64_t order(Elem a) const;
  /// True iff x^(3^d) = x for a proper divisor d of 2m+1.
  bool in_proper_subfield(Elem a) const;
  /// True iff x lies in GF(3^d).
  bool in_subfield(Elem a, int d) const { return frobenius_power(a, d) == a; }

  /// Prime factorization of q - 1.
  const std::vector<PrimePower>& order_factors() const { return qm1_factors_; }

  /// Coefficient vector (length 2m+1) of an element.
  std::vector<int> coefficients(Elem a) const;
  Elem from_coefficients(const std::vector<int>& c) const;

  /// Discrete log w.r.t. omega via the internal table (table lookup, not BSGS).
  std::uint32_t log_omega(Elem a) const;
  Elem omega_pow(std::uint64_t k) const { return exp_[k % (q_ - 1)]; }

private:
  Elem pow_log(Elem a, std::uint64_t e) const;

  static constexpr std::uint32_t kNone = 0xffffffffu;
  int m_;
  int n_;
  std::uint32_t q_;
  std::uint64_t t_;
  std::uint32_t half_;
  std::vector<int> modulus_;
  std::uint32_t modulus_code_ = 0;
  std::vector<std::uint32_t> log_;
  std::vector<Elem> exp_;  // length 2(q-1)
  std::vector<std::uint32_t> zech_;
  std::vector<std::uint64_t> frob_pow_;  // 3^k mod (q-1)
  std::vector<PrimePower> qm1_factors_;
};

using FieldPtr = std::shared_ptr<const Field>;

/// A field element bound to its field, for readable formulas.
class Fq {
public:
  Fq() = default;
  Fq(const Field* f, Field::Elem v) : f_(f), v_(v) {}

  const Field* field() const { return f_; }
  Field::Elem value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  friend Fq operator+(Fq a, Fq b) { return {a.f_, a.f_->add(a.v_, b.v_)}; }
  friend Fq operator-(Fq a, Fq b) { return {a.f_, a.f_->sub(a.v_, b.v_)}; }
  friend Fq operator*(Fq a, Fq b) { return {a.f_, a.f_->mul(a.v_, b.v_)}; }
  friend Fq operator/(Fq a, Fq b) { return {a.f_, a.f_->div(a.v_, b.v_)}; }
  Fq operator-() const { return {f_, f_->neg(v_)}; }
  Fq& operator+=(Fq b) { return *this = *this + b; }
  Fq& operator-=(Fq b) { return *this = *this - b; }
  Fq& operator*=(Fq b) { return *this = *this * b; }
  friend bool operator==(Fq a, Fq b) { return a.v_ == b.v_; }
  friend bool operator!=(Fq a, Fq b) { return a.v_ != b.v_; }

  Fq inv() const { return {f_, f_->inv(v_)}; }
  Fq pow(long long e) const { return {f_, f_->pow(v_, e)}; }
  Fq frob() const { return {f_, f_->frobenius(v_)}; }
  Fq twist() const { return {f_, f_->twist(v_)}; }
  Fq twist3() const { return {f_, f_->twist3(v_)}; }
  Fq untwist() const { return {f_, f_->untwist(v_)}; }

private:
  const Field* f_ = nullptr;
  Field::Elem v_ = 0;
};

}  // namespace ree
