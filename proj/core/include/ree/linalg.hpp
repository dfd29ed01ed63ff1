#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ree/field.hpp"

namespace ree {

using Elem = Field::Elem;
using Vec = std::vector<Elem>;
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) drawn from the generator (portable, not std::distribution).
inline std::uint64_t uniform(Rng& rng, std::uint64_t n) { return rng() % n; }

/**
 * Dense matrix over a Field, row-major. Vectors are rows and groups act on
 * the right: v -> v * g.
 */
class Matrix {
public:
  Matrix() = default;
  Matrix(const Field* f, int rows, int cols) : f_(f), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0) {}
  Matrix(const Field* f, int n) : Matrix(f, n, n) {}

  static Matrix identity(const Field* f, int n);
  static Matrix from_rows(const Field* f, const std::vector<Vec>& rows);
  static Matrix diagonal(const Field* f, const Vec& d);
  static Matrix antidiagonal(const Field* f, const Vec& d);
  static Matrix random(const Field* f, int rows, int cols, Rng& rng);
  static Matrix random_invertible(const Field* f, int n, Rng& rng);

  const Field* field() const { return f_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return rows_; }
  bool square() const { return rows_ == cols_; }

  Elem& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  Elem operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  Fq at(int i, int j) const { return {f_, (*this)(i, j)}; }
  Vec row(int i) const;
  void set_row(int i, const Vec& v);
  const std::vector<Elem>& data() const { return a_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  Matrix scaled(Elem s) const;

  bool is_identity() const;
  bool is_zero() const;
  bool is_diagonal() const;
  bool is_upper_triangular() const;

  Matrix transpose() const;
  Elem det() const;
  Elem trace() const;
  int rank() const;
  /// Throws ArithmeticError when singular.
  Matrix inverse() const;
  Matrix pow(unsigned __int128 e) const;
  Matrix pow_signed(long long e) const;
  /// Entrywise x -> x^(3^k).
  Matrix frobenius(int k) const;
  /// Submatrix on the given row and column index sets.
  Matrix block(std::span<const int> rows, std::span<const int> cols) const;
  Matrix block(int r0, int c0, int nr, int nc) const;

  /// Hash for containers.
  std::size_t hash() const;

private:
  const Field* f_ = nullptr;
  int rows_ = 0, cols_ = 0;
  std::vector<Elem> a_;
};

struct MatrixHash {
  std::size_t operator()(const Matrix& m) const { return m.hash(); }
};

/// Vector-matrix product v * g.
Vec vec_mul(const Field& f, const Vec& v, const Matrix& g);
Elem dot(const Field& f, const Vec& u, const Vec& v);
/// u * B * v^T
Elem bilinear(const Field& f, const Vec& u, const Matrix& gram, const Vec& v);
Vec vec_add(const Field& f, const Vec& u, const Vec& v);
Vec vec_scale(const Field& f, const Vec& u, Elem s);
bool vec_is_zero(const Vec& v);

/// Canonical projective representative: first nonzero coordinate equals 1.
Vec normalize_projective(const Field& f, Vec v);
/// Equality of projective points given as nonzero vectors.
bool projectively_equal(const Field& f, const Vec& u, const Vec& v);

/**
 * Row echelon utilities. `rref` reduces in place and returns pivot columns.
 */
std::vector<int> rref(Matrix& m);

/// Basis (as rows, reduced echelon form) of the left kernel {v : v * a = 0}.
Matrix null_space(const Matrix& a);
/// Basis of the right kernel {x : a * x^T = 0}, returned as rows.
Matrix right_null_space(const Matrix& a);
/// {v : v * g = lambda v}
Matrix eigenspace(const Matrix& g, Elem lambda);
/// Row space basis in reduced echelon form.
Matrix row_space(const Matrix& rows);
/// Whether v lies in the row span of `basis` (basis in rref).
bool in_span(const Matrix& basis_rref, const Vec& v);
/// Solve x * a = b for a row vector x; nullopt if inconsistent.
std::optional<Vec> solve_left(const Matrix& a, const Vec& b);

/**
 * Coordinates over the prime field F_3 relative to an F_3-basis of F_q.
 * Construction throws std::invalid_argument when the elements are not a basis.
 */
class PrimeFieldBasis {
public:
  PrimeFieldBasis() = default;
  PrimeFieldBasis(const Field& f, std::vector<Elem> basis);

  static bool is_basis(const Field& f, std::span<const Elem> elems);
  /// Indices of the first maximal F_3-independent subsequence, scanning in order.
  static std::vector<std::size_t> select_independent(const Field& f, std::span<const Elem> elems);
  /// c with x = sum c_i * basis_i, entries in {0, 1, 2}.
  std::vector<int> coordinates(Elem x) const;
  const std::vector<Elem>& basis() const { return basis_; }

private:
  const Field* f_ = nullptr;
  std::vector<Elem> basis_;
  std::vector<std::vector<int>> inverse_;  // inverse of the coefficient matrix over F_3
};

// ---------------------------------------------------------------------------
// Polynomials over the field, coefficient vectors low degree first.

using Poly = std::vector<Elem>;

void poly_trim(Poly& p);
Poly poly_mul(const Field& f, const Poly& a, const Poly& b);
Poly poly_sub(const Field& f, const Poly& a, const Poly& b);
/// Remainder of a modulo b (b nonzero).
Poly poly_mod(const Field& f, const Poly& a, const Poly& b);
/// Quotient and remainder.
std::pair<Poly, Poly> poly_divmod(const Field& f, const Poly& a, const Poly& b);
Poly poly_gcd(const Field& f, Poly a, Poly b);
Poly poly_monic(const Field& f, Poly a);
Poly poly_powmod(const Field& f, const Poly& base, unsigned __int128 e, const Poly& mod);
Elem poly_eval(const Field& f, const Poly& p, Elem x);

/// Characteristic polynomial det(xI - g), monic.
Poly char_poly(const Matrix& g);
/// Distinct roots in F_q of a nonzero polynomial.
std::vector<Elem> poly_roots(const Field& f, const Poly& p, Rng& rng);
/// Roots of the characteristic polynomial in F_q with multiplicities, sorted by encoding.
std::vector<std::pair<Elem, int>> char_poly_roots(const Matrix& g, Rng& rng);
std::vector<std::pair<Elem, int>> char_poly_roots(const Matrix& g);

// ---------------------------------------------------------------------------
// Module constructions.

/// Action on S^2(V), basis e_i e_j (i <= j) in lexicographic order.
Matrix symmetric_square(const Matrix& g);
/// Action on Lambda^2(V), basis e_i ^ e_j (i < j) in lexicographic order.
Matrix exterior_square(const Matrix& g);

/// Basis of {K symmetric : g K g^T = K for all g}.
std::vector<Matrix> invariant_bilinear_forms(std::span<const Matrix> gens);
/// Basis of {c : a_i c = c b_i for all i}.
std::vector<Matrix> intertwiners(std::span<const Matrix> a, std::span<const Matrix> b);
/**
 * Invertible c with c^-1 a_i c = b_i for all i, or nullopt. Searches random
 * combinations of the intertwiner basis when it has dimension > 1.
 */
std::optional<Matrix> module_isomorphism(std::span<const Matrix> a, std::span<const Matrix> b, Rng& rng);
std::optional<Matrix> module_isomorphism(std::span<const Matrix> a, std::span<const Matrix> b);

/// Smallest subspace containing the rows of `start` and invariant under gens (rref basis).
Matrix spin(const Matrix& start, std::span<const Matrix> gens);
Matrix spin(const Vec& v, std::span<const Matrix> gens);

/**
 * Randomized search for a proper invariant subspace. Vectors from eigenspaces
 * of random words in the generators are spun; a `target_dim` of 0 accepts any
 * proper nonzero submodule. nullopt after `attempts` unsuccessful words does
 * not prove irreducibility.
 */
std::optional<Matrix> spin_invariant_submodule(std::span<const Matrix> gens, int target_dim, Rng& rng, int attempts = 20);

/// Restriction of g to an invariant subspace with the given basis rows: b * g = r * b.
Matrix restrict_to_subspace(const Matrix& g, const Matrix& basis);

/// Reflection in v: x -> x - B(x,v)/Q(v) v with Q(v) = B(v,v)/2.
Matrix reflection(const Matrix& gram, const Vec& v);

class NotOrthogonal : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Spinor norm in {0, 1} of g with respect to the form `gram`: the square class
 * of the discriminant of the Wall form on V(1 - g), which equals the product
 * of Q-values over any factorization of g into reflections.
 */
int spinor_norm(const Matrix& g, const Matrix& gram);

// ---------------------------------------------------------------------------
// Text format: "dim q" then dim rows of integers.

std::string format_matrix(const Matrix& m);
std::string format_matrices(std::span<const Matrix> ms);
/// Throws FormatError on malformed input, entries >= q or a q different from f's.
Matrix read_matrix(std::istream& in, const Field* f);
/// "count n" followed by n matrices.
std::vector<Matrix> read_matrices(std::istream& in, const Field* f);
/// The q of the first matrix of a matrix or generator file, without consuming the stream.
std::uint32_t peek_field_size(std::istream& in);

}  // namespace ree
