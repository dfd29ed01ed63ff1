#pragma once

#include <span>
#include <vector>

#include "ree/slp.hpp"

namespace ree {

// PSL(2, q) in its natural 2-dimensional copy (matrices of determinant 1
// modulo -1) and its symmetric square, identified with binary quadratic forms
// a x^2 + b xy + c y^2 written as row vectors (a, b, c).

/// S^2(g) in the monomial basis x^2, xy, y^2.
Matrix pi3(const Matrix& g);
/**
 * g of determinant 1 with pi3(g) = h. The sign is normalized so that the
 * first nonzero entry has the smaller encoding of its two negatives.
 * Throws NotInGroup when h is not in the image.
 */
Matrix pi3_invert(const Matrix& h);
/// Equality in PSL(2, q): a = b or a = -b.
bool psl2_equal(const Matrix& a, const Matrix& b);
/// Upper unipotent [[1, x], [0, 1]].
Matrix sl2_upper(const Field& f, Elem x);
/// Lower unipotent [[1, 0], [x, 1]].
Matrix sl2_lower(const Field& f, Elem x);
Matrix sl2_diagonal(const Field& f, Elem a);

enum class FormType { Degenerate, Split, Anisotropic };
/// b^2 - ac, the discriminant of a x^2 + b xy + c y^2 in characteristic 3.
Elem form_discriminant(const Field& f, const Vec& form);
/// Degenerate, Split (nondegenerate and representing 0) or Anisotropic.
FormType classify_form(const Field& f, const Vec& form);
/**
 * g in SL(2, q) with (xy) pi3(g) proportional to a split form, built from
 * its two linear factors. Throws std::invalid_argument on other forms.
 */
Matrix split_form_conjugator(const Field& f, const Vec& form);
/**
 * Upper triangular g in SL(2, q) with p pi3(g) proportional to q, for split
 * forms p and q with nonzero x^2 coefficients. Solves
 * C^2 (l^2 - n) = a^2 - b for p = x^2 + a xy + b y^2, q = x^2 + l xy + n y^2;
 * nullopt when an x^2 coefficient vanishes.
 */
std::optional<Matrix> triangular_form_map(const Field& f, const Vec& p, const Vec& q);

/**
 * Constructive recognition of a 3-dimensional copy C3 of PSL(2, q) that
 * preserves a nondegenerate quadratic form, as the symmetric square of the
 * natural copy.
 *
 * c3 maps the given module onto S^2 of the natural module, so that
 * c3^-1 C3 c3 = Im pi3; the basis of the natural module is chosen so that
 * the torus generator is diag(omega, omega^-1) and the Borel subgroup of
 * upper triangular matrices is normalized by it. The standard generators
 * (torus d, an F_3-basis of upper unipotents, an F_3-basis of lower
 * unipotents) carry SLPs in the input generators. Immutable after
 * construction.
 */
class Psl2Recognition {
public:
  /// Throws LasVegasFailure if the input is reducible, has no unique invariant
  /// form, or a search exceeds `budget` random elements.
  Psl2Recognition(std::span<const Matrix> gens3, Rng& rng, int budget = 256);

  const Field& field() const { return *f_; }
  int ngens() const { return ngens_; }
  const Matrix& c3() const { return c3_; }
  const Matrix& c3_inverse() const { return c3_inv_; }

  /// rho: C3 -> PSL(2, q); throws NotInGroup if g3 is not in c3 Im(pi3) c3^-1.
  Matrix to_standard(const Matrix& g3) const;
  /// Inverse of rho: c3 pi3(g) c3^-1.
  Matrix from_standard(const Matrix& g2) const;

  /// Standard generators as 2x2 matrices with SLPs in the input generators:
  /// index 0 is d, then the upper and then the lower unipotent bases.
  const std::vector<Tracked>& standard_generators() const { return standard_; }
  const Tracked& torus() const { return standard_[0]; }
  const PrimeFieldBasis& upper_basis() const { return upper_; }
  const PrimeFieldBasis& lower_basis() const { return lower_; }

  /**
   * SLP over standard_generators() for g in the natural copy, from the
   * factorization g = L(c/a) diag(a, 1/a) U(b/a) (premultiplying by U(1)
   * when a = 0). Length O(log q).
   */
  Slp standard_word(const Matrix& g2) const;
  /// standard_word composed with the generators' SLPs: an SLP in the input generators.
  Slp membership(const Matrix& g2) const;
  /// [[0, 1], [-1, 0]] = U(1) L(-1) U(1) with its SLP in the input generators.
  Tracked weyl() const;

private:
  Slp upper_word(Elem x) const;
  Slp lower_word(Elem x) const;
  Slp torus_word(Elem a) const;

  const Field* f_;
  int ngens_;
  int n_;  // degree of F_q over F_3
  Matrix c3_, c3_inv_;
  std::vector<Tracked> standard_;
  PrimeFieldBasis upper_, lower_;
};

}  // namespace ree
