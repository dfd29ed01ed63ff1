#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ree/linalg.hpp"

namespace ree {

/// Exponents e_k with h(lambda) = diag(lambda^e_1, ..., lambda^e_7): t, 1-t, 2t-1, 0, 1-2t, t-1, -t.
std::array<long long, 7> h_exponents(const Field& f);

/// Coordinates of S(a, b, c) = alpha(a) beta(b) gamma(c) in U(q).
struct UElement {
  Elem a = 0, b = 0, c = 0;
  friend bool operator==(const UElement&, const UElement&) = default;
};

/// A point of the ovoid. Finite points carry their (a, b, c) parameters.
struct OvoidPoint {
  Vec coords;  // normalized projective representative
  bool infinity = false;
  UElement param;
  friend bool operator==(const OvoidPoint& x, const OvoidPoint& y) { return x.coords == y.coords; }
};

/// Outcome of the standard-copy recognition test.
struct RecognitionReport {
  enum class Verdict { Standard, NotInRee, Proper };
  Verdict verdict = Verdict::Standard;
  /// Which check failed: "determinant", "form", "spinor-norm", "octonion",
  /// "outer-automorphism", "reducible", "subfield"; empty on success.
  std::string failed_check;
  /// Index of the offending generator for NotInRee, else -1.
  int generator = -1;
  bool is_standard() const { return verdict == Verdict::Standard; }
};

/**
 * The standard copy Ree(q) < GL(7, q): explicit generators, U(q) coordinate
 * arithmetic, the ovoid, octonion and outer-automorphism data, and the
 * standard-copy recognition test. Construction precomputes the octonion table
 * and the exterior-square constituent used by the outer automorphism.
 */
class ReeStandard {
public:
  explicit ReeStandard(FieldPtr f);
  static std::shared_ptr<const ReeStandard> make(int m) { return std::make_shared<const ReeStandard>(Field::make(m)); }

  const Field& field() const { return *f_; }
  const Field* fp() const { return f_.get(); }
  const FieldPtr& field_ptr() const { return f_; }

  Matrix alpha(Elem x) const;
  Matrix beta(Elem x) const;
  Matrix gamma(Elem x) const;
  /// Throws ArithmeticError for lambda = 0.
  Matrix h(Elem lambda) const;
  Matrix upsilon() const;
  Matrix s_matrix(Elem a, Elem b, Elem c) const;
  Matrix s_matrix(const UElement& u) const { return s_matrix(u.a, u.b, u.c); }
  /// The invariant form antidiag(1, 1, 1, -1, 1, 1, 1).
  const Matrix& form() const { return form_; }
  /// S(1,0,0), h(omega), Upsilon.
  std::vector<Matrix> generators() const;
  /// h(-1)
  Matrix standard_involution() const { return h(f_->neg(1)); }
  /// Upsilon, h(omega), S(0,1,0): generators of the centralizer of h(-1).
  std::vector<Matrix> involution_centralizer_generators() const;

  UElement u_mul(const UElement& x, const UElement& y) const;
  UElement u_inv(const UElement& x) const;
  /// x^y = y^-1 x y
  UElement u_conj(const UElement& x, const UElement& y) const;
  /// x^h(lambda)
  UElement u_h_conj(const UElement& x, Elem lambda) const;
  /// Coordinates of an element of U(q); nullopt if the matrix is not of the form S(a,b,c).
  std::optional<UElement> u_from_matrix(const Matrix& m) const;

  /// The finite ovoid point with parameters (a, b, c), i.e. the first row of S(a, b, c).
  Vec ovoid_vector(Elem a, Elem b, Elem c) const;
  OvoidPoint p_infinity() const;
  OvoidPoint p_zero() const;
  OvoidPoint ovoid_point(Elem a, Elem b, Elem c) const;
  std::optional<OvoidPoint> ovoid_membership(const Vec& p) const;
  /// P * g; throws NotInGroup when the image leaves the ovoid.
  OvoidPoint ovoid_action(const OvoidPoint& p, const Matrix& g) const;
  /**
   * Ovoid points fixed by g. Eigenspaces of dimension >= 3 are enumerated
   * projectively and must have at most 2*10^6 points (std::domain_error
   * otherwise); the identity is handled by enumerating the ovoid when q^3+1
   * is within the same limit.
   */
  std::vector<OvoidPoint> fixed_points(const Matrix& g) const;
  bool fixes_a_point(const Matrix& g) const;

  /// Structure constants: row (i<j) in lexicographic pair order holds e_i x e_j.
  const Matrix& octonion_table() const { return octonion_; }
  /// Coefficient of e_k in e_i x e_j.
  Elem octonion(int i, int j, int k) const;
  bool preserves_octonions(const Matrix& g) const;
  /**
   * Exceptional outer automorphism of G2(q) restricted to g: the action of
   * Lambda^2(g) on the middle 7-dimensional constituent, entrywise x -> x^(3^m),
   * in the basis that fixes the standard generators. nullopt when g does not
   * stabilize the constituent filtration (g outside G2(q)).
   */
  std::optional<Matrix> outer_automorphism(const Matrix& g) const;

  /// Step 1 of recognition for a single matrix: determinant, form, spinor norm,
  /// octonions, outer automorphism. Returns the failed check or empty.
  std::string membership_failure(const Matrix& g) const;
  bool in_ree(const Matrix& g) const { return membership_failure(g).empty(); }
  /// Decide whether <X> is the standard copy (Las Vegas on the properness part).
  RecognitionReport recognize_standard(std::span<const Matrix> gens, Rng& rng) const;

  /// Trace; a complete conjugacy invariant for elements of order prime to 3.
  Elem trace_class(const Matrix& g) const { return g.trace(); }

private:
  void build_octonion_table();
  void build_outer_automorphism();

  FieldPtr f_;
  Matrix form_;
  Matrix octonion_;          // 21 x 7
  Matrix ext_basis_;         // 21 x 21: rows adapted to the filtration 7 < 14 < 21
  Matrix ext_basis_inv_;
  Matrix outer_fix_;         // normalizing change of basis
  Matrix outer_fix_inv_;
};

using ReePtr = std::shared_ptr<const ReeStandard>;

}  // namespace ree
