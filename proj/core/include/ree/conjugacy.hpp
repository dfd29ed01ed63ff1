#pragma once

#include <span>
#include <vector>

#include "ree/stabilizer.hpp"
#include "ree/standard.hpp"

namespace ree {

/// Intermediate data of a successful conjugation, in the order it is built.
struct ConjugationTranscript {
  Matrix j_g, j_s;       // involutions of <X> and of the standard copy
  Matrix c_g, c_s;       // eigenspace bases, 3-space first
  int twist = 0;         // k with V^G = (V^S)^(phi^k) on both summands
  Matrix c3, c4, c7;     // module isomorphisms and their diagonal join
  Matrix form;           // form preserved by <X>^(c_g^-1 c7 c_s)
  Elem a = 0;            // ratio of the form on the 3-space to that on the 4-space
  Matrix c_j;            // diag(1, x, 1, x, 1, x, 1) with x^2 = a
  int restarts = 0;      // rounds that failed before the final one
  int final_test_failures = 0;  // of those, rounds rejected by the last recognition test
};

struct ConjugationResult {
  Matrix g;  // <X>^g = Ree(q)
  ConjugationTranscript transcript;
};

struct ConjugacyBudget {
  int rounds = 16;  // global restarts
  StabilizerBudget stabilizer;
};

/**
 * For <X> a GL(7, q)-conjugate of the standard copy, g with <X>^g = Ree(q).
 * Throws NotInGroup when every round reached the final recognition test and
 * failed it, LasVegasFailure on other budget exhaustion.
 */
ConjugationResult conjugate_to_standard(const ReeStandard& ree, std::span<const Matrix> gens, std::uint64_t seed,
                                        ConjugacyBudget budget = {});

/// x -> x^g and its inverse y -> y^(g^-1).
class ConjugationIsomorphism {
public:
  explicit ConjugationIsomorphism(Matrix g) : g_(std::move(g)), g_inv_(g_.inverse()) {}
  Matrix operator()(const Matrix& x) const { return g_inv_ * x * g_; }
  Matrix inverse(const Matrix& y) const { return g_ * y * g_inv_; }
  const Matrix& matrix() const { return g_; }

private:
  Matrix g_, g_inv_;
};

ConjugationIsomorphism make_isomorphism(const ConjugationResult& r);

/// The standard generators conjugated by a random h in GL(7, q), and h.
std::pair<std::vector<Matrix>, Matrix> random_conjugate(const ReeStandard& ree, Rng& rng);

}  // namespace ree
