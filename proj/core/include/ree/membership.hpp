#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ree/stabilizer.hpp"
#include "ree/standard.hpp"

namespace ree {

/**
 * Standard generators of O_3 of a point stabilizer: elements S(a_i, x_i, y_i),
 * S(0, b_i, z_i) and S(0, 0, c_i) whose a-, b- and c-coordinates form
 * F_3-bases of F_q. For the stabilizer of P0 the coordinates are read in the
 * frame conjugated by Upsilon, which swaps P0 and P_infinity.
 */
struct UnipotentGenerators {
  bool lower = false;
  std::vector<Tracked> a_gens, b_gens, c_gens;
  std::vector<UElement> a_coords, b_coords, c_coords;
  PrimeFieldBasis a_basis, b_basis, c_basis;
  /// All generators as emitted by preprocessing (U1 then U2).
  std::vector<Tracked> all;
};

struct StandardGenSets {
  UnipotentGenerators upper;  // O_3(G_{P_infinity}) = U(q)
  UnipotentGenerators lower;  // O_3(G_{P_0})
  /// Preprocessing rounds used (1 when the first pair of stabilizer elements worked).
  int rounds = 0;
};

struct MembershipStats {
  int outer_iterations = 0;  // rounds of the square test
  int random_elements = 0;   // elements r tried for an ovoid eigenspace
};

/**
 * Constructive membership in the standard copy Ree(q) = <X>: preprocessing of
 * the standard unipotent generators and the reduction of an arbitrary element
 * to an SLP in X. Not thread-safe (owns random state).
 */
class MembershipTester {
public:
  MembershipTester(ReePtr ree, std::span<const Matrix> gens, std::uint64_t seed, StabilizerBudget budget = {});

  /// Build the standard generators. Throws LasVegasFailure after `rounds` failed attempts.
  const StandardGenSets& preprocess(int rounds = 32);
  bool preprocessed() const { return sgs_.has_value(); }
  const StandardGenSets& standard_generators() const;

  /// S(a, b, c) (respectively Upsilon S(a, b, c) Upsilon for the lower set) with an SLP in X.
  Tracked express_u_element(const UnipotentGenerators& gens, const UElement& target) const;
  /// For g = h(lambda) S: x with g x = h(lambda), and lambda.
  std::pair<Tracked, Elem> row_reduce_left(const UnipotentGenerators& gens, const Matrix& g) const;
  /// For g = S h(lambda): x with x g = h(lambda), and lambda.
  std::pair<Tracked, Elem> row_reduce_right(const UnipotentGenerators& gens, const Matrix& g) const;
  /// For P != P_infinity: x in U(q) with P x = P_0 (upper), or for P != P_0:
  /// x in O_3(G_{P_0}) with P x = P_infinity (lower).
  Tracked map_point(const UnipotentGenerators& gens, const Vec& p) const;

  /**
   * SLP in X evaluating to g. Throws NotInGroup if g fails the membership
   * membership test of the standard copy, LasVegasFailure on budget exhaustion.
   */
  Slp element_to_slp(const Matrix& g, int budget = 256);
  const MembershipStats& last_stats() const { return stats_; }

  StabilizerFinder& stabilizer_finder() { return finder_; }
  const ReeStandard& ree() const { return *ree_; }

private:
  std::optional<UnipotentGenerators> build_unipotent_generators(const Tracked& s1, const Tracked& s2, bool lower);
  Matrix to_frame(const UnipotentGenerators& gens, const Matrix& g) const;

  ReePtr ree_;
  std::vector<Matrix> gens_;
  Rng rng_;
  StabilizerFinder finder_;
  std::optional<StandardGenSets> sgs_;
  MembershipStats stats_;
};

}  // namespace ree
