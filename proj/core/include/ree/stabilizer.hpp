#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ree/psl2.hpp"
#include "ree/randgen.hpp"

namespace ree {

/**
 * An involution j of <X> = Ree(q)^x with its centralizer data: Bray
 * generators of C = Cent(j), generators of the derived group C' = PSL(2, q),
 * the split V = V3 + V4 into the +1 and -1 eigenspaces of j, and the
 * recognition of C3, the action of C' on V3. All SLPs are over X.
 */
struct CentralizerData {
  Tracked j;
  std::vector<Tracked> centralizer;
  std::vector<Tracked> derived;
  /// Rows: a basis of V3, then a basis of V4.
  Matrix c_g, c_g_inverse;
  std::shared_ptr<const Psl2Recognition> psl2;
  /// 7-dimensional elements of C' projecting onto psl2->standard_generators().
  std::vector<Tracked> standard7;

  /// Coordinates of the projection of p onto V3.
  Vec phi_v(const Vec& p) const;
  /// Action of g (which must commute with j) on V3.
  Matrix phi_g(const Matrix& g) const;
  /// Action on V4.
  Matrix phi_g4(const Matrix& g) const;
  /// phi_O(p) c3: the quadratic form attached to p.
  Vec form3(const Vec& p) const;
  /// The element of C' acting on V3 as c3 pi3(g2) c3^-1, for g2 in SL(2, q).
  Tracked pi7_standard(const Matrix& g2) const;
  /// The element of C' acting on V3 as g3.
  Tracked pi7(const Matrix& g3) const;
  /// p is outside V4 and its form is nondegenerate and represents 0.
  bool point_condition(const Vec& p) const;
};

/// Fill c_g from the eigenspaces of cd.j. Throws LasVegasFailure unless they have dimensions 3 and 4.
void set_eigenspace_basis(CentralizerData& cd);
/**
 * From cd.j, cd.c_g and cd.centralizer: two random generators of the derived
 * group, the irreducibility checks on V3 and V4 and the PSL(2, q)
 * recognition. Returns false when a check fails.
 */
bool complete_centralizer_data(CentralizerData& cd, Rng& rng);

struct StabilizerBudget {
  int involution = 256;       // random elements per involution search
  int bray = 64;              // random elements per centralizer attempt
  int centralizer_rounds = 8; // Bray extensions before giving up on j
  int restarts = 64;          // global restarts of random_stabilizer_element
  int mapping = 256;          // choices of Q per centralizer
};

/**
 * Random elements of point stabilizers in <X> = Ree(q)^x, as SLPs in X. Holds
 * a product replacement generator and caches the last centralizer. Not
 * thread-safe; use one instance per thread.
 */
class StabilizerFinder {
public:
  StabilizerFinder(std::span<const Matrix> gens, std::uint64_t seed, StabilizerBudget budget = {});

  int ngens() const { return ngens_; }
  Rng& rng() { return rng_; }
  ProductReplacement& random_elements() { return pr_; }
  /// Restart product replacement from the generators so that the SLPs of
  /// later random elements do not carry the history of earlier searches.
  void refresh_random_elements();

  /// A random involution with its SLP. Throws NotInGroup when an element
  /// order proves <X> is not in Ree(q), LasVegasFailure on budget exhaustion.
  Tracked find_involution();
  /// Bray's method for Cent(j) plus the checks that C' acts irreducibly on V3
  /// and V4 and that C3 is recognized as PSL(2, q). Throws LasVegasFailure.
  CentralizerData bray_centralizer(const Tracked& j);
  /**
   * Mapping inside the centralizer for P != Q with point_condition(P) and point_condition(Q):
   * g2 in C' with P g2 = Q, or nullopt (about half of the attempts).
   * Throws std::invalid_argument on violated preconditions.
   */
  std::optional<Tracked> find_mapping_element(const CentralizerData& cd, const Vec& p, const Vec& q);
  /// A uniformly random element of the stabilizer of the point p.
  Tracked random_stabilizer_element(const Vec& p);

  /// Centralizer data of the last successful stabilizer search.
  const CentralizerData* cached_centralizer() const { return cached_.get(); }
  /// Statistics of the last random_stabilizer_element call.
  struct Stats {
    int restarts = 0;
    int mapping_attempts = 0;
    int mapping_failures = 0;
  };
  const Stats& last_stats() const { return stats_; }

private:
  std::vector<Matrix> gens_;
  int ngens_;
  Rng rng_;
  ProductReplacement pr_;
  StabilizerBudget budget_;
  std::unique_ptr<CentralizerData> cached_;
  Stats stats_;
};

/**
 * Diagonalize an element of order prime to 3 that is conjugate into the
 * diagonal torus: returns (mu, z) with z^-1 s z = h(mu), where the eigenvalue
 * order follows h's exponent pattern and mu has the smallest encoding among
 * valid choices. nullopt when s has no such form.
 */
std::optional<std::pair<Elem, Matrix>> diagonalise_torus_element(const Matrix& s);

}  // namespace ree
