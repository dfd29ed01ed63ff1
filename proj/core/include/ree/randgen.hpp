#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ree/slp.hpp"

namespace ree {

/**
 * Product replacement with an accumulator. Every slot carries an SLP over the
 * original generators, so returned elements are certified words.
 */
class ProductReplacement {
public:
  ProductReplacement(std::vector<Tracked> gens, std::uint64_t seed, int slots = 10, int mixing = 50);

  Tracked next();
  Rng& rng() { return rng_; }
  /// Restart the random stream without touching the mixed slots.
  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  /// Forget accumulated history: the accumulator is reset to the identity.
  void reset_accumulator();
  int ngens() const { return ngens_; }

private:
  void step();
  std::vector<Tracked> slots_;
  Tracked acc_;
  Rng rng_;
  int ngens_;
};

/**
 * Random elements of the normal closure in <X> of a seed set (by default the
 * commutators of pairs of generators), i.e. of the derived group when the
 * seeds are commutators.
 */
class NormalClosureGenerator {
public:
  NormalClosureGenerator(std::vector<Tracked> gens, std::uint64_t seed, int slots = 10, int mixing = 50);
  NormalClosureGenerator(std::vector<Tracked> gens, std::vector<Tracked> seeds, std::uint64_t seed, int slots = 10,
                         int mixing = 50);

  Tracked next();

private:
  void init(std::vector<Tracked> seeds, int slots, int mixing);
  void step();
  ProductReplacement outer_;
  std::vector<Tracked> slots_;
  Tracked acc_;
  Rng rng_;
};

/**
 * Exact element orders for Ree(q): every element order divides
 * E = lcm(18, q - 1, q^3 + 1), and the order is refined prime by prime.
 */
class OrderOracle {
public:
  explicit OrderOracle(const Field& f);

  /// nullopt when g^E != 1, which proves g is not in Ree(q).
  std::optional<std::uint64_t> order(const Matrix& g) const;
  /// 2-part check only; nullopt as for order().
  std::optional<bool> has_even_order(const Matrix& g) const;
  unsigned __int128 exponent() const { return exponent_; }

private:
  unsigned __int128 exponent_ = 1;
  std::vector<PrimePower> factors_;
};

/// Order of g in Ree(q) with the oracle cached per field; nullopt if g is not in Ree(q).
std::optional<std::uint64_t> element_order(const Matrix& g);
bool is_even_order(const Matrix& g);
/// g^(|g|/2) when |g| is even.
std::optional<Tracked> power_to_involution(const Tracked& g);

}  // namespace ree
