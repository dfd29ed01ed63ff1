#include "ree/randgen.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace ree {

ProductReplacement::ProductReplacement(std::vector<Tracked> gens, std::uint64_t seed, int slots, int mixing)
    : rng_(seed) {
  if (gens.empty()) throw std::invalid_argument("ProductReplacement: empty generating set");
  ngens_ = gens[0].w.ngens();
  const Matrix& g0 = gens[0].m;
  for (int i = 0; i < std::max<int>(slots, static_cast<int>(gens.size())); ++i) slots_.push_back(gens[i % gens.size()]);
  acc_ = tracked_identity(g0.field(), g0.rows(), ngens_);
  for (int i = 0; i < mixing; ++i) step();
}

void ProductReplacement::step() {
  std::size_t n = slots_.size();
  std::size_t i = uniform(rng_, n);
  std::size_t j = uniform(rng_, n - 1);
  if (j >= i) ++j;
  Tracked other = uniform(rng_, 2) ? slots_[j] : slots_[j].inverse();
  if (uniform(rng_, 2))
    slots_[i] = slots_[i] * other;
  else
    slots_[i] = other * slots_[i];
  acc_ = acc_ * slots_[i];
}

Tracked ProductReplacement::next() {
  step();
  return acc_;
}

void ProductReplacement::reset_accumulator() { acc_ = tracked_identity(acc_.m.field(), acc_.m.rows(), ngens_); }

NormalClosureGenerator::NormalClosureGenerator(std::vector<Tracked> gens, std::uint64_t seed, int slots, int mixing)
    : outer_(gens, seed ^ 0x9e3779b97f4a7c15ull, slots, mixing), rng_(seed) {
  std::vector<Tracked> seeds;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) seeds.push_back(commutator(gens[i], gens[j]));
  // A few commutators of random elements guard against degenerate generator pairs.
  for (int k = 0; k < 4; ++k) seeds.push_back(commutator(outer_.next(), outer_.next()));
  init(std::move(seeds), slots, mixing);
}

NormalClosureGenerator::NormalClosureGenerator(std::vector<Tracked> gens, std::vector<Tracked> seeds, std::uint64_t seed,
                                               int slots, int mixing)
    : outer_(std::move(gens), seed ^ 0x9e3779b97f4a7c15ull, slots, mixing), rng_(seed) {
  init(std::move(seeds), slots, mixing);
}

void NormalClosureGenerator::init(std::vector<Tracked> seeds, int slots, int mixing) {
  if (seeds.empty()) throw std::invalid_argument("NormalClosureGenerator: no seeds");
  for (int i = 0; i < std::max<int>(slots, static_cast<int>(seeds.size())); ++i) slots_.push_back(seeds[i % seeds.size()]);
  const Matrix& m = seeds[0].m;
  acc_ = tracked_identity(m.field(), m.rows(), seeds[0].w.ngens());
  for (int i = 0; i < mixing; ++i) step();
}

void NormalClosureGenerator::step() {
  std::size_t n = slots_.size();
  std::size_t i = uniform(rng_, n);
  std::size_t j = uniform(rng_, n - 1);
  if (j >= i) ++j;
  Tracked other = slots_[j].conj(outer_.next());
  if (uniform(rng_, 2)) other = other.inverse();
  slots_[i] = slots_[i] * other;
  acc_ = acc_ * slots_[i];
}

Tracked NormalClosureGenerator::next() {
  step();
  return acc_;
}

namespace {

void merge_factors(std::map<std::uint64_t, int>& into, std::uint64_t n) {
  for (const auto& pp : factorize(n)) into[pp.prime] = std::max(into[pp.prime], pp.exponent);
}

}  // namespace

OrderOracle::OrderOracle(const Field& f) {
  std::uint64_t q = f.q();
  std::map<std::uint64_t, int> e;
  e[2] = 1;
  e[3] = 2;
  merge_factors(e, q - 1);
  // q^3 + 1 = (q + 1)(q^2 - q + 1)
  std::map<std::uint64_t, int> a;
  for (const auto& pp : factorize(q + 1)) a[pp.prime] += pp.exponent;
  for (const auto& pp : factorize(q * q - q + 1)) a[pp.prime] += pp.exponent;
  for (auto [p, k] : a) e[p] = std::max(e[p], k);
  for (auto [p, k] : e) {
    factors_.push_back({p, k});
    for (int i = 0; i < k; ++i) exponent_ *= p;
  }
}

std::optional<std::uint64_t> OrderOracle::order(const Matrix& g) const {
  if (!g.pow(exponent_).is_identity()) return std::nullopt;
  std::uint64_t order = 1;
  for (const auto& pp : factors_) {
    unsigned __int128 pk = 1;
    for (int i = 0; i < pp.exponent; ++i) pk *= pp.prime;
    Matrix h = g.pow(exponent_ / pk);
    while (!h.is_identity()) {
      h = h.pow(pp.prime);
      order *= pp.prime;
    }
  }
  return order;
}

std::optional<bool> OrderOracle::has_even_order(const Matrix& g) const {
  if (!g.pow(exponent_).is_identity()) return std::nullopt;
  unsigned __int128 odd = exponent_;
  while (odd % 2 == 0) odd /= 2;
  return !g.pow(odd).is_identity();
}

namespace {

const OrderOracle& oracle_for(const Field& f) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::unique_ptr<OrderOracle>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[f.q()];
  if (!slot) slot = std::make_unique<OrderOracle>(f);
  return *slot;
}

}  // namespace

std::optional<std::uint64_t> element_order(const Matrix& g) { return oracle_for(*g.field()).order(g); }

bool is_even_order(const Matrix& g) { return oracle_for(*g.field()).has_even_order(g).value_or(false); }

std::optional<Tracked> power_to_involution(const Tracked& g) {
  auto o = element_order(g.m);
  if (!o || *o % 2 != 0) return std::nullopt;
  return g.pow(static_cast<long long>(*o / 2));
}

}  // namespace ree
