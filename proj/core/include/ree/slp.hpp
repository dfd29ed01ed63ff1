#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ree/linalg.hpp"

namespace ree {

/// One line of a flattened program. Slots are numbered from 0 in program order.
struct SlpInstruction {
  enum class Op { Ref, Mul, Inv, Pwr };
  Op op;
  long long a = 0;  // generator index (Ref) or slot
  long long b = 0;  // second slot (Mul) or exponent (Pwr)
};

/// Linear form of an SLP, matching the text format.
struct SlpProgram {
  int ngens = 0;
  std::vector<SlpInstruction> code;
  /// Result slot, or -1 for the identity.
  long long result = -1;
};

/**
 * Straight-line program over a list of `ngens` generators.
 *
 * Stored as an immutable DAG so that products of tracked elements share their
 * subprograms; `length()` counts distinct nodes, which is the instruction count
 * of the flattened program. The empty program denotes the identity.
 */
class Slp {
public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  Slp() = default;
  explicit Slp(int ngens) : ngens_(ngens) {}
  static Slp generator(int ngens, int k);
  static Slp from_program(const SlpProgram& p);

  int ngens() const { return ngens_; }
  bool is_identity() const { return !root_; }
  std::size_t length() const;

  friend Slp operator*(const Slp& a, const Slp& b);
  Slp inverse() const;
  Slp pow(long long n) const;

  Matrix evaluate(std::span<const Matrix> gens) const;
  /// Replace generator k by images[k]; the result lives over images' generator list.
  Slp substitute(std::span<const Slp> images) const;

  SlpProgram flatten() const;
  std::string to_text() const;
  static Slp from_text(const std::string& text);

private:
  Slp(int ngens, NodePtr root) : ngens_(ngens), root_(std::move(root)) {}
  int ngens_ = 0;
  NodePtr root_;
};

struct Slp::Node {
  SlpInstruction::Op op;
  int gen = 0;
  long long exp = 0;
  NodePtr a, b;
  ~Node();
};

/// Evaluate a flattened program.
Matrix evaluate_program(const SlpProgram& p, std::span<const Matrix> gens);
std::string program_to_text(const SlpProgram& p);
SlpProgram program_from_text(const std::string& text);

/// A matrix together with an SLP that evaluates to it on a fixed generator list.
struct Tracked {
  Matrix m;
  Slp w;

  friend Tracked operator*(const Tracked& x, const Tracked& y) { return {x.m * y.m, x.w * y.w}; }
  Tracked inverse() const { return {m.inverse(), w.inverse()}; }
  Tracked pow(long long n) const { return {m.pow_signed(n), w.pow(n)}; }
  /// x^y = y^-1 x y
  Tracked conj(const Tracked& y) const { return y.inverse() * *this * y; }
};

/// [x, y] = x^-1 y^-1 x y
Tracked commutator(const Tracked& x, const Tracked& y);
Matrix commutator(const Matrix& x, const Matrix& y);

/// The generators as tracked elements.
std::vector<Tracked> track_generators(std::span<const Matrix> gens);
Tracked tracked_identity(const Field* f, int dim, int ngens);
/// Evaluate an SLP on tracked elements: the matrix and the composed SLP in one pass.
Tracked evaluate_tracked(const Slp& w, std::span<const Tracked> gens);

}  // namespace ree
