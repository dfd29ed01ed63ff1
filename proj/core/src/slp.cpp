#include "ree/slp.hpp"

#include <sstream>
#include <unordered_map>

#include "ree/errors.hpp"

namespace ree {

using Op = SlpInstruction::Op;

Slp::Node::~Node() {
  // Release long chains without recursing through shared_ptr destructors.
  std::vector<NodePtr> pending;
  auto take = [&](NodePtr& p) {
    if (p && p.use_count() == 1) pending.push_back(std::move(p));
    p.reset();
  };
  take(a);
  take(b);
  while (!pending.empty()) {
    NodePtr n = std::move(pending.back());
    pending.pop_back();
    auto* raw = const_cast<Node*>(n.get());
    take(raw->a);
    take(raw->b);
  }
}

Slp Slp::generator(int ngens, int k) {
  if (k < 0 || k >= ngens) throw std::out_of_range("Slp::generator: index out of range");
  auto n = std::make_shared<Node>();
  n->op = Op::Ref;
  n->gen = k;
  return Slp(ngens, n);
}

Slp operator*(const Slp& a, const Slp& b) {
  if (a.ngens_ != b.ngens_) throw std::invalid_argument("Slp product: generator counts differ");
  if (!a.root_) return b;
  if (!b.root_) return a;
  auto n = std::make_shared<Slp::Node>();
  n->op = Op::Mul;
  n->a = a.root_;
  n->b = b.root_;
  return Slp(a.ngens_, n);
}

Slp Slp::inverse() const {
  if (!root_) return *this;
  if (root_->op == Op::Inv) return Slp(ngens_, root_->a);
  auto n = std::make_shared<Node>();
  n->op = Op::Inv;
  n->a = root_;
  return Slp(ngens_, n);
}

Slp Slp::pow(long long e) const {
  if (!root_ || e == 0) return Slp(ngens_);
  if (e == 1) return *this;
  if (e == -1) return inverse();
  auto n = std::make_shared<Node>();
  n->op = Op::Pwr;
  n->a = root_;
  n->exp = e;
  return Slp(ngens_, n);
}

SlpProgram Slp::flatten() const {
  SlpProgram p;
  p.ngens = ngens_;
  if (!root_) return p;
  std::unordered_map<const Node*, long long> slot;
  // Iterative post-order traversal.
  std::vector<std::pair<const Node*, bool>> stack{{root_.get(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(n)) continue;
    if (!expanded) {
      stack.push_back({n, true});
      if (n->b && !slot.count(n->b.get())) stack.push_back({n->b.get(), false});
      if (n->a && !slot.count(n->a.get())) stack.push_back({n->a.get(), false});
      continue;
    }
    SlpInstruction ins{n->op};
    switch (n->op) {
      case Op::Ref: ins.a = n->gen; break;
      case Op::Mul:
        ins.a = slot.at(n->a.get());
        ins.b = slot.at(n->b.get());
        break;
      case Op::Inv: ins.a = slot.at(n->a.get()); break;
      case Op::Pwr:
        ins.a = slot.at(n->a.get());
        ins.b = n->exp;
        break;
    }
    slot[n] = static_cast<long long>(p.code.size());
    p.code.push_back(ins);
  }
  p.result = slot.at(root_.get());
  return p;
}

std::size_t Slp::length() const { return flatten().code.size(); }

Slp Slp::from_program(const SlpProgram& p) {
  std::vector<NodePtr> nodes;
  nodes.reserve(p.code.size());
  auto ref = [&](long long i) -> const NodePtr& {
    if (i < 0 || i >= static_cast<long long>(nodes.size())) throw FormatError("SLP: reference to a later or missing slot");
    return nodes[i];
  };
  for (const auto& ins : p.code) {
    auto n = std::make_shared<Node>();
    n->op = ins.op;
    switch (ins.op) {
      case Op::Ref:
        if (ins.a < 0 || ins.a >= p.ngens) throw FormatError("SLP: generator index out of range");
        n->gen = static_cast<int>(ins.a);
        break;
      case Op::Mul:
        n->a = ref(ins.a);
        n->b = ref(ins.b);
        break;
      case Op::Inv: n->a = ref(ins.a); break;
      case Op::Pwr:
        n->a = ref(ins.a);
        n->exp = ins.b;
        break;
    }
    nodes.push_back(n);
  }
  if (p.result < 0) return Slp(p.ngens);
  return Slp(p.ngens, ref(p.result));
}

Matrix evaluate_program(const SlpProgram& p, std::span<const Matrix> gens) {
  if (static_cast<int>(gens.size()) != p.ngens) throw std::out_of_range("SLP evaluation: wrong number of generators");
  if (gens.empty()) throw std::invalid_argument("SLP evaluation: no generators");
  std::vector<Matrix> s;
  s.reserve(p.code.size());
  auto at = [&](long long i) -> const Matrix& {
    if (i < 0 || i >= static_cast<long long>(s.size())) throw std::out_of_range("SLP evaluation: slot out of range");
    return s[i];
  };
  for (const auto& ins : p.code) {
    switch (ins.op) {
      case Op::Ref:
        if (ins.a < 0 || ins.a >= p.ngens) throw std::out_of_range("SLP evaluation: generator out of range");
        s.push_back(gens[ins.a]);
        break;
      case Op::Mul: s.push_back(at(ins.a) * at(ins.b)); break;
      case Op::Inv: s.push_back(at(ins.a).inverse()); break;
      case Op::Pwr: s.push_back(at(ins.a).pow_signed(ins.b)); break;
    }
  }
  if (p.result < 0) return Matrix::identity(gens[0].field(), gens[0].rows());
  return at(p.result);
}

Matrix Slp::evaluate(std::span<const Matrix> gens) const { return evaluate_program(flatten(), gens); }

Slp Slp::substitute(std::span<const Slp> images) const {
  if (static_cast<int>(images.size()) != ngens_) throw std::invalid_argument("Slp::substitute: wrong number of images");
  int target = images.empty() ? 0 : images[0].ngens();
  SlpProgram p = flatten();
  std::vector<Slp> s;
  s.reserve(p.code.size());
  for (const auto& ins : p.code) {
    switch (ins.op) {
      case Op::Ref: s.push_back(images[ins.a]); break;
      case Op::Mul: s.push_back(s[ins.a] * s[ins.b]); break;
      case Op::Inv: s.push_back(s[ins.a].inverse()); break;
      case Op::Pwr: s.push_back(s[ins.a].pow(ins.b)); break;
    }
  }
  if (p.result < 0) return Slp(target);
  return s[p.result];
}

std::string program_to_text(const SlpProgram& p) {
  std::ostringstream os;
  os << "ngens " << p.ngens << '\n';
  for (const auto& ins : p.code) {
    switch (ins.op) {
      case Op::Ref: os << "REF " << ins.a << '\n'; break;
      case Op::Mul: os << "MUL " << ins.a << ' ' << ins.b << '\n'; break;
      case Op::Inv: os << "INV " << ins.a << '\n'; break;
      case Op::Pwr: os << "PWR " << ins.a << ' ' << ins.b << '\n'; break;
    }
  }
  os << "RESULT " << p.result << '\n';
  return os.str();
}

SlpProgram program_from_text(const std::string& text) {
  std::istringstream is(text);
  SlpProgram p;
  std::string word;
  if (!(is >> word) || word != "ngens" || !(is >> p.ngens) || p.ngens < 0) throw FormatError("SLP: expected 'ngens N'");
  bool done = false;
  while (is >> word) {
    if (done) throw FormatError("SLP: trailing data after RESULT");
    SlpInstruction ins{Op::Ref};
    if (word == "REF") {
      if (!(is >> ins.a)) throw FormatError("SLP: bad REF");
    } else if (word == "MUL") {
      ins.op = Op::Mul;
      if (!(is >> ins.a >> ins.b)) throw FormatError("SLP: bad MUL");
    } else if (word == "INV") {
      ins.op = Op::Inv;
      if (!(is >> ins.a)) throw FormatError("SLP: bad INV");
    } else if (word == "PWR") {
      ins.op = Op::Pwr;
      if (!(is >> ins.a >> ins.b)) throw FormatError("SLP: bad PWR");
    } else if (word == "RESULT") {
      if (!(is >> p.result)) throw FormatError("SLP: bad RESULT");
      done = true;
      continue;
    } else {
      throw FormatError("SLP: unknown instruction '" + word + "'");
    }
    long long here = static_cast<long long>(p.code.size());
    if (ins.op == Op::Ref && (ins.a < 0 || ins.a >= p.ngens)) throw FormatError("SLP: generator index out of range");
    if (ins.op != Op::Ref && (ins.a < 0 || ins.a >= here)) throw FormatError("SLP: slot reference out of range");
    if (ins.op == Op::Mul && (ins.b < 0 || ins.b >= here)) throw FormatError("SLP: slot reference out of range");
    p.code.push_back(ins);
  }
  if (!done) throw FormatError("SLP: missing RESULT");
  if (p.result < -1 || p.result >= static_cast<long long>(p.code.size())) throw FormatError("SLP: RESULT out of range");
  return p;
}

std::string Slp::to_text() const { return program_to_text(flatten()); }

Slp Slp::from_text(const std::string& text) { return from_program(program_from_text(text)); }

Tracked commutator(const Tracked& x, const Tracked& y) { return x.inverse() * y.inverse() * x * y; }

Matrix commutator(const Matrix& x, const Matrix& y) { return x.inverse() * y.inverse() * x * y; }

std::vector<Tracked> track_generators(std::span<const Matrix> gens) {
  std::vector<Tracked> out;
  int n = static_cast<int>(gens.size());
  for (int i = 0; i < n; ++i) out.push_back({gens[i], Slp::generator(n, i)});
  return out;
}

Tracked tracked_identity(const Field* f, int dim, int ngens) { return {Matrix::identity(f, dim), Slp(ngens)}; }

Tracked evaluate_tracked(const Slp& w, std::span<const Tracked> gens) {
  if (static_cast<int>(gens.size()) != w.ngens()) throw std::invalid_argument("evaluate_tracked: wrong number of generators");
  if (gens.empty()) throw std::invalid_argument("evaluate_tracked: no generators");
  SlpProgram p = w.flatten();
  if (p.result < 0) return tracked_identity(gens[0].m.field(), gens[0].m.rows(), gens[0].w.ngens());
  std::vector<Tracked> s;
  s.reserve(p.code.size());
  for (const auto& ins : p.code) {
    switch (ins.op) {
      case Op::Ref: s.push_back(gens[ins.a]); break;
      case Op::Mul: s.push_back(s[ins.a] * s[ins.b]); break;
      case Op::Inv: s.push_back(s[ins.a].inverse()); break;
      case Op::Pwr: s.push_back(s[ins.a].pow(ins.b)); break;
    }
  }
  return s[p.result];
}

}  // namespace ree
