#include "ree/membership.hpp"

#include <algorithm>

#include "ree/errors.hpp"

namespace ree {

MembershipTester::MembershipTester(ReePtr ree, std::span<const Matrix> gens, std::uint64_t seed, StabilizerBudget budget)
    : ree_(std::move(ree)), gens_(gens.begin(), gens.end()), rng_(seed), finder_(gens, seed ^ 0xa0761d6478bd642full, budget) {
  if (gens_.empty()) throw std::invalid_argument("MembershipTester: no generators");
}

const StandardGenSets& MembershipTester::standard_generators() const {
  if (!sgs_) throw std::logic_error("MembershipTester: preprocess() has not been run");
  return *sgs_;
}

Matrix MembershipTester::to_frame(const UnipotentGenerators& gens, const Matrix& g) const {
  if (!gens.lower) return g;
  Matrix y = ree_->upsilon();
  return y * g * y;
}

std::optional<UnipotentGenerators> MembershipTester::build_unipotent_generators(const Tracked& s1, const Tracked& s2,
                                                                                bool lower) {
  const Field& f = ree_->field();
  const int n = f.degree();
  UnipotentGenerators u;
  u.lower = lower;
  auto coords = [&](const Matrix& m) { return ree_->u_from_matrix(to_frame(u, m)); };

  Tracked c1 = commutator(s1, s2);
  auto uc = coords(c1.m);
  if (!uc || uc->a == 0) return std::nullopt;  // |c1| = 9 iff the a-coordinate is nonzero

  // d1 must be conjugate to h(lambda) with lambda in no proper subfield.
  std::optional<Tracked> d1;
  for (const Tracked* s : {&s1, &s2}) {
    Matrix m = to_frame(u, s->m);
    Elem lambda = f.untwist(m(0, 0));
    if (lambda == 0 || f.in_proper_subfield(lambda)) continue;
    Matrix h = ree_->h(lambda);
    bool diag_ok = true;
    for (int i = 0; i < 7; ++i) diag_ok = diag_ok && m(i, i) == h(i, i);
    if (!diag_ok || !m.pow(f.q() - 1).is_identity()) continue;
    d1 = *s;
    break;
  }
  if (!d1) return std::nullopt;

  Tracked conj = c1, cube = c1.pow(3);
  std::vector<Tracked> shifted;
  std::vector<Elem> avals, cvals;
  for (int i = 1; i <= n; ++i) {
    conj = conj.conj(*d1);
    cube = cube.conj(*d1);
    auto ca = coords(conj.m), cc = coords(cube.m);
    if (!ca || !cc || cc->a != 0 || cc->b != 0) return std::nullopt;
    shifted.push_back(conj);
    u.a_gens.push_back(conj);
    u.a_coords.push_back(*ca);
    avals.push_back(ca->a);
    u.c_gens.push_back(cube);
    u.c_coords.push_back(*cc);
    cvals.push_back(cc->c);
  }
  if (!PrimeFieldBasis::is_basis(f, avals) || !PrimeFieldBasis::is_basis(f, cvals)) return std::nullopt;
  u.a_basis = PrimeFieldBasis(f, avals);
  u.c_basis = PrimeFieldBasis(f, cvals);

  std::vector<Tracked> comms;
  std::vector<UElement> ccoords;
  std::vector<Elem> bvals;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Tracked c = commutator(shifted[i], shifted[j]);
      auto cb = coords(c.m);
      if (!cb || cb->a != 0) return std::nullopt;
      comms.push_back(c);
      ccoords.push_back(*cb);
      bvals.push_back(cb->b);
    }
  auto chosen = PrimeFieldBasis::select_independent(f, bvals);
  if (static_cast<int>(chosen.size()) != n) return std::nullopt;
  std::vector<Elem> bbasis;
  for (std::size_t k : chosen) {
    u.b_gens.push_back(comms[k]);
    u.b_coords.push_back(ccoords[k]);
    bbasis.push_back(bvals[k]);
  }
  u.b_basis = PrimeFieldBasis(f, bbasis);

  for (int i = 0; i < n; ++i) {
    u.all.push_back(u.a_gens[i]);
    u.all.push_back(u.c_gens[i]);
  }
  u.all.insert(u.all.end(), comms.begin(), comms.end());
  return u;
}

const StandardGenSets& MembershipTester::preprocess(int rounds) {
  Vec pinf = ree_->p_infinity().coords, p0 = ree_->p_zero().coords;
  for (int round = 1; round <= rounds; ++round) {
    Tracked a1 = finder_.random_stabilizer_element(pinf);
    Tracked a2 = finder_.random_stabilizer_element(pinf);
    Tracked b1 = finder_.random_stabilizer_element(p0);
    Tracked b2 = finder_.random_stabilizer_element(p0);
    auto up = build_unipotent_generators(a1, a2, false);
    if (!up) continue;
    auto low = build_unipotent_generators(b1, b2, true);
    if (!low) continue;
    sgs_ = StandardGenSets{std::move(*up), std::move(*low), round};
    return *sgs_;
  }
  throw LasVegasFailure("membership preprocessing: no suitable stabilizer elements within budget");
}

Tracked MembershipTester::express_u_element(const UnipotentGenerators& gens, const UElement& target) const {
  const Field& f = ree_->field();
  const int n = f.degree();
  Tracked result = tracked_identity(&f, 7, static_cast<int>(gens_.size()));
  UElement cur{0, 0, 0};
  auto apply = [&](const std::vector<Tracked>& g, const std::vector<UElement>& c, const std::vector<int>& e) {
    for (int i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      if (e[i] == 1) {
        result = result * g[i];
        cur = ree_->u_mul(cur, c[i]);
      } else {
        result = result * g[i].inverse();
        cur = ree_->u_mul(cur, ree_->u_inv(c[i]));
      }
    }
  };
  // The a-coordinate is additive; then correct b inside {S(0, b, c)}, then c in the centre.
  apply(gens.a_gens, gens.a_coords, gens.a_basis.coordinates(target.a));
  UElement rest = ree_->u_mul(ree_->u_inv(cur), target);
  apply(gens.b_gens, gens.b_coords, gens.b_basis.coordinates(rest.b));
  rest = ree_->u_mul(ree_->u_inv(cur), target);
  apply(gens.c_gens, gens.c_coords, gens.c_basis.coordinates(rest.c));
  if (!(cur == target) || to_frame(gens, result.m) != ree_->s_matrix(target))
    throw std::logic_error("express_u_element: coordinate bookkeeping failed");
  return result;
}

std::pair<Tracked, Elem> MembershipTester::row_reduce_left(const UnipotentGenerators& gens, const Matrix& g) const {
  const Field& f = ree_->field();
  Matrix gf = to_frame(gens, g);
  Elem lambda = f.untwist(gf(0, 0));
  if (lambda == 0) throw NotInGroup("row reduction: element does not fix the point");
  auto s = ree_->u_from_matrix(ree_->h(lambda).inverse() * gf);
  if (!s) throw NotInGroup("row reduction: element does not fix the point");
  Tracked x = express_u_element(gens, ree_->u_inv(*s));
  return {x, gens.lower ? f.inv(lambda) : lambda};
}

std::pair<Tracked, Elem> MembershipTester::row_reduce_right(const UnipotentGenerators& gens, const Matrix& g) const {
  const Field& f = ree_->field();
  Matrix gf = to_frame(gens, g);
  Elem lambda = f.untwist(gf(0, 0));
  if (lambda == 0) throw NotInGroup("row reduction: element does not fix the point");
  auto s = ree_->u_from_matrix(gf * ree_->h(lambda).inverse());
  if (!s) throw NotInGroup("row reduction: element does not fix the point");
  Tracked x = express_u_element(gens, ree_->u_inv(*s));
  return {x, gens.lower ? f.inv(lambda) : lambda};
}

Tracked MembershipTester::map_point(const UnipotentGenerators& gens, const Vec& p) const {
  const Field& f = ree_->field();
  Vec pf = gens.lower ? vec_mul(f, p, ree_->upsilon()) : p;
  auto pt = ree_->ovoid_membership(pf);
  if (!pt) throw NotInGroup("map_point: not an ovoid point");
  if (pt->infinity) throw std::invalid_argument("map_point: the point is already the excluded one");
  return express_u_element(gens, ree_->u_inv(pt->param));
}

Slp MembershipTester::element_to_slp(const Matrix& g, int budget) {
  std::string why = ree_->membership_failure(g);
  if (!why.empty()) throw NotInGroup("element is not in Ree(q): " + why + " test failed");
  if (!sgs_) preprocess();
  const StandardGenSets& sgs = *sgs_;
  const Field& f = ree_->field();
  stats_ = {};
  ProductReplacement pr(track_generators(gens_), rng_());

  for (int outer = 0; outer < budget; ++outer) {
    ++stats_.outer_iterations;
    // r with an ovoid eigenvector Q != P_infinity of g r.
    std::optional<Tracked> r;
    Vec q;
    for (int inner = 0; inner < budget && !r; ++inner) {
      ++stats_.random_elements;
      Tracked cand = pr.next();
      Matrix y = g * cand.m;
      std::vector<Vec> points;
      for (auto [ev, mult] : char_poly_roots(y, rng_)) {
        Matrix es = eigenspace(y, ev);
        if (es.rows() != 1) continue;
        auto pt = ree_->ovoid_membership(es.row(0));
        if (pt && !pt->infinity) points.push_back(pt->coords);
      }
      if (points.empty()) continue;
      q = *std::min_element(points.begin(), points.end());
      r = cand;
    }
    if (!r) break;
    Matrix y = g * r->m;
    Tracked z1 = map_point(sgs.upper, q);
    Matrix y1 = z1.m.inverse() * y * z1.m;
    auto [z2, lambda] = row_reduce_left(sgs.lower, y1);
    Matrix dm = y1 * z2.m;
    if (dm != ree_->h(lambda)) throw std::logic_error("element_to_slp: row reduction did not reach the torus");
    Elem x = dm.trace();
    Elem xm1 = f.sub(x, 1);
    if (xm1 == 0 || !f.is_square(xm1)) continue;

    Tracked u = express_u_element(sgs.upper, {0, 0, *f.sqrt(f.twist3(xm1))}) * express_u_element(sgs.lower, {0, 1, 0});
    if (u.m.trace() != x) throw std::logic_error("element_to_slp: constructed element has the wrong trace");
    auto fixed = ree_->fixed_points(u.m);
    if (fixed.size() != 2) continue;
    const OvoidPoint& p1 = fixed[0].infinity ? fixed[1] : fixed[0];
    const OvoidPoint& p2 = fixed[0].infinity ? fixed[0] : fixed[1];
    Tracked a = map_point(sgs.upper, p1.coords);
    Tracked b = map_point(sgs.lower, vec_mul(f, p2.coords, a.m));
    Tracked v = u.conj(a * b);
    Tracked hh;
    if (v.m == dm)
      hh = v;
    else if (v.m.inverse() == dm)
      hh = v.inverse();
    else
      continue;
    Tracked w = z1 * hh * z2.inverse() * z1.inverse() * r->inverse();
    if (w.m != g) throw std::logic_error("element_to_slp: result does not evaluate to g");
    return w.w;
  }
  throw LasVegasFailure("element_to_slp: budget exhausted");
}

}  // namespace ree
