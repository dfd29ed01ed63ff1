#include "ree/standard.hpp"

#include "ree/errors.hpp"
#include "ree/randgen.hpp"

namespace ree {

namespace {

constexpr std::uint64_t kEnumerationLimit = 2'000'000;

/// All normalized projective points in the row span of `basis`.
template <class Fn>
void for_each_projective_point(const Field& f, const Matrix& basis, Fn&& fn) {
  int d = basis.rows();
  int n = basis.cols();
  std::vector<Elem> coef(d, 0);
  for (int lead = 0; lead < d; ++lead) {
    // coefficients: 0 before lead, 1 at lead, anything after.
    std::fill(coef.begin(), coef.end(), 0);
    coef[lead] = 1;
    int free = d - lead - 1;
    std::uint64_t total = 1;
    for (int i = 0; i < free; ++i) total *= f.q();
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t r = idx;
      for (int i = lead + 1; i < d; ++i) {
        coef[i] = static_cast<Elem>(r % f.q());
        r /= f.q();
      }
      Vec v(n, 0);
      for (int i = lead; i < d; ++i) {
        if (coef[i] == 0) continue;
        for (int j = 0; j < n; ++j) v[j] = f.add(v[j], f.mul(coef[i], basis(i, j)));
      }
      fn(v);
    }
  }
}

std::uint64_t projective_count(std::uint64_t q, int d) {
  std::uint64_t c = 0, p = 1;
  for (int i = 0; i < d; ++i) {
    c += p;
    p *= q;
    if (c > kEnumerationLimit * 4) return c;
  }
  return c;
}

}  // namespace

ReeStandard::ReeStandard(FieldPtr f) : f_(std::move(f)) {
  const Field& F = *f_;
  form_ = Matrix::antidiagonal(fp(), {1, 1, 1, F.neg(1), 1, 1, 1});
  build_octonion_table();
  build_outer_automorphism();
}

Matrix ReeStandard::alpha(Elem x) const {
  const Field& F = *f_;
  long long t = static_cast<long long>(F.t());
  auto p = [&](long long e) { return F.pow(x, e); };
  auto n = [&](Elem v) { return F.neg(v); };
  Matrix m = Matrix::identity(fp(), 7);
  m(0, 1) = p(t);
  m(0, 4) = n(p(3 * t + 1));
  m(0, 5) = n(p(3 * t + 2));
  m(0, 6) = p(4 * t + 2);
  m(1, 2) = x;
  m(1, 3) = p(t + 1);
  m(1, 4) = n(p(2 * t + 1));
  m(1, 6) = n(p(3 * t + 2));
  m(2, 3) = p(t);
  m(2, 4) = n(p(2 * t));
  m(2, 6) = p(3 * t + 1);
  m(3, 4) = p(t);
  m(4, 5) = n(x);
  m(4, 6) = p(t + 1);
  m(5, 6) = n(p(t));
  return m;
}

Matrix ReeStandard::beta(Elem x) const {
  const Field& F = *f_;
  long long t = static_cast<long long>(F.t());
  auto p = [&](long long e) { return F.pow(x, e); };
  auto n = [&](Elem v) { return F.neg(v); };
  Matrix m = Matrix::identity(fp(), 7);
  m(0, 2) = n(p(t));
  m(0, 4) = n(x);
  m(0, 6) = n(p(t + 1));
  m(1, 3) = p(t);
  m(1, 5) = n(p(2 * t));
  m(2, 6) = x;
  m(3, 5) = p(t);
  m(4, 6) = p(t);
  return m;
}

Matrix ReeStandard::gamma(Elem x) const {
  const Field& F = *f_;
  long long t = static_cast<long long>(F.t());
  auto p = [&](long long e) { return F.pow(x, e); };
  auto n = [&](Elem v) { return F.neg(v); };
  Matrix m = Matrix::identity(fp(), 7);
  m(0, 3) = n(p(t));
  m(0, 5) = n(x);
  m(0, 6) = n(p(2 * t));
  m(1, 4) = n(p(t));
  m(1, 6) = x;
  m(2, 5) = p(t);
  m(3, 6) = n(p(t));
  return m;
}

std::array<long long, 7> h_exponents(const Field& f) {
  long long t = static_cast<long long>(f.t());
  return {t, 1 - t, 2 * t - 1, 0, 1 - 2 * t, t - 1, -t};
}

Matrix ReeStandard::h(Elem lambda) const {
  const Field& F = *f_;
  if (lambda == 0) throw ArithmeticError("h(0) is undefined");
  Vec d;
  for (long long e : h_exponents(F)) d.push_back(F.pow(lambda, e));
  return Matrix::diagonal(fp(), d);
}

Matrix ReeStandard::upsilon() const { return Matrix::antidiagonal(fp(), Vec(7, f_->neg(1))); }

Matrix ReeStandard::s_matrix(Elem a, Elem b, Elem c) const { return alpha(a) * beta(b) * gamma(c); }

std::vector<Matrix> ReeStandard::generators() const { return {s_matrix(1, 0, 0), h(f_->omega()), upsilon()}; }

std::vector<Matrix> ReeStandard::involution_centralizer_generators() const {
  return {upsilon(), h(f_->omega()), s_matrix(0, 1, 0)};
}

// ---------------------------------------------------------------------------
// U(q) coordinates

UElement ReeStandard::u_mul(const UElement& x, const UElement& y) const {
  const Field& F = *f_;
  Elem y3t = F.twist3(y.a);
  Elem y3t1 = F.mul(y3t, y.a);
  Elem a = F.add(x.a, y.a);
  Elem b = F.sub(F.add(x.b, y.b), F.mul(x.a, y3t));
  Elem c = F.add(x.c, y.c);
  c = F.sub(c, F.mul(y.a, x.b));
  c = F.add(c, F.mul(x.a, y3t1));
  c = F.sub(c, F.mul(F.mul(x.a, x.a), y3t));
  return {a, b, c};
}

UElement ReeStandard::u_inv(const UElement& x) const {
  const Field& F = *f_;
  Elem a3t = F.twist3(x.a);
  Elem a3t1 = F.mul(a3t, x.a);
  Elem a3t2 = F.mul(a3t1, x.a);
  return {F.neg(x.a), F.neg(F.add(x.b, a3t1)), F.neg(F.sub(F.add(x.c, F.mul(x.a, x.b)), a3t2))};
}

UElement ReeStandard::u_conj(const UElement& x, const UElement& y) const {
  const Field& F = *f_;
  Elem a1 = x.a, b1 = x.b, c1 = x.c, a2 = y.a, b2 = y.b;
  Elem a1_3t = F.twist3(a1), a2_3t = F.twist3(a2);
  Elem b = F.add(F.sub(b1, F.mul(a1, a2_3t)), F.mul(a2, a1_3t));
  Elem c = c1;
  c = F.add(c, F.mul(a1, b2));
  c = F.sub(c, F.mul(a2, b1));
  c = F.add(c, F.mul(a1, F.mul(a2_3t, a2)));
  c = F.sub(c, F.mul(a2, F.mul(a1_3t, a1)));
  c = F.sub(c, F.mul(F.mul(a1, a1), a2_3t));
  c = F.add(c, F.mul(F.mul(a2, a2), a1_3t));
  return {a1, b, c};
}

UElement ReeStandard::u_h_conj(const UElement& x, Elem lambda) const {
  const Field& F = *f_;
  long long t3 = 3 * static_cast<long long>(F.t());
  return {F.mul(F.pow(lambda, t3 - 2), x.a), F.mul(F.pow(lambda, 1 - t3), x.b), F.mul(F.pow(lambda, -1), x.c)};
}

std::optional<UElement> ReeStandard::u_from_matrix(const Matrix& m) const {
  if (m.rows() != 7 || m.cols() != 7) return std::nullopt;
  Elem a = m(1, 2);
  Matrix rest = alpha(a).inverse() * m;  // beta(b) gamma(c)
  Elem b = rest(2, 6);
  Matrix g = beta(b).inverse() * rest;  // gamma(c)
  Elem c = g(1, 6);
  if (s_matrix(a, b, c) != m) return std::nullopt;
  return UElement{a, b, c};
}

// ---------------------------------------------------------------------------
// Ovoid

Vec ReeStandard::ovoid_vector(Elem a, Elem b, Elem c) const {
  const Field& F = *f_;
  long long t = static_cast<long long>(F.t());
  auto tw = [&](Elem x) { return F.twist(x); };
  auto p = [&](Elem x, long long e) { return F.pow(x, e); };
  Elem ab = F.mul(a, b), ac = F.mul(a, c), bc = F.mul(b, c), abc = F.mul(ab, c);
  Vec v(7);
  v[0] = 1;
  v[1] = tw(a);
  v[2] = F.neg(tw(b));
  v[3] = F.sub(tw(ab), tw(c));
  // -b - a^(3t+1) - (ac)^t
  v[4] = F.sub(F.sub(F.neg(b), p(a, 3 * t + 1)), tw(ac));
  // -c - (bc)^t - a^(3t+2) - a^t b^(2t)
  v[5] = F.sub(F.sub(F.sub(F.neg(c), tw(bc)), p(a, 3 * t + 2)), F.mul(tw(a), p(b, 2 * t)));
  // a^t c - b^(t+1) + a^(4t+2) - c^(2t) - a^(3t+1) b^t - (abc)^t
  Elem w = F.mul(tw(a), c);
  w = F.sub(w, p(b, t + 1));
  w = F.add(w, p(a, 4 * t + 2));
  w = F.sub(w, p(c, 2 * t));
  w = F.sub(w, F.mul(p(a, 3 * t + 1), tw(b)));
  w = F.sub(w, tw(abc));
  v[6] = w;
  return v;
}

OvoidPoint ReeStandard::p_infinity() const {
  OvoidPoint p;
  p.coords = Vec(7, 0);
  p.coords[6] = 1;
  p.infinity = true;
  return p;
}

OvoidPoint ReeStandard::p_zero() const { return ovoid_point(0, 0, 0); }

OvoidPoint ReeStandard::ovoid_point(Elem a, Elem b, Elem c) const {
  OvoidPoint p;
  p.coords = ovoid_vector(a, b, c);
  p.param = {a, b, c};
  return p;
}

std::optional<OvoidPoint> ReeStandard::ovoid_membership(const Vec& p0) const {
  const Field& F = *f_;
  if (p0.size() != 7 || vec_is_zero(p0)) return std::nullopt;
  Vec p = normalize_projective(F, p0);
  if (p[0] == 0) {
    for (int i = 0; i < 6; ++i)
      if (p[i] != 0) return std::nullopt;
    return p_infinity();
  }
  Elem a = F.untwist(p[1]);
  Elem b = F.untwist(F.neg(p[2]));
  Elem c = F.untwist(F.sub(F.twist(F.mul(a, b)), p[3]));
  if (ovoid_vector(a, b, c) != p) return std::nullopt;
  return ovoid_point(a, b, c);
}

OvoidPoint ReeStandard::ovoid_action(const OvoidPoint& p, const Matrix& g) const {
  auto r = ovoid_membership(vec_mul(*f_, p.coords, g));
  if (!r) throw NotInGroup("ovoid_action: image is not on the ovoid");
  return *r;
}

std::vector<OvoidPoint> ReeStandard::fixed_points(const Matrix& g) const {
  const Field& F = *f_;
  std::vector<OvoidPoint> out;
  if (g.is_identity()) {
    std::uint64_t q = F.q();
    if (q * q * q + 1 > kEnumerationLimit) throw std::domain_error("fixed_points: ovoid too large to enumerate");
    out.push_back(p_infinity());
    for (Elem a = 0; a < q; ++a)
      for (Elem b = 0; b < q; ++b)
        for (Elem c = 0; c < q; ++c) out.push_back(ovoid_point(a, b, c));
    return out;
  }
  for (auto [lambda, mult] : char_poly_roots(g)) {
    (void)mult;
    Matrix es = eigenspace(g, lambda);
    int d = es.rows();
    if (d == 1) {
      if (auto p = ovoid_membership(es.row(0))) out.push_back(*p);
      continue;
    }
    if (projective_count(F.q(), d) > kEnumerationLimit)
      throw std::domain_error("fixed_points: eigenspace too large to enumerate");
    for_each_projective_point(F, es, [&](const Vec& v) {
      if (auto p = ovoid_membership(v)) out.push_back(*p);
    });
  }
  return out;
}

bool ReeStandard::fixes_a_point(const Matrix& g) const {
  if (g.is_identity()) return true;
  const Field& F = *f_;
  for (auto [lambda, mult] : char_poly_roots(g)) {
    (void)mult;
    Matrix es = eigenspace(g, lambda);
    if (es.rows() == 1) {
      if (ovoid_membership(es.row(0))) return true;
      continue;
    }
    if (projective_count(F.q(), es.rows()) > kEnumerationLimit)
      throw std::domain_error("fixes_a_point: eigenspace too large to enumerate");
    bool found = false;
    for_each_projective_point(F, es, [&](const Vec& v) {
      if (!found && ovoid_membership(v)) found = true;
    });
    if (found) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Octonions and the outer automorphism

void ReeStandard::build_octonion_table() {
  const Field& F = *f_;
  // A product e_i x e_j = sum_k C[(ij), k] e_k is equivariant exactly when
  // Lambda^2(g) C = C g, i.e. C intertwines Lambda^2 V with V.
  std::vector<Matrix> gens = generators();
  std::vector<Matrix> ext;
  for (const Matrix& g : gens) ext.push_back(exterior_square(g));
  auto sols = intertwiners(ext, gens);
  if (sols.size() != 1) throw std::logic_error("octonion table: equivariant product is not unique");
  Matrix c = sols[0];
  Elem lead = 0;
  for (Elem x : c.data())
    if (x != 0) {
      lead = x;
      break;
    }
  octonion_ = c.scaled(F.inv(lead));
}

Elem ReeStandard::octonion(int i, int j, int k) const {
  if (i == j) return 0;
  bool swap = i > j;
  if (swap) std::swap(i, j);
  int row = i * 7 - i * (i + 1) / 2 + (j - i - 1);
  Elem v = octonion_(row, k);
  return swap ? f_->neg(v) : v;
}

bool ReeStandard::preserves_octonions(const Matrix& g) const { return exterior_square(g) * octonion_ == octonion_ * g; }

void ReeStandard::build_outer_automorphism() {
  const Field& F = *f_;
  std::vector<Matrix> gens = generators();
  std::vector<Matrix> ext;
  for (const Matrix& g : gens) ext.push_back(exterior_square(g));
  Rng rng(0x0e7);
  auto w7 = spin_invariant_submodule(ext, 7, rng, 60);
  auto w14 = spin_invariant_submodule(ext, 14, rng, 60);
  if (!w7 || !w14) throw std::logic_error("outer automorphism: exterior square filtration not found");
  // Basis adapted to W7 < W14 < Lambda^2 V.
  std::vector<Vec> rows;
  for (int r = 0; r < 7; ++r) rows.push_back(w7->row(r));
  auto try_add = [&](const Vec& v) {
    auto tmp = rows;
    tmp.push_back(v);
    if (Matrix::from_rows(fp(), tmp).rank() == static_cast<int>(tmp.size())) rows = std::move(tmp);
  };
  for (int r = 0; r < 14 && rows.size() < 14; ++r) try_add(w14->row(r));
  for (int i = 0; i < 21 && rows.size() < 21; ++i) {
    Vec e(21, 0);
    e[i] = 1;
    try_add(e);
  }
  ext_basis_ = Matrix::from_rows(fp(), rows);
  ext_basis_inv_ = ext_basis_.inverse();
  outer_fix_ = Matrix::identity(fp(), 7);
  outer_fix_inv_ = outer_fix_;
  std::vector<Matrix> raw;
  for (const Matrix& g : gens) raw.push_back(*outer_automorphism(g));
  auto c = module_isomorphism(raw, gens);
  if (!c) throw std::logic_error("outer automorphism: twisted constituent is not the natural module");
  outer_fix_ = *c;
  outer_fix_inv_ = c->inverse();
  (void)F;
}

std::optional<Matrix> ReeStandard::outer_automorphism(const Matrix& g) const {
  Matrix a = ext_basis_ * exterior_square(g) * ext_basis_inv_;
  // Invariance of the filtration: block upper rows vanish beyond their level.
  for (int i = 0; i < 7; ++i)
    for (int j = 7; j < 21; ++j)
      if (a(i, j) != 0) return std::nullopt;
  for (int i = 7; i < 14; ++i)
    for (int j = 14; j < 21; ++j)
      if (a(i, j) != 0) return std::nullopt;
  Matrix mid = a.block(7, 7, 7, 7).frobenius(f_->m());
  return outer_fix_inv_ * mid * outer_fix_;
}

std::string ReeStandard::membership_failure(const Matrix& g) const {
  if (g.rows() != 7 || g.cols() != 7 || g.field()->q() != f_->q()) return "dimension";
  if (g.det() != 1) return "determinant";
  if (g * form_ * g.transpose() != form_) return "form";
  if (spinor_norm(g, form_) != 0) return "spinor-norm";
  if (!preserves_octonions(g)) return "octonion";
  auto o = outer_automorphism(g);
  if (!o || *o != g) return "outer-automorphism";
  return {};
}

RecognitionReport ReeStandard::recognize_standard(std::span<const Matrix> gens, Rng& rng) const {
  RecognitionReport rep;
  if (gens.empty()) {
    rep.verdict = RecognitionReport::Verdict::Proper;
    rep.failed_check = "empty";
    return rep;
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::string why = membership_failure(gens[i]);
    if (!why.empty()) {
      rep.verdict = RecognitionReport::Verdict::NotInRee;
      rep.failed_check = why;
      rep.generator = static_cast<int>(i);
      return rep;
    }
  }
  if (spin_invariant_submodule(gens, 0, rng, 20)) {
    rep.verdict = RecognitionReport::Verdict::Proper;
    rep.failed_check = "reducible";
    return rep;
  }
  // Trace field of random elements: a proper subfield means a subfield subgroup.
  const Field& F = *f_;
  ProductReplacement pr(track_generators(gens), rng());
  std::vector<Elem> traces;
  for (int i = 0; i < 50; ++i) traces.push_back(pr.next().m.trace());
  for (int d = 1; d < F.degree(); ++d) {
    if (F.degree() % d != 0) continue;
    bool all = true;
    for (Elem t : traces)
      if (!F.in_subfield(t, d)) {
        all = false;
        break;
      }
    if (all) {
      rep.verdict = RecognitionReport::Verdict::Proper;
      rep.failed_check = "subfield";
      return rep;
    }
  }
  return rep;
}

}  // namespace ree
