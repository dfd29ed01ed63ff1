#include "ree/psl2.hpp"

#include "ree/errors.hpp"
#include "ree/randgen.hpp"

namespace ree {

Matrix pi3(const Matrix& g) {
  if (g.rows() != 2 || g.cols() != 2) throw std::invalid_argument("pi3: expected a 2x2 matrix");
  return symmetric_square(g);
}

namespace {

// Representative of +-g whose first nonzero entry has the smaller encoding.
Matrix normalize_sign(const Matrix& g) {
  const Field& f = *g.field();
  for (Elem e : g.data()) {
    if (e == 0) continue;
    return f.neg(e) < e ? g.scaled(f.neg(1)) : g;
  }
  return g;
}

}  // namespace

Matrix pi3_invert(const Matrix& h) {
  if (h.rows() != 3 || h.cols() != 3) throw std::invalid_argument("pi3_invert: expected a 3x3 matrix");
  const Field& f = *h.field();
  // h = [[a^2, 2ab, b^2], [ac, ad + bc, bd], [c^2, 2cd, d^2]] and 2 = -1.
  Elem a, b, c, d;
  if (h(0, 0) != 0) {
    auto r = f.sqrt(h(0, 0));
    if (!r) throw NotInGroup("pi3_invert: not in the image of the symmetric square");
    a = *r;
    b = f.neg(f.div(h(0, 1), a));
    c = f.div(h(1, 0), a);
    d = f.div(f.sub(h(1, 1), f.mul(b, c)), a);
  } else {
    auto r = f.sqrt(h(0, 2));
    if (!r || *r == 0) throw NotInGroup("pi3_invert: not in the image of the symmetric square");
    a = 0;
    b = *r;
    c = f.div(h(1, 1), b);
    d = f.div(h(1, 2), b);
  }
  Matrix g = Matrix::from_rows(&f, {{a, b}, {c, d}});
  if (g.det() != 1 || pi3(g) != h) throw NotInGroup("pi3_invert: not in the image of the symmetric square");
  return normalize_sign(g);
}

bool psl2_equal(const Matrix& a, const Matrix& b) { return a == b || a == b.scaled(a.field()->neg(1)); }

Matrix sl2_upper(const Field& f, Elem x) { return Matrix::from_rows(&f, {{1, x}, {0, 1}}); }

Matrix sl2_lower(const Field& f, Elem x) { return Matrix::from_rows(&f, {{1, 0}, {x, 1}}); }

Matrix sl2_diagonal(const Field& f, Elem a) { return Matrix::diagonal(&f, {a, f.inv(a)}); }

Elem form_discriminant(const Field& f, const Vec& form) {
  return f.sub(f.mul(form[1], form[1]), f.mul(form[0], form[2]));
}

FormType classify_form(const Field& f, const Vec& form) {
  Elem disc = form_discriminant(f, form);
  if (disc == 0) return FormType::Degenerate;
  return f.is_square(disc) ? FormType::Split : FormType::Anisotropic;
}

Matrix split_form_conjugator(const Field& f, const Vec& form) {
  if (classify_form(f, form) != FormType::Split) throw std::invalid_argument("split_form_conjugator: form is not split");
  Elem a = form[0], b = form[1], c = form[2];
  Matrix g(&f, 2);
  if (a == 0) {
    // y (b x + c y) with b != 0
    g = Matrix::from_rows(&f, {{b, c}, {0, f.inv(b)}});
  } else {
    // a (x - t1 y)(x - t2 y) with t = (-b +- sqrt(disc)) / 2a
    Elem s = *f.sqrt(form_discriminant(f, form));
    Elem two_a = f.add(a, a);
    Elem t1 = f.div(f.sub(s, b), two_a);
    Elem t2 = f.div(f.sub(f.neg(s), b), two_a);
    Elem det = f.sub(t1, t2);
    g = Matrix::from_rows(&f, {{1, f.neg(t1)}, {f.inv(det), f.neg(f.div(t2, det))}});
  }
  return g;
}

std::optional<Matrix> triangular_form_map(const Field& f, const Vec& p, const Vec& q) {
  if (p[0] == 0 || q[0] == 0) return std::nullopt;
  Vec pn = normalize_projective(f, p), qn = normalize_projective(f, q);
  Elem a = pn[1], b = pn[2], l = qn[1], n = qn[2];
  Elem lhs = f.sub(f.mul(l, l), n), rhs = f.sub(f.mul(a, a), b);
  if (lhs == 0 || rhs == 0) return std::nullopt;
  // C^2 (l^2 - n) = a^2 - b, with C = u^2 a square: exactly one root of C^2 is.
  auto r = f.sqrt(f.div(rhs, lhs));
  if (!r) return std::nullopt;
  Elem cc = f.is_square(*r) ? *r : f.neg(*r);
  Elem u = *f.sqrt(cc);
  Elem v = f.div(f.sub(a, f.mul(cc, l)), u);
  Matrix g = Matrix::from_rows(&f, {{u, v}, {0, f.inv(u)}});
  if (!projectively_equal(f, vec_mul(f, pn, pi3(g)), qn)) return std::nullopt;
  return g;
}

namespace {

// M with M K M^T = s * antidiag(1, 1, 1) for a nondegenerate symmetric K.
Matrix hyperbolic_basis(const Matrix& k, Rng& rng) {
  const Field& f = *k.field();
  auto b = [&](const Vec& u, const Vec& v) { return bilinear(f, u, k, v); };
  auto random_vec = [&] {
    Vec v(3);
    for (auto& x : v) x = static_cast<Elem>(uniform(rng, f.q()));
    return v;
  };
  Vec m1;
  while (m1.empty()) {
    Vec v = random_vec(), w = random_vec();
    if (vec_is_zero(v)) continue;
    if (b(v, v) == 0) {
      m1 = v;
      break;
    }
    // b(v + t w, v + t w) = A t^2 + 2 B t + C
    Elem qa = b(w, w), qb = b(v, w), qc = b(v, v);
    if (qa == 0) {
      if (!vec_is_zero(w)) m1 = w;
      continue;
    }
    Elem disc = f.sub(f.mul(qb, qb), f.mul(qa, qc));
    auto s = f.sqrt(disc);
    if (!s) continue;
    Elem t = f.div(f.sub(*s, qb), qa);
    Vec cand = vec_add(f, v, vec_scale(f, w, t));
    if (!vec_is_zero(cand)) m1 = cand;
  }
  Vec w;
  for (int i = 0; i < 3 && w.empty(); ++i) {
    Vec e(3, 0);
    e[i] = 1;
    if (b(m1, e) != 0) w = e;
  }
  if (w.empty()) throw std::invalid_argument("hyperbolic_basis: degenerate form");
  Elem coef = f.div(b(w, w), f.add(b(m1, w), b(m1, w)));
  Vec m3 = vec_add(f, w, vec_scale(f, m1, f.neg(coef)));
  Elem s = b(m1, m3);
  Matrix cols(&f, 3, 2);
  Vec km1 = vec_mul(f, m1, k.transpose()), km3 = vec_mul(f, m3, k.transpose());
  for (int i = 0; i < 3; ++i) {
    cols(i, 0) = km1[i];
    cols(i, 1) = km3[i];
  }
  Vec m2 = null_space(cols).row(0);
  Elem r = b(m2, m2);
  if (!f.is_square(f.div(s, r))) {
    m3 = vec_scale(f, m3, f.omega());
    s = f.mul(s, f.omega());
  }
  m2 = vec_scale(f, m2, *f.sqrt(f.div(s, r)));
  return Matrix::from_rows(&f, {m1, m2, m3});
}

Elem unipotent_parameter(const Matrix& u, int i, int j) { return u.field()->div(u(i, j), u(0, 0)); }

}  // namespace

Psl2Recognition::Psl2Recognition(std::span<const Matrix> gens3, Rng& rng, int budget)
    : f_(gens3.empty() ? nullptr : gens3[0].field()), ngens_(static_cast<int>(gens3.size())) {
  if (gens3.empty()) throw std::invalid_argument("Psl2Recognition: no generators");
  const Field& f = *f_;
  n_ = f.degree();
  for (const Matrix& g : gens3)
    if (g.rows() != 3 || g.cols() != 3) throw std::invalid_argument("Psl2Recognition: expected 3x3 generators");

  if (spin_invariant_submodule(gens3, 0, rng)) throw LasVegasFailure("PSL(2,q) recognition: module is reducible");
  auto forms = invariant_bilinear_forms(gens3);
  if (forms.size() != 1 || forms[0].rank() != 3)
    throw LasVegasFailure("PSL(2,q) recognition: no unique nondegenerate invariant form");
  Matrix m = hyperbolic_basis(forms[0], rng);
  c3_ = m.inverse();
  c3_inv_ = m;

  std::vector<Matrix> pre;
  try {
    for (const Matrix& g : gens3) pre.push_back(pi3_invert(c3_inv_ * g * c3_));
  } catch (const NotInGroup&) {
    throw LasVegasFailure("PSL(2,q) recognition: generators do not lie in Omega(3, q)");
  }
  ProductReplacement pr(track_generators(pre), rng());

  // Split torus element whose eigenvalue squares to an element of order (q-1)/2.
  const std::uint64_t half = (f.q() - 1) / 2;
  std::optional<Tracked> r;
  Elem mu = 0;
  for (int it = 0; it < budget && !r; ++it) {
    Tracked x = pr.next();
    Elem tr = x.m.trace();
    Elem disc = f.sub(f.mul(tr, tr), 1);
    auto s = f.sqrt(disc);
    if (disc == 0 || !s) continue;
    Elem e = f.neg(f.add(tr, *s));  // (tr + s) / 2
    if (f.order(f.mul(e, e)) != half) continue;
    r = x;
    mu = e;
  }
  if (!r) throw LasVegasFailure("PSL(2,q) recognition: no torus element of order (q-1)/2 found");
  Matrix z = Matrix::from_rows(&f, {eigenspace(r->m, mu).row(0), eigenspace(r->m, f.inv(mu)).row(0)});
  Matrix zinv = z.inverse();
  c3_ = c3_ * pi3(zinv);
  c3_inv_ = c3_.inverse();
  auto to_new = [&](const Tracked& t) { return Tracked{z * t.m * zinv, t.w}; };

  // d = r^f with mu^f = +-omega.
  std::uint64_t e = f.log_omega(mu) % half;
  long long finv = 1;
  while ((e * finv) % half != 1) ++finv;
  Tracked d = to_new(*r).pow(finv);
  if (!psl2_equal(d.m, sl2_diagonal(f, f.omega()))) throw std::logic_error("Psl2Recognition: torus normalization failed");
  d.m = sl2_diagonal(f, f.omega());

  // A triangular element B d^k C and its commutator with d give a unipotent.
  auto find_unipotent = [&](bool upper) -> Tracked {
    for (int it = 0; it < budget; ++it) {
      Tracked x1 = to_new(pr.next()), x2 = to_new(pr.next());
      const Matrix& bm = x1.m;
      const Matrix& cm = x2.m;
      Elem num, den;
      if (upper) {
        num = f.neg(f.mul(bm(1, 1), cm(1, 0)));
        den = f.mul(bm(1, 0), cm(0, 0));
      } else {
        num = f.neg(f.mul(bm(0, 1), cm(1, 1)));
        den = f.mul(bm(0, 0), cm(0, 1));
      }
      if (num == 0 || den == 0) continue;
      auto xk = f.sqrt(f.div(num, den));
      if (!xk) continue;
      Tracked y = x1 * d.pow(static_cast<long long>(f.log_omega(*xk))) * x2;
      if (y.m(upper ? 1 : 0, upper ? 0 : 1) != 0) continue;
      Tracked u = commutator(d, y);
      Elem par = upper ? unipotent_parameter(u.m, 0, 1) : unipotent_parameter(u.m, 1, 0);
      if (par == 0) continue;
      u.m = upper ? sl2_upper(f, par) : sl2_lower(f, par);
      return u;
    }
    throw LasVegasFailure("PSL(2,q) recognition: no unipotent element found within budget");
  };
  Tracked u0 = find_unipotent(true);
  Tracked l0 = find_unipotent(false);

  standard_.push_back(d);
  std::vector<Elem> upar, lpar;
  Tracked u = u0, l = l0;
  for (int i = 0; i < n_; ++i) {
    standard_.push_back(u);
    upar.push_back(u.m(0, 1));
    u = u.conj(d);
  }
  for (int i = 0; i < n_; ++i) {
    standard_.push_back(l);
    lpar.push_back(l.m(1, 0));
    l = l.conj(d);
  }
  upper_ = PrimeFieldBasis(f, upar);
  lower_ = PrimeFieldBasis(f, lpar);
}

Matrix Psl2Recognition::to_standard(const Matrix& g3) const { return pi3_invert(c3_inv_ * g3 * c3_); }

Matrix Psl2Recognition::from_standard(const Matrix& g2) const { return c3_ * pi3(g2) * c3_inv_; }

Slp Psl2Recognition::upper_word(Elem x) const {
  Slp w(1 + 2 * n_);
  auto c = upper_.coordinates(x);
  for (int i = 0; i < n_; ++i)
    if (c[i]) w = w * Slp::generator(1 + 2 * n_, 1 + i).pow(c[i] == 1 ? 1 : -1);
  return w;
}

Slp Psl2Recognition::lower_word(Elem x) const {
  Slp w(1 + 2 * n_);
  auto c = lower_.coordinates(x);
  for (int i = 0; i < n_; ++i)
    if (c[i]) w = w * Slp::generator(1 + 2 * n_, 1 + n_ + i).pow(c[i] == 1 ? 1 : -1);
  return w;
}

Slp Psl2Recognition::torus_word(Elem a) const {
  std::uint64_t k = f_->log_omega(a) % ((f_->q() - 1) / 2);
  return Slp::generator(1 + 2 * n_, 0).pow(static_cast<long long>(k));
}

Slp Psl2Recognition::standard_word(const Matrix& g2) const {
  const Field& f = *f_;
  if (g2.rows() != 2 || g2.cols() != 2 || g2.det() != 1) throw NotInGroup("PSL(2,q) membership: not in SL(2, q)");
  Elem a = g2(0, 0), b = g2(0, 1), c = g2(1, 0);
  if (a == 0) return upper_word(f.neg(1)) * standard_word(sl2_upper(f, 1) * g2);
  return lower_word(f.div(c, a)) * torus_word(a) * upper_word(f.div(b, a));
}

Slp Psl2Recognition::membership(const Matrix& g2) const {
  std::vector<Slp> images;
  for (const Tracked& t : standard_) images.push_back(t.w);
  return standard_word(g2).substitute(images);
}

Tracked Psl2Recognition::weyl() const {
  const Field& f = *f_;
  Slp w = upper_word(1) * lower_word(f.neg(1)) * upper_word(1);
  std::vector<Slp> images;
  for (const Tracked& t : standard_) images.push_back(t.w);
  return {Matrix::from_rows(&f, {{0, 1}, {f.neg(1), 0}}), w.substitute(images)};
}

}  // namespace ree
