#include "ree/stabilizer.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "ree/errors.hpp"
#include "ree/standard.hpp"

namespace ree {

Vec CentralizerData::phi_v(const Vec& p) const {
  Vec v = vec_mul(*c_g.field(), p, c_g_inverse);
  v.resize(3);
  return v;
}

Matrix CentralizerData::phi_g(const Matrix& g) const { return (c_g * g * c_g_inverse).block(0, 0, 3, 3); }

Matrix CentralizerData::phi_g4(const Matrix& g) const { return (c_g * g * c_g_inverse).block(3, 3, 4, 4); }

Vec CentralizerData::form3(const Vec& p) const { return vec_mul(*c_g.field(), phi_v(p), psl2->c3()); }

Tracked CentralizerData::pi7_standard(const Matrix& g2) const {
  return evaluate_tracked(psl2->standard_word(g2), standard7);
}

Tracked CentralizerData::pi7(const Matrix& g3) const { return pi7_standard(psl2->to_standard(g3)); }

bool CentralizerData::point_condition(const Vec& p) const {
  Vec v = phi_v(p);
  if (vec_is_zero(v)) return false;
  return classify_form(*c_g.field(), form3(p)) == FormType::Split;
}

std::optional<std::pair<Elem, Matrix>> diagonalise_torus_element(const Matrix& s) {
  const Field& f = *s.field();
  auto roots = char_poly_roots(s);
  if (roots.size() != 7) return std::nullopt;
  std::vector<Elem> eig;
  for (auto [e, mult] : roots) eig.push_back(e);
  std::sort(eig.begin(), eig.end());
  auto exps = h_exponents(f);
  std::optional<Elem> best;
  for (Elem e : eig) {
    Elem mu = f.untwist(e);  // the first diagonal entry of h(mu) is mu^t
    std::vector<Elem> pattern;
    for (long long x : exps) pattern.push_back(f.pow(mu, x));
    std::sort(pattern.begin(), pattern.end());
    if (pattern == eig && (!best || mu < *best)) best = mu;
  }
  if (!best) return std::nullopt;
  std::vector<Vec> rows;
  for (long long x : exps) rows.push_back(eigenspace(s, f.pow(*best, x)).row(0));
  Matrix zinv = Matrix::from_rows(&f, rows);
  return std::make_pair(*best, zinv.inverse());
}

StabilizerFinder::StabilizerFinder(std::span<const Matrix> gens, std::uint64_t seed, StabilizerBudget budget)
    : gens_(gens.begin(), gens.end()),
      ngens_(static_cast<int>(gens.size())),
      rng_(seed),
      pr_(track_generators(gens), seed ^ 0x5bd1e995ull),
      budget_(budget) {}

void StabilizerFinder::refresh_random_elements() { pr_ = ProductReplacement(track_generators(gens_), rng_()); }

Tracked StabilizerFinder::find_involution() {
  for (int i = 0; i < budget_.involution; ++i) {
    Tracked x = pr_.next();
    auto o = element_order(x.m);
    if (!o) throw NotInGroup("element order is not that of an element of Ree(q)");
    if (*o % 2 == 0) return x.pow(static_cast<long long>(*o / 2));
  }
  throw LasVegasFailure("no element of even order found within budget");
}

void set_eigenspace_basis(CentralizerData& cd) {
  const Field& f = *cd.j.m.field();
  Matrix v3 = eigenspace(cd.j.m, 1), v4 = eigenspace(cd.j.m, f.neg(1));
  if (v3.rows() != 3 || v4.rows() != 4) throw LasVegasFailure("involution eigenspaces are not of dimensions 3 and 4");
  std::vector<Vec> rows;
  for (int i = 0; i < 3; ++i) rows.push_back(v3.row(i));
  for (int i = 0; i < 4; ++i) rows.push_back(v4.row(i));
  cd.c_g = Matrix::from_rows(&f, rows);
  cd.c_g_inverse = cd.c_g.inverse();
}

bool complete_centralizer_data(CentralizerData& cd, Rng& rng) {
  NormalClosureGenerator derived(cd.centralizer, rng());
  cd.derived = {derived.next(), derived.next()};
  std::vector<Matrix> g3, g4;
  for (const Tracked& t : cd.derived) {
    g3.push_back(cd.phi_g(t.m));
    g4.push_back(cd.phi_g4(t.m));
  }
  if (spin_invariant_submodule(g3, 0, rng) || spin_invariant_submodule(g4, 0, rng)) return false;
  try {
    cd.psl2 = std::make_shared<const Psl2Recognition>(g3, rng);
  } catch (const LasVegasFailure&) {
    return false;
  }
  cd.standard7.clear();
  for (const Tracked& t : cd.psl2->standard_generators()) cd.standard7.push_back(evaluate_tracked(t.w, cd.derived));
  return true;
}

CentralizerData StabilizerFinder::bray_centralizer(const Tracked& j) {
  CentralizerData cd;
  cd.j = j;
  set_eigenspace_basis(cd);

  cd.centralizer.push_back(j);
  auto bray_element = [&]() -> std::optional<Tracked> {
    Tracked g = pr_.next();
    Tracked zeta = commutator(j, g);
    auto o = element_order(zeta.m);
    if (!o) throw NotInGroup("element order is not that of an element of Ree(q)");
    if (*o % 2 == 1) return g * zeta.pow(static_cast<long long>(*o / 2));
    return zeta.pow(static_cast<long long>(*o / 2));
  };
  for (int round = 0; round < budget_.centralizer_rounds; ++round) {
    for (int k = 0; k < 2; ++k) {
      std::optional<Tracked> c;
      for (int i = 0; i < budget_.bray && !c; ++i) c = bray_element();
      if (!c) throw LasVegasFailure("Bray centralizer: no element produced");
      if (c->m * j.m != j.m * c->m) throw std::logic_error("Bray centralizer: element does not commute with j");
      cd.centralizer.push_back(*c);
    }
    if (complete_centralizer_data(cd, rng_)) return cd;
  }
  throw LasVegasFailure("Bray centralizer: derived group not generated within budget");
}

namespace {

long long mod(long long a, long long n) { return ((a % n) + n) % n; }

// a^-1 mod n for gcd(a, n) = 1
long long inverse_mod(long long a, long long n) {
  long long r0 = n, r1 = mod(a, n), s0 = 0, s1 = 1;
  while (r1 != 0) {
    long long k = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - k * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - k * s1);
  }
  return mod(s0, n);
}

}  // namespace

std::optional<Tracked> StabilizerFinder::find_mapping_element(const CentralizerData& cd, const Vec& p, const Vec& q) {
  const Field& f = *cd.c_g.field();
  if (projectively_equal(f, p, q)) throw std::invalid_argument("find_mapping_element: P = Q");
  if (!cd.point_condition(p) || !cd.point_condition(q))
    throw std::invalid_argument("find_mapping_element: point outside V4 with a split form required");
  Vec p3 = cd.form3(p), q3 = cd.form3(q);

  // Map P3 to Q3 by an upper triangular element when both x^2 coefficients are
  // nonzero, otherwise through xy.
  Matrix g;
  if (auto t = triangular_form_map(f, p3, q3))
    g = *t;
  else
    g = split_form_conjugator(f, p3).inverse() * split_form_conjugator(f, q3);
  Tracked g7 = cd.pi7_standard(g);
  Vec p1 = vec_mul(f, p, g7.m);
  Vec r3 = cd.form3(p1);
  if (!projectively_equal(f, r3, q3)) throw std::logic_error("find_mapping_element: projection does not reach Q3");

  // s generates the index-2 torus in the stabilizer of R3 = Q3.
  Matrix c = split_form_conjugator(f, r3);
  Matrix s2 = c.inverse() * sl2_diagonal(f, f.omega()) * c;
  Tracked s = cd.pi7_standard(s2);
  auto diag = diagonalise_torus_element(s.m);
  if (!diag) return std::nullopt;
  auto [mu, z] = *diag;

  // Find i with (p1 z) h(mu)^i proportional to q z.
  Vec a = vec_mul(f, p1, z), b = vec_mul(f, q, z);
  std::vector<int> support;
  for (int k = 0; k < 7; ++k) {
    if ((a[k] == 0) != (b[k] == 0)) return std::nullopt;
    if (a[k] != 0) support.push_back(k);
  }
  auto exps = h_exponents(f);
  const long long order = static_cast<long long>(f.order(mu));
  const long long qm1 = f.q() - 1;
  auto matches = [&](long long i) {
    Vec img(7);
    for (int k = 0; k < 7; ++k) img[k] = f.mul(a[k], f.pow(mu, mod(exps[k] * i, qm1)));
    return projectively_equal(f, img, b);
  };
  std::optional<long long> found;
  if (support.size() == 1) {
    found = 0;
  } else {
    int l = support[0];
    Elem rl = f.div(b[l], a[l]);
    for (std::size_t idx = 1; idx < support.size() && !found; ++idx) {
      int k = support[idx];
      long long d = mod(exps[k] - exps[l], order);
      Elem ratio = f.div(f.div(b[k], a[k]), rl);
      auto logged = f.discrete_log(mu, ratio);
      if (!logged) return std::nullopt;
      long long dl = static_cast<long long>(*logged);
      if (d == 0) {
        if (dl != 0) return std::nullopt;
        continue;
      }
      // i d = dl (mod order)
      long long gg = std::gcd(d, order);
      if (dl % gg != 0) return std::nullopt;
      long long n2 = order / gg;
      long long i0 = n2 == 1 ? 0 : mod((dl / gg) % n2 * inverse_mod(d / gg, n2), n2);
      for (long long jj = 0; jj < gg && !found; ++jj)
        if (matches(i0 + jj * n2)) found = i0 + jj * n2;
      if (!found) return std::nullopt;
    }
    if (!found) found = 0;
  }
  if (!matches(*found)) return std::nullopt;
  Tracked result = g7 * s.pow(*found);
  if (!projectively_equal(f, vec_mul(f, p, result.m), q)) throw std::logic_error("find_mapping_element: wrong image");
  return result;
}

Tracked StabilizerFinder::random_stabilizer_element(const Vec& p) {
  const Field& f = *gens_[0].field();
  stats_ = {};
  for (int restart = 0; restart < budget_.restarts; ++restart) {
    if (!cached_ || !cached_->point_condition(p)) {
      if (restart > 0 || cached_) ++stats_.restarts;
      cached_.reset();
      refresh_random_elements();
      try {
        Tracked j = find_involution();
        auto cd = std::make_unique<CentralizerData>(bray_centralizer(j));
        if (!cd->point_condition(p)) continue;
        cached_ = std::move(cd);
      } catch (const LasVegasFailure&) {
        continue;
      }
    }
    refresh_random_elements();
    for (int attempt = 0; attempt < budget_.mapping; ++attempt) {
      Tracked g1 = pr_.next();
      Vec q = vec_mul(f, p, g1.m);
      if (projectively_equal(f, p, q) || !cached_->point_condition(q)) continue;
      ++stats_.mapping_attempts;
      auto g2 = find_mapping_element(*cached_, p, q);
      if (!g2) {
        ++stats_.mapping_failures;
        continue;
      }
      Tracked x = g1 * g2->inverse();
      if (!projectively_equal(f, vec_mul(f, p, x.m), p)) throw std::logic_error("random_stabilizer_element: point not fixed");
      return x;
    }
    cached_.reset();
  }
  throw LasVegasFailure("random_stabilizer_element: budget exhausted");
}

}  // namespace ree
