#include <doctest.h>

#include "ree/conjugacy.hpp"
#include "ree/stabilizer.hpp"

using namespace ree;

TEST_CASE("involution centralizer data") {
  auto ree = ReeStandard::make(1);
  auto gens = ree->generators();
  StabilizerFinder finder(gens, 1);
  Tracked j = finder.find_involution();
  CHECK((j.m * j.m).is_identity());
  CHECK(j.m.trace() == ree->field().neg(1));
  CHECK(j.w.evaluate(gens) == j.m);
  CentralizerData cd = finder.bray_centralizer(j);
  for (const Tracked& c : cd.centralizer) {
    CHECK(c.m * j.m == j.m * c.m);
    CHECK(c.w.evaluate(gens) == c.m);
  }
  for (const Tracked& s : cd.standard7) CHECK(s.w.evaluate(gens) == s.m);
  // block structure: c_g g c_g^-1 is block diagonal for g in C'
  Matrix b = cd.c_g * cd.derived[0].m * cd.c_g_inverse;
  for (int i = 0; i < 3; ++i)
    for (int k = 3; k < 7; ++k) CHECK((b(i, k) == 0 && b(k, i) == 0));
}

TEST_CASE("diagonalising torus elements") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Rng rng(2);
  Matrix c = Matrix::random_invertible(ree->fp(), 7, rng);
  Matrix s = c.inverse() * ree->h(f.omega_pow(5)) * c;
  auto d = diagonalise_torus_element(s);
  REQUIRE(d);
  CHECK(d->second.inverse() * s * d->second == ree->h(d->first));
  CHECK((d->first == f.omega_pow(5) || d->first == f.omega_pow(26 - 5)));
  CHECK_FALSE(diagonalise_torus_element(ree->s_matrix(1, 0, 0)).has_value());
}

TEST_CASE("mapping elements move P to Q about half the time") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  auto gens = ree->generators();
  StabilizerFinder finder(gens, 3);
  CentralizerData cd = finder.bray_centralizer(finder.find_involution());
  ProductReplacement pr(track_generators(gens), 4);
  int tried = 0, ok = 0;
  while (tried < 60) {
    Vec p = vec_mul(f, ree->p_infinity().coords, pr.next().m);
    Vec q = vec_mul(f, ree->p_infinity().coords, pr.next().m);
    if (projectively_equal(f, p, q) || !cd.point_condition(p) || !cd.point_condition(q)) continue;
    ++tried;
    if (auto g = finder.find_mapping_element(cd, p, q)) {
      ++ok;
      CHECK(projectively_equal(f, vec_mul(f, p, g->m), q));
      CHECK(g->w.evaluate(gens) == g->m);
    }
  }
  CHECK(ok > 15);
  CHECK(ok < 45);
}

TEST_CASE("random stabilizer elements in a conjugate group") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Rng rng(7);
  auto [gens, h] = random_conjugate(*ree, rng);
  StabilizerFinder finder(gens, 8);
  Vec p = vec_mul(f, ree->p_zero().coords, h);
  for (int i = 0; i < 5; ++i) {
    Tracked x = finder.random_stabilizer_element(p);
    CHECK(projectively_equal(f, vec_mul(f, p, x.m), p));
    CHECK(x.w.evaluate(gens) == x.m);
  }
}
