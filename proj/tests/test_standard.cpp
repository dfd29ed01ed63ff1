#include <doctest.h>

#include "ree/standard.hpp"

using namespace ree;

TEST_CASE("standard generators are in Ree(q) and generate it") {
  for (int m : {1, 2}) {
    auto ree = ReeStandard::make(m);
    auto gens = ree->generators();
    for (const Matrix& g : gens) CHECK(ree->membership_failure(g).empty());
    Rng rng(1);
    CHECK(ree->recognize_standard(gens, rng).is_standard());
  }
}

TEST_CASE("torus and Upsilon relations") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Matrix y = ree->upsilon();
  CHECK((y * y).is_identity());
  for (Elem l = 1; l < f.q(); ++l) {
    CHECK(y * ree->h(l) * y == ree->h(f.inv(l)));
    CHECK(ree->h(l).is_diagonal());
  }
  auto e = h_exponents(f);
  for (int i = 0; i < 7; ++i) CHECK(e[i] == -e[6 - i]);
  CHECK(ree->h(f.omega())(0, 0) == f.pow(f.omega(), static_cast<long long>(f.t())));
}

TEST_CASE("U(q) coordinates match matrix arithmetic") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Rng rng(6);
  auto r = [&] { return static_cast<Elem>(uniform(rng, f.q())); };
  for (int i = 0; i < 200; ++i) {
    UElement x{r(), r(), r()}, y{r(), r(), r()};
    Elem l = 1 + static_cast<Elem>(uniform(rng, f.q() - 1));
    Matrix sx = ree->s_matrix(x), sy = ree->s_matrix(y);
    CHECK(ree->s_matrix(ree->u_mul(x, y)) == sx * sy);
    CHECK(ree->s_matrix(ree->u_inv(x)) == sx.inverse());
    CHECK(ree->s_matrix(ree->u_conj(x, y)) == sy.inverse() * sx * sy);
    CHECK(ree->s_matrix(ree->u_h_conj(x, l)) == ree->h(l).inverse() * sx * ree->h(l));
    CHECK(ree->u_from_matrix(sx) == x);
    if (l != 1) CHECK(ree->u_from_matrix(sx * ree->h(l) * sx) == std::nullopt);
  }
}

TEST_CASE("ovoid points and the action") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Vec e1(7, 0), e7(7, 0);
  e1[0] = 1;
  e7[6] = 1;
  CHECK(ree->p_zero().coords == e1);
  CHECK(ree->p_infinity().coords == e7);
  // the point with parameters (a, b, c) is the first row of S(a, b, c)
  Matrix s = ree->s_matrix(2, 5, 7);
  CHECK(projectively_equal(f, ree->ovoid_point(2, 5, 7).coords, s.row(0)));
  auto p = ree->ovoid_membership(s.row(0));
  REQUIRE(p);
  CHECK(p->param == UElement{2, 5, 7});
  Vec off = e1;
  off[1] = 1;
  CHECK_FALSE(ree->ovoid_membership(off).has_value());
  // images of points under group elements stay on the ovoid
  for (const Matrix& g : ree->generators()) CHECK(ree->ovoid_membership(vec_mul(f, s.row(0), g)).has_value());
}

TEST_CASE("fixed points of torus, unipotent and involution") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  auto fp = ree->fixed_points(ree->h(f.omega()));
  CHECK(fp.size() == 2);
  auto fu = ree->fixed_points(ree->s_matrix(1, 0, 0));
  REQUIRE(fu.size() == 1);
  CHECK(fu[0].infinity);
  CHECK(ree->fixed_points(ree->standard_involution()).size() == f.q() + 1);
  CHECK(ree->fixes_a_point(ree->s_matrix(0, 0, 1)));
}

TEST_CASE("the exceptional automorphism fixes Ree(q) elementwise") {
  auto ree = ReeStandard::make(1);
  for (const Matrix& g : ree->generators()) CHECK(ree->outer_automorphism(g) == g);
  for (Elem x : {2u, 7u, 19u}) {
    CHECK(ree->outer_automorphism(ree->alpha(x)) == ree->alpha(x));
    CHECK(ree->outer_automorphism(ree->gamma(x)) == ree->gamma(x));
  }
}

TEST_CASE("a product of two reflections with square spinor norm fails the octonion test") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  const Matrix& J = ree->form();
  Rng rng(8);
  int found = 0;
  for (int i = 0; i < 200 && found < 5; ++i) {
    Vec v(7), w(7);
    for (auto& x : v) x = static_cast<Elem>(uniform(rng, f.q()));
    for (auto& x : w) x = static_cast<Elem>(uniform(rng, f.q()));
    Elem qv = bilinear(f, v, J, v), qw = bilinear(f, w, J, w);
    if (qv == 0 || qw == 0 || !f.is_square(f.mul(qv, qw))) continue;
    Matrix g = reflection(J, v) * reflection(J, w);
    CHECK(ree->membership_failure(g) == "octonion");
    ++found;
  }
  CHECK(found == 5);
}

TEST_CASE("membership test rejects matrices outside Ree(q) with the failing check") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Matrix d = Matrix::identity(ree->fp(), 7);
  d(0, 0) = f.omega();
  CHECK(ree->membership_failure(d) == "determinant");
  Matrix sw = Matrix::identity(ree->fp(), 7);
  sw(0, 1) = 1;
  CHECK(ree->membership_failure(sw) == "form");
}
