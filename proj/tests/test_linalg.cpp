#include <doctest.h>

#include <sstream>

#include "ree/errors.hpp"
#include "ree/standard.hpp"

using namespace ree;

TEST_CASE("inverse, determinant and rank") {
  auto f = Field::make(1);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    Matrix a = Matrix::random_invertible(f.get(), 7, rng), b = Matrix::random_invertible(f.get(), 7, rng);
    CHECK((a * a.inverse()).is_identity());
    CHECK((a * b).det() == f->mul(a.det(), b.det()));
    CHECK(a.rank() == 7);
  }
  Matrix z(f.get(), 3, 3);
  z(0, 1) = 1;
  CHECK(z.rank() == 1);
  CHECK(null_space(z).rows() == 2);
}

TEST_CASE("eigenspaces and characteristic roots of h(lambda)") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Matrix h = ree->h(f.omega());
  auto roots = char_poly_roots(h);
  CHECK(roots.size() == 7);
  for (auto [e, mult] : roots) {
    CHECK(mult == 1);
    CHECK(eigenspace(h, e).rows() == 1);
  }
  Matrix j = ree->standard_involution();
  CHECK(eigenspace(j, 1).rows() == 3);
  CHECK(eigenspace(j, f.neg(1)).rows() == 4);
}

TEST_CASE("the standard generators preserve a unique form, the standard one") {
  auto ree = ReeStandard::make(1);
  auto gens = ree->generators();
  auto forms = invariant_bilinear_forms(gens);
  REQUIRE(forms.size() == 1);
  const Field& f = ree->field();
  Elem s = f.div(forms[0](0, 6), ree->form()(0, 6));
  CHECK(forms[0] == ree->form().scaled(s));
}

TEST_CASE("module isomorphism recovers a conjugator up to scalars") {
  auto ree = ReeStandard::make(1);
  Rng rng(5);
  auto gens = ree->generators();
  Matrix c = Matrix::random_invertible(ree->fp(), 7, rng);
  std::vector<Matrix> conj;
  for (auto& g : gens) conj.push_back(c.inverse() * g * c);
  auto iso = module_isomorphism(gens, conj, rng);
  REQUIRE(iso);
  for (std::size_t i = 0; i < gens.size(); ++i) CHECK(iso->inverse() * gens[i] * *iso == conj[i]);
  CHECK_FALSE(spin_invariant_submodule(gens, 0, rng).has_value());
  std::vector<Matrix> borel{ree->s_matrix(1, 0, 0), ree->h(ree->field().omega())};
  CHECK(spin_invariant_submodule(borel, 0, rng).has_value());
}

TEST_CASE("symmetric square is a homomorphism") {
  auto f = Field::make(1);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    Matrix a = Matrix::random_invertible(f.get(), 3, rng), b = Matrix::random_invertible(f.get(), 3, rng);
    CHECK(symmetric_square(a * b) == symmetric_square(a) * symmetric_square(b));
    CHECK(exterior_square(a * b) == exterior_square(a) * exterior_square(b));
  }
}

TEST_CASE("spinor norm of reflection products") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  const Matrix& J = ree->form();
  Rng rng(9);
  int seen[2] = {0, 0};
  for (int i = 0; i < 200; ++i) {
    Vec v(7), w(7);
    for (auto& x : v) x = static_cast<Elem>(uniform(rng, f.q()));
    for (auto& x : w) x = static_cast<Elem>(uniform(rng, f.q()));
    Elem qv = bilinear(f, v, J, v), qw = bilinear(f, w, J, w);
    if (qv == 0 || qw == 0) continue;
    Matrix g = reflection(J, v) * reflection(J, w);
    int expected = f.is_square(f.mul(qv, qw)) ? 0 : 1;
    CHECK(spinor_norm(g, J) == expected);
    ++seen[expected];
  }
  CHECK(seen[0] > 0);
  CHECK(seen[1] > 0);
}

TEST_CASE("prime field bases") {
  Field f(1);
  std::vector<Elem> basis{1, f.omega(), f.mul(f.omega(), f.omega())};
  PrimeFieldBasis b(f, basis);
  for (Elem x = 0; x < f.q(); ++x) {
    auto c = b.coordinates(x);
    Elem y = 0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < c[i]; ++k) y = f.add(y, basis[i]);
    CHECK(y == x);
  }
  CHECK_THROWS_AS(PrimeFieldBasis(f, {1, f.neg(1), f.omega()}), std::invalid_argument);
  std::vector<Elem> many{1, 2, f.omega(), f.add(1, f.omega()), f.mul(f.omega(), f.omega())};
  auto chosen = PrimeFieldBasis::select_independent(f, many);
  CHECK(chosen == std::vector<std::size_t>{0, 2, 4});
}

TEST_CASE("matrix text format round trip and errors") {
  auto ree = ReeStandard::make(1);
  auto gens = ree->generators();
  std::istringstream in(format_matrices(gens));
  CHECK(peek_field_size(in) == 27);
  auto back = read_matrices(in, ree->fp());
  CHECK(back == gens);

  std::istringstream bad_q("1 243\n5\n");
  CHECK_THROWS_AS(read_matrix(bad_q, ree->fp()), FormatError);
  std::istringstream bad_entry("1 27\n27\n");
  CHECK_THROWS_AS(read_matrix(bad_entry, ree->fp()), FormatError);
  std::istringstream truncated("2 27\n1 2 3\n");
  CHECK_THROWS_AS(read_matrix(truncated, ree->fp()), FormatError);
}
