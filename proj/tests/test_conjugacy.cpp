#include <doctest.h>

#include "ree/conjugacy.hpp"
#include "ree/errors.hpp"

using namespace ree;

TEST_CASE("conjugating the standard copy to itself") {
  auto ree = ReeStandard::make(1);
  auto gens = ree->generators();
  auto r = conjugate_to_standard(*ree, gens, 1);
  Rng rng(2);
  std::vector<Matrix> img;
  for (auto& g : gens) img.push_back(r.g.inverse() * g * r.g);
  CHECK(ree->recognize_standard(img, rng).is_standard());
}

TEST_CASE("random conjugates are mapped back to the standard copy") {
  auto ree = ReeStandard::make(1);
  const Field& f = ree->field();
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    auto [gens, h] = random_conjugate(*ree, rng);
    auto r = conjugate_to_standard(*ree, gens, 10 + t);
    auto iso = make_isomorphism(r);
    std::vector<Matrix> img;
    for (auto& g : gens) img.push_back(iso(g));
    CHECK(ree->recognize_standard(img, rng).is_standard());
    // the form found before the last correction has the antidiagonal pattern with a square ratio
    const Matrix& K = r.transcript.form;
    CHECK(f.is_square(r.transcript.a));
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        if (i + j != 6) CHECK(K(i, j) == 0);
    CHECK(iso.inverse(iso(gens[0])) == gens[0]);
    CHECK(iso(gens[0] * gens[1]) == iso(gens[0]) * iso(gens[1]));
  }
}

TEST_CASE("a reducible subgroup is not conjugate to Ree(q)") {
  auto ree = ReeStandard::make(1);
  std::vector<Matrix> borel{ree->s_matrix(1, 0, 0), ree->h(ree->field().omega())};
  ConjugacyBudget budget;
  budget.rounds = 2;
  budget.stabilizer.centralizer_rounds = 2;
  CHECK_THROWS(conjugate_to_standard(*ree, borel, 1, budget));
}
