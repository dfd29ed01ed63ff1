#include "ree/conjugacy.hpp"

#include "ree/errors.hpp"

namespace ree {

namespace {

// Centralizer data of h(-1) in the standard copy, from its explicit generators.
CentralizerData standard_centralizer(const ReeStandard& ree, Rng& rng, int attempts) {
  const Field& f = ree.field();
  auto gens = ree.involution_centralizer_generators();
  CentralizerData cd;
  cd.centralizer = track_generators(gens);
  cd.j = cd.centralizer[1].pow(static_cast<long long>((f.q() - 1) / 2));
  if (cd.j.m != ree.standard_involution()) throw std::logic_error("standard_centralizer: h(omega) power is not h(-1)");
  set_eigenspace_basis(cd);
  for (int i = 0; i < attempts; ++i)
    if (complete_centralizer_data(cd, rng)) return cd;
  throw LasVegasFailure("standard centralizer: recognition failed within budget");
}

// Elements of C' given by the same SL(2, q) matrices on both sides, split into blocks.
struct Blocks {
  std::vector<Matrix> b3, b4;
};

Blocks probe_blocks(const CentralizerData& cd) {
  const Field& f = *cd.c_g.field();
  Blocks out;
  for (const Matrix& g2 : {sl2_diagonal(f, f.omega()), sl2_upper(f, 1), sl2_lower(f, 1)}) {
    Matrix x = cd.pi7_standard(g2).m;
    out.b3.push_back(cd.phi_g(x));
    out.b4.push_back(cd.phi_g4(x));
  }
  return out;
}

Matrix diagonal_join(const Matrix& a, const Matrix& b) {
  const Field* f = a.field();
  int n = a.rows() + b.rows();
  Matrix m(f, n, n);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

std::vector<Matrix> frobenius_all(const std::vector<Matrix>& ms, int k) {
  std::vector<Matrix> out;
  for (const Matrix& m : ms) out.push_back(m.frobenius(k));
  return out;
}

}  // namespace

ConjugationResult conjugate_to_standard(const ReeStandard& ree, std::span<const Matrix> gens, std::uint64_t seed,
                                        ConjugacyBudget budget) {
  const Field& f = ree.field();
  if (gens.empty()) throw std::invalid_argument("conjugate_to_standard: no generators");
  Rng rng(seed);
  StabilizerFinder finder(gens, rng(), budget.stabilizer);
  CentralizerData cs = standard_centralizer(ree, rng, budget.stabilizer.centralizer_rounds);
  Blocks sb = probe_blocks(cs);
  const Matrix& J = ree.form();

  int final_failures = 0;
  for (int round = 0; round < budget.rounds; ++round) {
    ConjugationTranscript tr;
    tr.restarts = round;
    tr.final_test_failures = final_failures;
    tr.j_s = cs.j.m;
    tr.c_s = cs.c_g;
    finder.refresh_random_elements();
    CentralizerData cg;
    try {
      cg = finder.bray_centralizer(finder.find_involution());
    } catch (const LasVegasFailure&) {
      continue;
    }
    tr.j_g = cg.j.m;
    tr.c_g = cg.c_g;
    Blocks gb = probe_blocks(cg);

    // Smallest k for which both summands match.
    std::optional<Matrix> c3, c4;
    for (int k = 0; k < f.degree() && !c4; ++k) {
      c3 = module_isomorphism(gb.b3, frobenius_all(sb.b3, k), rng);
      if (!c3) continue;
      c4 = module_isomorphism(gb.b4, frobenius_all(sb.b4, k), rng);
      tr.twist = k;
    }
    if (!c3 || !c4) continue;
    tr.c3 = *c3;
    tr.c4 = *c4;
    tr.c7 = diagonal_join(*c3, *c4);
    Matrix g = cg.c_g_inverse * tr.c7 * cs.c_g;

    std::vector<Matrix> conj;
    Matrix g_inv = g.inverse();
    for (const Matrix& x : gens) conj.push_back(g_inv * x * g);
    auto forms = invariant_bilinear_forms(conj);
    if (forms.size() != 1) continue;
    tr.form = forms[0];

    // K agrees with J up to one scalar on the 4-space and another on the 3-space.
    Elem r4 = f.div(tr.form(0, 6), J(0, 6)), r3 = f.div(tr.form(1, 5), J(1, 5));
    bool pattern = r4 != 0 && r3 != 0;
    for (int i = 0; i < 7 && pattern; ++i)
      for (int j = 0; j < 7 && pattern; ++j) pattern = tr.form(i, j) == f.mul(J(i, j), i % 2 == 1 ? r3 : r4);
    if (!pattern) continue;
    tr.a = f.div(r3, r4);
    auto x = f.sqrt(tr.a);
    if (!x) continue;
    tr.c_j = Matrix::diagonal(&f, {1, *x, 1, *x, 1, *x, 1});
    g = g * tr.c_j;

    conj.clear();
    g_inv = g.inverse();
    for (const Matrix& y : gens) conj.push_back(g_inv * y * g);
    if (!ree.recognize_standard(conj, rng).is_standard()) {
      ++final_failures;
      continue;
    }
    return {g, tr};
  }
  if (final_failures == budget.rounds) throw NotInGroup("input not conjugate to Ree(q)");
  throw LasVegasFailure("conjugate_to_standard: budget exhausted");
}

ConjugationIsomorphism make_isomorphism(const ConjugationResult& r) { return ConjugationIsomorphism(r.g); }

std::pair<std::vector<Matrix>, Matrix> random_conjugate(const ReeStandard& ree, Rng& rng) {
  Matrix h = Matrix::random_invertible(ree.fp(), 7, rng);
  Matrix h_inv = h.inverse();
  std::vector<Matrix> gens;
  for (const Matrix& x : ree.generators()) gens.push_back(h_inv * x * h);
  return {gens, h};
}

}  // namespace ree
