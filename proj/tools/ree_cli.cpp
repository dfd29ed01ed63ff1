#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ree/bench.hpp"
#include "ree/conjugacy.hpp"
#include "ree/errors.hpp"
#include "ree/membership.hpp"

using namespace ree;

namespace {

enum Exit : int { kOk = 0, kNegative = 1, kLasVegas = 2, kIo = 3 };

struct Config {
  int m = 0;  // 0: take q from the input files
  std::uint64_t seed = 1;
  std::string gens, element, slp, out, csv;
  int trials = 5;
  int budget = 256;
  std::string point;
  std::vector<int> bench_ms{1, 2, 3};
  bool standard = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw FormatError("cannot write " + path);
}

int m_from_q(std::uint32_t q) {
  int e = 0;
  for (std::uint64_t x = 1; x < q; x *= 3) ++e;
  std::uint64_t check = 1;
  for (int i = 0; i < e; ++i) check *= 3;
  if (check != q || e < 3 || e % 2 == 0) throw FormatError("q = " + std::to_string(q) + " is not 3^(2m+1) with m >= 1");
  return (e - 1) / 2;
}

// The standard copy for the configured m, or for the q of `text` when m was not given.
std::shared_ptr<const ReeStandard> ree_for(const Config& c, const std::string* text) {
  int m = c.m;
  if (text) {
    std::istringstream in(*text);
    int fm = m_from_q(peek_field_size(in));
    if (m != 0 && m != fm) throw FormatError("--m does not match the q of the input file");
    m = fm;
  }
  if (m < 1) throw FormatError("--m must be at least 1");
  return ReeStandard::make(m);
}

std::vector<Matrix> parse_gens(const ReeStandard& ree, const std::string& text) {
  std::istringstream in(text);
  auto gens = read_matrices(in, ree.fp());
  for (const Matrix& g : gens)
    if (g.rows() != 7) throw FormatError("generators must be 7x7");
  if (gens.empty()) throw FormatError("empty generator file");
  return gens;
}

Matrix parse_element(const ReeStandard& ree, const std::string& text) {
  std::istringstream in(text);
  Matrix g = read_matrix(in, ree.fp());
  if (g.rows() != 7) throw FormatError("element must be 7x7");
  return g;
}

int cmd_recognize(const Config& c) {
  std::string text = read_file(c.gens);
  auto ree = ree_for(c, &text);
  auto gens = parse_gens(*ree, text);
  Rng rng(c.seed);
  auto rep = ree->recognize_standard(gens, rng);
  if (rep.is_standard()) {
    std::cout << "standard copy of Ree(" << ree->field().q() << ")\n";
    return kOk;
  }
  std::cout << (rep.verdict == RecognitionReport::Verdict::NotInRee ? "not in Ree: " : "proper subgroup: ")
            << rep.failed_check;
  if (rep.generator >= 0) std::cout << " (generator " << rep.generator << ")";
  std::cout << "\n";
  return kNegative;
}

int cmd_membership(const Config& c) {
  std::string text = read_file(c.gens);
  auto ree = ree_for(c, &text);
  auto gens = parse_gens(*ree, text);
  Matrix g = parse_element(*ree, read_file(c.element));
  MembershipTester tester(ree, gens, c.seed);
  Slp w = tester.element_to_slp(g, c.budget);
  write_file(c.out, w.to_text());
  std::cerr << "slp length " << w.length() << "\n";
  return kOk;
}

int cmd_conjugate(const Config& c) {
  std::string text = read_file(c.gens);
  auto ree = ree_for(c, &text);
  auto gens = parse_gens(*ree, text);
  ConjugacyBudget budget;
  auto r = conjugate_to_standard(*ree, gens, c.seed, budget);
  write_file(c.out, format_matrix(r.g));
  const ConjugationTranscript& t = r.transcript;
  nlohmann::json j = {
      {"q", ree->field().q()},   {"j_g", format_matrix(t.j_g)}, {"j_s", format_matrix(t.j_s)},
      {"c_g", format_matrix(t.c_g)}, {"c_s", format_matrix(t.c_s)}, {"twist", t.twist},
      {"c3", format_matrix(t.c3)}, {"c4", format_matrix(t.c4)}, {"c7", format_matrix(t.c7)},
      {"form", format_matrix(t.form)}, {"a", t.a},                {"c_j", format_matrix(t.c_j)},
      {"restarts", t.restarts}, {"final_test_failures", t.final_test_failures}};
  std::string tpath = c.out.empty() || c.out == "-" ? "" : c.out + ".transcript.json";
  if (tpath.empty())
    std::cerr << j.dump(2) << "\n";
  else
    write_file(tpath, j.dump(2) + "\n");
  return kOk;
}

Vec parse_point(const ReeStandard& ree, const std::string& s) {
  if (s.empty()) return ree.p_infinity().coords;
  Vec v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long long x = -1;
    try {
      x = std::stoll(item);
    } catch (const std::exception&) {
      throw FormatError("--point: bad entry '" + item + "'");
    }
    if (x < 0 || x >= ree.field().q()) throw FormatError("--point: entry out of range");
    v.push_back(static_cast<Elem>(x));
  }
  if (v.size() != 7 || vec_is_zero(v)) throw FormatError("--point needs 7 entries, not all zero");
  return v;
}

int cmd_stabilizer(const Config& c) {
  std::string text = read_file(c.gens);
  auto ree = ree_for(c, &text);
  auto gens = parse_gens(*ree, text);
  Vec p = parse_point(*ree, c.point);
  StabilizerFinder finder(gens, c.seed);
  Tracked x = finder.random_stabilizer_element(p);
  write_file(c.out, x.w.to_text());
  return kOk;
}

int cmd_random_group(const Config& c) {
  auto ree = ree_for(c, nullptr);
  if (c.standard) {
    write_file(c.out, format_matrices(ree->generators()));
    return kOk;
  }
  Rng rng(c.seed);
  auto [gens, h] = random_conjugate(*ree, rng);
  write_file(c.out, format_matrices(gens));
  return kOk;
}

int cmd_evaluate(const Config& c) {
  std::string text = read_file(c.gens);
  auto ree = ree_for(c, &text);
  auto gens = parse_gens(*ree, text);
  Slp w = Slp::from_text(read_file(c.slp));
  if (w.ngens() != static_cast<int>(gens.size())) throw FormatError("SLP generator count does not match the generator file");
  write_file(c.out, format_matrix(w.evaluate(gens)));
  return kOk;
}

// Quick end-to-end run: recognition, membership round trips, conjugation.
int cmd_selftest(const Config& c) {
  auto ree = ree_for(c.m == 0 ? Config{.m = 1} : c, nullptr);
  Rng rng(c.seed);
  auto gens = ree->generators();
  bool ok = true;
  auto report = [&](const char* what, bool pass) {
    std::cout << (pass ? "ok   " : "FAIL ") << what << "\n";
    ok = ok && pass;
  };
  report("standard generators recognized", ree->recognize_standard(gens, rng).is_standard());

  MembershipTester tester(ree, gens, c.seed);
  ProductReplacement pr(track_generators(gens), rng());
  bool round_trips = true;
  for (int i = 0; i < c.trials; ++i) {
    Matrix g = pr.next().m;
    round_trips = round_trips && tester.element_to_slp(g, c.budget).evaluate(gens) == g;
  }
  report("membership round trips", round_trips);

  auto [conj, h] = random_conjugate(*ree, rng);
  auto r = conjugate_to_standard(*ree, conj, rng());
  auto iso = make_isomorphism(r);
  std::vector<Matrix> images;
  for (const Matrix& x : conj) images.push_back(iso(x));
  report("random conjugate mapped to the standard copy", ree->recognize_standard(images, rng).is_standard());
  return ok ? kOk : kNegative;
}

int cmd_bench(const Config& c) {
  auto rows = run_bench(c.bench_ms, c.trials, c.seed);
  write_file(c.csv, bench_csv(rows));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive recognition and membership for the small Ree groups Ree(q), q = 3^(2m+1)"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--m", c.m, "q = 3^(2m+1); taken from the input files when omitted")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "random seed");
  };
  auto gens_opt = [&](CLI::App* s) { s->add_option("--gens", c.gens, "generator file")->required(); };
  auto out_opt = [&](CLI::App* s) { s->add_option("--out", c.out, "output file (stdout when omitted)"); };

  std::vector<std::pair<CLI::App*, int (*)(const Config&)>> commands;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Config&)) {
    CLI::App* s = app.add_subcommand(name, help);
    common(s);
    commands.push_back({s, fn});
    return s;
  };

  auto* rec = sub("recognize", "test whether the generators generate the standard copy", cmd_recognize);
  gens_opt(rec);

  auto* mem = sub("membership", "write an SLP in the generators for an element", cmd_membership);
  gens_opt(mem);
  mem->add_option("--element", c.element, "element file")->required();
  mem->add_option("--budget", c.budget, "random elements per search");
  out_opt(mem);

  auto* con = sub("conjugate", "find g with <X>^g the standard copy; the transcript goes to OUT.transcript.json",
                  cmd_conjugate);
  gens_opt(con);
  out_opt(con);

  auto* stab = sub("stabilizer", "SLP of a random element of a point stabilizer", cmd_stabilizer);
  gens_opt(stab);
  stab->add_option("--point", c.point, "comma-separated point coordinates (default P_infinity)");
  out_opt(stab);

  auto* rnd = sub("random-group", "generators of a random GL(7, q)-conjugate of the standard copy", cmd_random_group);
  rnd->get_option("--m")->required();
  rnd->add_flag("--standard", c.standard, "write the standard generators S(1, 0, 0), h(omega), Upsilon");
  out_opt(rnd);

  auto* ev = sub("evaluate", "evaluate an SLP on the generators", cmd_evaluate);
  gens_opt(ev);
  ev->add_option("--slp", c.slp, "SLP file")->required();
  out_opt(ev);

  auto* self = sub("selftest", "recognition, membership and conjugation on one q", cmd_selftest);
  self->add_option("--trials", c.trials, "membership round trips");
  self->add_option("--budget", c.budget, "random elements per search");

  auto* bench = app.add_subcommand("bench", "timings normalized by 10^6 field multiplications");
  commands.push_back({bench, cmd_bench});
  bench->add_option("--m", c.bench_ms, "values of m")->check(CLI::PositiveNumber);
  bench->add_option("--seed", c.seed, "random seed");
  bench->add_option("--trials", c.trials, "trials per q and operation");
  bench->add_option("--csv", c.csv, "CSV output (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIo;
  }

  try {
    for (auto& [s, fn] : commands)
      if (s->parsed()) return fn(c);
  } catch (const NotInGroup& e) {
    std::cerr << "not in group: " << e.what() << "\n";
    return kNegative;
  } catch (const LasVegasFailure& e) {
    std::cerr << "Las Vegas failure: " << e.what() << "\n";
    return kLasVegas;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kIo;
  }
  return kIo;
}
