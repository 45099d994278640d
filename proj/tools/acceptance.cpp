#include "acceptance.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "gen.hpp"
#include "perfectoid/adicdisc.hpp"
#include "perfectoid/error.hpp"
#include "perfectoid/io.hpp"
#include "perfectoid/polyroots.hpp"
#include "perfectoid/tatealg.hpp"
#include "perfectoid/tiltkit.hpp"
#include "perfectoid/toric.hpp"

namespace perfectoid::acceptance {

namespace {

// Collects failed checks; the first few are kept for the report line.
struct Checker {
  int checks = 0;
  int failures = 0;
  std::vector<std::string> notes;

  void operator()(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (notes.size() < 3) notes.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

template <Kind K>
Element<K> mono(const FieldConfig& cfg, int d, std::int64_t num, int denpow) {
  return Element<K>::monomial(cfg, d, ValExp(cfg.p, num, denpow));
}

// Random tilt with digits on the grid (1/p^level)Z below exponent `below`.
TiltElement coarse_tilt(gen::Rng& rng, const FieldConfig& cfg, int level, std::int64_t below, double density) {
  const std::int64_t step = ipow(cfg.p, cfg.dencap - level);
  std::vector<std::uint8_t> d(cfg.limit(), 0);
  std::bernoulli_distribution hit(density);
  for (std::int64_t i = 0; i < below * cfg.grid(); i += step)
    if (hit(rng)) d[i] = static_cast<std::uint8_t>(gen::uniform(rng, 1, cfg.p - 1));
  return TiltElement::from_digits(cfg, std::move(d));
}

template <Kind K>
void ring_axioms(Checker& check, gen::Rng& rng, const FieldConfig& cfg, int triples) {
  for (int i = 0; i < triples; ++i) {
    const auto a = gen::element<K>(rng, cfg), b = gen::element<K>(rng, cfg), c = gen::element<K>(rng, cfg);
    const std::string tag = std::string(to_string(K)) + " p=" + std::to_string(cfg.p);
    check((a + b) + c == a + (b + c), "additive associativity " + tag);
    check((a * b) * c == a * (b * c), "multiplicative associativity " + tag);
    check(a * (b + c) == a * b + a * c, "distributivity " + tag);
    check(a * b == b * a && a + b == b + a, "commutativity " + tag);
  }
}

void criterion1(Checker& check, gen::Rng& rng) {
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 8, 2);
    ring_axioms<Kind::untilt>(check, rng, cfg, 1000);
    ring_axioms<Kind::tilt>(check, rng, cfg, 1000);
  }
}

void criterion2(Checker& check, gen::Rng& rng) {
  for (int p : {2, 3, 5}) {
    FieldConfig cfg(p, 8, 2);
    check(sharp(mono<Kind::tilt>(cfg, 1, 1, 0), 8) == UntiltElement::from_int(cfg, p),
          "sharp(t) != p for p=" + std::to_string(p));
  }
  FieldConfig cfg(2, 8, 8);
  for (int i = 0; i < 500; ++i) {
    const auto x = coarse_tilt(rng, cfg, 0, 4, 0.4), y = coarse_tilt(rng, cfg, 0, 4, 0.4);
    check(sharp(x * y, 8) == sharp(x, 8) * sharp(y, 8), "sharp(xy) != sharp(x) sharp(y)");
  }
  for (int i = 0; i < 500; ++i) {
    const auto x = coarse_tilt(rng, cfg, 1, 8, 0.3);
    check(sharp_max(x, Rational(8)).valuation_index() == x.valuation_index(), "v(sharp x) != v(x)");
  }
  const auto one = TiltElement::from_int(cfg, 1), t = mono<Kind::tilt>(cfg, 1, 1, 0);
  const auto lhs = sharp(one + t, 8), rhs = sharp(one, 8) + sharp(t, 8);
  check(lhs != rhs, "no non-additivity witness");
  check.note("witness x=1, y=t: sharp(x+y) = " + io::to_text(lhs.truncated(2 * cfg.grid())) +
             " vs sharp(x)+sharp(y) = " + io::to_text(rhs.truncated(2 * cfg.grid())));
}

void criterion3(Checker& check, gen::Rng& rng) {
  struct Case {
    int p, prec;
  };
  for (Case k : {Case{2, 8}, Case{3, 9}}) {
    FieldConfig cfg(k.p, k.prec, 2);
    const std::int64_t mod = 3 * cfg.grid();
    auto random = [&] {
      std::vector<TiltElement> c;
      for (int i = 0; i < 3; ++i) c.push_back(coarse_tilt(rng, cfg, 0, k.prec, 0.3));
      return WittVector(cfg, c);
    };
    for (int i = 0; i < 100; ++i) {
      const auto a = random(), b = random();
      check(theta(a + b).congruent(theta(a) + theta(b), mod), "theta(a+b) != theta(a)+theta(b)");
      check(theta(a * b).congruent(theta(a) * theta(b), mod), "theta(ab) != theta(a)theta(b)");
    }
    const auto tt = theta(WittVector::teichmuller(mono<Kind::tilt>(cfg, 1, 1, 0), 3));
    check(tt.congruent(UntiltElement::from_int(cfg, k.p), mod), "theta([t]) != p mod p^3");
  }
}

void criterion4(Checker& check, gen::Rng& rng) {
  FieldConfig cfg(3, 6, 3);
  for (int i = 0; i < 100; ++i) {
    const int d = gen::uniform(rng, 1, 4);
    std::vector<TiltElement> lower;
    for (int k = 0; k < d; ++k) lower.push_back(coarse_tilt(rng, cfg, 0, cfg.prec, 0.35));
    const auto P = TiltPolynomial::monic(cfg, lower);
    check(newton_polygon(fw_transfer(P, 0)) == newton_polygon(P), "Newton polygon changed under transfer");
  }
  const auto t = mono<Kind::tilt>(cfg, 1, 1, 0);
  const auto X2t = TiltPolynomial::monic(cfg, {-t, TiltElement(cfg)});
  check(fw_transfer(X2t, 0) ==
            UntiltPolynomial::monic(cfg, {-UntiltElement::from_int(cfg, 3), UntiltElement(cfg)}),
        "fw_transfer(X^2 - t, 0) != X^2 - p");
  FieldConfig fine(3, 4, 4);
  const auto tf = mono<Kind::tilt>(fine, 1, 1, 0);
  const auto P = TiltPolynomial::monic(fine, {-(tf + tf * tf), TiltElement(fine)});
  std::string margins;
  Rational prev(-1000);
  for (int n = 0; n <= 3; ++n) {
    const Rational m = stabilization_margin(P, n);
    check(m >= prev, "stabilization margin decreased at n=" + std::to_string(n));
    margins += (n ? ", " : "") + to_string(m);
    prev = m;
  }
  check.note("margins of X^2-(t+t^2): " + margins);
}

void criterion5(Checker& check) {
  auto run = [&](int p, std::vector<std::int64_t> lower, const std::string& name) {
    FieldConfig cfg(p, 6, 2);
    std::vector<UntiltElement> c;
    for (auto v : lower) c.push_back(UntiltElement::from_int(cfg, v));
    const auto P = UntiltPolynomial::monic(cfg, c);
    const auto r = mixed_root_refine(P);
    check(r.stages <= cfg.prec, name + ": " + std::to_string(r.stages) + " outer iterations");
    check(r.residual.value() >= Rational(6), name + ": residual " + r.residual.to_string());
    check(P.eval(r.root).valuation_bound() >= 6 * cfg.grid(), name + ": P(root) not 0 mod p^6");
    return std::make_pair(P, r);
  };
  run(2, {-2, 0}, "X^2-p");
  run(3, {-3, 0, 0}, "X^3-p");
  const auto [P, r] = run(3, {-4, 0}, "X^2-(1+p)");
  const auto oracle = hensel_root(P, sharp_const(P.config(), 2));
  check(r.root == oracle || r.root == -oracle, "X^2-(1+p): root differs from the Hensel oracle");
  const auto& cfg = P.config();
  const auto two = UntiltElement::from_int(cfg, 2);
  check(r.root.congruent(two, cfg.grid()) || r.root.congruent(-two, cfg.grid()),
        "X^2-(1+p): root is not +-2 mod p");
}

void criterion6(Checker& check) {
  FieldConfig cfg(2, 4, 8);
  const int n = 3;
  auto T = [&](int j) { return UntiltTate::variable(cfg, n, j); };
  auto k = [&](std::int64_t v) { return UntiltElement::from_int(cfg, v); };
  const std::vector<std::pair<std::string, UntiltTate>> fs{
      {"T0+pT1", T(0) + T(1).scaled(k(2))},
      {"T0+pT1+p^2T2", T(0) + T(1).scaled(k(2)) + T(2).scaled(k(4))},
      {"T0+T1+T2", T(0) + T(1) + T(2)},
  };
  const auto sample = standard_sample(cfg, n, 50);
  for (const auto& [name, f] : fs)
    for (int c : {1, 2}) {
      const Rational eps(1, 2);
      const auto res = approximate(f, c, eps);
      const auto report = verify_contract(f, res.g, c, eps, sample);
      check(report.overall() == Verdict::pass && report.points.size() == 50,
            name + " c=" + std::to_string(c) + ": " + to_string(report.overall()));
    }
}

AdicPoint random_point(gen::Rng& rng, const FieldConfig& cfg) {
  const UntiltElement c = UntiltElement::from_int(cfg, gen::uniform(rng, 0, 30));
  switch (gen::uniform(rng, 0, 3)) {
    case 0:
      return AdicPoint::classical(c);
    case 1:
      return AdicPoint::disc(c, Rational(gen::uniform(rng, 0, 4), cfg.p));
    case 2:
      return AdicPoint::disc(c, Rational(gen::uniform(rng, 1, 4), 3 * cfg.p + 1));
    default:
      return AdicPoint::type5(c, Rational(gen::uniform(rng, 1, 4), cfg.p),
                              gen::uniform(rng, 0, 1) ? Side::less : Side::greater);
  }
}

void criterion7(Checker& check, gen::Rng& rng) {
  FieldConfig cfg(2, 6, 1);
  auto random_poly = [&] {
    std::vector<UntiltElement> c;
    for (int i = gen::uniform(rng, 0, 4); i >= 0; --i) c.push_back(gen::untilt(rng, cfg, 0.2));
    return UntiltPolynomial(cfg, c);
  };
  int decided = 0;
  for (int i = 0; i < 500; ++i) {
    const auto f = random_poly(), g = random_poly();
    const auto x = random_point(rng, cfg);
    const Value vf = eval(f, x), vg = eval(g, x), vfg = eval(f * g, x);
    if (vf.exact && vg.exact && vfg.exact) {
      ++decided;
      check(compare_abs(vfg, vf * vg) == 0, "|fg| != |f||g| at " + x.classification());
    }
    const std::size_t n = std::max(f.coeffs().size(), g.coeffs().size());
    std::vector<UntiltElement> s(n, UntiltElement::zero(cfg, cfg.limit()));
    for (std::size_t j = 0; j < n; ++j) {
      if (j < f.coeffs().size()) s[j] += f[j];
      if (j < g.coeffs().size()) s[j] += g[j];
    }
    const Value vs = eval(UntiltPolynomial(cfg, s), x);
    if (vs.exact && vf.exact && vg.exact)
      check(compare_abs(vs, compare_abs(vf, vg) >= 0 ? vf : vg) <= 0, "ultrametric inequality fails");
  }
  check(decided >= 250, "only " + std::to_string(decided) + " of 500 triples decided");
  check.note(std::to_string(decided) + "/500 triples exact");

  const auto gauss = AdicPoint::gauss(cfg);
  for (int c = 0; c < 10; ++c) {
    const auto y = AdicPoint::type5(UntiltElement::from_int(cfg, c), 0, Side::less);
    const auto chain = generizations(y);
    check(specializes(gauss, y) && chain.size() == 2 && same_point(chain.front(), gauss),
          "Gauss point does not specialize to (" + std::to_string(c) + ", 0, <)");
  }

  // Points where f(x^flat) vanishes at precision can only be indeterminate;
  // they are redrawn, judging by the tilt side alone.
  FieldConfig tcfg(2, 4, 3);
  int checked = 0, redrawn = 0;
  while (checked < 20) {
    TiltTate f(tcfg, 1);
    for (int k = 0; k < 2; ++k)
      f.add_term({Rational(gen::uniform(rng, 0, 2))},
                 TiltElement::monomial(tcfg, 1, ValExp(2, gen::uniform(rng, 0, 2), 0)));
    TiltPoint x{checked == 0, {}, checked == 0 ? "gauss" : "z"};
    if (checked) x.coords = {TiltElement::monomial(tcfg, 1, ValExp(2, gen::uniform(rng, 1, 2), 0)) +
                             TiltElement::from_int(tcfg, gen::uniform(rng, 0, 1))};
    if (f.is_zero() || (!x.gauss && f.eval(x.coords).is_zero())) {
      ++redrawn;
      continue;
    }
    check(tilt_point_check(f, x).verdict == Verdict::pass, "tilt_point_check fails at sample " + std::to_string(checked));
    ++checked;
  }
  check.note(std::to_string(redrawn) + " tilt samples redrawn (f(x^flat) = 0 at precision)");
}

void criterion8(Checker& check) {
  auto hyperplane = [](const Fan& fan, Rational a) {
    TWeilDivisor d{std::vector<Rational>(fan.rays.size(), Rational(0))};
    d.coefficients.back() = a;
    return d;
  };
  for (int n = 1; n <= 3; ++n) {
    const auto pn = projective_space_fan(n);
    for (int d = 0; d <= 5; ++d) {
      std::int64_t want = 1;
      for (int i = 1; i <= n; ++i) want = want * (d + i) / i;
      check(static_cast<std::int64_t>(sections(pn, hyperplane(pn, d), 2, 0).size()) == want,
            "sections of O(" + std::to_string(d) + ") on P^" + std::to_string(n));
    }
  }
  const auto p2 = validate_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, -1}}, {{-1, -1}, {1, 0}}});
  check(sections(p2, hyperplane(p2, Rational(1, 3)), 3, 1).size() == 3, "fractional sections of (1/3)H on P^2");
  check(is_smooth(p2) && is_complete(p2), "P^2 fan not smooth and complete");
  check(!is_smooth(validate_fan(2, {{{1, 0}, {1, 2}}})), "index 2 cone reported smooth");
  int cones = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          if (a * d - b * c == 0 || std::gcd(a, b) != 1 || std::gcd(c, d) != 1) continue;
          const Cone sigma = Cone::make(2, {{a, b}, {c, d}});
          check(dual_cone(dual_cone(sigma)) == sigma, "dual cone is not an involution");
          ++cones;
        }
  check.note(std::to_string(cones) + " cones dualized twice");
  FieldConfig cfg(2, 4, 8);
  UntiltTate f(cfg, 3);
  for (int j = 0; j < 3; ++j) f += UntiltTate::variable(cfg, 3, j);
  const auto res = hypersurface_transfer(projective_space_fan(2), f, 2, Rational(1, 2));
  check(res.report.overall() == Verdict::pass, "transfer of x0+x1+x2: " + std::string(to_string(res.report.overall())));
  check(res.h_degree.denominator() == 1, "h has fractional degree");
}

struct Run {
  int status = -1;
  std::string out;
};

Run run_command(const std::string& cmd) {
  Run r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

void criterion9(Checker& check, const Options& opts) {
  namespace fs = std::filesystem;
  check(fs::is_directory(opts.fixture_dir), "fixture directory " + opts.fixture_dir + " missing");
  int files = 0;
  const FieldConfig point_cfg(2, 8, 2);
  std::vector<fs::path> paths;
  if (fs::is_directory(opts.fixture_dir))
    for (const auto& e : fs::directory_iterator(opts.fixture_dir))
      if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string again;
    try {
      again = io::reprint(ss.str(), point_cfg);
    } catch (const Error& e) {
      again = e.what();
    }
    check(again == ss.str(), "round trip differs for " + path.filename().string());
    ++files;
  }
  check(files >= 10, "only " + std::to_string(files) + " fixtures");
  check.note(std::to_string(files) + " fixtures round-tripped");

  if (opts.cli_path.empty()) {
    check(false, "no CLI binary given");
    return;
  }
  const std::string cli = quote(opts.cli_path);
  const std::string env = "PERFECTOID_FIXTURES=" + quote(opts.fixture_dir) + " ";
  const std::vector<std::string> commands{
      cli + " sharp --p 3 --prec 4 t.json",
      cli + " newton x2_minus_p.json",
      cli + " toric sections pn2.json hyperplane.json",
      cli + " toric smooth pn2.json",
      cli + " disc eval disc_f.json --point '{\"type\":\"gauss\"}'",
      cli + " witt add witt_a.json witt_b.json",
      cli + " --format text tilt-reduce untilt_a.json",
      cli + " approx --c 1 --eps 1/2 --sample 10 linear3.json",
  };
  for (const auto& c : commands) {
    const Run a = run_command(env + c), b = run_command(env + c);
    check(a.status == 0 && !a.out.empty(), "command failed: " + c.substr(cli.size() + 1));
    check(a.out == b.out && a.status == b.status, "nondeterministic output: " + c.substr(cli.size() + 1));
  }
  // usage errors exit 2, domain errors exit 1 with an error object
  check(run_command(cli + " frobnicate").status == 2, "unknown subcommand does not exit 2");
  check(run_command(cli + " newton '{not json'").status == 2, "malformed JSON does not exit 2");
  const Run dom = run_command(env + cli + " toric sections '{\"rank\":2,\"cones\":[[[1,0],[0,1]]]}' '{\"coefficients\":[\"0\",\"0\"]}'");
  check(dom.status == 1 && dom.out.find("\"error\"") != std::string::npos, "domain error does not exit 1");

  const std::string suite = cli + " suite --only 1,4";
  const Run s1 = run_command(env + suite), s2 = run_command(env + suite);
  const bool all_pass = s1.out.find("FAIL") == std::string::npos && s1.out.find("PASS") != std::string::npos;
  check(s1.status == (all_pass ? 0 : 1), "suite exit code does not match its table");
  check(s1.out == s2.out, "suite output differs between runs");
}

struct Criterion {
  int id;
  const char* name;
  double limit;
  std::function<void(Checker&, gen::Rng&, const Options&)> body;
};

}  // namespace

std::vector<Result> run(const Options& opts) {
  const std::vector<Criterion> criteria{
      {1, "ring axioms", 5, [](Checker& c, gen::Rng& r, const Options&) { criterion1(c, r); }},
      {2, "sharp suite", 5, [](Checker& c, gen::Rng& r, const Options&) { criterion2(c, r); }},
      {3, "theta homomorphism", 10, [](Checker& c, gen::Rng& r, const Options&) { criterion3(c, r); }},
      {4, "Newton polygons and transfer", 10, [](Checker& c, gen::Rng& r, const Options&) { criterion4(c, r); }},
      {5, "root finding", 5, [](Checker& c, gen::Rng&, const Options&) { criterion5(c); }},
      {6, "approximation contract", 60, [](Checker& c, gen::Rng&, const Options&) { criterion6(c); }},
      {7, "adic disc", 5, [](Checker& c, gen::Rng& r, const Options&) { criterion7(c, r); }},
      {8, "toric", 30, [](Checker& c, gen::Rng&, const Options&) { criterion8(c); }},
      {9, "CLI", 60, [](Checker& c, gen::Rng&, const Options& o) { criterion9(c, o); }},
  };
  std::vector<Result> out;
  for (const auto& s : criteria) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), s.id) == opts.only.end()) continue;
    Checker check;
    gen::Rng rng(opts.seed + static_cast<std::uint64_t>(s.id));
    const auto start = std::chrono::steady_clock::now();
    bool threw = false;
    try {
      s.body(check, rng, opts);
    } catch (const std::exception& e) {
      threw = true;
      check.notes.insert(check.notes.begin(), std::string("exception: ") + e.what());
    }
    Result r;
    r.id = s.id;
    r.name = s.name;
    r.limit = s.limit;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.checks_passed = !threw && check.failures == 0;
    std::string detail = std::to_string(check.checks - check.failures) + "/" + std::to_string(check.checks) + " checks";
    for (const auto& n : check.notes) detail += "; " + n;
    r.detail = detail;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format(const Result& r, bool timings) {
  std::ostringstream os;
  os << "criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << " " << r.name;
  os.setf(std::ios::fixed);
  os.precision(2);
  if (timings)
    os << " (" << r.seconds << " s, limit " << r.limit << " s)";
  else
    os << " (limit " << static_cast<int>(r.limit) << " s" << (r.seconds > r.limit ? ", exceeded" : "") << ")";
  os << " " << r.detail;
  return os.str();
}

}  // namespace perfectoid::acceptance
