#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "perfectoid/error.hpp"
#include "perfectoid/io.hpp"

using namespace perfectoid;
using io::Json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  int p = 2;
  int prec = 8;
  int dencap = 2;
  std::uint64_t seed = 20240601;
  std::string format = "json";
  CLI::Option* p_opt = nullptr;
  CLI::Option* prec_opt = nullptr;
  CLI::Option* dencap_opt = nullptr;
  CLI::Option* format_opt = nullptr;

  bool has_p() const { return p_opt->count() > 0; }
  bool has_prec() const { return prec_opt->count() > 0; }
  bool has_dencap() const { return dencap_opt->count() > 0; }
  FieldConfig config() const { return FieldConfig(p, prec, dencap); }
};

struct Output {
  Json json;
  std::string text;  // empty: fall back to compact JSON
};

std::string fixture_dir() {
  if (const char* env = std::getenv("PERFECTOID_FIXTURES")) return env;
  return PERFECTOID_FIXTURE_DIR;
}

// Inline JSON, a readable path, or a name inside the fixture directory.
Json load(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return io::parse_document(arg);
  namespace fs = std::filesystem;
  fs::path path(arg);
  if (!fs::exists(path)) path = fs::path(fixture_dir()) / arg;
  if (!fs::exists(path)) throw UsageError("no such input: " + arg);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return io::parse_document(ss.str());
}

Kind kind_of(const Json& j) {
  const Json& e = j.is_array() && !j.empty() ? j.front() : j;
  if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) throw UsageError("input has no element kind");
  return e["kind"] == "tilt" ? Kind::tilt : Kind::untilt;
}

Rational rational_arg(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const Error&) {
    throw UsageError("malformed rational: " + s);
  }
}

void check_p(const Globals& g, const FieldConfig& cfg) {
  if (g.has_p() && g.p != cfg.p)
    fail(ErrorKind::config_mismatch, "--p " + std::to_string(g.p) + " but the input has p = " + std::to_string(cfg.p));
}

// Widen an element's config to the flags when they ask for more.
FieldConfig widened(const Globals& g, const FieldConfig& cfg, int prec) {
  return FieldConfig(cfg.p, std::max(cfg.prec, prec), g.has_dencap() ? std::max(g.dencap, cfg.dencap) : cfg.dencap);
}

template <Kind K>
Output element_output(const Element<K>& a) {
  return {io::to_json(a), io::to_text(a)};
}

template <Kind K>
Output poly_output(const Polynomial<K>& P) {
  return {io::to_json(P), io::to_text(P)};
}

template <Kind K>
Output tate_output(const TatePoly<K>& f) {
  return {io::to_json(f), io::to_text(f)};
}

std::string report_text(const ContractReport& r) {
  std::string s = "overall: " + std::string(to_string(r.overall()));
  for (const auto& pt : r.points)
    s += "\n" + pt.label + ": v(f)=" + pt.vf.to_string() + " v(g#)=" + pt.vg.to_string() + " v(f-g#)=" +
         pt.vdiff.to_string() + " equality " + to_string(pt.equality) + ", inequality " + to_string(pt.inequality);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact perfectoid tilting kernel"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  g.p_opt = app.add_option("--p", g.p, "prime");
  g.prec_opt = app.add_option("--prec", g.prec, "precision N (elements known mod p^N)");
  g.dencap_opt = app.add_option("--dencap", g.dencap, "exponent denominators divide p^dencap");
  app.add_option("--seed", g.seed, "seed for randomized checks");
  g.format_opt = app.add_option("--format", g.format, "json or text")->check(CLI::IsMember({"json", "text"}));

  std::function<Output()> action;
  auto on = [&](CLI::App* sub, std::function<Output()> fn) { sub->callback([&action, fn] { action = fn; }); };

  std::string in1, in2, point_arg, target_arg, c_arg = "1", eps_arg = "1/2", fan_arg, only_arg;
  int n_arg = 0, c_int = 1, sample = 50;
  bool max_flag = false, timings = false;

  auto* sharp_cmd = app.add_subcommand("sharp", "multiplicative lift of a tilt element");
  sharp_cmd->add_option("element", in1)->required();
  sharp_cmd->add_option("--target", target_arg, "target precision (default --prec or the element's)");
  sharp_cmd->add_flag("--max", max_flag, "return the attainable prefix instead of failing off-grid");
  on(sharp_cmd, [&] {
    const auto x = io::element_from_json<Kind::tilt>(load(in1));
    check_p(g, x.config());
    const Rational target = !target_arg.empty() ? rational_arg(target_arg) : Rational(g.has_prec() ? g.prec : x.config().prec);
    const auto cfg = widened(g, x.config(), static_cast<int>(ceil(target).numerator()));
    const auto y = x.recast(cfg);
    return element_output(max_flag ? sharp_max(y, target) : sharp(y, target));
  });

  auto* reduce_cmd = app.add_subcommand("tilt-reduce", "reduction K°/p = K♭°/t");
  reduce_cmd->add_option("element", in1)->required();
  on(reduce_cmd, [&] {
    const Json j = load(in1);
    if (kind_of(j) == Kind::tilt) return element_output(lift_mod_uniformizer(io::element_from_json<Kind::tilt>(j)));
    const auto a = io::element_from_json<Kind::untilt>(j);
    check_p(g, a.config());
    return element_output(reduce_mod_uniformizer(a));
  });

  auto* theta_cmd = app.add_subcommand("theta", "untilt a Witt vector");
  theta_cmd->add_option("witt", in1)->required();
  on(theta_cmd, [&] { return element_output(theta(io::witt_from_json(load(in1)))); });

  std::string witt_op;
  auto* witt_cmd = app.add_subcommand("witt", "Witt vector arithmetic");
  witt_cmd->add_option("op", witt_op)->required()->check(CLI::IsMember({"add", "mul", "sub", "teichmuller"}));
  witt_cmd->add_option("a", in1)->required();
  witt_cmd->add_option("b", in2);
  witt_cmd->add_option("--length", n_arg, "length for teichmuller");
  on(witt_cmd, [&] {
    if (witt_op == "teichmuller") {
      const auto x = io::element_from_json<Kind::tilt>(load(in1));
      return Output{io::to_json(WittVector::teichmuller(x, n_arg > 0 ? n_arg : 2)), ""};
    }
    if (in2.empty()) throw UsageError("witt " + witt_op + " needs two vectors");
    const auto a = io::witt_from_json(load(in1)), b = io::witt_from_json(load(in2));
    const auto r = witt_op == "add" ? a + b : witt_op == "sub" ? a - b : a * b;
    return Output{io::to_json(r), ""};
  });

  auto* newton_cmd = app.add_subcommand("newton", "Newton polygon");
  newton_cmd->add_option("poly", in1)->required();
  on(newton_cmd, [&] {
    const Json j = load(in1);
    const NewtonPolygon np = kind_of(j) == Kind::tilt ? newton_polygon(io::polynomial_from_json<Kind::tilt>(j))
                                                      : newton_polygon(io::polynomial_from_json<Kind::untilt>(j));
    std::string text;
    for (const auto& s : np.segments) text += (text.empty() ? "" : "\n") + std::string("slope ") + to_string(s.slope) + " x" + std::to_string(s.multiplicity);
    if (np.zero_roots) text += (text.empty() ? "" : "\n") + std::string("slope inf x") + std::to_string(np.zero_roots);
    return Output{io::to_json(np), text};
  });

  auto* transfer_cmd = app.add_subcommand("transfer", "Fontaine-Wintenberger transfer of a tilt polynomial");
  transfer_cmd->add_option("poly", in1)->required();
  transfer_cmd->add_option("--n", n_arg, "transfer level");
  on(transfer_cmd, [&] { return poly_output(fw_transfer(io::polynomial_from_json<Kind::tilt>(load(in1)), n_arg)); });

  auto* root_cmd = app.add_subcommand("root", "find a root");
  root_cmd->add_option("poly", in1)->required();
  on(root_cmd, [&] {
    const Json j = load(in1);
    if (kind_of(j) == Kind::tilt) {
      const auto r = charp_root(io::polynomial_from_json<Kind::tilt>(j));
      if (!r) fail(ErrorKind::not_found, "no root found in the search space");
      return Output{Json{{"root", io::to_json(*r)}}, io::to_text(*r)};
    }
    const auto r = mixed_root_refine(io::polynomial_from_json<Kind::untilt>(j));
    return Output{Json{{"root", io::to_json(r.root)},
                       {"stages", r.stages},
                       {"residual", to_string(r.residual.value())}},
                  io::to_text(r.root)};
  });

  auto* decompose_cmd = app.add_subcommand("decompose", "f = g0# + p g1# + ... mod p^(c+1)");
  decompose_cmd->add_option("f", in1)->required();
  decompose_cmd->add_option("--c", c_int, "depth");
  on(decompose_cmd, [&] {
    const auto gs = decompose(io::tate_from_json<Kind::untilt>(load(in1)), c_int);
    Json out = Json::array();
    std::string text;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      out.push_back(io::to_json(gs[i]));
      text += (i ? "\n" : "") + std::string("g") + std::to_string(i) + " = " + io::to_text(gs[i]);
    }
    return Output{out, text};
  });

  auto* approx_cmd = app.add_subcommand("approx", "approximation lemma");
  approx_cmd->add_option("f", in1)->required();
  approx_cmd->add_option("--c", c_arg);
  approx_cmd->add_option("--eps", eps_arg);
  approx_cmd->add_option("--sample", sample, "verification points");
  on(approx_cmd, [&] {
    const auto f = io::tate_from_json<Kind::untilt>(load(in1));
    const Rational c = rational_arg(c_arg), eps = rational_arg(eps_arg);
    const auto res = approximate(f, c, eps);
    const auto report = verify_contract(f, res.g, c, eps, standard_sample(f.config(), f.nvars(), sample));
    return Output{Json{{"approx", io::to_json(res)}, {"report", io::to_json(report)}},
                  "g = " + io::to_text(res.g) + "\n" + report_text(report)};
  });

  auto* verify_cmd = app.add_subcommand("verify", "check |f - g#| <= |p|^(1-eps) max(|f|, |p|^c)");
  verify_cmd->add_option("f", in1)->required();
  verify_cmd->add_option("g", in2)->required();
  verify_cmd->add_option("--c", c_arg);
  verify_cmd->add_option("--eps", eps_arg);
  verify_cmd->add_option("--sample", sample, "verification points");
  on(verify_cmd, [&] {
    const auto f = io::tate_from_json<Kind::untilt>(load(in1));
    const auto gg = io::tate_from_json<Kind::tilt>(load(in2));
    const auto report = verify_contract(f, gg, rational_arg(c_arg), rational_arg(eps_arg),
                                        standard_sample(f.config(), f.nvars(), sample));
    return Output{io::to_json(report), report_text(report)};
  });

  std::string disc_op;
  auto* disc_cmd = app.add_subcommand("disc", "points of the adic unit disc");
  disc_cmd->add_option("op", disc_op)->required()->check(CLI::IsMember({"eval", "member", "specializes", "classify"}));
  disc_cmd->add_option("a", in1)->required();
  disc_cmd->add_option("b", in2);
  disc_cmd->add_option("--point", point_arg);
  on(disc_cmd, [&] {
    auto cfg_of = [&](const Json& j) {
      if (j.is_object() && j.contains("center")) return io::element_from_json<Kind::untilt>(j["center"]).config();
      return g.config();
    };
    if (disc_op == "eval") {
      const auto f = io::polynomial_from_json<Kind::untilt>(load(in1));
      const std::string where = !point_arg.empty() ? point_arg : in2;
      if (where.empty()) throw UsageError("disc eval needs --point");
      const Value v = eval(f, io::point_from_json(load(where), f.config()));
      return Output{io::to_json(v), v.to_string()};
    }
    if (disc_op == "classify") {
      const Json j = load(in1);
      const auto x = io::point_from_json(j, cfg_of(j));
      return Output{Json{{"type", x.classification()}, {"rank", x.rank()}}, x.classification()};
    }
    if (in2.empty()) throw UsageError("disc " + disc_op + " needs two inputs");
    if (disc_op == "member") {
      const auto U = io::subset_from_json(load(in1));
      const auto x = io::point_from_json(load(in2), U.denominator.config());
      const bool in = in_rational_subset(x, U);
      return Output{Json{{"member", in}}, in ? "true" : "false"};
    }
    const Json jx = load(in1), jy = load(in2);
    const FieldConfig cfg = jx.contains("center") ? cfg_of(jx) : cfg_of(jy);
    const bool s = specializes(io::point_from_json(jx, cfg), io::point_from_json(jy, cfg));
    return Output{Json{{"specializes", s}}, s ? "true" : "false"};
  });

  std::string toric_op;
  auto* toric_cmd = app.add_subcommand("toric", "fans, sections and hypersurface transfer");
  toric_cmd->add_option("op", toric_op)->required()->check(CLI::IsMember({"sections", "smooth", "dual", "transfer"}));
  toric_cmd->add_option("a", in1)->required();
  toric_cmd->add_option("b", in2);
  toric_cmd->add_option("--c", c_arg);
  toric_cmd->add_option("--eps", eps_arg);
  toric_cmd->add_option("--fan", fan_arg);
  toric_cmd->add_option("--sample", sample, "verification points");
  on(toric_cmd, [&] {
    if (toric_op == "sections") {
      if (in2.empty()) throw UsageError("toric sections needs a fan and a divisor");
      const Fan fan = io::fan_from_json(load(in1));
      const auto pts = sections(fan, io::divisor_from_json(load(in2)), g.p, g.has_dencap() ? g.dencap : 0);
      Json out = Json::array();
      std::string text;
      for (const auto& u : pts) {
        Json row = Json::array();
        std::string t;
        for (const auto& x : u) {
          row.push_back(to_string(x));
          t += (t.empty() ? "" : ",") + to_string(x);
        }
        out.push_back(row);
        text += (text.empty() ? "(" : "\n(") + t + ")";
      }
      return Output{out, text.empty() ? "no sections" : text};
    }
    if (toric_op == "smooth") {
      const Fan fan = io::fan_from_json(load(in1));
      Json rays = Json::array();
      for (const auto& r : fan.rays) rays.push_back(r);
      const bool smooth = is_smooth(fan);
      const Json complete = fan.rank <= 3 ? Json(is_complete(fan)) : Json(nullptr);
      return Output{Json{{"valid", true}, {"smooth", smooth}, {"complete", complete}, {"rays", rays}},
                    std::string("smooth: ") + (smooth ? "true" : "false") + ", complete: " + complete.dump()};
    }
    if (toric_op == "dual") {
      const Json j = load(in1);
      if (!j.is_array() || j.empty() || !j.front().is_array()) throw UsageError("a cone is an array of generators");
      std::vector<LatticeVec> gens;
      for (const auto& v : j) gens.push_back(v.get<LatticeVec>());
      const Cone d = dual_cone(Cone::make(static_cast<int>(gens.front().size()), gens));
      return Output{Json(d.generators), ""};
    }
    const auto f = io::tate_from_json<Kind::untilt>(load(in1));
    const Fan fan = fan_arg.empty() ? projective_space_fan(f.nvars() - 1) : io::fan_from_json(load(fan_arg));
    const auto res = hypersurface_transfer(fan, f, rational_arg(c_arg), rational_arg(eps_arg), sample);
    return Output{Json{{"g", io::to_json(res.approx.g)},
                       {"degree", to_string(res.degree)},
                       {"s", res.s},
                       {"h", io::to_json(res.h)},
                       {"h_degree", to_string(res.h_degree)},
                       {"report", io::to_json(res.report)}},
                  "g = " + io::to_text(res.approx.g) + "\nh = g^(p^" + std::to_string(res.s) + ") = " +
                      io::to_text(res.h) + "\n" + report_text(res.report)};
  });

  auto* suite_cmd = app.add_subcommand("suite", "acceptance criteria 1-9");
  suite_cmd->add_option("--only", only_arg, "comma separated criterion numbers");
  suite_cmd->add_flag("--timings", timings, "include wall-clock times (not reproducible)");
  bool suite_failed = false;
  on(suite_cmd, [&] {
    acceptance::Options opts;
    opts.seed = g.seed;
    opts.fixture_dir = fixture_dir();
    opts.cli_path = std::filesystem::read_symlink("/proc/self/exe").string();
    std::stringstream ss(only_arg);
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        const int id = std::stoi(tok);
        if (id < 1 || id > 9) throw std::out_of_range(tok);
        opts.only.push_back(id);
      } catch (const std::exception&) {
        throw UsageError("--only expects criterion numbers 1-9");
      }
    }
    const auto results = acceptance::run(opts);
    Json out = Json::array();
    std::string text;
    for (const auto& r : results) {
      suite_failed |= !r.pass();
      Json row{{"criterion", r.id}, {"name", r.name}, {"pass", r.pass()}, {"detail", r.detail}};
      if (timings) row["seconds"] = r.seconds;
      out.push_back(row);
      text += (text.empty() ? "" : "\n") + acceptance::format(r, timings);
    }
    text += std::string("\n") + (suite_failed ? "FAILED" : "all criteria passed");
    return Output{out, text};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool suite = suite_cmd->parsed();
  try {
    Output out = action();
    // the suite reads best as a table unless JSON was asked for
    const bool text = g.format == "text" || (suite && g.format_opt->count() == 0);
    std::string body = text ? (out.text.empty() ? out.json.dump() : out.text) : io::print(out.json);
    if (!body.empty() && body.back() != '\n') body += '\n';
    std::cout << body;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    }
    std::cout << io::print(Json{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}});
    return 1;
  }
  return suite && suite_failed ? 1 : 0;
}
