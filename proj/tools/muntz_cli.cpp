#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "muntz/fixtures.hpp"
#include "muntz/problem_file.hpp"

using namespace muntz;

namespace {

std::vector<long> parse_degrees(const std::string& text) {
  std::vector<long> out;
  for (const std::string& f : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(f, &used));
      if (used != f.size()) throw std::invalid_argument(f);
    } catch (const std::exception&) {
      throw ValidationError("degrees: malformed entry '" + f + "'");
    }
  }
  if (out.empty()) throw ValidationError("degrees: empty list");
  return out;
}

std::vector<Real> parse_points(const std::string& text, const Real& horizon, Precision p) {
  std::vector<Real> out;
  for (const std::string& f : split(text, ',')) {
    Real t(p);
    try {
      t = Real::parse(f, p);
    } catch (const Error&) {
      throw ValidationError("points: malformed entry '" + f + "'");
    }
    if (t.sign() < 0 || t > horizon) throw ValidationError("points: " + f + " lies outside [0, T]");
    out.push_back(std::move(t));
  }
  return out;
}

struct Options {
  std::string problem;
  std::string fixture;
  std::string degrees;
  std::optional<long> bits;
  std::string out;
  bool full_scale = false;
  std::string points;
  std::string theta = "1/2";
  long terms = 16;
};

FixtureOptions fixture_options(const Options& o) {
  FixtureOptions f;
  f.full_scale = o.full_scale;
  f.theta = Rational::parse(o.theta);
  return f;
}

// the problem named by either a JSON file or --fixture
Fixture load(const Options& o) {
  if (!o.problem.empty() && !o.fixture.empty()) throw ValidationError("give either a problem file or --fixture, not both");
  if (!o.fixture.empty()) return make_fixture(o.fixture, fixture_options(o));
  if (o.problem.empty()) throw ValidationError("a problem file or --fixture is required");
  return {load_problem(o.problem), {}, std::nullopt};
}

void dump_points(std::ostream& os, const std::vector<Real>& ts, const std::function<std::vector<Complex>(const Real&)>& f) {
  os << "t";
  bool header = false;
  for (const Real& t : ts) {
    const std::vector<Complex> v = f(t);
    if (!header) {
      for (std::size_t j = 0; j < v.size(); ++j) os << "\tv" << j + 1;
      os << '\n';
      header = true;
    }
    os << t.str(17);
    for (const Complex& c : v) os << '\t' << c.str(25);
    os << '\n';
  }
}

int run_solve(const Options& o) {
  const Fixture fx = load(o);
  const std::vector<long> degrees = o.degrees.empty() ? fx.degrees : parse_degrees(o.degrees);
  if (degrees.size() != 1) throw ValidationError("degrees: solve takes exactly one N");
  const long n = degrees.front();
  const std::optional<long> bits = o.bits ? o.bits : fx.bits;
  const Precision p = bits ? Precision(*bits) : Precision::for_degree(n);
  const GalerkinSolution sol = solve(fx.spec, n, p);
  std::cout << "problem: " << fx.spec.name << "\nN: " << n << "\nbits: " << p.bits() << "\nseconds: " << short_seconds(sol.seconds) << '\n';
  const Reference ref = fx.spec.reference ? fx.spec.reference : series_reference(fx.spec, 4 * n, p);
  std::cout << "reference: " << (fx.spec.reference ? fx.spec.reference_label : std::string("local series (4N terms)")) << '\n';
  std::cout << "E: " << error_norm(sol, ref, n).str(10) << '\n';
  if (!o.points.empty()) {
    std::cout << '\n';
    dump_points(std::cout, parse_points(o.points, sol.horizon, p), [&](const Real& t) { return evaluate_all(sol, t); });
  }
  return 0;
}

int run_sweep(const Fixture& fx, const Options& o, const std::string& default_out) {
  RunConfig cfg;
  cfg.degrees = o.degrees.empty() ? fx.degrees : parse_degrees(o.degrees);
  if (cfg.degrees.empty()) throw ValidationError("degrees: --degrees is required for problem files");
  cfg.bits = o.bits ? o.bits : fx.bits;
  const std::vector<ConvergenceRecord> records = converge(fx.spec, cfg);
  const std::filesystem::path dir = o.out.empty() ? default_out : o.out;
  emit_outputs(dir, fx.spec, records);
  write_summary(std::cout, fx.spec, records);
  std::cout << "\nwrote " << (dir / "records.csv").string() << ", plot.dat, summary.txt\n";
  for (const ConvergenceRecord& r : records) {
    if (!r.error) return 1;
  }
  return 0;
}

int run_oracle(const Options& o) {
  const Fixture fx = load(o);
  if (o.terms < 1) throw ValidationError("terms: must be positive");
  const Precision p = o.bits ? Precision(*o.bits) : Precision::for_degree(o.terms);
  const Real horizon = fx.spec.horizon(p);
  const SeriesSolution sol = series_solve(to_series_problem(fx.spec, o.terms, p), o.terms, horizon);
  const long q = sol.v.front().grid().q();
  std::cout << "problem: " << fx.spec.name << "\ngrid q: " << q << "\nterms: " << o.terms << "\nradius hint: " << sol.radius_hint.str(8)
            << "\n\n";
  for (std::size_t j = 0; j < sol.v.size(); ++j) {
    std::cout << "v" << j + 1 << ":\n";
    for (long mu = 0; mu <= sol.truncation; ++mu) {
      if (sol.v[j][mu].is_zero()) continue;
      std::cout << "  t^(" << Rational(mu, q).str() << ")\t" << sol.v[j][mu].str(25) << '\n';
    }
  }
  if (!o.points.empty()) {
    std::cout << '\n';
    dump_points(std::cout, parse_points(o.points, horizon, p), [&](const Real& t) {
      std::vector<Complex> out;
      for (std::size_t j = 0; j < sol.v.size(); ++j) out.push_back(series_eval(sol, j, t));
      return out;
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin solver for linear fractional differential systems"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_problem) {
    if (with_problem) {
      sub->add_option("problem", o.problem, "problem file (JSON)");
      sub->add_option("--fixture", o.fixture, "built-in problem instead of a file")->check(CLI::IsMember(fixture_names()));
    }
    sub->add_option("--bits", o.bits, "working precision in bits (default: from N)")->check(CLI::Range(64L, 1L << 20));
    sub->add_flag("--full-scale", o.full_scale, "original frequencies and horizons for the built-in problems");
    sub->add_option("--theta", o.theta, "order of the exm5 problem");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve at one degree, print E and optional point values");
  add_common(solve_cmd, true);
  solve_cmd->add_option("--degrees", o.degrees, "approximation degree N");
  solve_cmd->add_option("--points", o.points, "comma-separated evaluation points t1,t2,...");

  CLI::App* converge_cmd = app.add_subcommand("converge", "sweep N and write records.csv, plot.dat, summary.txt");
  add_common(converge_cmd, true);
  converge_cmd->add_option("--degrees", o.degrees, "comma-separated increasing degrees");
  converge_cmd->add_option("--out", o.out, "output directory");

  std::string fixture_name;
  CLI::App* fixture_cmd = app.add_subcommand("fixture", "run the convergence sweep of a built-in problem");
  fixture_cmd->add_option("name", fixture_name, "fixture name")->required()->check(CLI::IsMember(fixture_names()));
  add_common(fixture_cmd, false);
  fixture_cmd->add_option("--degrees", o.degrees, "override the default degrees");
  fixture_cmd->add_option("--out", o.out, "output directory");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "local series solution, printing its leading coefficients");
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--terms", o.terms, "number of retained series terms M");
  oracle_cmd->add_option("--points", o.points, "comma-separated evaluation points t1,t2,...");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(o);
    if (*converge_cmd) return run_sweep(load(o), o, "out");
    if (*fixture_cmd) return run_sweep(make_fixture(fixture_name, fixture_options(o)), o, "out/" + fixture_name);
    if (*oracle_cmd) return run_oracle(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
