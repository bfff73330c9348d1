#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "muntz/galerkin.hpp"
#include "muntz/orthopoly.hpp"

namespace muntz {

/// max_j sqrt( T/2 sum_k |e_j(T/2 (x_k + 1))|^2 w_k ) over the Legendre-Gauss rule with
/// n_quad + 1 points on [-1, 1]. Errors are evaluated at precision p; the rule itself is
/// only needed to a relative accuracy far below any reported digit, so it is capped at
/// 192 bits.
inline Real l2_error_norm(const std::function<std::vector<Complex>(const Real& t)>& error, const Real& horizon, long n_quad,
                          Precision p) {
  if (n_quad < 0) throw DomainError("quadrature needs at least one point");
  const QuadratureRule& rule =
      gauss_rule(JacobiParams{Rational(0), Rational(0)}, n_quad + 1, Domain::Symmetric, Precision(std::min(p.bits(), 192L)));
  const Real half = horizon.rounded(p) / 2L;
  std::vector<Real> acc;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Real t = half * (rule.nodes[k].rounded(p) + 1L);
    const std::vector<Complex> e = error(t);
    if (acc.empty()) acc.assign(e.size(), Real(p));
    if (e.size() != acc.size()) throw ValidationError("error function changed its number of components");
    const Real wk = rule.weights[k].rounded(p);
    for (std::size_t j = 0; j < e.size(); ++j) acc[j] += norm(e[j]) * wk;
  }
  Real out(p);
  for (const Real& a : acc) out = max(out, sqrt(half * a));
  return out;
}

/// E(N) of a Galerkin solution against a reference; the reference is evaluated at the
/// solution's precision.
inline Real error_norm(const GalerkinSolution& sol, const Reference& reference, long n_quad) {
  if (!reference) throw ValidationError("reference: no reference solution available");
  const Precision p = sol.precision;
  auto error = [&](const Real& t) {
    std::vector<Complex> ref = reference(t, p);
    if (ref.size() != sol.c.size()) throw ValidationError("reference: expected " + std::to_string(sol.c.size()) + " components");
    const std::vector<Complex> v = evaluate_all(sol, t);
    for (std::size_t j = 0; j < ref.size(); ++j) ref[j] = ref[j].rounded(p) - v[j];
    return ref;
  };
  return l2_error_norm(error, sol.horizon, n_quad, p);
}

struct ConvergenceRecord {
  long degree = 0;
  std::optional<Real> error;  // empty when the solve failed
  double seconds = 0;
  long bits = 0;
  std::optional<Real> error_fine;  // same norm with 4(N+1) points
  std::string failure;
};

struct RunConfig {
  std::vector<long> degrees;
  std::optional<long> bits;  // overrides the degree-based precision policy
  long threads = 0;          // 0: hardware concurrency

  void validate() const {
    if (degrees.empty()) throw ValidationError("degrees: at least one degree is required");
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      if (degrees[i] < 1) throw ValidationError("degrees: N must be positive");
      if (i > 0 && degrees[i] <= degrees[i - 1]) throw ValidationError("degrees: must be strictly increasing");
    }
    if (bits && *bits < Precision::kMinBits) throw ValidationError("bits: at least " + std::to_string(Precision::kMinBits) + " required");
  }
  Precision precision_for(long n) const { return bits ? Precision(*bits) : Precision::for_degree(n); }
};

/// Local series solution to order m used as the reference when nothing better is known;
/// trustworthy only below its radius hint.
inline Reference series_reference(const ProblemSpec& spec, long m, Precision p, Real* radius = nullptr) {
  const Real horizon = spec.horizon(p);
  auto sol = std::make_shared<SeriesSolution>(series_solve(to_series_problem(spec, m, p), m, horizon));
  if (radius) *radius = sol->radius_hint;
  return [sol](const Real& t, Precision) {
    std::vector<Complex> out;
    for (std::size_t j = 0; j < sol->v.size(); ++j) out.push_back(series_eval(*sol, j, t));
    return out;
  };
}

inline ConvergenceRecord measure(const ProblemSpec& spec, long n, Precision p) {
  ConvergenceRecord rec;
  rec.degree = n;
  rec.bits = p.bits();
  try {
    const GalerkinSolution sol = solve(spec, n, p);
    rec.seconds = sol.seconds;
    const Reference ref = spec.reference ? spec.reference : series_reference(spec, 4 * n, p);
    rec.error = error_norm(sol, ref, n);
    rec.error_fine = error_norm(sol, ref, 4 * (n + 1) - 1);
  } catch (const std::exception& e) {
    rec.error.reset();
    rec.error_fine.reset();
    rec.failure = e.what();
  }
  return rec;
}

/// One record per degree; failures become error rows and the sweep continues. Degrees
/// are solved concurrently, results are returned in the order of cfg.degrees.
inline std::vector<ConvergenceRecord> converge(const ProblemSpec& spec, const RunConfig& cfg) {
  cfg.validate();
  spec.validate();
  const std::size_t workers = static_cast<std::size_t>(
      cfg.threads > 0 ? cfg.threads : std::max(1U, std::thread::hardware_concurrency()));
  std::vector<ConvergenceRecord> out(cfg.degrees.size());
  for (std::size_t start = 0; start < cfg.degrees.size(); start += workers) {
    const std::size_t stop = std::min(cfg.degrees.size(), start + workers);
    if (stop - start == 1) {
      out[start] = measure(spec, cfg.degrees[start], cfg.precision_for(cfg.degrees[start]));
      continue;
    }
    std::vector<std::future<ConvergenceRecord>> jobs;
    for (std::size_t i = start; i < stop; ++i) {
      const long n = cfg.degrees[i];
      jobs.push_back(std::async(std::launch::async, [&spec, &cfg, n] { return measure(spec, n, cfg.precision_for(n)); }));
    }
    for (std::size_t i = start; i < stop; ++i) out[i] = jobs[i - start].get();
  }
  return out;
}

// ---- emission ----

inline std::string format_seconds(double s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", s);
  return buf;
}

inline std::string short_seconds(double s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", s);
  return buf;
}

inline void write_records_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << "N,error,seconds,bits\n";
  for (const ConvergenceRecord& r : records) {
    os << r.degree << ',' << (r.error ? r.error->str() : std::string("failed")) << ',' << format_seconds(r.seconds) << ','
       << r.bits << '\n';
  }
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<ConvergenceRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "N,error,seconds,bits") throw ValidationError("records.csv: missing header");
  std::vector<ConvergenceRecord> out;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw ValidationError("records.csv line " + std::to_string(lineno) + ": expected 4 fields");
    ConvergenceRecord r;
    try {
      r.degree = std::stol(f[0]);
      r.bits = std::stol(f[3]);
      r.seconds = std::stod(f[2]);
    } catch (const std::exception&) {
      throw ValidationError("records.csv line " + std::to_string(lineno) + ": malformed number");
    }
    if (f[1] != "failed") r.error = Real::parse(f[1], Precision(r.bits));
    out.push_back(std::move(r));
  }
  return out;
}

/// Two whitespace-separated columns N and log10 E; failed and zero-error rows are omitted.
inline void write_plot_data(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << "# N log10E\n";
  for (const ConvergenceRecord& r : records) {
    if (!r.error || r.error->is_zero()) continue;
    os << r.degree << ' ' << log10(*r.error).str(12) << '\n';
  }
}

/// First degree whose error is below 1e-2 of the error at the smallest degree.
inline std::optional<long> resolution_threshold(const std::vector<ConvergenceRecord>& records) {
  if (records.empty() || !records.front().error) return std::nullopt;
  const Real cut = *records.front().error / 100L;
  for (const ConvergenceRecord& r : records) {
    if (r.error && *r.error < cut) return r.degree;
  }
  return std::nullopt;
}

inline bool non_increasing_after(const std::vector<ConvergenceRecord>& records, long from) {
  const Real* prev = nullptr;
  for (const ConvergenceRecord& r : records) {
    if (r.degree < from) continue;
    if (!r.error) return false;
    if (prev && *r.error > *prev) return false;
    prev = &*r.error;
  }
  return true;
}

inline std::string short_real(const std::optional<Real>& r) { return r ? r->str(6) : std::string("-"); }

inline void write_summary(std::ostream& os, const ProblemSpec& spec, const std::vector<ConvergenceRecord>& records) {
  os << "problem: " << spec.name << "\n";
  os << "equations: " << spec.size() << ", grid q = " << spec.grid_q() << ", T = "
     << (spec.horizon_text.empty() ? spec.horizon(Precision(64)).str(12) : spec.horizon_text) << "\n";
  os << "orders:";
  for (const RationalOrder& o : spec.orders) os << ' ' << o.value().str();
  os << "\nreference: " << (spec.reference ? (spec.reference_label.empty() ? "supplied" : spec.reference_label) : "local series (4N terms)")
     << "\n\n";
  os << "N\tE(N)\tE[4(N+1) pts]\tseconds\tbits\tnote\n";
  for (const ConvergenceRecord& r : records) {
    std::string note = r.failure;
    if (r.error && r.error_fine) {
      const Real big = max(*r.error, *r.error_fine);
      // both at round-off level: nothing to resolve
      const bool noise = big.is_zero() || big.magnitude_log2() < 32 - r.bits;
      if (!noise && abs(*r.error - *r.error_fine) > big / 10L) note = "quadrature under-resolved (>10% discrepancy)";
    }
    os << r.degree << '\t' << short_real(r.error) << '\t' << short_real(r.error_fine) << '\t' << short_seconds(r.seconds) << '\t'
       << r.bits << '\t' << note << '\n';
  }
  const auto star = resolution_threshold(records);
  os << "\nresolution threshold N*: " << (star ? std::to_string(*star) : std::string("not reached")) << "\n";
  if (star) os << "non-increasing after N*: " << (non_increasing_after(records, *star) ? "yes" : "no") << "\n";
}

/// records.csv, plot.dat and summary.txt in `dir` (created if needed).
inline void emit_outputs(const std::filesystem::path& dir, const ProblemSpec& spec, const std::vector<ConvergenceRecord>& records) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw ValidationError(std::string("out: cannot write ") + (dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, records);
  }
  {
    auto f = open("plot.dat");
    write_plot_data(f, records);
  }
  auto f = open("summary.txt");
  write_summary(f, spec, records);
}

}  // namespace muntz
