#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "muntz/problem.hpp"

namespace muntz {

namespace detail {

using Json = nlohmann::json;

inline std::string line_col(const std::string& text, std::size_t byte) {
  long line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const Json& field(const Json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ValidationError(std::string(name) + ": missing field");
  return *it;
}

inline const std::string& string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path + ": expected a string");
  return j.get_ref<const std::string&>();
}

inline const Json& array_at(const Json& j, const std::string& path, std::size_t size) {
  if (!j.is_array()) throw ValidationError(path + ": expected an array");
  if (j.size() != size) throw ValidationError(path + ": expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  return j;
}

/// "p", "p/q" or a decimal literal, exact at every precision it is requested in.
inline RealFn parse_real_text(const std::string& text, const std::string& path) {
  if (text.empty()) throw ValidationError(path + ": empty number");
  if (text.find('/') != std::string::npos) {
    Rational r;
    try {
      r = Rational::parse(text);
    } catch (const Error& e) {
      throw ValidationError(path + ": " + e.what());
    }
    return [r](Precision p) { return Real(r, p); };
  }
  try {
    (void)Real::parse(text, Precision(64));
  } catch (const Error&) {
    throw ValidationError(path + ": malformed number '" + text + "'");
  }
  return [text](Precision p) { return Real::parse(text, p); };
}

/// "a", "bi", "a+bi", "a-bi" with rational or decimal parts.
inline ScalarFn parse_complex_text(std::string text, const std::string& path) {
  std::erase_if(text, [](char c) { return c == ' ' || c == '\t'; });
  if (text.empty()) throw ValidationError(path + ": empty complex value");
  if (text.back() != 'i') {
    const RealFn re = parse_real_text(text, path);
    return [re](Precision p) { return Complex(re(p)); };
  }
  text.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = text.size(); k-- > 1;) {
    if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_text = split == std::string::npos ? "0" : text.substr(0, split);
  std::string im_text = split == std::string::npos ? text : text.substr(split);
  if (im_text.empty() || im_text == "+" || im_text == "-") im_text += "1";
  if (im_text.front() == '+') im_text.erase(0, 1);
  const RealFn re = parse_real_text(re_text, path), im = parse_real_text(im_text, path);
  return [re, im](Precision p) { return Complex(re(p), im(p)); };
}

inline CoefficientFunction parse_coefficient(const Json& j, const std::string& path) {
  const std::string& src = string_at(j, path);
  try {
    return CoefficientFunction::parse(src);
  } catch (const ParseError& e) {
    throw ValidationError(path + ": " + e.what() + " in '" + src + "'");
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline std::string index_path(const char* name, std::size_t i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

}  // namespace detail

/// ProblemSpec from the JSON problem format. Errors name the offending field; JSON syntax
/// errors carry the line and column.
inline ProblemSpec parse_problem(const std::string& text, std::string name = "problem") {
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("problem file: invalid JSON at " + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw ValidationError("problem file: top level must be an object");

  const Json& jn = detail::field(doc, "n");
  if (!jn.is_number_integer() || jn.get<long>() < 1) throw ValidationError("n: expected a positive integer");
  const std::size_t n = jn.get<std::size_t>();

  ProblemSpec spec;
  spec.name = std::move(name);
  const Json& orders = detail::array_at(detail::field(doc, "orders"), "orders", n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::string path = detail::index_path("orders", j);
    Rational theta;
    try {
      theta = Rational::parse(detail::string_at(orders[j], path));
      spec.orders.emplace_back(theta);
    } catch (const Error& e) {
      throw ValidationError(path + ": " + e.what());
    }
  }

  const Json& jt = detail::field(doc, "T");
  const std::string t_text = jt.is_string() ? jt.get<std::string>() : (jt.is_number() ? jt.dump() : std::string());
  if (t_text.empty()) throw ValidationError("T: expected a decimal or rational string");
  spec.horizon = detail::parse_real_text(t_text, "T");
  spec.horizon_text = t_text;

  const Json& couplings = detail::array_at(detail::field(doc, "couplings"), "couplings", n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::string row_path = detail::index_path("couplings", j);
    const Json& row = detail::array_at(couplings[j], row_path, n);
    std::vector<CoefficientFunction> cs;
    for (std::size_t r = 0; r < n; ++r) cs.push_back(detail::parse_coefficient(row[r], row_path + "[" + std::to_string(r) + "]"));
    spec.couplings.push_back(std::move(cs));
  }

  const bool has_forcings = doc.contains("forcings"), has_manufactured = doc.contains("manufactured");
  if (has_forcings == has_manufactured) throw ValidationError("forcings: exactly one of 'forcings' and 'manufactured' is required");
  if (has_forcings) {
    const Json& f = detail::array_at(doc["forcings"], "forcings", n);
    for (std::size_t j = 0; j < n; ++j) spec.forcings.push_back(detail::parse_coefficient(f[j], detail::index_path("forcings", j)));
  } else {
    const Json& m = doc["manufactured"];
    if (!m.is_object()) throw ValidationError("manufactured: expected an object");
    const Json& ex = detail::array_at(detail::field(m, "exact"), "manufactured.exact", n);
    for (std::size_t j = 0; j < n; ++j) spec.exact.push_back(detail::parse_coefficient(ex[j], detail::index_path("manufactured.exact", j)));
  }

  const Json& init = detail::array_at(detail::field(doc, "initial"), "initial", n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::string row_path = detail::index_path("initial", j);
    const Json& row = detail::array_at(init[j], row_path, static_cast<std::size_t>(spec.orders[j].ceil()));
    std::vector<ScalarFn> vals;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::string path = row_path + "[" + std::to_string(k) + "]";
      const std::string v = row[k].is_string() ? row[k].get<std::string>() : (row[k].is_number() ? row[k].dump() : std::string());
      if (v.empty()) throw ValidationError(path + ": expected a complex string");
      vals.push_back(detail::parse_complex_text(v, path));
    }
    spec.initial.push_back(std::move(vals));
  }

  if (!spec.exact.empty()) resolve_manufactured(spec);
  spec.validate();
  return spec;
}

inline ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("problem file: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_problem(ss.str(), path.stem().string());
}

}  // namespace muntz
