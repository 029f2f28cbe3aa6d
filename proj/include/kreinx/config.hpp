#pragma once

// JSON problem configuration.
//
//   {
//     "backend": "matrix" | "laplacian1d" | "laplacian2d" | "laplacian3d" | "multiplier1d",
//     "matrix":  {"A": [[...]], "tau": [[...]]},          matrix backend only
//     "points":  [[x], [x, y], ...] (numbers allowed in 1D)  point backends
//     "symbol":  {"poly": [c0, c1, ...], "cos": [c1, ...]}  multiplier1d only
//     "anchor":  w0 (real, above the symbol range)          multiplier1d only
//     "grid":    {"x0": .., "h": .., "n": ..}               laplacian1d only, optional
//     "theta":   [[...]],
//     "scan":    {"a": .., "b": .., "grid": 512},           optional
//     "tolerances": {"linear": 1e-12, "root": 1e-10},      optional
//     "seed":    unsigned integer                           optional
//   }
//
// Complex matrix entries are numbers or [re, im] pairs. Parsing reports
// every violation at once: shape problems as SchemaError, broken invariants
// as InvariantError.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kreinx/errors.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/laplacian.hpp"
#include "kreinx/linalg.hpp"
#include "kreinx/matrix_oracle.hpp"
#include "kreinx/multiplier.hpp"

namespace kreinx {

struct ScanConfig {
  double a = 0.0;
  double b = 0.0;
  int grid = 512;
  bool operator==(const ScanConfig&) const = default;
};

struct SymbolConfig {
  std::vector<double> poly;
  std::vector<double> cos;
  bool operator==(const SymbolConfig&) const = default;
};

struct GridConfig {
  double x0 = 0.0;
  double h = 0.0;
  std::int64_t n = 0;
  bool operator==(const GridConfig&) const = default;
};

struct ProblemConfig {
  std::string backend;
  CMatrix a;    // matrix backend
  CMatrix tau;  // matrix backend
  std::vector<Point> points;
  std::optional<SymbolConfig> symbol;
  std::optional<double> anchor;
  std::optional<GridConfig> grid;
  CMatrix theta;
  std::optional<ScanConfig> scan;
  Tolerances tolerances;
  std::optional<std::uint64_t> seed;

  int dim() const {
    if (backend == "laplacian2d") return 2;
    if (backend == "laplacian3d") return 3;
    return 1;
  }
  bool is_point_backend() const { return backend != "matrix"; }
};

namespace detail {

inline bool same_matrix(const CMatrix& x, const CMatrix& y) {
  return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
}

}  // namespace detail

inline bool operator==(const ProblemConfig& x, const ProblemConfig& y) {
  return x.backend == y.backend && detail::same_matrix(x.a, y.a) && detail::same_matrix(x.tau, y.tau) &&
         x.points == y.points && x.symbol == y.symbol && x.anchor == y.anchor && x.grid == y.grid &&
         detail::same_matrix(x.theta, y.theta) && x.scan == y.scan &&
         x.tolerances.linear == y.tolerances.linear && x.tolerances.root == y.tolerances.root && x.seed == y.seed;
}

namespace detail {

using nlohmann::json;

class Violations {
 public:
  void schema(std::string msg) { schema_.push_back(std::move(msg)); }
  void invariant(std::string msg) { invariant_.push_back(std::move(msg)); }
  bool has_schema() const { return !schema_.empty(); }

  void throw_if_any() const {
    if (!schema_.empty()) throw Error(ErrorKind::SchemaError, join(schema_));
    if (!invariant_.empty()) throw Error(ErrorKind::InvariantError, join(invariant_));
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> schema_;
  std::vector<std::string> invariant_;
};

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed,
                       Violations& v) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) v.schema("unknown key '" + item.key() + "' in " + where);
  }
}

inline std::optional<double> read_number(const json& j, const std::string& where, Violations& v) {
  if (!j.is_number()) {
    v.schema(where + " must be a number");
    return std::nullopt;
  }
  return j.get<double>();
}

inline std::optional<Complex> read_complex(const json& j, const std::string& where, Violations& v) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  v.schema(where + " must be a number or an [re, im] pair");
  return std::nullopt;
}

inline std::optional<CMatrix> read_matrix(const json& j, const std::string& where, Violations& v) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    v.schema(where + " must be a non-empty array of non-empty rows");
    return std::nullopt;
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  bool ok = true;
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      v.schema(where + " row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
      ok = false;
      continue;
    }
    for (Index c = 0; c < cols; ++c) {
      auto e = read_complex(row[static_cast<std::size_t>(c)],
                            where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", v);
      if (e) m(r, c) = *e;
      else ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return m;
}

inline std::optional<std::vector<double>> read_reals(const json& j, const std::string& where, Violations& v) {
  if (!j.is_array()) {
    v.schema(where + " must be an array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) {
      v.schema(where + " must contain only numbers");
      return std::nullopt;
    }
    out.push_back(e.get<double>());
  }
  return out;
}

inline json complex_to_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

inline json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

inline void check_invariants(const ProblemConfig& cfg, Violations& v) {
  Index charge_dim = 0;
  std::optional<MatrixModel> model;
  std::optional<Multiplier1D> symbol;
  if (cfg.backend == "matrix") {
    try {
      model.emplace(cfg.a, cfg.tau);
      charge_dim = model->charge_dim();
    } catch (const Error& e) {
      v.invariant(std::string("matrix: ") + e.what());
    }
  } else {
    charge_dim = static_cast<Index>(cfg.points.size());
    try {
      PointSet(cfg.dim(), cfg.points);
    } catch (const Error& e) {
      v.invariant(std::string("points: ") + e.what());
    }
  }
  if (cfg.backend == "multiplier1d" && cfg.symbol) {
    try {
      symbol.emplace(cfg.symbol->poly, cfg.symbol->cos);
      if (!cfg.anchor) v.invariant("multiplier1d needs an anchor");
      else if (!(*cfg.anchor > symbol->sup_bound()))
        v.invariant("anchor must exceed the symbol bound " + std::to_string(symbol->sup_bound()));
    } catch (const Error& e) {
      v.invariant(std::string("symbol: ") + e.what());
    }
  }
  if (cfg.grid && (cfg.grid->n < 2 || !(cfg.grid->h > 0.0)))
    v.invariant("grid needs n >= 2 and h > 0");

  if (cfg.theta.rows() != cfg.theta.cols()) {
    v.invariant("theta must be square");
  } else {
    if (!is_exactly_hermitian(cfg.theta)) v.invariant("theta is not hermitian (must equal its conjugate transpose)");
    if (charge_dim > 0 && cfg.theta.rows() != charge_dim)
      v.invariant("theta is " + std::to_string(cfg.theta.rows()) + "x" + std::to_string(cfg.theta.rows()) +
                  " but the trace has " + std::to_string(charge_dim) + " rows");
  }

  if (!(cfg.tolerances.linear > 0.0) || !(cfg.tolerances.root > 0.0)) v.invariant("tolerances must be positive");

  if (cfg.scan) {
    const ScanConfig& s = *cfg.scan;
    if (!(s.a < s.b)) v.invariant("scan needs a < b");
    if (s.grid < 1) v.invariant("scan grid must be positive");
    if (cfg.backend.rfind("laplacian", 0) == 0 && !(s.a > 0.0))
      v.invariant("scan interval intersects (-inf, 0], the spectrum of the Laplacian");
    if (model && s.a < s.b && !MatrixEvaluator(*model).real_interval_in_resolvent_set(s.a, s.b))
      v.invariant("scan interval contains an eigenvalue of A");
    if (symbol && !(s.a > symbol->sup_bound()))
      v.invariant("scan interval meets the range of the symbol (a must exceed " +
                  std::to_string(symbol->sup_bound()) + ")");
  }
}

}  // namespace detail

inline ProblemConfig parse_config(const std::string& text) {
  using detail::json;
  detail::Violations v;
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw Error(ErrorKind::SchemaError, "config is not valid JSON");
  if (!root.is_object()) throw Error(ErrorKind::SchemaError, "config must be a JSON object");
  detail::check_keys(root, "config",
                     {"backend", "matrix", "points", "symbol", "anchor", "grid", "theta", "scan", "tolerances", "seed"},
                     v);

  ProblemConfig cfg;
  if (!root.contains("backend") || !root["backend"].is_string()) {
    v.schema("backend must be a string");
  } else {
    cfg.backend = root["backend"].get<std::string>();
    if (cfg.backend != "matrix" && cfg.backend != "laplacian1d" && cfg.backend != "laplacian2d" &&
        cfg.backend != "laplacian3d" && cfg.backend != "multiplier1d")
      v.schema("unknown backend '" + cfg.backend + "'");
  }

  auto forbid = [&](const char* key, bool allowed) {
    if (root.contains(key) && !allowed) v.schema("key '" + std::string(key) + "' is not valid for backend " + cfg.backend);
  };
  const bool is_matrix = cfg.backend == "matrix";
  forbid("matrix", is_matrix);
  forbid("points", !is_matrix);
  forbid("symbol", cfg.backend == "multiplier1d");
  forbid("anchor", cfg.backend == "multiplier1d");
  forbid("grid", cfg.backend == "laplacian1d");

  if (is_matrix) {
    if (!root.contains("matrix") || !root["matrix"].is_object()) {
      v.schema("matrix backend needs a 'matrix' object with A and tau");
    } else {
      const json& m = root["matrix"];
      detail::check_keys(m, "matrix", {"A", "tau"}, v);
      if (!m.contains("A") || !m.contains("tau")) v.schema("matrix needs both A and tau");
      else {
        if (auto a = detail::read_matrix(m["A"], "matrix.A", v)) cfg.a = *a;
        if (auto t = detail::read_matrix(m["tau"], "matrix.tau", v)) cfg.tau = *t;
      }
    }
  } else if (!cfg.backend.empty()) {
    if (!root.contains("points") || !root["points"].is_array() || root["points"].empty()) {
      v.schema("points must be a non-empty array");
    } else {
      const int dim = cfg.dim();
      std::size_t idx = 0;
      for (const auto& p : root["points"]) {
        const std::string where = "points[" + std::to_string(idx++) + "]";
        Point pt{0.0, 0.0, 0.0};
        if (dim == 1 && p.is_number()) {
          pt[0] = p.get<double>();
        } else if (p.is_array() && static_cast<int>(p.size()) == dim) {
          for (int c = 0; c < dim; ++c)
            if (auto x = detail::read_number(p[static_cast<std::size_t>(c)], where, v)) pt[c] = *x;
        } else {
          v.schema(where + " must have " + std::to_string(dim) + " coordinates");
        }
        cfg.points.push_back(pt);
      }
    }
  }

  if (cfg.backend == "multiplier1d") {
    if (!root.contains("symbol") || !root["symbol"].is_object()) {
      v.schema("multiplier1d needs a 'symbol' object");
    } else {
      const json& s = root["symbol"];
      detail::check_keys(s, "symbol", {"poly", "cos"}, v);
      SymbolConfig sym;
      if (!s.contains("poly")) v.schema("symbol needs poly");
      else if (auto p = detail::read_reals(s["poly"], "symbol.poly", v)) sym.poly = *p;
      if (s.contains("cos"))
        if (auto c = detail::read_reals(s["cos"], "symbol.cos", v)) sym.cos = *c;
      cfg.symbol = sym;
    }
    if (!root.contains("anchor")) v.schema("multiplier1d needs an anchor");
    else if (auto w = detail::read_number(root["anchor"], "anchor", v)) cfg.anchor = *w;
  }

  if (root.contains("grid") && cfg.backend == "laplacian1d") {
    const json& g = root["grid"];
    if (!g.is_object()) {
      v.schema("grid must be an object");
    } else {
      detail::check_keys(g, "grid", {"x0", "h", "n"}, v);
      GridConfig gc;
      if (!g.contains("x0") || !g.contains("h") || !g.contains("n")) v.schema("grid needs x0, h and n");
      else {
        if (auto x = detail::read_number(g["x0"], "grid.x0", v)) gc.x0 = *x;
        if (auto h = detail::read_number(g["h"], "grid.h", v)) gc.h = *h;
        if (!g["n"].is_number_integer()) v.schema("grid.n must be an integer");
        else gc.n = g["n"].get<std::int64_t>();
      }
      cfg.grid = gc;
    }
  }

  if (!root.contains("theta")) v.schema("theta is required");
  else if (auto t = detail::read_matrix(root["theta"], "theta", v)) cfg.theta = *t;

  if (root.contains("scan")) {
    const json& s = root["scan"];
    if (!s.is_object()) {
      v.schema("scan must be an object");
    } else {
      detail::check_keys(s, "scan", {"a", "b", "grid"}, v);
      ScanConfig sc;
      if (!s.contains("a") || !s.contains("b")) v.schema("scan needs a and b");
      else {
        if (auto a = detail::read_number(s["a"], "scan.a", v)) sc.a = *a;
        if (auto b = detail::read_number(s["b"], "scan.b", v)) sc.b = *b;
      }
      if (s.contains("grid")) {
        if (!s["grid"].is_number_integer()) v.schema("scan.grid must be an integer");
        else sc.grid = s["grid"].get<int>();
      }
      cfg.scan = sc;
    }
  }

  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) {
      v.schema("tolerances must be an object");
    } else {
      detail::check_keys(t, "tolerances", {"linear", "root"}, v);
      if (t.contains("linear"))
        if (auto x = detail::read_number(t["linear"], "tolerances.linear", v)) cfg.tolerances.linear = *x;
      if (t.contains("root"))
        if (auto x = detail::read_number(t["root"], "tolerances.root", v)) cfg.tolerances.root = *x;
    }
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) v.schema("seed must be a non-negative integer");
    else cfg.seed = root["seed"].get<std::uint64_t>();
  }

  // Invariants are only meaningful once the shape is right.
  if (!v.has_schema()) detail::check_invariants(cfg, v);
  v.throw_if_any();
  return cfg;
}

inline std::string serialize_config(const ProblemConfig& cfg) {
  using detail::json;
  json root;
  root["backend"] = cfg.backend;
  if (cfg.backend == "matrix") {
    root["matrix"] = {{"A", detail::matrix_to_json(cfg.a)}, {"tau", detail::matrix_to_json(cfg.tau)}};
  } else {
    json pts = json::array();
    for (const Point& p : cfg.points) {
      json row = json::array();
      for (int c = 0; c < cfg.dim(); ++c) row.push_back(p[c]);
      pts.push_back(row);
    }
    root["points"] = pts;
  }
  if (cfg.symbol) root["symbol"] = {{"poly", cfg.symbol->poly}, {"cos", cfg.symbol->cos}};
  if (cfg.anchor) root["anchor"] = *cfg.anchor;
  if (cfg.grid) root["grid"] = {{"x0", cfg.grid->x0}, {"h", cfg.grid->h}, {"n", cfg.grid->n}};
  root["theta"] = detail::matrix_to_json(cfg.theta);
  if (cfg.scan) root["scan"] = {{"a", cfg.scan->a}, {"b", cfg.scan->b}, {"grid", cfg.scan->grid}};
  root["tolerances"] = {{"linear", cfg.tolerances.linear}, {"root", cfg.tolerances.root}};
  if (cfg.seed) root["seed"] = *cfg.seed;
  return root.dump(2) + "\n";
}

inline std::shared_ptr<const GammaEvaluator> build_evaluator(const ProblemConfig& cfg) {
  if (cfg.backend == "matrix") return std::make_shared<MatrixEvaluator>(MatrixModel(cfg.a, cfg.tau));
  PointSet ps(cfg.dim(), cfg.points);
  if (cfg.backend == "multiplier1d")
    return std::make_shared<MultiplierEvaluator>(Multiplier1D(cfg.symbol->poly, cfg.symbol->cos), std::move(ps),
                                                 *cfg.anchor);
  std::optional<Grid1D> grid;
  if (cfg.grid) grid = Grid1D{cfg.grid->x0, cfg.grid->h, static_cast<Index>(cfg.grid->n)};
  return std::make_shared<LaplacianEvaluator>(std::move(ps), grid);
}

inline ExtensionProblem build_problem(const ProblemConfig& cfg) {
  return ExtensionProblem(build_evaluator(cfg), ThetaMatrix(cfg.theta), cfg.tolerances);
}

}  // namespace kreinx
