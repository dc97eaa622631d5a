#ifndef SPLINELAB_EXPERIMENT_HPP
#define SPLINELAB_EXPERIMENT_HPP

// Config-driven experiment cells and their reports.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinelab/perturb.hpp"

namespace splinelab::experiment {

using nlohmann::json;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"gram_bound", "demko",         "cheb_compare",
                                              "proj_norm",  "perturb_check", "theorem_pipeline"};
  return names;
}

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"classical", "weighted", "chebyshev"};
  return names;
}

/// Numeric report columns, in CSV order.
inline const std::vector<std::string>& numeric_columns() {
  static const std::vector<std::string> cols{
      "mesh_lebesgue", "mesh_mu",     "g_norm",      "g_inv_norm", "gp_norm",  "gp_inv_norm", "demko_c",
      "demko_q",       "demko_violation", "x_norm",  "contraction", "op_norm", "theta_proxy", "band_c",
      "norm_c",        "sup_diff",    "bound_ratio", "diff_sup",   "d_in_u_max"};
  return cols;
}

inline std::vector<std::string> csv_columns() {
  std::vector<std::string> c{"cell_index", "experiment", "order", "family", "partition", "n_atoms", "seed",
                             "config_hash"};
  for (const auto& n : numeric_columns()) c.push_back(n);
  c.insert(c.end(), {"hard_ok", "warnings", "time_ms"});
  return c;
}

/// Ten test functions with sup norm 1 on [0,1].
inline std::vector<AnalyticFunction> default_test_functions() {
  auto sine = [](double freq, double phase, double offset = 0.0, double amp = 1.0) {
    return AnalyticFunction("sine", {{"freq", freq}, {"phase", phase}, {"offset", offset}, {"amplitude", amp}});
  };
  return {sine(3, 0.0),
          sine(7, 0.3),
          sine(13, 1.1),
          sine(5, 1.0),
          sine(11, 0.0, 0.5, 0.5),
          AnalyticFunction("sign", {{"at", 0.37}}),
          AnalyticFunction("step", {{"left", -1.0}, {"right", 1.0}, {"at", 0.61}}),
          AnalyticFunction("monomial", {{"degree", 3.0}}),
          AnalyticFunction("linear", {{"intercept", -1.0}, {"slope", 2.0}}),
          AnalyticFunction("exponential", {{"scale", std::exp(-1.0)}, {"rate", 1.0}})};
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const json& cell) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(cell.dump())));
  return buf;
}

/// Shortest-roundtrip-safe text for a double; empty for NaN (not applicable).
inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Row {
  std::size_t cell_index = 0;
  std::string experiment;
  int order = 0;
  std::string family;
  std::string partition_desc;
  std::size_t n_atoms = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, double> values;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
  double time_ms = 0.0;
  json config;
  json detail = json::object();

  bool hard_ok() const { return failures.empty(); }
  double value(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }

  std::vector<std::string> csv_fields() const {
    std::vector<std::string> f{std::to_string(cell_index), experiment, std::to_string(order), family,
                               partition_desc, std::to_string(n_atoms), std::to_string(seed), config_hash};
    for (const auto& c : numeric_columns()) f.push_back(format_number(value(c)));
    std::string w;
    for (const auto& s : warnings) w += (w.empty() ? "" : ";") + s;
    for (const auto& s : failures) w += (w.empty() ? "" : ";") + ("FAIL:" + s);
    f.push_back(hard_ok() ? "1" : "0");
    f.push_back(w);
    f.push_back(format_number(time_ms));
    return f;
  }

  json to_json() const {
    json j;
    j["cell_index"] = cell_index;
    j["experiment"] = experiment;
    j["order"] = order;
    j["family"] = family;
    j["partition"] = partition_desc;
    j["n_atoms"] = n_atoms;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    for (const auto& c : numeric_columns()) {
      const double v = value(c);
      if (std::isnan(v)) j[c] = nullptr;
      else j[c] = v;
    }
    j["hard_ok"] = hard_ok();
    j["warnings"] = warnings;
    j["failures"] = failures;
    j["time_ms"] = time_ms;
    j["config"] = config;
    j["detail"] = detail;
    return j;
  }
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class HashMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<json> as_list(const json& v) {
  if (v.is_array()) return std::vector<json>(v.begin(), v.end());
  return {v};
}

inline void require_known(const std::string& what, const std::string& name, const std::vector<std::string>& known) {
  if (std::find(known.begin(), known.end(), name) == known.end())
    throw ConfigError("unknown " + what + " '" + name + "'");
}

inline std::uint64_t cell_seed(const json& cell) {
  const auto& p = cell.at("partition");
  return p.contains("seed") ? p.at("seed").get<std::uint64_t>() : 0;
}

inline IntervalPartition build_partition(const json& p) {
  const auto kind = p.at("kind").get<std::string>();
  if (kind == "uniform") return uniform_partition(p.at("n").get<std::size_t>());
  if (kind == "random")
    return random_partition(p.at("n").get<std::size_t>(), p.at("seed").get<std::uint64_t>(),
                            p.at("grading").get<double>());
  if (kind == "explicit") return IntervalPartition(p.at("breakpoints").get<std::vector<double>>());
  throw ConfigError("unknown partition kind '" + kind + "'");
}

inline std::string describe_partition(const json& p) {
  const auto kind = p.at("kind").get<std::string>();
  std::ostringstream s;
  if (kind == "uniform") s << "uniform(n=" << p.at("n").get<std::size_t>() << ")";
  else if (kind == "random")
    s << "random(n=" << p.at("n").get<std::size_t>() << " seed=" << p.at("seed").get<std::uint64_t>()
      << " grading=" << format_number(p.at("grading").get<double>()) << ")";
  else s << "explicit(" << p.at("breakpoints").size() - 1 << " atoms)";
  return s.str();
}

/// Concrete partitions of one partition spec.
inline std::vector<json> expand_partition(const json& spec, std::optional<std::uint64_t> seed_override) {
  const auto kind = spec.value("kind", std::string("uniform"));
  std::vector<json> out;
  if (kind == "explicit") {
    out.push_back({{"kind", "explicit"}, {"breakpoints", spec.at("breakpoints")}});
    return out;
  }
  if (kind != "uniform" && kind != "random" && kind != "sweep")
    throw ConfigError("unknown partition kind '" + kind + "'");
  if (!spec.contains("n")) throw ConfigError("partition spec needs 'n'");
  for (const auto& nv : as_list(spec.at("n"))) {
    const auto n = nv.get<std::size_t>();
    if (n == 0) throw ConfigError("partition size must be positive");
    if (kind != "random") {
      out.push_back({{"kind", "uniform"}, {"n", n}});
      continue;
    }
    if (!spec.contains("seed") && !seed_override) throw ConfigError("random partition spec needs 'seed'");
    const std::uint64_t base = seed_override ? *seed_override : spec.at("seed").get<std::uint64_t>();
    const std::size_t instances = spec.value("instances", std::size_t{1});
    // grading: a number, or [lo, hi] spread log-uniformly over the instances
    double lo = 1.0, hi = 1.0;
    if (spec.contains("grading")) {
      const auto& g = spec.at("grading");
      if (g.is_array()) {
        lo = g.at(0).get<double>();
        hi = g.at(1).get<double>();
      } else {
        lo = hi = g.get<double>();
      }
    }
    if (!(lo >= 1.0 && hi >= lo)) throw ConfigError("grading must satisfy 1 <= lo <= hi");
    for (std::size_t s = 0; s < instances; ++s) {
      const double t = instances > 1 ? static_cast<double>(s) / static_cast<double>(instances - 1) : 0.0;
      const double grading = lo * std::pow(hi / lo, t);
      out.push_back({{"kind", "random"}, {"n", n}, {"seed", base + s}, {"grading", grading}});
    }
  }
  return out;
}

} // namespace detail

/// Expands a config into self-contained cell configs, validating registry names.
inline std::vector<json> expand_cells(const json& config, std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("experiment")) throw ConfigError("config needs 'experiment'");
  const auto experiment = config.at("experiment").get<std::string>();
  detail::require_known("experiment", experiment, experiment_names());
  const auto family = config.value("family", experiment == "cheb_compare" ? std::string("chebyshev")
                                                                          : std::string("classical"));
  detail::require_known("family", family, family_names());

  std::vector<json> orders;
  if (config.contains("orders")) orders = detail::as_list(config.at("orders"));
  else orders = detail::as_list(config.value("order", json(2)));

  const json measure = config.value("measure", json{{"kind", "lebesgue"}});
  const json weights = config.value("weights", json{{"name", "constant"}, {"params", {{"value", 1.0}}}});
  json sampling = {{"samples_per_atom", 8}, {"grid_per_atom", 16}};
  if (config.contains("sampling")) sampling.update(config.at("sampling"));
  if (sampling.at("samples_per_atom").get<int>() < 4) throw ConfigError("samples_per_atom must be >= 4");

  try {
    const auto mu = Measure::from_json(measure);
    if (!(mu.bound() < INFINITY)) throw ConfigError("density must be bounded away from zero");
    if (family == "weighted" && mu.is_lebesgue())
      throw ConfigError("the weighted family needs a density measure");
    if (config.contains("test_functions"))
      for (const auto& f : config.at("test_functions")) AnalyticFunction::from_json(f);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  std::vector<json> parts;
  for (const auto& p : detail::as_list(config.value("partition", json{{"kind", "uniform"}, {"n", 8}})))
    for (auto& c : detail::expand_partition(p, seed_override)) parts.push_back(std::move(c));

  std::vector<json> cells;
  for (const auto& kv : orders) {
    const int k = kv.get<int>();
    if (k < 1) throw ConfigError("order must be >= 1");
    const bool uses_weights = family == "chebyshev" || experiment == "cheb_compare";
    if (uses_weights) {
      try {
        WeightSystem::from_json(weights, k);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    for (const auto& p : parts) {
      json cell{{"experiment", experiment}, {"order", k},       {"family", family},
                {"partition", p},           {"measure", measure}, {"sampling", sampling}};
      if (uses_weights) cell["weights"] = weights;
      if (config.contains("refine_eps")) cell["refine_eps"] = config.at("refine_eps");
      if (config.contains("test_functions")) cell["test_functions"] = config.at("test_functions");
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

namespace detail {

struct Context {
  int k;
  IntervalPartition partition;
  Measure mu;
  KnotSequence knots;
  SplineBasis classical;
  std::optional<WeightSystem> weights;
  std::string family;
  int samples_per_atom;
  int grid_per_atom;
};

inline SplineBasis family_basis(const Context& c) {
  if (c.family == "weighted") return weighted_perturbed_basis(c.classical, c.mu);
  if (c.family == "chebyshev") return build_chebyshev_basis(c.knots, *c.weights);
  return c.classical;
}

inline std::vector<AnalyticFunction> test_functions(const json& cell) {
  if (!cell.contains("test_functions")) return default_test_functions();
  std::vector<AnalyticFunction> out;
  for (const auto& f : cell.at("test_functions")) out.push_back(AnalyticFunction::from_json(f));
  return out;
}

/// Idempotence and biorthogonality checks shared by the projector experiments.
inline void projector_invariants(const Projector& p, const json& cell, Row& row) {
  if (p.gram_inverse_residual() > 1e-10) row.failures.push_back("gram_inverse_residual");
  if (p.b_asymmetry() > 1e-8) row.failures.push_back("b_asymmetry");
  const auto d = dual_basis(p);
  row.detail["biorthogonality_error"] = d.biorthogonality_error;
  if (d.biorthogonality_error > 1e-8) row.failures.push_back("biorthogonality");
  const auto f = test_functions(cell).front();
  const auto once = p.project(piecewise(f));
  const auto twice = p.project(once.as_function());
  double e = 0.0;
  for (std::size_t i = 0; i < once.coefficients.size(); ++i)
    e = std::max(e, std::abs(once.coefficients[i] - twice.coefficients[i]));
  row.detail["idempotence_error"] = e;
  if (e > 1e-8) row.failures.push_back("idempotence");
}

inline void gram_columns(const Context& c, Row& row, bool with_family) {
  const auto g = gram_matrix(c.classical, c.classical, Measure::lebesgue());
  const auto inv = invert(g);
  row.values["g_norm"] = inf_norm(g);
  row.values["g_inv_norm"] = inv.inf_norm;
  if (inv.residual > 1e-10) row.failures.push_back("gram_inverse_residual");
  double rs = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    auto [lo, hi] = g.row_range(i);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += g(i, j);
    rs = std::max(rs, std::abs(s - 1.0));
  }
  row.detail["row_sum_error"] = rs;
  if (rs > 1e-10) row.failures.push_back("gram_row_sums");
  if (with_family) {
    const auto fb = family_basis(c).renormalized(c.mu);
    const auto gp = gram_matrix(fb, fb, c.mu);
    const auto pinv = invert(gp);
    row.values["gp_norm"] = inf_norm(gp);
    row.values["gp_inv_norm"] = pinv.inf_norm;
    if (pinv.residual > 1e-10) row.failures.push_back("gp_inverse_residual");
  }
}

inline void demko_columns(const DenseMatrix& inverse, Row& row) {
  const auto fit = demko_fit(inverse);
  row.values["demko_c"] = fit.c;
  row.values["demko_q"] = fit.q;
  row.values["demko_violation"] = fit.max_violation;
  if (!fit.ok) row.warnings.push_back("demko_q_not_below_1");
  if (fit.max_violation > 1e-12) row.warnings.push_back("demko_envelope_violation");
}

} // namespace detail

/// Runs one cell. Time is recorded but excluded from everything replayed.
inline Row run_cell(const json& cell, std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  Row row;
  row.cell_index = index;
  row.config = cell;
  row.config_hash = config_hash(cell);
  row.experiment = cell.at("experiment").get<std::string>();
  row.order = cell.at("order").get<int>();
  row.family = cell.at("family").get<std::string>();
  row.partition_desc = detail::describe_partition(cell.at("partition"));
  row.seed = detail::cell_seed(cell);

  auto partition = detail::build_partition(cell.at("partition"));
  auto mu = Measure::from_json(cell.at("measure"));
  auto knots = knot_sequence(partition, row.order);
  std::optional<WeightSystem> ws;
  if (cell.contains("weights")) ws = WeightSystem::from_json(cell.at("weights"), row.order);
  const auto& sampling = cell.at("sampling");
  detail::Context c{row.order,
                    partition,
                    mu,
                    knots,
                    build_classical_basis(knots),
                    ws,
                    row.family,
                    sampling.at("samples_per_atom").get<int>(),
                    sampling.at("grid_per_atom").get<int>()};
  row.n_atoms = partition.atom_count();
  row.values["mesh_lebesgue"] = mesh_norm(partition, Measure::lebesgue());
  row.values["mesh_mu"] = mesh_norm(partition, mu);
  const bool nontrivial = row.family != "classical" || !mu.is_lebesgue();

  if (row.experiment == "gram_bound") {
    detail::gram_columns(c, row, nontrivial);
  } else if (row.experiment == "demko") {
    detail::gram_columns(c, row, nontrivial);
    if (nontrivial) {
      const auto fb = detail::family_basis(c).renormalized(mu);
      detail::demko_columns(invert(gram_matrix(fb, fb, mu)).inverse, row);
    } else {
      detail::demko_columns(invert(gram_matrix(c.classical, c.classical, mu)).inverse, row);
    }
  } else if (row.experiment == "cheb_compare") {
    const auto cheb = build_chebyshev_basis(knots, *ws);
    const auto grid = atom_grid(knots, c.grid_per_atom);
    const auto rows = compare_to_classical(cheb, c.classical, *ws, grid);
    double sup = 0.0, ratio = std::numeric_limits<double>::quiet_NaN();
    json per_sup = json::array(), per_ratio = json::array();
    for (const auto& r : rows) {
      sup = std::max(sup, r.sup_diff);
      if (!std::isnan(r.bound_ratio)) ratio = std::isnan(ratio) ? r.bound_ratio : std::max(ratio, r.bound_ratio);
      per_sup.push_back(r.sup_diff);
      per_ratio.push_back(std::isnan(r.bound_ratio) ? json(nullptr) : json(r.bound_ratio));
    }
    row.values["sup_diff"] = sup;
    row.values["bound_ratio"] = ratio;
    row.detail["sup_diff"] = per_sup;
    row.detail["bound_ratio"] = per_ratio;
    double lowest = 0.0;
    for (double x : grid)
      for (const auto& v : cheb.evaluate_all(x)) lowest = std::min(lowest, v.m * cheb.support_length(v.index));
    row.detail["min_scaled_value"] = lowest;
    if (lowest < -1e-10) row.failures.push_back("positivity");
  } else if (row.experiment == "proj_norm") {
    const Projector p(detail::family_basis(c), mu);
    row.values["gp_norm"] = inf_norm(p.gram());
    row.values["gp_inv_norm"] = p.gram_inverse_norm();
    row.values["op_norm"] = p.operator_inf_norm(c.samples_per_atom);
    detail::projector_invariants(p, cell, row);
  } else if (row.experiment == "perturb_check") {
    const auto fb = detail::family_basis(c);
    const auto rep = check_conditions(c.classical, fb, mu, c.samples_per_atom);
    row.values["theta_proxy"] = rep.theta_proxy;
    row.values["band_c"] = static_cast<double>(rep.band_c);
    row.values["norm_c"] = rep.norm_c;
    if (rep.band_c != static_cast<std::size_t>(std::min<std::size_t>(row.order, fb.count())))
      row.warnings.push_back("band_c_differs_from_order");
  } else if (row.experiment == "theorem_pipeline") {
    const auto fb = detail::family_basis(c);
    const Projector p(fb, mu);
    const auto g = gram_matrix(c.classical, c.classical, Measure::lebesgue());
    const auto nr = neumann_check(g, p.gram());
    row.values["g_norm"] = inf_norm(g);
    row.values["g_inv_norm"] = nr.g_inv_norm;
    row.values["gp_norm"] = inf_norm(p.gram());
    row.values["gp_inv_norm"] = nr.gp_inv_norm;
    row.values["x_norm"] = nr.x_norm;
    row.values["contraction"] = nr.contraction ? 1.0 : 0.0;
    if (!nr.contraction) row.warnings.push_back("no_contraction");
    if (!nr.inverse_bound) row.failures.push_back("neumann_inverse_bound");
    detail::demko_columns(p.gram_inverse(), row);
    row.values["op_norm"] = p.operator_inf_norm(c.samples_per_atom);
    const auto rep = check_conditions(c.classical, fb, mu, c.samples_per_atom);
    row.values["theta_proxy"] = rep.theta_proxy;
    row.values["band_c"] = static_cast<double>(rep.band_c);
    row.values["norm_c"] = rep.norm_c;
    detail::projector_invariants(p, cell, row);
    if (cell.contains("refine_eps")) {
      const auto fine = refine_to_mesh(partition, mu, cell.at("refine_eps").get<double>());
      const auto fk = knot_sequence(fine, row.order);
      const SplineBasis ff = row.family == "weighted"  ? weighted_perturbed_basis(build_classical_basis(fk), mu)
                             : row.family == "chebyshev" ? build_chebyshev_basis(fk, *ws)
                                                         : build_classical_basis(fk);
      const Projector pf(ff, mu);
      double sup = 0.0, dmax = 0.0;
      for (const auto& f : detail::test_functions(cell)) {
        const auto d = projector_difference(pf, p, piecewise(f), c.samples_per_atom);
        sup = std::max(sup, d.sup_diff);
        dmax = std::max(dmax, d.max_d_in_u);
      }
      row.values["diff_sup"] = sup;
      row.values["d_in_u_max"] = dmax;
      row.detail["fine_atoms"] = fine.atom_count();
      if (dmax > 1e-8) row.failures.push_back("d_in_u_nonzero");
    }
  }
  row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

struct Report {
  std::string name;
  json config;
  std::vector<Row> rows;

  bool hard_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.hard_ok(); });
  }
  bool has_warnings() const {
    return std::any_of(rows.begin(), rows.end(), [](const Row& r) { return !r.warnings.empty(); });
  }

  std::string csv() const {
    std::ostringstream out;
    const auto cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
      const auto f = r.csv_fields();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const bool quote = f[i].find_first_of(",\"") != std::string::npos;
        out << (i ? "," : "");
        if (quote) {
          out << '"';
          for (char ch : f[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
          out << '"';
        } else {
          out << f[i];
        }
      }
      out << '\n';
    }
    return out.str();
  }

  json to_json() const {
    json rj = json::array();
    for (const auto& r : rows) rj.push_back(r.to_json());
    return {{"name", name}, {"config", config}, {"columns", csv_columns()}, {"rows", rj}};
  }
};

/// Warns when a mesh sweep loses the contraction after first reaching it.
inline void sweep_checks(std::vector<Row>& rows) {
  std::map<std::string, std::vector<Row*>> groups;
  for (auto& r : rows) {
    if (r.experiment != "theorem_pipeline") continue;
    auto key = r.config;
    key.erase("partition");
    groups[key.dump()].push_back(&r);
  }
  for (auto& [key, g] : groups) {
    std::stable_sort(g.begin(), g.end(),
                     [](const Row* a, const Row* b) { return a->value("mesh_mu") > b->value("mesh_mu"); });
    bool reached = false;
    for (Row* r : g) {
      const bool c = r->value("contraction") == 1.0;
      if (reached && !c) r->warnings.push_back("contraction_lost_under_refinement");
      reached = reached || c;
    }
  }
}

inline Report run(const json& config, const std::string& name, unsigned threads = 1,
                  std::optional<std::uint64_t> seed_override = std::nullopt) {
  const auto cells = expand_cells(config, seed_override);
  Report rep;
  rep.name = name;
  rep.config = config;
  rep.rows.resize(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) { rep.rows[i] = run_cell(cells[i], i); });
  sweep_checks(rep.rows);
  return rep;
}

/// Cartesian expansion of template["grid"] = {"dotted.path": [values...]}.
inline std::vector<json> expand_grid(const json& tmpl) {
  json base = tmpl;
  json grid = base.contains("grid") ? base.at("grid") : json::object();
  base.erase("grid");
  std::vector<json> out{base};
  for (const auto& [path, values] : grid.items()) {
    if (!values.is_array() || values.empty()) throw ConfigError("grid entry '" + path + "' must be a nonempty list");
    std::vector<json> next;
    for (const auto& cfg : out)
      for (const auto& v : values) {
        json c = cfg;
        std::string ptr = "/" + path;
        std::replace(ptr.begin(), ptr.end(), '.', '/');
        c[json::json_pointer(ptr)] = v;
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

inline Report sweep(const json& tmpl, const std::string& name, unsigned threads = 1,
                    std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::vector<json> cells;
  for (const auto& cfg : expand_grid(tmpl))
    for (auto& c : expand_cells(cfg, seed_override)) cells.push_back(std::move(c));
  Report rep;
  rep.name = name;
  rep.config = tmpl;
  rep.rows.resize(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) { rep.rows[i] = run_cell(cells[i], i); });
  sweep_checks(rep.rows);
  return rep;
}

struct ReplayResult {
  Row row;
  std::vector<std::string> mismatches; // columns whose text differs from the stored row
};

/// Re-runs a stored report row from its own cell config.
inline ReplayResult replay(const json& stored) {
  const auto& cell = stored.at("config");
  const auto expected = stored.at("config_hash").get<std::string>();
  if (config_hash(cell) != expected) throw HashMismatch("config hash mismatch: row was modified");
  if (stored.at("seed").get<std::uint64_t>() != detail::cell_seed(cell))
    throw HashMismatch("config hash mismatch: seed does not match the hashed config");
  ReplayResult r{run_cell(cell, stored.at("cell_index").get<std::size_t>()), {}};
  for (const auto& c : numeric_columns()) {
    const auto& v = stored.at(c);
    const std::string old = v.is_null() ? "" : format_number(v.get<double>());
    if (old != format_number(r.row.value(c))) r.mismatches.push_back(c);
  }
  if (stored.at("hard_ok").get<bool>() != r.row.hard_ok()) r.mismatches.push_back("hard_ok");
  return r;
}

/// x/y series from report rows, one series per value of `group` (if given).
inline std::string plot_data(const json& report, const std::string& x, const std::string& y,
                             const std::string& group = "") {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : report.at("rows")) {
    if (!r.contains(x) || !r.contains(y)) throw ConfigError("unknown column '" + (r.contains(x) ? y : x) + "'");
    if (r.at(x).is_null() || r.at(y).is_null()) continue;
    std::string key = "all";
    if (!group.empty()) {
      if (!r.contains(group)) throw ConfigError("unknown column '" + group + "'");
      const auto& g = r.at(group);
      key = g.is_string() ? g.get<std::string>() : g.dump();
    }
    series[key].emplace_back(r.at(x).get<double>(), r.at(y).get<double>());
  }
  std::ostringstream out;
  out << "series," << x << "," << y << '\n';
  for (auto& [key, pts] : series) {
    std::stable_sort(pts.begin(), pts.end());
    for (auto [a, b] : pts) out << key << "," << format_number(a) << "," << format_number(b) << '\n';
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

} // namespace splinelab::experiment

#endif // SPLINELAB_EXPERIMENT_HPP
