#include "eqlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "eqlab/dynamics.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/henon.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/parser.hpp"
#include "eqlab/potential.hpp"
#include "eqlab/sections.hpp"

namespace eqlab {

namespace {

using nlohmann::json;

/// Strict reader over one JSON object: every key must be consumed.
class Params {
 public:
  Params(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  long long integer(const std::string& key, std::optional<long long> def, long long lo, long long hi) {
    const json* v = take(key);
    if (!v) return required(key, def);
    if (!v->is_number_integer()) throw SchemaError(at(key), "expected an integer");
    return check_range(key, v->get<long long>(), lo, hi);
  }

  double number(const std::string& key, std::optional<double> def, double lo, double hi) {
    const json* v = take(key);
    if (!v) return required(key, def);
    if (!v->is_number()) throw SchemaError(at(key), "expected a number");
    const double x = v->get<double>();
    if (!(x >= lo && x <= hi))
      throw SchemaError(at(key), "value must lie in [" + format_double(lo) + ", " + format_double(hi) + "]");
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_boolean()) throw SchemaError(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> def, const std::set<std::string>& allowed = {}) {
    const json* v = take(key);
    if (!v) return required(key, def);
    if (!v->is_string()) throw SchemaError(at(key), "expected a string");
    std::string s = v->get<std::string>();
    if (!allowed.empty() && !allowed.count(s)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw SchemaError(at(key), "expected one of " + list);
    }
    return s;
  }

  std::vector<long long> integers(const std::string& key, std::optional<std::vector<long long>> def, long long lo,
                                  long long hi, std::size_t min_size = 1) {
    const json* v = take(key);
    if (!v) return required(key, def);
    const json& a = array(key, *v, min_size);
    std::vector<long long> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!a[i].is_number_integer()) throw SchemaError(p, "expected an integer");
      const long long x = a[i].get<long long>();
      if (x < lo || x > hi) throw SchemaError(p, "value must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out.push_back(x);
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def, double lo, double hi) {
    const json* v = take(key);
    if (!v) return required(key, def);
    const json& a = array(key, *v, 1);
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!a[i].is_number()) throw SchemaError(p, "expected a number");
      const double x = a[i].get<double>();
      if (!(x >= lo && x <= hi)) throw SchemaError(p, "value out of range");
      out.push_back(x);
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::optional<std::vector<std::string>> def) {
    const json* v = take(key);
    if (!v) return required(key, def);
    const json& a = array(key, *v, 1);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string()) throw SchemaError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(a[i].get<std::string>());
    }
    return out;
  }

  /// A number or a [re, im] pair.
  Complex complex(const std::string& key, std::optional<Complex> def) {
    const json* v = take(key);
    if (!v) return required(key, def);
    return complex_value(*v, at(key));
  }

  std::vector<Complex> complexes(const std::string& key) {
    const json* v = take(key);
    if (!v) return {};
    const json& a = array(key, *v, 1);
    std::vector<Complex> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(complex_value(a[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  /// Array of [n, m] pairs.
  std::vector<std::pair<int, int>> index_pairs(const std::string& key, std::vector<std::pair<int, int>> def, int lo,
                                               int hi) {
    const json* v = take(key);
    if (!v) return def;
    const json& a = array(key, *v, 1);
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_number_integer() || !a[i][1].is_number_integer())
        throw SchemaError(p, "expected an [n, m] pair of integers");
      const int n = a[i][0].get<int>(), m = a[i][1].get<int>();
      if (n < lo || n > hi || m < lo || m > hi)
        throw SchemaError(p, "entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out.emplace_back(n, m);
    }
    return out;
  }

  std::optional<Params> object(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    return Params(*v, at(key));
  }

  /// Throws on the first key that no getter consumed.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw SchemaError(at(it.key()), "unknown key");
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

 private:
  const json* take(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  T required(const std::string& key, const std::optional<T>& def) const {
    if (!def) throw SchemaError(at(key), "required key is missing");
    return *def;
  }

  long long check_range(const std::string& key, long long x, long long lo, long long hi) const {
    if (x < lo || x > hi)
      throw SchemaError(at(key), "value must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  const json& array(const std::string& key, const json& v, std::size_t min_size) const {
    if (!v.is_array()) throw SchemaError(at(key), "expected an array");
    if (v.size() < min_size) throw SchemaError(at(key), "expected at least " + std::to_string(min_size) + " entries");
    return v;
  }

  static Complex complex_value(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    throw SchemaError(path, "expected a number or an [re, im] pair");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

constexpr long long kBig = 1LL << 40;

std::string fmt(double x) { return format_double(x); }
std::string fmt(long long x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

std::set<std::string> check_list(Params& p, const std::vector<std::string>& all) {
  const auto chosen = p.strings("checks", all);
  std::set<std::string> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (std::find(all.begin(), all.end(), chosen[i]) == all.end())
      throw SchemaError(p.at("checks") + "[" + std::to_string(i) + "]", "unknown check " + chosen[i]);
    out.insert(chosen[i]);
  }
  return out;
}

std::vector<TestFunction> test_functions(Params& p, std::size_t k) {
  std::vector<std::string> def;
  for (const auto& t : builtin_test_functions(k)) def.push_back(t.id());
  const auto ids = p.strings("psi", def);
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    try {
      out.push_back(TestFunction::from_id(ids[i], k));
    } catch (const Error& e) {
      throw SchemaError(p.at("psi") + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

template <class T>
bool strictly_decreasing(const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    s.push_back(buf);
  }
  return join(s, ", ");
}

// ---------------------------------------------------------------- sections

constexpr double kVanishing = 1e-12;

void run_sections(Params& p, const Rng& rng, std::size_t workers, ExperimentReport& rep, bool dry) {
  SectionEnsemble ens;
  ens.k = static_cast<std::size_t>(p.integer("k", 1, 1, 2));
  ens.l = static_cast<std::size_t>(p.integer("l", 1, 1, 2));
  ens.field = field_from_string(p.string("field", "complex", {"complex", "real"}));
  const auto n_grid = p.integers("n_grid", std::vector<long long>{25, 50, 100, 200}, 1, 2000);
  const auto trials = static_cast<std::size_t>(p.integer("trials", 500, 2, kBig));
  const auto lines = static_cast<std::size_t>(p.integer("crofton_lines", kDefaultCroftonLines, 1, kBig));
  const double eps = p.number("epsilon", 0.05, 0.0, 10.0);
  const auto psis = test_functions(p, ens.k);
  const auto checks = check_list(p, {"median_decreasing", "mean_unbiased", "concentration"});
  p.finish();
  if (ens.l > ens.k) throw SchemaError("$.l", "need l <= k");
  if (dry) return;

  Table zeros("zeros", {"n", "trial", "D", "psi_id"});
  Table spread("spread", {"n", "psi_id", "median_abs", "mean", "std_error"});
  Table conc("concentration", {"psi_id", "n", "exceed", "trials", "probability", "wilson_lo", "wilson_hi", "upper_bound"});
  std::vector<std::vector<std::vector<double>>> d(psis.size());  // [psi][n index][trial]
  std::vector<int> ns;
  for (long long n : n_grid) {
    ens.n = static_cast<int>(n);
    ns.push_back(ens.n);
    const auto s = discrepancy_samples(ens, psis, trials, rng.split(static_cast<std::uint64_t>(n)), workers, lines);
    for (std::size_t t = 0; t < trials; ++t)
      for (std::size_t q = 0; q < psis.size(); ++q) zeros.add_row({fmt(n), fmt(t), fmt(s.d[q][t]), psis[q].id()});
    for (std::size_t q = 0; q < psis.size(); ++q) d[q].push_back(s.d[q]);
  }

  bool medians_ok = true, means_ok = true, conc_ok = true;
  std::vector<std::string> median_notes, mean_notes, conc_notes;
  Plot plot{"spread", Plot::Kind::LogLinear, "n", "median |D|", {}};
  for (std::size_t q = 0; q < psis.size(); ++q) {
    std::vector<double> med;
    Series series{psis[q].id(), {}, {}};
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const SpreadRow r = spread_row(ns[i], d[q][i]);
      spread.add_row({fmt(ns[i]), psis[q].id(), fmt(r.median_abs), fmt(r.mean.value), fmt(r.mean.std_error)});
      med.push_back(r.median_abs);
      series.x.push_back(ns[i]);
      series.y.push_back(r.median_abs);
      const bool unbiased = r.mean.std_error > 0.0 ? std::abs(r.mean.value) <= 4.0 * r.mean.std_error
                                                   : std::abs(r.mean.value) < kVanishing;
      if (!unbiased) {
        means_ok = false;
        mean_notes.push_back(psis[q].id() + " n=" + std::to_string(ns[i]));
      }
    }
    plot.series.push_back(series);
    const bool vanishes = std::all_of(med.begin(), med.end(), [](double m) { return m < kVanishing; });
    if (vanishes) {
      median_notes.push_back(psis[q].id() + " vanishes identically");
    } else if (!strictly_decreasing(med)) {
      medians_ok = false;
      median_notes.push_back(psis[q].id() + " medians " + list(med));
    }

    const ConcentrationReport cr = concentration_table(ns, d[q], eps);
    std::vector<double> probs;
    for (const auto& row : cr.rows) {
      conc.add_row({psis[q].id(), fmt(row.n), fmt(row.exceed), fmt(row.trials), fmt(row.probability),
                    fmt(row.wilson.lo), fmt(row.wilson.hi), row.upper_bound ? "1" : "0"});
      probs.push_back(row.probability);
    }
    const auto& fit = cr.fit ? cr.fit : cr.bound_fit;
    const bool ok = strictly_decreasing(probs) && fit && fit->slope < 0.0;
    if (!ok) {
      conc_ok = false;
      conc_notes.push_back(psis[q].id() + " P " + list(probs) + (fit ? " slope " + fmt(fit->slope) : ""));
    }
  }
  rep.tables = {zeros, spread, conc};
  rep.plots.push_back(plot);
  if (checks.count("median_decreasing"))
    rep.checks.push_back({"median_decreasing", medians_ok, join(median_notes, "; ")});
  if (checks.count("mean_unbiased"))
    rep.checks.push_back({"mean_unbiased", means_ok, mean_notes.empty() ? "" : "biased at " + join(mean_notes, ", ")});
  if (checks.count("concentration")) rep.checks.push_back({"concentration", conc_ok, join(conc_notes, "; ")});
}

// ---------------------------------------------------------------- dynamics

ProjectivePoint default_start(std::size_t k) {
  if (k == 1) return ProjectivePoint{Complex(0.6, 0.37), 1.0};
  return ProjectivePoint{Complex(0.6, 0.37), Complex(-0.2, 0.5), 1.0};
}

void add_cloud_table(ExperimentReport& rep, const std::string& name, const EmpiricalMeasure& mu, std::size_t k) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i <= k; ++i) {
    header.push_back("re_x" + std::to_string(i));
    header.push_back("im_x" + std::to_string(i));
  }
  header.push_back("weight");
  Table t(name, header);
  for (const Atom& a : mu.atoms()) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i <= k; ++i) {
      row.push_back(fmt(a.point[i].real()));
      row.push_back(fmt(a.point[i].imag()));
    }
    row.push_back(fmt(a.weight));
    t.add_row(std::move(row));
  }
  rep.tables.push_back(std::move(t));
}

struct MixingOptions {
  std::string method, phi_id, psi_id;
  std::size_t n_max = 8, atoms = 20000, first = 1, last = 8;
  bool zero_lags = false, has_exponent = false;
  double max_exponent = 0.0;
};

MixingOptions parse_mixing(Params& m) {
  MixingOptions s;
  s.method = m.string("method", "forward", {"forward", "transfer"});
  s.phi_id = m.string("phi", "re01");
  s.psi_id = m.string("psi", s.phi_id);
  s.n_max = static_cast<std::size_t>(m.integer("n_max", 8, 1, 64));
  s.atoms = static_cast<std::size_t>(m.integer("atoms", 20000, 2, kBig));
  s.zero_lags = m.boolean("zero_lags", false);
  s.has_exponent = m.has("max_exponent");
  s.max_exponent = m.number("max_exponent", 0.0, -1e9, 1e9);
  s.first = static_cast<std::size_t>(m.integer("fit_first", 1, 0, 64));
  s.last = static_cast<std::size_t>(m.integer("fit_last", static_cast<long long>(s.n_max), 1, 64));
  m.finish();
  return s;
}

struct GrowthOptions {
  std::size_t n_max = 6;
  std::vector<long long> expected;
  bool has_root = false;
  double root_target = 1.0, root_tol = 0.05;
};

GrowthOptions parse_growth(Params& g) {
  GrowthOptions s;
  s.n_max = static_cast<std::size_t>(g.integer("n_max", 6, 1, static_cast<long long>(kMaxDegreeGrowthSteps)));
  s.expected = g.integers("expected", std::vector<long long>{}, 0, kBig, 0);
  s.has_root = g.has("root_target");
  s.root_target = g.number("root_target", 1.0, 0.0, 1e9);
  s.root_tol = g.number("root_tolerance", 0.05, 0.0, 1e9);
  g.finish();
  return s;
}

void run_dynamics(Params& p, const Rng& rng, std::size_t workers, ExperimentReport& rep, bool dry) {
  const auto comps = p.strings("map", std::nullopt);
  ExactMap exact = [&] {
    try {
      return parse_map(comps, comps.size());
    } catch (const Error& e) {
      throw SchemaError("$.map", e.what());
    }
  }();
  const RationalSelfMap f = [&] {
    try {
      return RationalSelfMap(exact);
    } catch (const Error& e) {
      throw SchemaError("$.map", e.what());
    }
  }();
  const std::size_t k = f.k();
  const auto start_coords = p.complexes("start");
  const bool cloud_on = p.boolean("cloud", true);
  const auto depth = static_cast<std::size_t>(p.integer("depth", 25, 0, 200));
  const auto samples = static_cast<std::size_t>(p.integer("samples", 10000, 1, kBig));
  const int moments = static_cast<int>(p.integer("moments", 0, 0, 64));
  const double moment_tol = p.number("moment_tolerance", 0.02, 0.0, 1e9);
  const double defect_tol = p.number("defect_tolerance", 0.02, 0.0, 1e9);
  const auto profile_depths = p.integers("profile_depths", std::vector<long long>{}, 0, 200, 0);
  const auto profile_samples = static_cast<std::size_t>(p.integer("profile_samples", 20000, 1, kBig));
  std::optional<MixingOptions> mixing;
  if (auto m = p.object("mixing")) mixing = parse_mixing(*m);
  std::optional<GrowthOptions> growth;
  if (auto g = p.object("degree_growth")) growth = parse_growth(*g);
  const auto psis = test_functions(p, k);
  const auto checks = check_list(p, {"moments", "invariance_defect", "defect_profile", "mixing", "degree_growth"});
  p.finish();

  ProjectivePoint x0 = default_start(k);
  if (!start_coords.empty()) {
    if (start_coords.size() != k + 1) throw SchemaError("$.start", "expected " + std::to_string(k + 1) + " coordinates");
    try {
      x0 = ProjectivePoint(start_coords);
    } catch (const Error& e) {
      throw SchemaError("$.start", e.what());
    }
  }
  if (moments > 0 && k != 1) throw SchemaError("$.moments", "circle moments need a map of P^1");
  if (moments > 0 && !cloud_on) throw SchemaError("$.moments", "circle moments need the cloud");
  TestFunction phi = TestFunction::constant(k), psi = phi;
  if (mixing) {
    try {
      phi = TestFunction::from_id(mixing->phi_id, k);
      psi = TestFunction::from_id(mixing->psi_id, k);
    } catch (const Error& e) {
      throw SchemaError("$.mixing", e.what());
    }
  }
  if (dry) return;

  if (cloud_on) {
    const BackwardSample cloud = backward_orbit_sample({f}, x0, depth, samples, rng.split(0), workers);
    add_cloud_table(rep, "cloud", cloud.measure, k);
    rep.notes["aborted_paths"] = cloud.aborted;
    if (k == 1) {
      Plot plot{"cloud", Plot::Kind::Scatter, "Re z", "Im z", {{"atoms", {}, {}}}};
      for (const Atom& a : cloud.measure.atoms()) {
        if (a.point[1] == Complex{}) continue;
        const Complex z = affine_coordinate(a.point);
        plot.series[0].x.push_back(z.real());
        plot.series[0].y.push_back(z.imag());
      }
      rep.plots.push_back(plot);
    }

    if (moments > 0) {
      Table t("moments", {"j", "re", "im", "abs"});
      double worst = 0.0;
      for (int j = 1; j <= moments; ++j) {
        Complex m = 0.0;
        for (const Atom& a : cloud.measure.atoms()) m += a.weight * std::pow(affine_coordinate(a.point), j);
        t.add_row({fmt(j), fmt(m.real()), fmt(m.imag()), fmt(std::abs(m))});
        worst = std::max(worst, std::abs(m));
      }
      rep.tables.push_back(t);
      if (checks.count("moments"))
        rep.checks.push_back({"moments", worst <= moment_tol, "max |moment| " + fmt(worst)});
    }

    const DefectResult defect = invariance_defect(f, cloud.measure, psis, rng.split(1), workers);
    Table dt("defect", {"psi_id", "value"});
    for (std::size_t q = 0; q < psis.size(); ++q) dt.add_row({psis[q].id(), fmt(defect.per_psi[q])});
    rep.tables.push_back(dt);
    if (checks.count("invariance_defect"))
      rep.checks.push_back({"invariance_defect", defect.defect <= defect_tol, "defect " + fmt(defect.defect)});
  }

  if (!profile_depths.empty()) {
    Table pt("profile", {"depth", "defect"});
    std::vector<double> values;
    Plot plot{"profile", Plot::Kind::LogLinear, "depth", "invariance defect", {{"coupled", {}, {}}}};
    for (long long n : profile_depths) {
      const DefectResult r = coupled_invariance_defect(f, x0, static_cast<std::size_t>(n), profile_samples, psis,
                                                       rng.split(2).split(static_cast<std::uint64_t>(n)), workers);
      pt.add_row({fmt(n), fmt(r.defect)});
      values.push_back(r.defect);
      plot.series[0].x.push_back(static_cast<double>(n));
      plot.series[0].y.push_back(r.defect);
    }
    rep.tables.push_back(pt);
    rep.plots.push_back(plot);
    if (checks.count("defect_profile"))
      rep.checks.push_back({"defect_profile", strictly_decreasing(values), "defects " + list(values)});
  }

  if (mixing) {
    const BackwardSample mu = backward_orbit_sample({f}, x0, depth, mixing->atoms, rng.split(3), workers);
    const MixingResult m = mixing->method == "forward" ? mixing_correlations(f, mu.measure, phi, psi, mixing->n_max)
                                               : transfer_correlations(f, mu.measure, phi, psi, mixing->n_max, workers);
    Table mt("mixing", {"n", "I", "std_error"});
    Plot plot{"mixing", Plot::Kind::LogLinear, "n", "|I_n|", {{mixing->method, {}, {}}}};
    bool zero_ok = true;
    for (std::size_t n = 0; n < m.correlations.size(); ++n) {
      const Estimate& e = m.correlations[n];
      mt.add_row({fmt(n), fmt(e.value), fmt(e.std_error)});
      plot.series[0].x.push_back(static_cast<double>(n));
      plot.series[0].y.push_back(std::abs(e.value));
      if (n >= 1 && std::abs(e.value) > 4.0 * e.std_error + 1e-15) zero_ok = false;
    }
    rep.tables.push_back(mt);
    rep.plots.push_back(plot);
    if (checks.count("mixing")) {
      if (mixing->zero_lags) rep.checks.push_back({"mixing_zero_lags", zero_ok, "|I_n| <= 4 SE for n >= 1"});
      if (mixing->has_exponent) {
        const auto fit = decay_fit(m, mixing->first, std::min(mixing->last, mixing->n_max));
        const bool ok = fit && fit->slope <= mixing->max_exponent;
        rep.checks.push_back({"mixing_decay", ok, fit ? "slope " + fmt(fit->slope) : "no fit"});
        if (fit) rep.notes["mixing_slope"] = fit->slope;
      }
    }
  }

  if (growth) {
    Rng r = rng.split(4);
    const DegreeGrowth g = degree_growth(f, growth->n_max, r);
    Table gt("degrees", {"n", "degree", "root"});
    for (std::size_t i = 0; i < g.degrees.size(); ++i) gt.add_row({fmt(i + 1), fmt(g.degrees[i]), fmt(g.roots[i])});
    rep.tables.push_back(gt);
    rep.notes["topological_degree"] = g.topological_degree;
    if (checks.count("degree_growth")) {
      bool ok = true;
      for (std::size_t i = 0; i < growth->expected.size() && i < g.degrees.size(); ++i)
        ok = ok && g.degrees[i] == growth->expected[i];
      if (growth->expected.size() > g.degrees.size()) ok = false;
      std::string detail = "degrees";
      for (int dgr : g.degrees) detail += " " + std::to_string(dgr);
      if (growth->has_root) {
        const bool root_ok = std::abs(g.roots.back() / growth->root_target - 1.0) <= growth->root_tol;
        ok = ok && root_ok;
        detail += "; last root " + fmt(g.roots.back());
      }
      rep.checks.push_back({"degree_growth", ok, detail});
    }
  }
}

// ---------------------------------------------------------------- henon

void run_henon(Params& p, const Rng& rng, std::size_t workers, ExperimentReport& rep, bool dry) {
  const std::string p_text = p.string("p", std::nullopt);
  const Complex a = p.complex("a", std::nullopt);
  const auto n_pairs = static_cast<std::size_t>(p.integer("pairs", 4, 1, 64));
  std::vector<std::pair<int, int>> def_grid;
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) def_grid.emplace_back(n, m);
  const auto grid = p.index_pairs("grid", def_grid, 1, 12);
  const auto gap_grid = p.index_pairs("gap_grid", {{1, 1}, {3, 3}}, 1, 12);
  const int green_depth = static_cast<int>(p.integer("green_depth", 40, 0, kMaxGreenDepth));
  const double green_tol = p.number("green_tolerance", 0.1, 0.0, 1e9);
  const auto green_grid = p.index_pairs("green_grid", {{3, 3}}, 1, 12);
  const auto checks = check_list(p, {"counts", "gap_decreasing", "green_bound"});
  p.finish();

  const RegularAutomorphism f = [&] {
    try {
      return build_regular_automorphism(p_text, a);
    } catch (const Error& e) {
      throw SchemaError("$.p", e.what());
    }
  }();
  if (dry) return;

  // Generic pairs; a pair meeting an exceptional direction is redrawn.
  std::vector<LinePair> pairs;
  Rng line_rng = rng.split(0);
  while (pairs.size() < n_pairs) {
    LinePair lp = random_line_pair(line_rng);
    if (std::abs(lp.L.direction[0]) < 1e-3 || std::abs(lp.L_prime.direction[1]) < 1e-3) continue;
    pairs.push_back(lp);
  }

  std::vector<std::pair<int, int>> all = grid;
  for (const auto& g : gap_grid)
    if (std::find(all.begin(), all.end(), g) == all.end()) all.push_back(g);
  for (const auto& g : green_grid)
    if (std::find(all.begin(), all.end(), g) == all.end()) all.push_back(g);

  std::vector<std::vector<HenonCloud>> clouds(all.size(), std::vector<HenonCloud>(pairs.size()));
  parallel_for(all.size() * pairs.size(), workers, [&](std::size_t idx) {
    const std::size_t g = idx / pairs.size(), q = idx % pairs.size();
    clouds[g][q] = line_intersection_cloud(f, all[g].first, all[g].second, pairs[q]);
  });

  Table counts("counts", {"pair", "n", "m", "raw_count", "expected", "atoms"});
  bool counts_ok = true;
  for (std::size_t g = 0; g < all.size(); ++g)
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto& c = clouds[g][q];
      long expected = 1;
      for (int i = 0; i < c.n; ++i) expected *= f.d_plus();
      for (int i = 0; i < c.m; ++i) expected *= f.d_minus();
      counts.add_row({fmt(q), fmt(c.n), fmt(c.m), fmt(c.raw_count), fmt(static_cast<long long>(expected)),
                      fmt(c.measure.size())});
      counts_ok = counts_ok && c.raw_count == expected;
    }
  rep.tables.push_back(counts);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto& c = clouds[g][0];
    Table t("cloud_n" + std::to_string(c.n) + "_m" + std::to_string(c.m), {"re_x", "im_x", "re_y", "im_y", "weight"});
    Plot plot{t.name(), Plot::Kind::Scatter, "Re x", "Re y", {{"atoms", {}, {}}}};
    for (const Atom& at : c.measure.atoms()) {
      const Point2 q = affine_point(at.point);
      t.add_row({fmt(q[0].real()), fmt(q[0].imag()), fmt(q[1].real()), fmt(q[1].imag()), fmt(at.weight)});
      plot.series[0].x.push_back(q[0].real());
      plot.series[0].y.push_back(q[1].real());
    }
    rep.tables.push_back(std::move(t));
    rep.plots.push_back(std::move(plot));
  }

  const auto psis = box_test_functions();
  auto index_of = [&](const std::pair<int, int>& g) {
    return static_cast<std::size_t>(std::find(all.begin(), all.end(), g) - all.begin());
  };
  Table gaps("gaps", {"n", "m", "gap"});
  std::vector<double> gap_values;
  for (const auto& g : gap_grid) {
    const double gap = pairs.size() >= 2 ? equidistribution_gap(clouds[index_of(g)], psis) : 0.0;
    gaps.add_row({fmt(g.first), fmt(g.second), fmt(gap)});
    gap_values.push_back(gap);
  }
  rep.tables.push_back(gaps);

  Table green("green", {"n", "m", "max_green_plus", "max_green_minus"});
  double worst = 0.0, worst_plus = 0.0, worst_minus = 0.0;
  for (const auto& g : green_grid) {
    double gp = 0.0, gm = 0.0;
    for (const auto& c : clouds[index_of(g)])
      for (const Atom& at : c.measure.atoms()) {
        const Point2 q = affine_point(at.point);
        gp = std::max(gp, green_plus(f, q, green_depth).value);
        gm = std::max(gm, green_minus(f, q, green_depth).value);
      }
    green.add_row({fmt(g.first), fmt(g.second), fmt(gp), fmt(gm)});
    worst = std::max({worst, gp, gm});
    worst_plus = std::max(worst_plus, gp);
    worst_minus = std::max(worst_minus, gm);
  }
  rep.tables.push_back(green);

  if (checks.count("counts")) rep.checks.push_back({"counts", counts_ok, "raw counts against d+^n d-^m"});
  if (checks.count("gap_decreasing"))
    rep.checks.push_back({"gap_decreasing", pairs.size() >= 2 && strictly_decreasing(gap_values), "gaps " + list(gap_values)});
  if (checks.count("green_bound"))
    rep.checks.push_back({"green_bound", worst <= green_tol, "max G+ " + fmt(worst_plus) + ", max G- " + fmt(worst_minus) + " at depth " +
                                                          std::to_string(green_depth)});
}

// ---------------------------------------------------------------- potential

std::vector<QpshWitness> random_witnesses(std::size_t k, std::size_t count, const std::vector<long long>& degrees,
                                          Field field, Normalization mode, const PointSampler& mu,
                                          std::size_t mean_samples, const Rng& rng, std::size_t workers) {
  std::vector<std::optional<QpshWitness>> slots(count);
  parallel_for(count, workers, [&](std::size_t i) {
    Rng r = rng.split(i);
    const int n = static_cast<int>(degrees[r.below(degrees.size())]);
    slots[i] = normalize_qpsh(QpshWitness(sample_kostlan_form(k, n, field, r)), mode, mu,
                              mode == Normalization::MeanZero ? mean_samples : 2000, r);
  });
  std::vector<QpshWitness> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct PotentialOptions {
  std::optional<std::pair<std::size_t, std::vector<long long>>> r1;  // witnesses, degrees
  struct Moderation {
    std::vector<double> alphas;
    std::size_t witnesses = 5, samples = 20000;
    std::vector<long long> degrees;
  };
  std::optional<Moderation> moderation;
  struct Exceedance {
    std::vector<double> t_grid;
    std::size_t witnesses = 5, samples = 200000;
    std::vector<long long> degrees;
    double max_slope = -0.5;
  };
  std::optional<Exceedance> exceedance;
  struct Capacity {
    std::size_t witnesses = 20, samples = 2000;
    std::vector<long long> degrees;
    std::vector<std::string> sets;
  };
  std::optional<Capacity> capacity;
};

const std::vector<long long> kDefaultWitnessDegrees{1, 2, 3, 5, 8};

PotentialOptions parse_potential_blocks(Params& p) {
  PotentialOptions s;
  if (auto r1 = p.object("r1")) {
    const auto n = static_cast<std::size_t>(r1->integer("witnesses", 200, 1, kBig));
    s.r1.emplace(n, r1->integers("degrees", kDefaultWitnessDegrees, 1, 64));
    r1->finish();
  }
  if (auto m = p.object("moderation")) {
    PotentialOptions::Moderation x;
    x.alphas = m->numbers("alpha_grid", std::vector<double>{0.1, 0.25, 0.5, 0.75, 1.0}, 1e-12, 1.0);
    x.witnesses = static_cast<std::size_t>(m->integer("witnesses", 5, 1, kBig));
    x.degrees = m->integers("degrees", kDefaultWitnessDegrees, 1, 64);
    x.samples = static_cast<std::size_t>(m->integer("samples", 20000, 2, kBig));
    m->finish();
    if (!strictly_decreasing(std::vector<double>(x.alphas.rbegin(), x.alphas.rend())))
      throw SchemaError("$.moderation.alpha_grid", "must be strictly increasing");
    s.moderation = x;
  }
  if (auto e = p.object("exceedance")) {
    PotentialOptions::Exceedance x;
    x.t_grid = e->numbers("t_grid", std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, 0.0, 1e6);
    x.witnesses = static_cast<std::size_t>(e->integer("witnesses", 5, 1, kBig));
    x.degrees = e->integers("degrees", std::vector<long long>{1}, 1, 64);
    x.samples = static_cast<std::size_t>(e->integer("samples", 200000, 1, kBig));
    x.max_slope = e->number("max_slope", -0.5, -1e9, 0.0);
    e->finish();
    if (!strictly_decreasing(std::vector<double>(x.t_grid.rbegin(), x.t_grid.rend())))
      throw SchemaError("$.exceedance.t_grid", "must be strictly increasing");
    s.exceedance = x;
  }
  if (auto c = p.object("capacity")) {
    PotentialOptions::Capacity x;
    x.witnesses = static_cast<std::size_t>(c->integer("witnesses", 20, 1, kBig));
    x.degrees = c->integers("degrees", std::vector<long long>{1, 2, 3, 4}, 1, 64);
    x.samples = static_cast<std::size_t>(c->integer("samples", 2000, 1, kBig));
    x.sets = c->strings("sets", std::vector<std::string>{"whole", "real", "hyperplane"});
    for (std::size_t i = 0; i < x.sets.size(); ++i)
      if (x.sets[i] != "whole" && x.sets[i] != "real" && x.sets[i] != "hyperplane")
        throw SchemaError(c->at("sets") + "[" + std::to_string(i) + "]", "expected whole, real or hyperplane");
    c->finish();
    s.capacity = x;
  }
  return s;
}

void run_potential(Params& p, const Rng& rng, std::size_t workers, ExperimentReport& rep, bool dry) {
  const auto k = static_cast<std::size_t>(p.integer("k", 1, 1, 6));
  const std::string measure = p.string("measure", "fs", {"fs", "real_fs"});
  const PotentialOptions opts = parse_potential_blocks(p);
  const auto checks = check_list(p, {"r1_bound", "moderation", "exceedance", "capacity"});
  p.finish();
  if (dry) return;
  const PointSampler mu = measure == "fs" ? fs_sampler(k) : real_fs_sampler(k);

  if (opts.r1) {
    std::vector<int> pool(opts.r1->second.begin(), opts.r1->second.end());
    const R1Audit audit = r1_bound_audit(k, opts.r1->first, pool, rng.split(0), workers);
    Table t("r1", {"witness", "sup"});
    for (std::size_t i = 0; i < audit.sups.size(); ++i) t.add_row({fmt(i), fmt(audit.sups[i])});
    rep.tables.push_back(t);
    rep.notes["r1_bound"] = audit.bound;
    if (checks.count("r1_bound"))
      rep.checks.push_back({"r1_bound", audit.pass,
                            "max sup " + fmt(audit.max_sup) + " against " + fmt(audit.threshold)});
  }

  if (opts.moderation) {
    const auto& x = *opts.moderation;
    const auto ws =
        random_witnesses(k, x.witnesses, x.degrees, Field::Complex, Normalization::MaxZero, mu, 0, rng.split(1), workers);
    Table t("moderation", {"witness", "degree", "alpha", "estimate", "std_error", "heavy_tail"});
    bool ok = true;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      double previous = 0.0;
      for (double alpha : x.alphas) {
        Rng same = rng.split(2).split(i);  // common random numbers across alpha
        const ModerateIntegral m = moderate_integral(mu, ws[i], alpha, x.samples, same);
        t.add_row({fmt(i), fmt(ws[i].degree()), fmt(alpha), fmt(m.estimate.value), fmt(m.estimate.std_error),
                   m.heavy_tail ? "1" : "0"});
        ok = ok && std::isfinite(m.estimate.value) && m.estimate.value >= previous;
        previous = m.estimate.value;
      }
    }
    rep.tables.push_back(t);
    if (checks.count("moderation")) rep.checks.push_back({"moderation", ok, "finite and monotone in alpha"});
  }

  if (opts.exceedance) {
    const auto& x = *opts.exceedance;
    const auto ws = random_witnesses(k, x.witnesses, x.degrees, measure == "fs" ? Field::Complex : Field::Real,
                                     Normalization::MeanZero, mu, std::max(x.samples, kMinMeanSamples), rng.split(3),
                                     workers);
    std::vector<ExceedanceProfile> profiles(ws.size());
    parallel_for(ws.size(), workers, [&](std::size_t i) {
      Rng r = rng.split(4).split(i);
      profiles[i] = exceedance_profile(mu, ws[i], x.t_grid, x.samples, r);
    });
    const ExceedanceProfile env = exceedance_envelope(profiles);
    Table t("exceedance", {"t", "count", "trials", "probability", "wilson_lo", "wilson_hi"});
    Plot plot{"exceedance", Plot::Kind::LogLinear, "t", "mu(value < -t)", {{"envelope", {}, {}}}};
    for (const auto& row : env.rows) {
      t.add_row({fmt(row.t), fmt(row.count), fmt(row.trials), fmt(row.probability), fmt(row.wilson.lo),
                 fmt(row.wilson.hi)});
      plot.series[0].x.push_back(row.t);
      plot.series[0].y.push_back(row.probability);
    }
    rep.tables.push_back(t);
    rep.plots.push_back(plot);
    if (checks.count("exceedance")) {
      const bool ok = env.fit && env.fit->slope <= x.max_slope;
      rep.checks.push_back({"exceedance", ok, env.fit ? "slope " + fmt(env.fit->slope) : "fewer than two nonzero rows"});
    }
  }

  if (opts.capacity) {
    const auto& x = *opts.capacity;
    auto ws =
        random_witnesses(k, x.witnesses, x.degrees, Field::Real, Normalization::MaxZero, mu, 0, rng.split(5), workers);
    // log|x0| normalized to max zero vanishes to -inf on the hyperplane {x0 = 0}.
    FloatPoly x0(k + 1, 1);
    Monomial m{};
    m[0] = 1;
    x0.add_term(m, Complex(1.0));
    Rng r = rng.split(6);
    ws.push_back(normalize_qpsh(QpshWitness(x0), Normalization::MaxZero, mu, 2000, r));
    Table t("capacity", {"set", "bound"});
    bool ok = true;
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < x.sets.size(); ++i) {
      const CompactSet K = x.sets[i] == "whole" ? whole_space(k)
                           : x.sets[i] == "real" ? real_points(k)
                                                 : coordinate_hyperplane(k, 0);
      Rng sr = rng.split(7).split(i);
      const double b = capacity_upper_bound(K, ws, x.samples, sr).bound;
      t.add_row({K.name, fmt(b)});
      if (x.sets[i] == "whole" && b != 1.0) ok = false;
      if (x.sets[i] == "hyperplane" && b != 0.0) ok = false;
      notes.push_back(K.name + " " + fmt(b));
    }
    rep.tables.push_back(t);
    if (checks.count("capacity")) rep.checks.push_back({"capacity", ok, join(notes, "; ")});
  }
}

// ---------------------------------------------------------------- constants

constexpr std::size_t kConstantBlocks = 16;
constexpr long long kMinBlockSamples = 1000;

void run_constants(Params& p, const Rng& rng, std::size_t workers, ExperimentReport& rep, bool dry) {
  const auto ks = p.integers("k_values", std::vector<long long>{1, 2, 3}, 1, 64);
  const auto samples = static_cast<std::size_t>(p.integer("samples", 1000000, kConstantBlocks * kMinBlockSamples, kBig));
  const double z_max = p.number("max_z_score", 4.0, 0.0, 1e9);
  const auto checks = check_list(p, {"sphere_integral"});
  p.finish();
  if (dry) return;

  Table t("constants", {"k", "quantity", "exact", "estimate", "std_error", "z_score"});
  bool ok = true;
  std::vector<std::string> notes;
  for (long long kk : ks) {
    const auto k = static_cast<std::size_t>(kk);
    std::vector<Estimate> blocks(kConstantBlocks);
    const Rng kr = rng.split(k);
    parallel_for(kConstantBlocks, workers, [&](std::size_t b) {
      Rng r = kr.split(b);
      const std::size_t n = samples / kConstantBlocks + (b < samples % kConstantBlocks ? 1 : 0);
      blocks[b] = sphere_log_modulus_integral(k, n, r);
    });
    double mean = 0.0, var = 0.0;
    for (std::size_t b = 0; b < kConstantBlocks; ++b) {
      const double n = static_cast<double>(samples / kConstantBlocks + (b < samples % kConstantBlocks ? 1 : 0));
      mean += blocks[b].value * n;
      var += blocks[b].std_error * blocks[b].std_error * n * n;
    }
    mean /= static_cast<double>(samples);
    const Estimate e{mean, std::sqrt(var) / static_cast<double>(samples)};
    const double exact = sphere_log_modulus_exact(k);
    const double z = e.z_score(exact);
    t.add_row({fmt(kk), "sphere_log_integral", fmt(exact), fmt(e.value), fmt(e.std_error), fmt(z)});
    t.add_row({fmt(kk), "r1_bound", fmt(0.5 * (1.0 + std::log(static_cast<double>(k)))), "", "", ""});
    ok = ok && z <= z_max;
    notes.push_back("k=" + std::to_string(kk) + " z=" + fmt(z));
  }
  rep.tables.push_back(t);
  if (checks.count("sphere_integral")) rep.checks.push_back({"sphere_integral", ok, join(notes, "; ")});
}

using Runner = void (*)(Params&, const Rng&, std::size_t, ExperimentReport&, bool);

Runner runner(Subcommand s) {
  switch (s) {
    case Subcommand::Sections: return run_sections;
    case Subcommand::Dynamics: return run_dynamics;
    case Subcommand::Henon: return run_henon;
    case Subcommand::Potential: return run_potential;
    case Subcommand::Constants: return run_constants;
  }
  return run_constants;
}

// Shared by validation and execution: strips the optional "subcommand" and
// "description" keys.
json parameter_body(Subcommand sub, const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "config must be a JSON object");
  json body = doc;
  if (body.contains("subcommand")) {
    if (!body["subcommand"].is_string() || body["subcommand"].get<std::string>() != to_string(sub))
      throw SchemaError("$.subcommand", "config is for a different subcommand");
    body.erase("subcommand");
  }
  if (body.contains("description")) {
    if (!body["description"].is_string()) throw SchemaError("$.description", "expected a string");
    body.erase("description");
  }
  return body;
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Sections: return "sections";
    case Subcommand::Dynamics: return "dynamics";
    case Subcommand::Henon: return "henon";
    case Subcommand::Potential: return "potential";
    case Subcommand::Constants: return "constants";
  }
  return "constants";
}

Subcommand subcommand_from_string(const std::string& name) {
  for (Subcommand s : {Subcommand::Sections, Subcommand::Dynamics, Subcommand::Henon, Subcommand::Potential,
                       Subcommand::Constants})
    if (to_string(s) == name) return s;
  throw SchemaError("subcommand", "unknown subcommand " + name);
}

ExperimentConfig make_config(Subcommand sub, const json& doc, std::uint64_t seed, std::size_t workers) {
  ExperimentConfig cfg;
  cfg.subcommand = sub;
  cfg.params = parameter_body(sub, doc);
  cfg.seed = seed;
  cfg.workers = std::max<std::size_t>(1, workers);
  ExperimentReport scratch;
  Params params(cfg.params, "$");
  runner(sub)(params, Rng(seed), cfg.workers, scratch, true);
  return cfg;
}

ExperimentConfig load_config(Subcommand sub, const std::filesystem::path& file, std::uint64_t seed,
                             std::size_t workers) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SchemaError("$", "cannot read config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return make_config(sub, doc, seed, workers);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.subcommand = to_string(cfg.subcommand);
  rep.config = cfg.params;
  rep.seed = cfg.seed;
  rep.workers = cfg.workers;
  rep.version = EQLAB_VERSION;
  Params params(cfg.params, "$");
  runner(cfg.subcommand)(params, Rng(cfg.seed), cfg.workers, rep, false);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace eqlab
