#include "wrelay/cli/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "wrelay/specfun/errors.hpp"

namespace wrelay::cli {

namespace {

using toml::Table;
using toml::Value;

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

// "<number> <unit>" with the unit taken from a fixed list.
std::pair<double, std::string> split_quantity(const std::string& text, const std::string& key) {
  const auto sp = text.find(' ');
  if (sp == std::string::npos || sp == 0 || sp + 1 >= text.size() ||
      text.find(' ', sp + 1) != std::string::npos)
    invalid(key + ": expected \"<number> <unit>\", got \"" + text + "\"");
  double v = 0.0;
  const char* b = text.data();
  const char* e = text.data() + sp;
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    invalid(key + ": invalid number in \"" + text + "\"");
  return {v, text.substr(sp + 1)};
}

double parse_with_units(const std::string& text, const std::string& key,
                        const std::vector<std::pair<std::string, std::function<double(double)>>>& units) {
  const auto [v, unit] = split_quantity(text, key);
  std::string allowed;
  for (const auto& [u, conv] : units) {
    if (u == unit) return conv(v);
    allowed += (allowed.empty() ? "" : ", ") + u;
  }
  invalid(key + ": unit \"" + unit + "\" not accepted (expected " + allowed + ")");
}

double power_dbm(const std::string& text, const std::string& key) {
  return parse_with_units(text, key,
                          {{"dBm", [](double v) { return v; }},
                           {"W", [key](double v) {
                              if (!(v > 0.0)) invalid(key + ": power must be positive");
                              return 10.0 * std::log10(v) + 30.0;
                            }},
                           {"mW", [key](double v) {
                              if (!(v > 0.0)) invalid(key + ": power must be positive");
                              return 10.0 * std::log10(v);
                            }}});
}

double watts(const std::string& text, const std::string& key) {
  return parse_with_units(text, key, {{"W", [](double v) { return v; }},
                                      {"mW", [](double v) { return v * 1e-3; }}});
}

double frequency_hz(const std::string& text, const std::string& key) {
  return parse_with_units(text, key, {{"Hz", [](double v) { return v; }},
                                      {"kHz", [](double v) { return v * 1e3; }},
                                      {"MHz", [](double v) { return v * 1e6; }},
                                      {"GHz", [](double v) { return v * 1e9; }}});
}

double frequency_ghz(const std::string& text, const std::string& key) {
  return parse_with_units(text, key, {{"GHz", [](double v) { return v; }},
                                      {"MHz", [](double v) { return v * 1e-3; }}});
}

double distance_m(const std::string& text, const std::string& key) {
  return parse_with_units(text, key, {{"m", [](double v) { return v; }},
                                      {"km", [](double v) { return v * 1e3; }}});
}

double db(const std::string& text, const std::string& key) {
  return parse_with_units(text, key, {{"dB", [](double v) { return v; }}});
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quantity(double v, const std::string& unit) { return num(v) + " " + unit; }

// Table view that remembers which keys were read, so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const Table& t, std::string where) : t_(t), where_(std::move(where)) {}

  const Value* get(const std::string& key) {
    used_.insert(key);
    auto it = t_.values.find(key);
    return it == t_.values.end() ? nullptr : &it->second;
  }
  bool has(const std::string& key) const { return t_.values.count(key) > 0; }

  std::string string(const std::string& key, const std::string& fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) invalid(path(key) + " must be a string");
    return v->as_string();
  }
  double number(const std::string& key, double fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) invalid(path(key) + " must be a number");
    return v->as_number();
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_integer()) invalid(path(key) + " must be an integer");
    return v->as_integer();
  }
  bool boolean(const std::string& key, bool fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_bool()) invalid(path(key) + " must be true or false");
    return v->as_bool();
  }
  double unit(const std::string& key, double fallback,
              double (*conv)(const std::string&, const std::string&)) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) invalid(path(key) + " needs a quoted value with a unit");
    return conv(v->as_string(), path(key));
  }
  // Scalar or array of numbers.
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (v->is_number()) return {v->as_number()};
    if (!v->is_array()) invalid(path(key) + " must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : v->as_array()) {
      if (!e.is_number()) invalid(path(key) + " must contain numbers only");
      out.push_back(e.as_number());
    }
    if (out.empty()) invalid(path(key) + " must not be empty");
    return out;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish(const std::set<std::string>& allowed_tables = {}) const {
    for (const auto& [k, v] : t_.values)
      if (!used_.count(k)) invalid("unknown key " + path(k));
    for (const auto& [k, v] : t_.tables)
      if (!allowed_tables.count(k)) invalid("unknown table " + path(k));
    for (const auto& [k, v] : t_.arrays)
      if (!allowed_tables.count(k)) invalid("unknown table array " + path(k));
  }

 private:
  const Table& t_;
  std::string where_;
  std::set<std::string> used_;
};

const Table kEmpty;

const Table& sub(const Table& t, const std::string& key) {
  auto it = t.tables.find(key);
  return it == t.tables.end() ? kEmpty : it->second;
}

template <class E>
E pick(const std::string& text, const std::string& key,
       const std::vector<std::pair<std::string, E>>& options) {
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (name == text) return e;
    allowed += (allowed.empty() ? "" : ", ") + name;
  }
  invalid(key + ": \"" + text + "\" is not one of " + allowed);
}

template <class E>
std::string name_of(E e, const std::vector<std::pair<std::string, E>>& options) {
  for (const auto& [name, x] : options)
    if (x == e) return name;
  return "?";
}

const std::vector<std::pair<std::string, MetricKind>> kKinds{
    {"outage", MetricKind::outage},     {"ber", MetricKind::ber},
    {"ser", MetricKind::ser},           {"bler", MetricKind::bler},
    {"capacity", MetricKind::capacity}, {"capacity_ratio", MetricKind::capacity_ratio},
    {"ee", MetricKind::ee}};
const std::vector<std::pair<std::string, SweepVariable>> kSweepVars{
    {"eirp", SweepVariable::eirp}, {"distance", SweepVariable::distance}, {"hops", SweepVariable::hops}};
const std::vector<std::pair<std::string, SweepScale>> kScales{
    {"linear", SweepScale::linear}, {"log", SweepScale::log}, {"dB", SweepScale::log}};
const std::vector<std::pair<std::string, Csi>> kCsi{{"perfect", Csi::perfect}, {"outdated", Csi::outdated}};
const std::vector<std::pair<std::string, Allocation>> kAlloc{{"uniform", Allocation::uniform},
                                                             {"ber_optimal", Allocation::ber_optimal},
                                                             {"ee_optimal", Allocation::ee_optimal}};
const std::vector<std::pair<std::string, metrics::SnrConvention>> kConv{
    {"per_bit", metrics::SnrConvention::per_bit}, {"per_symbol", metrics::SnrConvention::per_symbol}};
const std::vector<std::pair<std::string, metrics::Method>> kMethods{
    {"exact", metrics::Method::exact}, {"asymptotic", metrics::Method::asymptotic},
    {"mc", metrics::Method::monte_carlo}};

bool common_alpha(const ChainSpec& c) {
  for (double a : c.alpha)
    if (a != c.alpha.front()) return false;
  return true;
}

ChainSpec read_chain(const Table& t) {
  Reader r(t, "chain");
  ChainSpec c;
  c.hops = static_cast<int>(r.integer("hops", c.hops));
  if (r.has("alpha") && r.has("beta")) invalid("chain: give either alpha or beta, not both");
  if (r.has("beta")) {
    for (double b : r.numbers("beta", {})) c.alpha.push_back(b / 2.0);
    c.alpha.erase(c.alpha.begin());
  } else {
    c.alpha = r.numbers("alpha", c.alpha);
  }
  c.omega = r.numbers("omega", c.omega);
  c.distance_m = r.unit("distance", c.distance_m, distance_m);
  if (const Value* v = r.get("hop_distances")) {
    if (!v->is_array()) invalid("chain.hop_distances must be an array of distances");
    for (const auto& e : v->as_array()) {
      if (!e.is_string()) invalid("chain.hop_distances entries need units");
      c.hop_distances_m.push_back(distance_m(e.as_string(), "chain.hop_distances"));
    }
  }
  c.bandwidth_hz = r.unit("bandwidth", c.bandwidth_hz, frequency_hz);
  c.eirp_dbm = r.unit("eirp", c.eirp_dbm, power_dbm);
  r.finish();
  return c;
}

LinkBudget read_budget(const Table& t) {
  Reader r(t, "budget");
  LinkBudget b;
  b.frequency_ghz = r.unit("frequency", b.frequency_ghz, frequency_ghz);
  b.noise_psd_dbm_hz = r.unit("noise_psd", b.noise_psd_dbm_hz, [](const std::string& s, const std::string& k) {
    return parse_with_units(s, k, {{"dBm/Hz", [](double v) { return v; }}});
  });
  b.noise_figure_db = r.unit("noise_figure", b.noise_figure_db, db);
  b.rx_frontend_loss_db = r.unit("rx_loss", b.rx_frontend_loss_db, db);
  b.antenna_element_gain_db = r.unit("element_gain", b.antenna_element_gain_db, db);
  b.pathloss_exponent = r.number("pathloss_exponent", b.pathloss_exponent);
  b.pathloss_ref_db_at_1m = r.unit("pathloss_ref", b.pathloss_ref_db_at_1m, db);
  b.blockage_db_per_m = r.unit("blockage", b.blockage_db_per_m, [](const std::string& s, const std::string& k) {
    return parse_with_units(s, k, {{"dB/m", [](double v) { return v; }}});
  });
  r.finish();
  return b;
}

SweepSpec read_sweep(const Table& t) {
  Reader r(t, "sweep");
  SweepSpec s;
  s.variable = pick(r.string("variable", "eirp"), "sweep.variable", kSweepVars);
  s.points = static_cast<int>(r.integer("points", s.points));
  s.scale = pick(r.string("scale", "linear"), "sweep.scale", kScales);
  auto bound = [&](const std::string& key, double fallback) {
    switch (s.variable) {
      case SweepVariable::eirp: return r.unit(key, fallback, power_dbm);
      case SweepVariable::distance: return r.unit(key, fallback, distance_m);
      case SweepVariable::hops: return static_cast<double>(r.integer(key, std::llround(fallback)));
    }
    return fallback;
  };
  const double def_start = s.variable == SweepVariable::eirp ? 0.0 : 1.0;
  const double def_stop = s.variable == SweepVariable::eirp ? 50.0 : 10.0;
  s.start = bound("start", def_start);
  s.stop = bound("stop", def_stop);
  r.finish();
  return s;
}

McSpec read_mc(const Table& t) {
  Reader r(t, "mc");
  McSpec m;
  const auto trials = r.integer("trials", static_cast<std::int64_t>(m.trials));
  if (trials < 1) invalid("mc.trials must be >= 1");
  m.trials = static_cast<std::uint64_t>(trials);
  const auto seed = r.integer("seed", static_cast<std::int64_t>(m.seed));
  if (seed < 0) invalid("mc.seed must be non-negative");
  m.seed = static_cast<std::uint64_t>(seed);
  m.sigma = r.number("sigma", m.sigma);
  const auto workers = r.integer("workers", m.workers);
  if (workers < 1 || workers > 4096) invalid("mc.workers must be in [1, 4096]");
  m.workers = static_cast<unsigned>(workers);
  if (!(m.sigma > 0.0)) invalid("mc.sigma must be positive");
  r.finish();
  return m;
}

MetricSpec read_metric(const Table& t, std::size_t index) {
  Reader r(t, "metric[" + std::to_string(index) + "]");
  MetricSpec m;
  const Value* kind = r.get("kind");
  if (!kind || !kind->is_string()) invalid(r.path("kind") + " is required");
  m.kind = pick(kind->as_string(), r.path("kind"), kKinds);
  m.label = r.string("label", to_string(m.kind));
  m.threshold_db = r.unit("threshold", m.threshold_db, db);
  m.qam_order = static_cast<int>(r.integer("qam_order", m.qam_order));
  m.convention = pick(r.string("convention", "per_bit"), r.path("convention"), kConv);
  m.csi = pick(r.string("csi", "perfect"), r.path("csi"), kCsi);
  m.rho = r.number("rho", m.rho);
  m.stale_csi_mc = r.boolean("stale_csi_mc", m.stale_csi_mc);
  m.beam_t = static_cast<int>(r.integer("beam_t", m.beam_t));
  m.beam_r = static_cast<int>(r.integer("beam_r", m.beam_r));
  const std::string def_mode = m.kind == MetricKind::bler ? "linear" : "analytic";
  m.mc_mode = r.string("mc_mode", def_mode);
  m.rate = r.number("rate", m.rate);
  m.block_length = static_cast<int>(r.integer("block_length", m.block_length));
  m.reference_frequency_ghz = r.unit("reference_frequency", m.reference_frequency_ghz, frequency_ghz);
  m.circuit_power_w = r.unit("circuit_power", m.circuit_power_w, watts);
  m.allocation = pick(r.string("allocation", "uniform"), r.path("allocation"), kAlloc);
  r.finish();
  return m;
}

void validate(const Scenario& s) {
  if (s.name.empty()) invalid("name is required");
  for (char c : s.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      invalid("name may only contain letters, digits, '_' and '-'");
  const ChainSpec& c = s.chain;
  if (c.hops < 1 || c.hops > 64) invalid("chain.hops must be in [1, 64]");
  auto per_hop = [&](const std::vector<double>& v, const std::string& key) {
    if (v.size() != 1 && v.size() != static_cast<std::size_t>(c.hops) &&
        !(s.sweep.variable == SweepVariable::hops && v.size() == 1))
      invalid("chain." + key + " needs 1 or " + std::to_string(c.hops) + " entries");
    if (s.sweep.variable == SweepVariable::hops && v.size() != 1)
      invalid("chain." + key + " must be a single value when sweeping the hop count");
  };
  per_hop(c.alpha, "alpha");
  per_hop(c.omega, "omega");
  for (double a : c.alpha)
    if (!(a > 0.0)) invalid("chain.alpha must be positive");
  for (double w : c.omega)
    if (!(w > 0.0)) invalid("chain.omega must be positive");
  if (!c.hop_distances_m.empty()) {
    if (c.hop_distances_m.size() != static_cast<std::size_t>(c.hops))
      invalid("chain.hop_distances needs one entry per hop");
    if (s.sweep.variable != SweepVariable::eirp)
      invalid("chain.hop_distances can only be used with an EIRP sweep");
  }
  if (!(c.distance_m > 0.0)) invalid("chain.distance must be positive");
  if (!(c.bandwidth_hz > 0.0)) invalid("chain.bandwidth must be positive");
  try {
    s.budget.validate();
  } catch (const DomainError& e) {
    invalid(e.what());
  }

  const SweepSpec& w = s.sweep;
  if (w.points < 2) invalid("sweep.points must be >= 2");
  if (!(w.stop > w.start)) invalid("sweep.stop must exceed sweep.start");
  if (w.variable == SweepVariable::distance && !(w.start > 0.0)) invalid("sweep.start must be positive");
  if (w.variable == SweepVariable::hops) {
    if (w.start < 1 || w.stop > 64) invalid("hop sweep must stay within [1, 64]");
    if (w.points != static_cast<int>(w.stop - w.start) + 1)
      invalid("hop sweep needs points = stop - start + 1");
    if (w.scale != SweepScale::linear) invalid("hop sweep must be linear");
  }
  if (w.scale == SweepScale::log && !(w.start > 0.0)) invalid("log sweep needs a positive start");

  if (s.methods.empty()) invalid("methods must not be empty");
  if (s.metric_specs.empty()) invalid("at least one [[metric]] is required");
  std::set<std::string> labels;
  for (const auto& m : s.metric_specs) {
    const std::string where = "metric \"" + m.label + "\"";
    if (!labels.insert(m.label).second) invalid(where + ": duplicate label");
    for (char ch : m.label)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
        invalid(where + ": label may only contain letters, digits, '_' and '-'");
    if (m.kind == MetricKind::ber || m.kind == MetricKind::ser) {
      if (!metrics::is_valid_qam_order(m.qam_order))
        invalid(where + ": QAM order " + std::to_string(m.qam_order) +
                " is not a square power of two (4, 16, 64, ...)");
      if (m.mc_mode != "analytic" && m.mc_mode != "symbol")
        invalid(where + ": mc_mode must be analytic or symbol");
    }
    if (m.kind == MetricKind::bler) {
      if (m.mc_mode != "linear" && m.mc_mode != "normal")
        invalid(where + ": mc_mode must be linear or normal");
      if (!(m.rate > 0.0)) invalid(where + ": rate must be positive");
      if (m.block_length < 1) invalid(where + ": block_length must be >= 1");
    }
    if (m.kind == MetricKind::ber) {
      if (!(m.rho >= 0.0 && m.rho < 1.0)) invalid(where + ": rho must be in [0, 1)");
      if (m.beam_t != 0 && !(m.beam_r >= 1 && m.beam_r < m.beam_t))
        invalid(where + ": beamforming needs 1 <= beam_r < beam_t");
      if (m.beam_t != 0 && m.csi == Csi::outdated)
        invalid(where + ": beamforming and outdated CSI cannot be combined");
      if (m.stale_csi_mc && m.csi != Csi::outdated)
        invalid(where + ": stale_csi_mc needs csi = \"outdated\"");
    }
    if (m.kind == MetricKind::capacity_ratio && !(m.reference_frequency_ghz > 0.0))
      invalid(where + ": reference_frequency must be positive");
    if (m.kind == MetricKind::ee && !(m.circuit_power_w >= 0.0))
      invalid(where + ": circuit_power must be non-negative");
    if (m.allocation != Allocation::uniform) {
      if (m.allocation == Allocation::ber_optimal && m.kind != MetricKind::ber)
        invalid(where + ": ber_optimal allocation applies to ber only");
      if (m.allocation == Allocation::ee_optimal && m.kind != MetricKind::ee)
        invalid(where + ": ee_optimal allocation applies to ee only");
      if (m.kind == MetricKind::ber && (m.csi != Csi::perfect || m.beam_t != 0))
        invalid(where + ": allocation needs perfect CSI without beamforming");
    }
    if ((m.kind == MetricKind::ee || m.allocation != Allocation::uniform) && !common_alpha(c))
      invalid(where + ": needs the same alpha on every hop");
  }
  if (s.mc.trials < 1) invalid("mc.trials must be >= 1");
}

Table chain_table(const ChainSpec& c) {
  Table t;
  t.values["hops"] = Value{static_cast<std::int64_t>(c.hops)};
  auto list = [](const std::vector<double>& v) {
    if (v.size() == 1) return Value{v.front()};
    toml::Array a;
    for (double x : v) a.push_back(Value{x});
    return Value{a};
  };
  t.values["alpha"] = list(c.alpha);
  t.values["omega"] = list(c.omega);
  t.values["distance"] = Value{quantity(c.distance_m, "m")};
  if (!c.hop_distances_m.empty()) {
    toml::Array a;
    for (double d : c.hop_distances_m) a.push_back(Value{quantity(d, "m")});
    t.values["hop_distances"] = Value{a};
  }
  t.values["bandwidth"] = Value{quantity(c.bandwidth_hz, "Hz")};
  t.values["eirp"] = Value{quantity(c.eirp_dbm, "dBm")};
  return t;
}

Table budget_table(const LinkBudget& b) {
  Table t;
  t.values["frequency"] = Value{quantity(b.frequency_ghz, "GHz")};
  t.values["noise_psd"] = Value{quantity(b.noise_psd_dbm_hz, "dBm/Hz")};
  t.values["noise_figure"] = Value{quantity(b.noise_figure_db, "dB")};
  t.values["rx_loss"] = Value{quantity(b.rx_frontend_loss_db, "dB")};
  t.values["element_gain"] = Value{quantity(b.antenna_element_gain_db, "dB")};
  t.values["pathloss_exponent"] = Value{b.pathloss_exponent};
  t.values["pathloss_ref"] = Value{quantity(b.pathloss_ref_db_at_1m, "dB")};
  t.values["blockage"] = Value{quantity(b.blockage_db_per_m, "dB/m")};
  return t;
}

Table sweep_table(const SweepSpec& s) {
  Table t;
  t.values["variable"] = Value{to_string(s.variable)};
  t.values["points"] = Value{static_cast<std::int64_t>(s.points)};
  t.values["scale"] = Value{name_of(s.scale, kScales)};
  auto bound = [&](double v) {
    switch (s.variable) {
      case SweepVariable::eirp: return Value{quantity(v, "dBm")};
      case SweepVariable::distance: return Value{quantity(v, "m")};
      case SweepVariable::hops: return Value{static_cast<std::int64_t>(std::llround(v))};
    }
    return Value{v};
  };
  t.values["start"] = bound(s.start);
  t.values["stop"] = bound(s.stop);
  return t;
}

Table mc_table(const McSpec& m) {
  Table t;
  t.values["trials"] = Value{static_cast<std::int64_t>(m.trials)};
  t.values["seed"] = Value{static_cast<std::int64_t>(m.seed)};
  t.values["sigma"] = Value{m.sigma};
  t.values["workers"] = Value{static_cast<std::int64_t>(m.workers)};
  return t;
}

Table metric_table(const MetricSpec& m) {
  Table t;
  t.values["kind"] = Value{to_string(m.kind)};
  t.values["label"] = Value{m.label};
  t.values["threshold"] = Value{quantity(m.threshold_db, "dB")};
  t.values["qam_order"] = Value{static_cast<std::int64_t>(m.qam_order)};
  t.values["convention"] = Value{name_of(m.convention, kConv)};
  t.values["csi"] = Value{name_of(m.csi, kCsi)};
  t.values["rho"] = Value{m.rho};
  t.values["stale_csi_mc"] = Value{m.stale_csi_mc};
  t.values["beam_t"] = Value{static_cast<std::int64_t>(m.beam_t)};
  t.values["beam_r"] = Value{static_cast<std::int64_t>(m.beam_r)};
  t.values["mc_mode"] = Value{m.mc_mode};
  t.values["rate"] = Value{m.rate};
  t.values["block_length"] = Value{static_cast<std::int64_t>(m.block_length)};
  t.values["reference_frequency"] = Value{quantity(m.reference_frequency_ghz, "GHz")};
  t.values["circuit_power"] = Value{quantity(m.circuit_power_w, "W")};
  t.values["allocation"] = Value{name_of(m.allocation, kAlloc)};
  return t;
}

}  // namespace

double parse_power_dbm(const std::string& text) { return power_dbm(text, "power"); }
double parse_frequency_hz(const std::string& text) { return frequency_hz(text, "frequency"); }
double parse_distance_m(const std::string& text) { return distance_m(text, "distance"); }
double parse_db(const std::string& text) { return db(text, "ratio"); }

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    double v = scale == SweepScale::log ? start * std::pow(stop / start, f) : start + (stop - start) * f;
    if (i == points - 1) v = stop;
    if (variable == SweepVariable::hops) v = std::round(v);
    out.push_back(v);
  }
  return out;
}

std::string to_string(MetricKind k) { return name_of(k, kKinds); }
std::string to_string(SweepVariable v) { return name_of(v, kSweepVars); }

std::string sweep_column(SweepVariable v) {
  switch (v) {
    case SweepVariable::eirp: return "eirp_dbm";
    case SweepVariable::distance: return "distance_m";
    case SweepVariable::hops: return "hops";
  }
  return "x";
}

Scenario scenario_from_toml(const Table& t) {
  Reader r(t, "");
  Scenario s;
  s.name = r.string("name", "");
  s.description = r.string("description", "");
  if (const Value* v = r.get("methods")) {
    if (!v->is_array()) invalid("methods must be an array of strings");
    s.methods.clear();
    for (const auto& e : v->as_array()) {
      if (!e.is_string()) invalid("methods must be an array of strings");
      const auto m = pick(e.as_string(), "methods", kMethods);
      if (std::find(s.methods.begin(), s.methods.end(), m) == s.methods.end()) s.methods.push_back(m);
    }
  }
  r.finish({"chain", "budget", "sweep", "mc", "metric", "variant"});
  if (t.tables.count("metric") || t.tables.count("variant"))
    invalid("metric and variant must be written as [[metric]] and [[variant]]");
  for (const char* k : {"chain", "budget", "sweep", "mc"})
    if (t.arrays.count(k)) invalid(std::string(k) + " must be written as [" + k + "]");
  s.chain = read_chain(sub(t, "chain"));
  s.budget = read_budget(sub(t, "budget"));
  s.sweep = read_sweep(sub(t, "sweep"));
  s.mc = read_mc(sub(t, "mc"));
  if (auto it = t.arrays.find("metric"); it != t.arrays.end())
    for (std::size_t i = 0; i < it->second.size(); ++i) s.metric_specs.push_back(read_metric(it->second[i], i));
  validate(s);
  if (auto it = t.arrays.find("variant"); it != t.arrays.end()) {
    std::set<std::string> labels;
    for (const auto& vt : it->second) {
      Variant v;
      v.overrides = vt;
      auto lab = v.overrides.values.find("label");
      if (lab == v.overrides.values.end() || !lab->second.is_string())
        invalid("every [[variant]] needs a label");
      v.label = lab->second.as_string();
      v.overrides.values.erase(lab);
      if (v.label.empty() || v.label.find_first_of(",\"\n") != std::string::npos)
        invalid("variant label must be non-empty without commas or quotes");
      if (!labels.insert(v.label).second) invalid("duplicate variant label \"" + v.label + "\"");
      if (!v.overrides.values.empty())
        invalid("variant \"" + v.label + "\": only label and chain/budget/sweep/mc/metric tables are allowed");
      for (const auto& [k, tab] : v.overrides.tables)
        if (k != "chain" && k != "budget" && k != "sweep" && k != "mc" && k != "metric")
          invalid("variant \"" + v.label + "\": unknown table " + k);
      if (!v.overrides.arrays.empty()) invalid("variant \"" + v.label + "\": nested table arrays are not allowed");
      s.variants.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < s.variants.size(); ++i) {
      try {
        resolve_variant(s, i);
      } catch (const ValidationError& e) {
        invalid("variant \"" + s.variants[i].label + "\": " + e.what());
      }
    }
  }
  return s;
}

Table scenario_to_toml(const Scenario& s) {
  Table t;
  t.values["name"] = Value{s.name};
  t.values["description"] = Value{s.description};
  toml::Array methods;
  for (auto m : s.methods) methods.push_back(Value{name_of(m, kMethods)});
  t.values["methods"] = Value{methods};
  t.tables["chain"] = chain_table(s.chain);
  t.tables["budget"] = budget_table(s.budget);
  t.tables["sweep"] = sweep_table(s.sweep);
  t.tables["mc"] = mc_table(s.mc);
  for (const auto& m : s.metric_specs) t.arrays["metric"].push_back(metric_table(m));
  for (const auto& v : s.variants) {
    Table vt = v.overrides;
    vt.values["label"] = Value{v.label};
    t.arrays["variant"].push_back(vt);
  }
  return t;
}

std::string serialize(const Scenario& s) { return toml::dump(scenario_to_toml(s)); }

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_toml(toml::parse(ss.str()));
}

Scenario resolve_variant(const Scenario& s, std::size_t index) {
  if (s.variants.empty() && index == 0) return s;
  if (index >= s.variants.size()) throw std::out_of_range("variant index");
  Scenario base = s;
  base.variants.clear();
  Table t = scenario_to_toml(base);
  Table overlay = s.variants[index].overrides;
  Table metric_overlay;
  if (auto it = overlay.tables.find("metric"); it != overlay.tables.end()) {
    metric_overlay = it->second;
    overlay.tables.erase(it);
  }
  Table merged = toml::merge(t, overlay);
  for (auto& m : merged.arrays["metric"]) m = toml::merge(m, metric_overlay);
  return scenario_from_toml(merged);
}

HopChain build_chain(const Scenario& s, double x) {
  ChainSpec c = s.chain;
  switch (s.sweep.variable) {
    case SweepVariable::eirp: c.eirp_dbm = x; break;
    case SweepVariable::distance: c.distance_m = x; break;
    case SweepVariable::hops: c.hops = static_cast<int>(std::lround(x)); break;
  }
  HopChain chain;
  chain.budget = s.budget;
  auto at = [](const std::vector<double>& v, int i) { return v.size() == 1 ? v.front() : v[i]; };
  for (int i = 0; i < c.hops; ++i) {
    WeibullHop h;
    h.alpha = at(c.alpha, i);
    h.omega = at(c.omega, i);
    h.distance_m = c.hop_distances_m.empty() ? c.distance_m / c.hops : c.hop_distances_m[i];
    h.bandwidth_hz = c.bandwidth_hz;
    h.tx_power_dbm = c.eirp_dbm;
    chain.hops.push_back(h);
  }
  try {
    chain.validate();
  } catch (const DomainError& e) {
    invalid(e.what());
  }
  return chain;
}

}  // namespace wrelay::cli
