#include "wrelay/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "wrelay/allocation.hpp"
#include "wrelay/metrics/ber.hpp"
#include "wrelay/metrics/bler.hpp"
#include "wrelay/metrics/capacity.hpp"
#include "wrelay/metrics/energy.hpp"
#include "wrelay/metrics/outage.hpp"
#include "wrelay/metrics/ser.hpp"
#include "wrelay/simulate.hpp"
#include "wrelay/specfun/errors.hpp"

namespace wrelay::cli {

namespace {

namespace fs = std::filesystem;
using metrics::Method;
using metrics::Mode;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t metric, std::size_t variant, std::size_t point) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ metric);
  h = mix(h ^ (variant << 20));
  return mix(h ^ (point << 40));
}

// Split of the per-node circuit power over transmit, receive, modulation
// and demodulation, so that N hops consume N times the node figure.
metrics::PowerInventory inventory(double per_node_w) {
  metrics::PowerInventory inv;
  inv.tx = inv.rx = inv.mod = inv.demod = per_node_w / 4.0;
  inv.idle = 0.0;
  return inv;
}

double uniform_budget_w(const HopChain& chain) {
  double p = 0.0;
  for (const auto& h : chain.hops) p += dbm_to_watts(h.tx_power_dbm);
  return p;
}

const std::vector<std::string> kExtraOrder{"mc_normal", "mc_normal_half_width", "mc_stale_csi",
                                          "mc_stale_csi_half_width", "exact_uniform"};

std::vector<std::string> extra_columns(const MetricSpec& m) {
  if (m.kind == MetricKind::bler) return {"mc_normal", "mc_normal_half_width"};
  if (m.kind == MetricKind::ber && m.stale_csi_mc) return {"mc_stale_csi", "mc_stale_csi_half_width"};
  if (m.allocation != Allocation::uniform) return {"exact_uniform"};
  return {};
}

struct PointValues {
  double exact = kNaN;
  double asymptotic = kNaN;
  double mc = kNaN;
  double half_width = kNaN;
  std::map<std::string, double> extras;
};

struct Want {
  bool exact, asymptotic, mc;
};

PointValues evaluate_point(const Scenario& s, const MetricSpec& m, double x, const Want& want,
                           const sim::McConfig& cfg) {
  PointValues out;
  HopChain chain = build_chain(s, x);
  auto set_mc = [&](const sim::McEstimate& e) {
    out.mc = e.mean;
    out.half_width = e.half_width;
  };

  switch (m.kind) {
    case MetricKind::outage: {
      const auto hops = chain_snr(chain);
      const double th = std::pow(10.0, m.threshold_db / 10.0);
      if (want.exact) out.exact = metrics::outage(hops, th, Mode::exact);
      if (want.asymptotic) out.asymptotic = metrics::outage(hops, th, Mode::asymptotic);
      if (want.mc) set_mc(sim::mc_outage(hops, th, cfg));
      break;
    }
    case MetricKind::ber: {
      const auto q = metrics::qam_coefficients(m.qam_order, m.convention);
      const auto mode = m.mc_mode == "symbol" ? sim::BerMcMode::symbol : sim::BerMcMode::analytic;
      if (m.csi == Csi::outdated) {
        const auto hops = chain_snr(chain);
        if (want.exact) {
          std::vector<double> per_hop;
          for (const auto& h : hops) per_hop.push_back(metrics::ber_hop_outdated_csi(h, q, m.rho));
          out.exact = metrics::ber_e2e(per_hop);
        }
        if (want.mc) set_mc(sim::mc_ber_outdated(hops, q, m.rho, cfg, mode));
        if (m.stale_csi_mc) {
          if (want.mc) {
            const auto e = sim::mc_ber_outdated(hops, q, m.rho, cfg, sim::BerMcMode::symbol);
            out.extras = {{"mc_stale_csi", e.mean}, {"mc_stale_csi_half_width", e.half_width}};
          }
        }
      } else if (m.beam_t > 0) {
        const auto hops = chain_snr(chain);
        if (want.exact) {
          std::vector<double> per_hop;
          for (const auto& h : hops)
            per_hop.push_back(metrics::ber_hop_beamforming(h, q, m.beam_t, m.beam_r));
          out.exact = metrics::ber_e2e(per_hop);
        }
        if (want.mc) set_mc(sim::mc_ber_beamforming(hops, q, m.beam_t, m.beam_r, cfg));
      } else {
        if (m.allocation == Allocation::ber_optimal) {
          const double uniform = want.exact ? metrics::ber_chain(chain_snr(chain), q, Mode::exact) : kNaN;
          out.extras = {{"exact_uniform", uniform}};
          chain = with_powers(chain, allocate_ber_optimal(chain, q, uniform_budget_w(chain)).powers);
        }
        const auto hops = chain_snr(chain);
        if (want.exact) out.exact = metrics::ber_chain(hops, q, Mode::exact);
        if (want.asymptotic) out.asymptotic = metrics::ber_chain(hops, q, Mode::asymptotic);
        if (want.mc) set_mc(sim::mc_ber(hops, q, cfg, mode));
      }
      break;
    }
    case MetricKind::ser: {
      const auto q = metrics::qam_coefficients(m.qam_order, m.convention);
      const auto mode = m.mc_mode == "symbol" ? sim::BerMcMode::symbol : sim::BerMcMode::analytic;
      const auto hops = chain_snr(chain);
      if (want.exact) out.exact = metrics::ser_chain(hops, q, Mode::exact);
      if (want.asymptotic) out.asymptotic = metrics::ser_chain(hops, q, Mode::asymptotic);
      if (want.mc) set_mc(sim::mc_ser(hops, q, cfg, mode));
      break;
    }
    case MetricKind::bler: {
      metrics::BlerParams p;
      p.rate = m.rate;
      p.block_length = m.block_length;
      const auto hops = chain_snr(chain);
      if (want.exact) out.exact = metrics::bler_chain(hops, p);
      const auto main_mode = m.mc_mode == "normal" ? sim::BlerMcMode::normal : sim::BlerMcMode::linear;
      if (want.mc) {
        set_mc(sim::mc_bler(hops, p, cfg, main_mode));
        const auto e = sim::mc_bler(hops, p, cfg, sim::BlerMcMode::normal);
        out.extras = {{"mc_normal", e.mean}, {"mc_normal_half_width", e.half_width}};
      }
      break;
    }
    case MetricKind::capacity: {
      const auto hops = chain_snr(chain);
      if (want.exact) out.exact = metrics::capacity_e2e(hops, Mode::exact);
      if (want.asymptotic) out.asymptotic = metrics::capacity_e2e(hops, Mode::asymptotic);
      if (want.mc) set_mc(sim::mc_capacity(hops, cfg));
      break;
    }
    case MetricKind::capacity_ratio: {
      HopChain ref = chain;
      ref.budget.frequency_ghz = m.reference_frequency_ghz;
      const auto a = chain_snr(chain);
      const auto b = chain_snr(ref);
      if (want.exact) out.exact = metrics::capacity_e2e(a, Mode::exact) / metrics::capacity_e2e(b, Mode::exact);
      if (want.asymptotic) {
        const double ca = metrics::capacity_e2e(a, Mode::asymptotic);
        const double cb = metrics::capacity_e2e(b, Mode::asymptotic);
        if (ca > 0.0 && cb > 0.0) out.asymptotic = ca / cb;
      }
      break;
    }
    case MetricKind::ee: {
      const auto inv = inventory(m.circuit_power_w);
      if (m.allocation == Allocation::ee_optimal) {
        const double uniform = want.exact ? metrics::ee_e2e(chain, inv, Mode::exact) : kNaN;
        out.extras = {{"exact_uniform", uniform}};
        chain = with_powers(chain, allocate_ee_optimal(chain, inv, uniform_budget_w(chain)).powers);
      }
      const auto hops = chain_snr(chain);
      const double pt = metrics::total_power(chain, inv);
      if (want.exact) out.exact = metrics::ee_e2e(hops, pt, Mode::exact);
      if (want.asymptotic) out.asymptotic = metrics::ee_e2e(hops, pt, Mode::asymptotic);
      if (want.mc) set_mc(sim::mc_ee(hops, pt, cfg));
      break;
    }
  }
  return out;
}

struct Task {
  std::size_t table;
  std::size_t variant;
  std::size_t metric;
  std::size_t point;
  double x;
};

}  // namespace

std::string CsvTable::text() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::vector<metrics::Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Method m;
    if (item == "exact") m = Method::exact;
    else if (item == "asymptotic") m = Method::asymptotic;
    else if (item == "mc") m = Method::monte_carlo;
    else throw ValidationError("unknown method \"" + item + "\" (expected exact, asymptotic, mc)");
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw ValidationError("methods must not be empty");
  return out;
}

std::vector<CsvTable> evaluate_scenario(const Scenario& s, const RunOptions& opt) {
  const std::size_t nv = std::max<std::size_t>(1, s.variants.size());
  std::vector<Scenario> resolved;
  for (std::size_t v = 0; v < nv; ++v) resolved.push_back(resolve_variant(s, v));

  const auto methods = opt.methods.value_or(s.methods);
  auto has = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  const Want want{has(Method::exact), has(Method::asymptotic), has(Method::monte_carlo)};

  std::vector<CsvTable> tables;
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < s.metric_specs.size(); ++mi) {
    CsvTable t;
    t.file_name = s.name + "_" + s.metric_specs[mi].label + ".csv";
    t.header = {"variant", sweep_column(s.sweep.variable), "exact", "asymptotic", "mc", "mc_half_width"};
    std::set<std::string> extras;
    for (const auto& r : resolved)
      for (const auto& e : extra_columns(r.metric_specs[mi])) extras.insert(e);
    for (const auto& e : kExtraOrder)
      if (extras.count(e)) t.header.push_back(e);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto xs = resolved[v].sweep.values();
      for (std::size_t p = 0; p < xs.size(); ++p) {
        tasks.push_back({mi, v, mi, p, xs[p]});
        t.rows.emplace_back();
      }
    }
    tables.push_back(std::move(t));
  }

  std::vector<std::exception_ptr> errors(tasks.size());
  std::vector<std::size_t> row_of(tasks.size());
  {
    std::vector<std::size_t> next_row(tables.size(), 0);
    for (std::size_t i = 0; i < tasks.size(); ++i) row_of[i] = next_row[tasks[i].table]++;
  }

  auto run_task = [&](std::size_t i) {
    const Task& k = tasks[i];
    const Scenario& r = resolved[k.variant];
    const MetricSpec& m = r.metric_specs[k.metric];
    const std::string vlabel = s.variants.empty() ? "" : s.variants[k.variant].label;
    sim::McConfig cfg;
    cfg.trials = opt.trials.value_or(r.mc.trials);
    cfg.seed = point_seed(opt.seed.value_or(r.mc.seed), k.metric, k.variant, k.point);
    cfg.confidence_sigma = r.mc.sigma;
    cfg.workers = r.mc.workers;
    cfg.threads = 1;
    const std::string where = "metric \"" + m.label + "\"" +
                              (vlabel.empty() ? "" : ", variant \"" + vlabel + "\"") + ", " +
                              sweep_column(r.sweep.variable) + " = " + fmt(k.x);
    try {
      const PointValues pv = evaluate_point(r, m, k.x, want, cfg);
      std::vector<std::string> row{vlabel, fmt(k.x), fmt(pv.exact), fmt(pv.asymptotic), fmt(pv.mc),
                                   fmt(pv.half_width)};
      const auto& header = tables[k.table].header;
      for (std::size_t c = row.size(); c < header.size(); ++c) {
        auto it = pv.extras.find(header[c]);
        row.push_back(it == pv.extras.end() ? "" : fmt(it->second));
      }
      tables[k.table].rows[row_of[i]] = std::move(row);
    } catch (const NonConvergenceError& e) {
      errors[i] = std::make_exception_ptr(PointError(where + ": " + e.what()));
    } catch (const ContourSeparationError& e) {
      errors[i] = std::make_exception_ptr(PointError(where + ": " + e.what()));
    } catch (const DomainError& e) {
      errors[i] = std::make_exception_ptr(ValidationError(where + ": " + e.what()));
    } catch (const ValidationError& e) {
      errors[i] = std::make_exception_ptr(ValidationError(where + ": " + e.what()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
      });
    for (auto& th : pool) th.join();
  }
  // Report the first failure in sweep order so the message does not depend
  // on scheduling.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return tables;
}

std::vector<std::string> run_scenario(const Scenario& s, const RunOptions& opt) {
  const auto tables = evaluate_scenario(s, opt);
  fs::create_directories(opt.out_dir);
  std::vector<std::string> paths;
  for (const auto& t : tables) {
    const fs::path p = fs::path(opt.out_dir) / t.file_name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << t.text();
    if (!out) throw std::runtime_error("write failed for " + p.string());
    paths.push_back(p.string());
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Agreement report

std::size_t AgreementReport::compared() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.compared;
  return n;
}

std::size_t AgreementReport::passed() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.passed;
  return n;
}

double AgreementReport::pass_rate() const {
  const auto n = compared();
  return n == 0 ? 1.0 : static_cast<double>(passed()) / static_cast<double>(n);
}

FileAgreement check_agreement(const std::string& file_name, const std::string& csv_text) {
  FileAgreement fa;
  fa.file = file_name;
  std::istringstream in(csv_text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : l) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    f.push_back(cur);
    return f;
  };
  if (!std::getline(in, line) || line.empty()) throw ReportError(file_name + ": empty CSV");
  const auto header = split(line);
  auto col = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ReportError(file_name + ": missing column \"" + name + "\"");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ce = col("exact"), cm = col("mc"), ch = col("mc_half_width");
  const std::size_t cv = col("variant");
  const std::size_t cx = header.size() > 1 ? 1 : 0;

  auto number = [&](const std::string& f, std::size_t lineno, double& v) {
    if (f.empty()) return false;
    char* end = nullptr;
    v = std::strtod(f.c_str(), &end);
    if (end != f.c_str() + f.size())
      throw ReportError(file_name + ": line " + std::to_string(lineno) + ": invalid number \"" + f + "\"");
    return true;
  };

  std::size_t lineno = 1;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    ++data_rows;
    const auto f = split(line);
    if (f.size() != header.size())
      throw ReportError(file_name + ": line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    RowCheck r;
    r.line = lineno;
    r.variant = f[cv];
    r.x = f[cx];
    if (!number(f[ce], lineno, r.exact) || !number(f[cm], lineno, r.mc) || !number(f[ch], lineno, r.half_width))
      continue;
    if (r.half_width >= std::abs(r.mc) || r.half_width == 0.0) {
      ++fa.unresolved;
      continue;
    }
    ++fa.compared;
    if (std::abs(r.exact - r.mc) <= r.half_width * (1.0 + 1e-9) + 1e-15)
      ++fa.passed;
    else
      fa.flagged.push_back(r);
  }
  if (data_rows == 0) throw ReportError(file_name + ": no data rows");
  return fa;
}

AgreementReport report_agreement(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ReportError(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ReportError(dir + ": no CSV files");
  AgreementReport rep;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    rep.files.push_back(check_agreement(p.filename().string(), ss.str()));
  }
  return rep;
}

std::string format_report(const AgreementReport& r) {
  std::ostringstream os;
  char buf[256];
  for (const auto& f : r.files) {
    if (f.compared == 0 && f.unresolved == 0) {
      os << f.file << ": no exact/mc pairs\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%s: %zu/%zu within the MC half-width (%.2f%%), %zu unresolved\n",
                  f.file.c_str(), f.passed, f.compared,
                  f.compared ? 100.0 * static_cast<double>(f.passed) / static_cast<double>(f.compared) : 100.0,
                  f.unresolved);
    os << buf;
    for (const auto& row : f.flagged) {
      std::snprintf(buf, sizeof buf, "  flagged line %zu%s%s x=%s: exact=%.6g mc=%.6g half_width=%.3g\n",
                    row.line, row.variant.empty() ? "" : " variant=", row.variant.c_str(), row.x.c_str(),
                    row.exact, row.mc, row.half_width);
      os << buf;
    }
  }
  std::snprintf(buf, sizeof buf, "total: %zu/%zu points agree (%.2f%%)\n", r.passed(), r.compared(),
                100.0 * r.pass_rate());
  os << buf;
  return os.str();
}

}  // namespace wrelay::cli
