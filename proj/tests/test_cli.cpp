#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wrelay/cli/runner.hpp"
#include "wrelay/cli/scenario.hpp"
#include "wrelay/cli/toml.hpp"

using namespace wrelay;
using namespace wrelay::cli;
namespace fs = std::filesystem;

namespace {

const std::string kSmall = R"(
name = "small"
methods = ["exact", "asymptotic", "mc"]

[chain]
hops = 2
beta = 2.0
distance = "200 m"
bandwidth = "200 MHz"

[sweep]
variable = "eirp"
start = "10 dBm"
stop = "50 dBm"
points = 5

[mc]
trials = 4000
seed = 11

[[metric]]
kind = "outage"
threshold = "0 dB"

[[metric]]
kind = "ber"
label = "ber16"
qam_order = 16

[[variant]]
label = "a"

[[variant]]
label = "b"
chain.distance = "400 m"
)";

Scenario parse_text(const std::string& text) { return scenario_from_toml(toml::parse(text)); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wrelay_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WRELAY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("toml subset parser") {
  const auto t = toml::parse(R"(
# comment
a = 1
b = 2.5   # trailing comment
c = "x \"y\""
d = [1, 2.0, "three", true]
e.f = false

[g]
h = -3e-2

[[i]]
j = 1
[[i]]
j = 2
)");
  CHECK(t.values.at("a").as_integer() == 1);
  CHECK(t.values.at("b").as_number() == 2.5);
  CHECK(t.values.at("c").as_string() == "x \"y\"");
  CHECK(t.values.at("d").as_array().size() == 4);
  CHECK(t.tables.at("e").values.at("f").as_bool() == false);
  CHECK(t.tables.at("g").values.at("h").as_number() == doctest::Approx(-0.03));
  CHECK(t.arrays.at("i").size() == 2);
  CHECK(toml::parse(toml::dump(t)) == t);

  auto error_line = [](const std::string& text) {
    try {
      toml::parse(text);
    } catch (const toml::ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(error_line("a = 1\na = 2\n") == 2);
  CHECK(error_line("a = \n") == 1);
  CHECK(error_line("x = 1\n[t\n") == 2);
  CHECK(error_line("s = \"open\n") == 1);
  CHECK(error_line("v = dBm\n") == 1);
  CHECK(error_line("v = [1, 2\n") == 1);
  CHECK(error_line("v = 1 2\n") == 1);
}

TEST_CASE("toml merge") {
  const auto base = toml::parse("a = 1\n[t]\nx = 1\ny = 2\n");
  const auto over = toml::parse("[t]\ny = 3\nz = 4\n");
  const auto m = toml::merge(base, over);
  CHECK(m.values.at("a").as_integer() == 1);
  CHECK(m.tables.at("t").values.at("x").as_integer() == 1);
  CHECK(m.tables.at("t").values.at("y").as_integer() == 3);
  CHECK(m.tables.at("t").values.at("z").as_integer() == 4);
}

TEST_CASE("strict units") {
  CHECK(parse_power_dbm("23 dBm") == 23.0);
  CHECK(parse_power_dbm("1 W") == doctest::Approx(30.0));
  CHECK(parse_power_dbm("1 mW") == doctest::Approx(0.0));
  CHECK(parse_frequency_hz("200 MHz") == 200e6);
  CHECK(parse_frequency_hz("1.4 MHz") == doctest::Approx(1.4e6));
  CHECK(parse_frequency_hz("180 kHz") == 180e3);
  CHECK(parse_distance_m("1.5 km") == 1500.0);
  CHECK(parse_db("-20 dB") == -20.0);

  CHECK_THROWS_AS(parse_power_dbm("23dBm"), ValidationError);
  CHECK_THROWS_AS(parse_power_dbm("23 dbm"), ValidationError);
  CHECK_THROWS_AS(parse_power_dbm("23"), ValidationError);
  CHECK_THROWS_AS(parse_power_dbm("23  dBm"), ValidationError);
  CHECK_THROWS_AS(parse_power_dbm("23 dB"), ValidationError);
  CHECK_THROWS_AS(parse_power_dbm("-1 W"), ValidationError);
  CHECK_THROWS_AS(parse_frequency_hz("200 mhz"), ValidationError);
  CHECK_THROWS_AS(parse_distance_m("x m"), ValidationError);
  CHECK_THROWS_AS(parse_db("3 dBm"), ValidationError);

  // A bare number where a unit is required.
  CHECK_THROWS_AS(parse_text(replace(kSmall, "distance = \"200 m\"", "distance = 200")), ValidationError);
}

TEST_CASE("scenario validation") {
  CHECK_NOTHROW(parse_text(kSmall));
  CHECK_THROWS_AS(parse_text(replace(kSmall, "qam_order = 16", "qam_order = 8")), ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "hops = 2", "hops = 2\nhopz = 3")), ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "points = 5", "points = 1")), ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "methods = [\"exact\", \"asymptotic\", \"mc\"]", "methods = []")),
                  ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "beta = 2.0", "beta = [2.0, 2.0, 2.0]")), ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "beta = 2.0", "beta = 2.0\nalpha = 1.0")), ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "kind = \"outage\"", "kind = \"goodput\"")), ValidationError);
  // Errors inside a variant are reported at load time.
  CHECK_THROWS_AS(parse_text(replace(kSmall, "chain.distance = \"400 m\"", "chain.distance = \"400 furlongs\"")),
                  ValidationError);
  CHECK_THROWS_AS(parse_text(replace(kSmall, "label = \"b\"", "label = \"a\"")), ValidationError);

  const Scenario s = parse_text(kSmall);
  CHECK(s.chain.alpha == std::vector<double>{1.0});
  CHECK(s.metric_specs[0].label == "outage");
  CHECK(s.sweep.values() == std::vector<double>{10, 20, 30, 40, 50});
}

TEST_CASE("scenario round trip") {
  const Scenario s = parse_text(kSmall);
  const Scenario back = parse_text(serialize(s));
  CHECK(back == s);
  CHECK(serialize(back) == serialize(s));

  for (const auto& e : fs::directory_iterator(WRELAY_SCENARIO_DIR)) {
    if (e.path().extension() != ".toml") continue;
    CAPTURE(e.path().string());
    const Scenario f = load_scenario(e.path().string());
    CHECK(parse_text(serialize(f)) == f);
  }
}

TEST_CASE("variant resolution") {
  const Scenario s = parse_text(kSmall);
  const Scenario b = resolve_variant(s, 1);
  CHECK(b.variants.empty());
  CHECK(b.chain.distance_m == 400.0);
  CHECK(b.chain.hops == 2);
  const HopChain c = build_chain(b, 30.0);
  REQUIRE(c.hops.size() == 2);
  CHECK(c.hops[0].distance_m == 200.0);
  CHECK(c.hops[1].tx_power_dbm == 30.0);

  const Scenario m = parse_text(replace(kSmall, "chain.distance = \"400 m\"", "metric.qam_order = 64"));
  const Scenario mb = resolve_variant(m, 1);
  CHECK(mb.metric_specs[1].qam_order == 64);
  CHECK(mb.metric_specs[0].kind == MetricKind::outage);
}

TEST_CASE("csv layout and determinism") {
  const Scenario s = parse_text(kSmall);
  RunOptions opt;
  opt.threads = 1;
  const auto a = evaluate_scenario(s, opt);
  REQUIRE(a.size() == 2);
  CHECK(a[0].file_name == "small_outage.csv");
  CHECK(a[1].file_name == "small_ber16.csv");
  CHECK(a[0].text().substr(0, a[0].text().find('\n')) == "variant,eirp_dbm,exact,asymptotic,mc,mc_half_width");
  CHECK(a[0].rows.size() == 10);
  CHECK(a[0].rows[0][0] == "a");
  CHECK(a[0].rows[5][0] == "b");
  CHECK(a[0].rows[5][1] == "10");

  opt.threads = 3;
  const auto b = evaluate_scenario(s, opt);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text() == b[i].text());

  opt.seed = 12;
  const auto c = evaluate_scenario(s, opt);
  CHECK(a[1].text() != c[1].text());

  RunOptions exact_only;
  exact_only.methods = parse_methods("exact");
  const auto e = evaluate_scenario(s, exact_only);
  for (const auto& row : e[0].rows) {
    CHECK(!row[2].empty());
    CHECK(row[3].empty());
    CHECK(row[4].empty());
    CHECK(row[5].empty());
  }
  CHECK_THROWS_AS(parse_methods("exact,simulation"), ValidationError);
}

TEST_CASE("bandwidth only shifts the outage curve") {
  // The 1 MHz sweep starts 10 log10(200) dB lower, so both variants must
  // produce identical outage values row by row.
  const std::string text = replace(replace(kSmall, "[[variant]]\nlabel = \"b\"\nchain.distance = \"400 m\"",
                                           "[[variant]]\nlabel = \"b\"\nchain.bandwidth = \"1 MHz\"\n"
                                           "sweep.start = \"-13.010299956639813 dBm\"\n"
                                           "sweep.stop = \"26.989700043360187 dBm\""),
                                   "trials = 4000", "trials = 10");
  RunOptions opt;
  opt.methods = parse_methods("exact,asymptotic");
  const auto t = evaluate_scenario(parse_text(text), opt);
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = std::stod(t[0].rows[i][2]);
    const double b = std::stod(t[0].rows[i + 5][2]);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("agreement report") {
  const Scenario s = parse_text(replace(kSmall, "trials = 4000", "trials = 20000"));
  const fs::path dir = temp_dir("report");
  RunOptions opt;
  opt.out_dir = dir.string();
  const auto paths = run_scenario(s, opt);
  REQUIRE(paths.size() == 2);
  const auto healthy = report_agreement(dir.string());
  CHECK(healthy.compared() > 0);
  CHECK(healthy.pass_rate() >= 0.9);

  // Corrupt the exact column of every data row.
  std::string text = slurp(paths[1]);
  std::istringstream in(text);
  std::string line, out;
  std::getline(in, line);
  out = line + "\n";
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    while (f.size() < 6) f.push_back("");
    if (!f[2].empty()) f[2] = std::to_string(std::stod(f[2]) * 3.0 + 0.01);
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += "\n";
  }
  const auto bad = check_agreement("corrupt.csv", out);
  CHECK(bad.compared > 0);
  CHECK(bad.flagged.size() == bad.compared);
  CHECK(format_report(AgreementReport{{bad}}).find("flagged line") != std::string::npos);

  CHECK_THROWS_AS(check_agreement("empty.csv", ""), ReportError);
  CHECK_THROWS_AS(check_agreement("header_only.csv", "variant,eirp_dbm,exact,mc,mc_half_width\n"), ReportError);
  CHECK_THROWS_AS(check_agreement("no_mc.csv", "variant,eirp_dbm,exact\na,1,0.5\n"), ReportError);
  CHECK_THROWS_AS(check_agreement("bad_number.csv", "variant,x,exact,mc,mc_half_width\na,1,zz,0.5,0.1\n"),
                  ReportError);
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = temp_dir("exit");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string out = (dir / "out").string();
  CHECK(run_cli("run " + write("ok.toml", replace(kSmall, "trials = 4000", "trials = 100")) + " --out " + out) == 0);
  CHECK(fs::exists(dir / "out" / "small_ber16.csv"));
  CHECK(run_cli("report " + out) == 0);
  CHECK(run_cli("run " + write("syntax.toml", "name = \n")) == 2);
  CHECK(run_cli("run " + write("m8.toml", replace(kSmall, "qam_order = 16", "qam_order = 8"))) == 3);
  CHECK(run_cli("run " + (dir / "missing.toml").string()) == 2);
  CHECK(run_cli("run " + write("ok2.toml", kSmall) + " --methods exact,bogus") == 3);
  write("empty.csv", "");
  CHECK(run_cli("report " + dir.string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("selftest") == 0);
  fs::remove_all(dir);
}
