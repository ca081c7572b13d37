#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "apwb/harness/config.hpp"
#include "apwb/harness/csv.hpp"
#include "apwb/harness/experiments.hpp"
#include "doctest.h"

using namespace apwb;
using namespace apwb::harness;

namespace {

std::string to_text(const CsvTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

ExperimentConfig quick(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.record_timing = false;
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("l1_error examples") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(l1_error(a, a, 0.01) == 0.0);
    CHECK(l1_error(std::vector<double>{1.0, 2.5}, std::vector<double>{1.0, 2.0}, 0.01) ==
          doctest::Approx(0.005).epsilon(1e-14));
    CHECK(l1_error(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0}, 1.0) == 3.0);
    CHECK_THROWS_AS(l1_error(a, std::vector<double>{1.0}, 1.0), std::invalid_argument);
  }

  TEST_CASE("norm and resampling helpers") {
    CHECK(max_error(std::vector<double>{1, 5, 2}, std::vector<double>{1, 3, 2}) == 2.0);
    CHECK(total_variation(std::vector<double>{1, 3, 2}, false) == 3.0);
    CHECK(total_variation(std::vector<double>{1, 3, 2}, true) == 4.0);
    CHECK(coarsen(std::vector<double>{1, 3, 5, 7}, 2) == std::vector<double>{2, 6});
    CHECK_THROWS(coarsen(std::vector<double>{1, 2, 3}, 2));
  }

  TEST_CASE("config parsing, echo and flag precedence") {
    std::istringstream file("# comment\n\neps = 0.01\ncells=200\npotential=sine\nbc=periodic\n");
    ExperimentConfig c;
    apply_settings(c, parse_key_values(file));
    apply_settings(c, {{"--cells", "50"}, {"t_final", "0.5"}});
    CHECK(*c.epsilon == 0.01);
    CHECK(*c.cells == 50);
    CHECK(*c.t_final == 0.5);
    CHECK(*c.potential == PotentialKind::Sinusoidal);
    CHECK(*c.bc == BoundaryKind::Periodic);
    CHECK(!c.beta);
    validate(c);

    const KeyValues e = echo(c);
    bool saw_cells = false;
    for (const auto& [k, v] : e)
      if (k == "cells") saw_cells = v == "50";
    CHECK(saw_cells);
  }

  TEST_CASE("configuration errors") {
    ExperimentConfig c;
    CHECK_THROWS_AS(apply_setting(c, "nonsense", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "eps", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "cells", "-3"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "potential", "cubic"), ConfigError);
    std::istringstream bad("eps 0.1\n");
    CHECK_THROWS_AS(parse_key_values(bad), ConfigError);

    apply_setting(c, "eps", "2");
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    apply_setting(c, "t-final", "0");
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    apply_setting(c, "gamma", "1");
    apply_setting(c, "recon", "e");
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    apply_setting(c, "cells", "1");
    CHECK_THROWS_AS(validate(c), ConfigError);
  }

  TEST_CASE("number formatting round-trips") {
    for (double v : {0.0, 1.0, -2.5, 1e-300, 2.6815e-06, 0.1 + 0.2, 123456789.123})
      CHECK(parse_number(format_number(v)) == v);
    CHECK(std::isnan(parse_number(format_number(std::nan("")))));
    CHECK(parse_number(format_number(INFINITY)) == INFINITY);
    CHECK_THROWS_AS(parse_number("1.0x"), CsvError);
    CHECK_THROWS_AS(parse_number(""), CsvError);
  }

  TEST_CASE("CSV round-trip and schema validation") {
    CsvTable t;
    t.add_metadata("eps", "0.001");
    t.add_metadata("version", "v0.1.0");
    t.columns = {"x", "rho", "q", "u"};
    t.rows = {{"0.005", "1", "0", "0"}, {"0.015", "0.9", "-1e-05", "-1.1111111111111112e-05"}};
    std::istringstream in(to_text(t));
    const CsvTable back = read_csv(in);
    CHECK(back.metadata == t.metadata);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.meta("eps") == "0.001");
    CHECK(back.column_values("rho") == std::vector<double>{1.0, 0.9});
    validate_schema(back, CsvSchema::Profile);

    CsvTable wrong = back;
    wrong.columns[2] = "m";
    try {
      validate_schema(wrong, CsvSchema::Profile);
      FAIL("expected a schema error");
    } catch (const CsvError& e) {
      CHECK(std::string(e.what()).find("'q'") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_schema(back, CsvSchema::Table), CsvError);

    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ragged), CsvError);
    std::istringstream empty("# only=metadata\n");
    CHECK_THROWS_AS(read_csv(empty), CsvError);
  }

  TEST_CASE("single runs are byte-reproducible") {
    ExperimentConfig c = quick(ExperimentKind::Run);
    apply_settings(c, {{"init", "sod"}, {"cells", "50"}, {"t-final", "0.05"}});
    const ExperimentReport a = run_experiment(c);
    const ExperimentReport b = run_experiment(c);
    REQUIRE(a.files.size() == 1);
    CHECK(a.files[0].name == "run.csv");
    CHECK(to_text(a.files[0].table) == to_text(b.files[0].table));
    CHECK(!a.stability_violated);
    validate_schema(a.files[0].table, CsvSchema::Profile);
    CHECK(a.files[0].table.meta("wall_seconds").empty());
    CHECK(!a.files[0].table.meta("version").empty());
    CHECK(a.files[0].table.meta("config.init") == "sod");
  }

  TEST_CASE("table jobs give the same bytes for any worker count") {
    ExperimentConfig c = quick(ExperimentKind::HydroTable);
    apply_settings(c, {{"eps", "1"}, {"cells", "40"}, {"t-final", "0.05"}});
    c.jobs = 1;
    const ExperimentReport a = run_experiment(c);
    c.jobs = 3;
    const ExperimentReport b = run_experiment(c);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      CHECK(a.files[i].name == b.files[i].name);
      CHECK(to_text(a.files[i].table) == to_text(b.files[i].table));
      validate_schema(a.files[i].table, CsvSchema::Table);
      CHECK(a.files[i].table.rows.size() == 3);
    }
  }

  TEST_CASE("written reports read back through the CSV reader") {
    const auto dir = std::filesystem::temp_directory_path() / "apwb_harness_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c = quick(ExperimentKind::Run);
    apply_settings(c, {{"cells", "20"}, {"t-final", "0.01"}, {"out", dir.string()}});
    const ExperimentReport r = run_experiment(c);
    write_report(r, c);
    const CsvTable back = read_csv_file(dir / "run.csv");
    CHECK(to_text(back) == to_text(r.files[0].table));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("a blow-up in a single run is flagged and recorded") {
    ExperimentConfig c = quick(ExperimentKind::Run);
    apply_settings(c,
                   {{"init", "arch"}, {"eps", "0.001"}, {"variant", "nonap"}, {"t-final", "0.05"}});
    const ExperimentReport r = run_experiment(c);
    CHECK(r.stability_violated);
    REQUIRE(r.files.size() == 1);
    CHECK(r.files[0].table.meta("status") == "blow-up");
    CHECK(r.files[0].table.rows.empty());
  }

  TEST_CASE("unperturbed discrete equilibrium stays put in the perturbation driver") {
    ExperimentConfig c = quick(ExperimentKind::Perturb);
    apply_settings(c, {{"zeta", "0"}, {"bc", "hydrostatic"}, {"t-final", "0.01"}});
    const PerturbResult r = perturb_experiment(c);
    CHECK(r.amp_wb <= 1e-12);
  }

  TEST_CASE("longtime driver samples the requested window") {
    ExperimentConfig c = quick(ExperimentKind::Longtime);
    apply_settings(c, {{"eps", "1"}, {"t-final", "0.02"}, {"cells", "50"}});
    const LongtimeResult r = longtime_experiment(c);
    REQUIRE(r.series.size() == 2);
    for (const TimeSeries& s : r.series) {
      CHECK(!s.t.empty());
      CHECK(s.t.back() == doctest::Approx(0.02).epsilon(1e-12));
      CHECK(s.t.size() == s.max_q.size());
      CHECK(s.t.size() == s.l1_rho_err.size());
    }
  }

  TEST_CASE("version string is set") { CHECK(!version_string().empty()); }

}  // TEST_SUITE
