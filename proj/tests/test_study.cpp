#include "wg/study.hpp"

#include "test_helpers.hpp"
#include "wg/assembly.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>
#include <sstream>

using namespace wg;

namespace {

// Blank the wall-time column (the only nondeterministic field).
std::string mask_seconds(const std::string &csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!header) {
      const auto pos = line.rfind(',');
      if (pos != std::string::npos)
        line = line.substr(0, pos + 1) + "<t>";
    }
    header = false;
    out << line << "\n";
  }
  return out.str();
}

} // namespace

TEST_SUITE("study") {

  TEST_CASE("compute_order on reference error pairs") {
    {
      const auto orders = compute_order({4.0828e-2, 1.1269e-2});
      REQUIRE(orders.size() == 1);
      REQUIRE(orders[0].has_value());
      CHECK(*orders[0] == doctest::Approx(1.8572).epsilon(2e-4));
    }
    {
      const auto orders = compute_order({8.0, 2.0});
      CHECK(*orders[0] == doctest::Approx(2.0));
    }
    {
      const auto orders = compute_order({1e-3, 1e-3});
      CHECK(*orders[0] == doctest::Approx(0.0));
    }
    {
      const auto orders = compute_order({1e-2, -1e-3, 1e-4});
      CHECK_FALSE(orders[0].has_value());
      CHECK_FALSE(orders[1].has_value());
    }
  }

  TEST_CASE("compute_order reproduces a reference error-row's orders") {
    const auto orders = compute_order({4.1608e-1, 1.2117e-1, 3.3223e-2, 8.9721e-3});
    REQUIRE(orders.size() == 3);
    CHECK(*orders[0] == doctest::Approx(1.7797).epsilon(1e-3));
    CHECK(*orders[1] == doctest::Approx(1.8668).epsilon(1e-3));
    CHECK(*orders[2] == doctest::Approx(1.8886).epsilon(1e-3));
  }

  TEST_CASE("gamma spec parsing and evaluation") {
    const GammaSpec pow = GammaSpec::parse("pow:0.1");
    CHECK(pow.value(1.0 / 8) == doctest::Approx(std::pow(0.125, 0.1)).epsilon(1e-15));
    const GammaSpec invlog = GammaSpec::parse("invlog");
    CHECK(invlog.value(1.0 / 8) == doctest::Approx(1.0 / std::log(8.0)).epsilon(1e-15));
    CHECK_THROWS_AS(GammaSpec::parse("pow:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(GammaSpec::parse("pow:0"), std::invalid_argument);
    CHECK_THROWS_AS(GammaSpec::parse("sqrt"), std::invalid_argument);
    CHECK_THROWS_AS(invlog.value(1.0), std::invalid_argument); // n = 1
  }

  TEST_CASE("single-level study: errors populated, orders empty") {
    RunConfig cfg;
    cfg.n_list = {4};
    cfg.exact = {1, 1, 2, 4, 4};
    const auto records = run_study(cfg);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].lambda_h.size() == 5);
    for (int j = 0; j < 5; ++j) {
      REQUIRE(records[0].error[j].has_value());
      CHECK(std::isfinite(*records[0].error[j]));
      CHECK_FALSE(records[0].order[j].has_value());
    }
  }

  TEST_CASE("two-level study populates orders from level 2 onward") {
    RunConfig cfg;
    cfg.n_list = {2, 4};
    cfg.exact = {1, 1, 2, 4, 4};
    const auto records = run_study(cfg);
    REQUIRE(records.size() == 2);
    for (int j = 0; j < 5; ++j) {
      CHECK_FALSE(records[0].order[j].has_value());
      if (records[0].error[j] && records[1].error[j] && *records[0].error[j] > 0 &&
          *records[1].error[j] > 0)
        CHECK(records[1].order[j].has_value());
    }
  }

  TEST_CASE("study CSV has the fixed schema and is deterministic") {
    RunConfig cfg;
    cfg.n_list = {2, 4};
    cfg.exact = {1, 1, 2, 4, 4};
    std::ostringstream csv1, csv2;
    write_study_csv(run_study(cfg), csv1);
    write_study_csv(run_study(cfg), csv2);

    std::istringstream in(csv1.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,j,lambda_h,error,order,lower_bound_ok,residual,seconds");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(rows == 10);
    CHECK(mask_seconds(csv1.str()) == mask_seconds(csv2.str()));
  }

  TEST_CASE("CSV rows without exact values leave error columns empty") {
    RunConfig cfg;
    cfg.n_list = {2};
    cfg.exact = {};
    std::ostringstream csv;
    write_study_csv(run_study(cfg), csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line); // header
    std::getline(in, line);
    // n,j,lambda_h,error,order,lower_bound_ok,residual,seconds
    const std::regex row(R"(^2,1,[^,]+,,,,[^,]+,[^,]+$)");
    CHECK(std::regex_match(line, row));
  }

  TEST_CASE("export_field: constant dof vector and m=1 center sample") {
    const Mesh mesh = generate_uniform(3, {0, 0, M_PI, M_PI}, CellKind::Square);
    const DofMap dm = build_dofmap(mesh, 1);
    const WGSystem sys = assemble(std::make_shared<Mesh>(mesh), 1, 0.5, 1.0, 1.0);
    const VectorXd u = project_field(sys, [](const Vec2 &) { return Vec2(0.25, -0.75); });

    std::ostringstream one;
    const int skipped1 = export_field(mesh, 1, dm, u, 1, one);
    CHECK(skipped1 == 0);
    std::istringstream in(one.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "x,y,u1,u2");
    std::getline(in, row);
    double x, y, u1, u2;
    char comma;
    std::istringstream(row) >> x >> comma >> y >> comma >> u1 >> comma >> u2;
    CHECK(x == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(y == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(u1 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(u2 == doctest::Approx(-0.75).epsilon(1e-12));

    std::ostringstream grid;
    const int skipped2 = export_field(mesh, 1, dm, u, 5, grid);
    CHECK(skipped2 == 0);
    int rows = 0;
    std::istringstream gin(grid.str());
    std::getline(gin, header);
    while (std::getline(gin, row)) {
      ++rows;
      std::istringstream(row) >> x >> comma >> y >> comma >> u1 >> comma >> u2;
      CHECK(u1 == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(u2 == doctest::Approx(-0.75).epsilon(1e-12));
    }
    CHECK(rows == 25);
  }

  TEST_CASE("export_field is byte-deterministic") {
    const Mesh mesh = generate_uniform(4, {0, 0, M_PI, M_PI}, CellKind::RightTriangle);
    const DofMap dm = build_dofmap(mesh, 1);
    const WGSystem sys = assemble(std::make_shared<Mesh>(mesh), 1, 0.7, 1.0, 1.0);
    const VectorXd u =
        project_field(sys, [](const Vec2 &x) { return Vec2(std::sin(x.x()), x.y()); });
    std::ostringstream a, b;
    export_field(mesh, 1, dm, u, 9, a);
    export_field(mesh, 1, dm, u, 9, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("nan") == std::string::npos);
  }

  TEST_CASE("run_study rejects configs it cannot satisfy") {
    RunConfig cfg;
    cfg.n_list = {1};
    cfg.num_eigs = 12; // n=1 cannot deliver 12 physical modes
    CHECK_THROWS_AS(run_study(cfg), SolverError);
  }
}
