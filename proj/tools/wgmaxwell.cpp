// Command-line driver: single solves and refinement studies for the WG
// Maxwell cavity eigenvalue scheme, with CSV and field export.
#include "wg/study.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

struct CliOptions {
  std::string domain = "0,0,3.141592653589793,3.141592653589793";
  std::string n_spec = "8,16,32,64";
  std::string cells = "square";
  int k = 1;
  std::string gamma = "pow:0.1";
  double eps_r = 1.0;
  double mu_r = 1.0;
  int num_eigs = 5;
  std::string exact;
  double shift = 0.3;
  unsigned seed = 20240501;
  std::string out;
  std::string field_out;
  int mode = 1;
  int grid = 50;
};

std::vector<double> parse_doubles(const std::string &text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      values.push_back(std::stod(item));
  return values;
}

std::vector<int> parse_ints(const std::string &text) {
  std::vector<int> values;
  for (double v : parse_doubles(text))
    values.push_back(static_cast<int>(v));
  return values;
}

wg::RunConfig make_config(const CliOptions &opt, bool single_level) {
  wg::RunConfig config;
  const auto corners = parse_doubles(opt.domain);
  if (corners.size() != 4)
    throw std::invalid_argument("--domain expects x0,y0,x1,y1");
  config.domain = {corners[0], corners[1], corners[2], corners[3]};
  if (!(config.domain.width() > 0.0 && config.domain.height() > 0.0))
    throw std::invalid_argument("--domain must have positive width and height");

  config.n_list = parse_ints(opt.n_spec);
  if (config.n_list.empty())
    throw std::invalid_argument("--n expects at least one level");
  for (int n : config.n_list)
    if (n < 1)
      throw std::invalid_argument("--n entries must be >= 1");
  if (single_level)
    config.n_list.resize(1);

  if (opt.cells == "square")
    config.cells = wg::CellKind::Square;
  else if (opt.cells == "tri")
    config.cells = wg::CellKind::RightTriangle;
  else
    throw std::invalid_argument("--cells expects 'square' or 'tri'");

  if (opt.k < 1)
    throw std::invalid_argument("--k must be >= 1");
  config.k = opt.k;
  config.gamma = wg::GammaSpec::parse(opt.gamma);
  if (!(opt.eps_r > 0.0 && opt.mu_r > 0.0))
    throw std::invalid_argument("--eps-r and --mu-r must be positive");
  config.eps_r = opt.eps_r;
  config.mu_r = opt.mu_r;
  if (opt.num_eigs < 1)
    throw std::invalid_argument("--num-eigs must be >= 1");
  config.num_eigs = opt.num_eigs;
  if (!opt.exact.empty())
    config.exact = parse_doubles(opt.exact);
  config.shift = opt.shift;
  config.seed = opt.seed;
  return config;
}

void write_field_export(const wg::RunConfig &config, const wg::EigenResult &result,
                        const CliOptions &opt) {
  if (opt.field_out.empty())
    return;
  if (opt.mode < 1 || opt.mode > result.count())
    throw std::invalid_argument("--mode index out of range of accepted eigenpairs");
  const wg::Mesh mesh = wg::generate_uniform(config.n_list.back(), config.domain, config.cells);
  const wg::DofMap dofmap = wg::build_dofmap(mesh, config.k);
  std::ofstream out(opt.field_out);
  if (!out)
    throw std::invalid_argument("cannot open field output file " + opt.field_out);
  const int skipped =
      wg::export_field(mesh, config.k, dofmap, result.eigenvectors.col(opt.mode - 1),
                       opt.grid, out);
  if (skipped > 0)
    std::cerr << "field export: skipped " << skipped << " sample(s) outside the mesh\n";
}

int run_solve(const CliOptions &opt) {
  const wg::RunConfig config = make_config(opt, true);
  const int n = config.n_list.front();
  const auto start = std::chrono::steady_clock::now();
  const wg::EigenResult result = wg::solve_level(config, n);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << "n=" << n << "  gamma=" << config.gamma.str() << "  accepted "
            << result.count() << " eigenpair(s)" << (result.used_dense_path ? " [dense]" : "")
            << "\n";
  for (int j = 0; j < result.count(); ++j) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  lambda_%d = %.12f   residual %.3e", j + 1,
                  result.eigenvalues[j], result.residual_norms[j]);
    std::cout << buf;
    if (j < static_cast<int>(config.exact.size())) {
      std::snprintf(buf, sizeof(buf), "   error %.6e", config.exact[j] - result.eigenvalues[j]);
      std::cout << buf;
    }
    std::cout << "\n";
  }
  if (!result.complete) {
    std::cerr << "solver returned fewer eigenpairs than requested\n";
    return kExitSolver;
  }

  if (!opt.out.empty()) {
    wg::StudyRecord rec;
    rec.n = n;
    rec.seconds = seconds;
    for (int j = 0; j < result.count(); ++j) {
      rec.lambda_h.push_back(result.eigenvalues[j]);
      rec.residual.push_back(result.residual_norms[j]);
      if (j < static_cast<int>(config.exact.size())) {
        rec.error.push_back(config.exact[j] - result.eigenvalues[j]);
        rec.lower_bound_ok.push_back(*rec.error.back() > 0.0);
      } else {
        rec.error.push_back(std::nullopt);
        rec.lower_bound_ok.push_back(std::nullopt);
      }
      rec.order.push_back(std::nullopt);
    }
    std::ofstream out(opt.out);
    if (!out)
      throw std::invalid_argument("cannot open output file " + opt.out);
    wg::write_study_csv({rec}, out);
  }

  write_field_export(config, result, opt);
  return kExitOk;
}

int run_study_cmd(const CliOptions &opt) {
  const wg::RunConfig config = make_config(opt, false);

  std::vector<wg::StudyRecord> records;
  int exit_code = kExitOk;
  try {
    records = wg::run_study(config, &std::cout);
  } catch (const wg::SolverError &err) {
    std::cerr << "study aborted: " << err.what() << "\n";
    exit_code = kExitSolver;
  }

  if (!opt.out.empty()) {
    std::ofstream out(opt.out);
    if (!out)
      throw std::invalid_argument("cannot open output file " + opt.out);
    wg::write_study_csv(records, out); // partial on failure
  }
  if (exit_code != kExitOk)
    return exit_code;

  if (!config.exact.empty() && !records.empty()) {
    bool all_lower = true;
    for (const auto &rec : records)
      for (const auto &ok : rec.lower_bound_ok)
        if (ok && !*ok)
          all_lower = false;
    std::cout << "lower bound (all errors positive): " << (all_lower ? "yes" : "no") << "\n";
    std::cout << "final-level orders:";
    for (const auto &ord : records.back().order) {
      if (ord) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.4f", *ord);
        std::cout << buf;
      } else {
        std::cout << " -";
      }
    }
    std::cout << "\n";
  }

  if (!opt.field_out.empty() && !records.empty()) {
    const wg::EigenResult result = wg::solve_level(config, config.n_list.back());
    write_field_export(config, result, opt);
  }
  return kExitOk;
}

void add_common_options(CLI::App *cmd, CliOptions &opt) {
  cmd->add_option("--domain", opt.domain, "rectangle x0,y0,x1,y1");
  cmd->add_option("--n", opt.n_spec, "comma list of refinement levels");
  cmd->add_option("--cells", opt.cells, "cell kind: square|tri");
  cmd->add_option("--k", opt.k, "polynomial degree (>= 1)");
  cmd->add_option("--gamma", opt.gamma, "stabilization scaling: pow:<eps>|invlog");
  cmd->add_option("--eps-r", opt.eps_r, "relative permittivity");
  cmd->add_option("--mu-r", opt.mu_r, "relative permeability");
  cmd->add_option("--num-eigs", opt.num_eigs, "number of eigenvalues");
  cmd->add_option("--exact", opt.exact, "comma list of exact eigenvalues");
  cmd->add_option("--shift", opt.shift, "spectral shift");
  cmd->add_option("--seed", opt.seed, "start-vector seed");
  cmd->add_option("--out", opt.out, "CSV output path");
  cmd->add_option("--field-out", opt.field_out, "field sample CSV path");
  cmd->add_option("--mode", opt.mode, "eigenmode index for field export (1-based)");
  cmd->add_option("--grid", opt.grid, "field sample grid size m (m x m)");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"weak Galerkin Maxwell cavity eigenvalue solver"};
  app.require_subcommand(1);

  CliOptions solve_opt, study_opt;
  CLI::App *solve_cmd = app.add_subcommand("solve", "solve a single level");
  add_common_options(solve_cmd, solve_opt);
  CLI::App *study_cmd = app.add_subcommand("study", "run a refinement study");
  add_common_options(study_cmd, study_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve_cmd->parsed())
      return run_solve(solve_opt);
    return run_study_cmd(study_opt);
  } catch (const std::invalid_argument &err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const wg::SolverError &err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return kExitSolver;
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSolver;
  }
}
