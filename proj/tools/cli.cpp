#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modefisher/error.hpp"
#include "modefisher/estimation.hpp"
#include "modefisher/fisher.hpp"
#include "modefisher/grid.hpp"
#include "modefisher/io.hpp"
#include "modefisher/modes.hpp"
#include "modefisher/psf.hpp"

namespace modefisher::cli {
namespace {

/// Thrown for option combinations CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  return std::get<std::string>(cell);
}

std::string render(const Table& table, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[table.header[c]] = cell_json(row[c]);
      rows.push_back(std::move(obj));
    }
    return rows.dump(2) + "\n";
  }
  std::string text;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) text += ',';
    text += table.header[c];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += cell_text(row[c]);
    }
    text += '\n';
  }
  return text;
}

struct PsfOptions {
  std::string psf = "sinc";
  double sigma = 1.0;
  double x_max = 0.0;
  std::size_t n_points = 0;
};

struct OutputOptions {
  std::string out;
  std::string format = "csv";
};

struct ScanOptions {
  double s_min = 0.0;
  double s_max = 15.0;
  std::size_t s_steps = 151;
};

struct BasisOptions {
  std::string basis = "adapted";
  std::size_t n_modes = 10;
  double hg_sigma = std::numbers::pi;
  std::string hg_convention = "intensity";
};

void add_psf_options(CLI::App& app, PsfOptions& o) {
  app.add_option("--psf", o.psf, "PSF model: gaussian, sinc or file:PATH (CSV with header x,amplitude)")
      ->check([](const std::string& v) -> std::string {
        if (v == "gaussian" || v == "sinc" || (v.rfind("file:", 0) == 0 && v.size() > 5)) return {};
        return "expected gaussian, sinc or file:PATH";
      })
      ->capture_default_str();
  app.add_option("--sigma", o.sigma, "Gaussian intensity standard deviation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--x-max", o.x_max,
                 "Half-width of the position grid (default: 40.96 for sinc, 12.8*sigma for gaussian)")
      ->check(CLI::PositiveNumber);
  app.add_option("--n-points", o.n_points,
                 "Position grid points, a power of two >= 1024 (default: 8192 sinc, 2048 gaussian)")
      ->check([](const std::string& v) -> std::string {
        try {
          const auto n = std::stoull(v);
          if (n >= kMinFisherPoints && is_power_of_two(n)) return {};
        } catch (const std::exception&) {
        }
        return "must be a power of two >= 1024";
      });
}

void add_output_options(CLI::App& app, OutputOptions& o, bool with_format = true) {
  app.add_option("--out", o.out, "Output file, written atomically (default: standard output)");
  if (with_format) {
    app.add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

void add_scan_options(CLI::App& app, ScanOptions& o) {
  app.add_option("--s-min", o.s_min, "Smallest separation")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--s-max", o.s_max, "Largest separation")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--s-steps", o.s_steps, "Number of separations, endpoints included")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_basis_options(CLI::App& app, BasisOptions& o, std::size_t default_modes) {
  o.n_modes = default_modes;
  app.add_option("--basis", o.basis, "Mode basis")
      ->check(CLI::IsMember({"adapted", "hermite_gauss", "sinc_closed"}))
      ->capture_default_str();
  app.add_option("--n-modes", o.n_modes, "Number of modes")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--hg-sigma", o.hg_sigma, "Hermite-Gauss width parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--hg-convention", o.hg_convention,
                 "Hermite-Gauss width meaning: intensity (ground mode exp(-x^2/(4 sigma^2))) or waist "
                 "(exp(-x^2/(2 sigma^2)))")
      ->check(CLI::IsMember({"intensity", "waist"}))
      ->capture_default_str();
}

PsfModel build_psf(const PsfOptions& o) {
  const bool custom_grid = o.x_max > 0.0 || o.n_points > 0;
  if (o.psf.rfind("file:", 0) == 0) {
    if (custom_grid) throw UsageError("--x-max/--n-points do not apply to a sampled PSF");
    return load_sampled_psf_csv(o.psf.substr(5));
  }
  if (o.psf == "gaussian") {
    const Grid def = default_gaussian_grid(o.sigma);
    if (!custom_grid) return make_gaussian_psf(o.sigma);
    return make_gaussian_psf(o.sigma, Grid(o.x_max > 0.0 ? o.x_max : def.x_max(),
                                           o.n_points > 0 ? o.n_points : def.n_points()));
  }
  const Grid def = default_sinc_grid();
  if (!custom_grid) return make_sinc_psf();
  return make_sinc_psf(Grid(o.x_max > 0.0 ? o.x_max : def.x_max(), o.n_points > 0 ? o.n_points : def.n_points()));
}

double effective_hg_sigma(const BasisOptions& o) {
  return o.hg_convention == "waist" ? o.hg_sigma / std::numbers::sqrt2 : o.hg_sigma;
}

ModeSet build_modes(const PsfModel& psf, const BasisOptions& o) {
  if (o.basis == "adapted") return build_adapted_modes(psf, o.n_modes);
  if (o.basis == "sinc_closed") {
    if (psf.kind() != PsfKind::Sinc) throw UsageError("--basis sinc_closed requires --psf sinc");
    return build_sinc_closed_form_modes(o.n_modes, psf.x_grid());
  }
  const double sigma = effective_hg_sigma(o);
  return build_hermite_gauss_modes(sigma, o.n_modes, hermite_gauss_grid(sigma, o.n_modes), psf.p_grid());
}

std::vector<double> separations(const ScanOptions& o) {
  if (o.s_max < o.s_min) throw UsageError("--s-max must not be smaller than --s-min");
  if (o.s_steps == 1) return {o.s_min};
  return linspace(o.s_min, o.s_max, o.s_steps);
}

void emit(const std::string& text, const OutputOptions& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file_atomic(o.out, text);
  }
}

Table modes_table(const ModeSet& modes, double window, bool with_closed_form) {
  Table table;
  table.header.push_back("x");
  for (std::size_t n = 0; n < modes.size(); ++n) table.header.push_back("phi_" + std::to_string(n));
  if (with_closed_form) {
    for (std::size_t n = 0; n < modes.size(); ++n) table.header.push_back("closed_" + std::to_string(n));
  }
  const Grid& grid = modes.x_grid;
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const double x = grid.point(j);
    if (window > 0.0 && std::abs(x) > window) continue;
    std::vector<Cell> row{x};
    for (std::size_t n = 0; n < modes.size(); ++n) row.emplace_back(modes.modes_x[n][j]);
    if (with_closed_form) {
      for (std::size_t n = 0; n < modes.size(); ++n) row.emplace_back(sinc_mode_closed_form(n, x));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table plane_wave_table(const PsfModel& psf, const std::vector<double>& seps) {
  Table table;
  table.header = {"s", "F_sine", "F_cosine", "F_sum", "F_printed", "F_quantum"};
  const double fq = quantum_fisher(psf);
  for (double s : seps) {
    const auto pw = plane_wave_fisher(psf, s);
    table.rows.push_back({s, pw.sine, pw.cosine, pw.sine + pw.cosine, pw.printed, fq});
  }
  return table;
}

void append_cumulative_rows(Table& table, const std::optional<std::string>& label, const FisherCurve& curve) {
  for (std::size_t i = 0; i < curve.separations.size(); ++i) {
    for (std::size_t d = 0; d < curve.cumulative[i].size(); ++d) {
      std::vector<Cell> row;
      if (label) row.emplace_back(*label);
      row.emplace_back(curve.separations[i]);
      row.emplace_back(static_cast<std::int64_t>(d));
      row.emplace_back(curve.cumulative[i][d]);
      row.emplace_back(curve.cumulative[i][d] / curve.quantum);
      table.rows.push_back(std::move(row));
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separation-estimation toolkit: optimal mode bases, Fisher information and Monte Carlo studies"};
  app.name("modefisher");
  app.require_subcommand(1, 1);

  // qfi
  PsfOptions qfi_psf;
  OutputOptions qfi_out;
  qfi_out.format = "text";
  auto* qfi = app.add_subcommand("qfi", "Quantum Fisher information of a PSF (printed to 6 significant digits)");
  add_psf_options(*qfi, qfi_psf);
  qfi->add_option("--out", qfi_out.out, "Output file, written atomically (default: standard output)");
  qfi->add_option("--format", qfi_out.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // modes export
  PsfOptions modes_psf;
  OutputOptions modes_out;
  BasisOptions modes_basis;
  double modes_window = 0.0;
  auto* modes = app.add_subcommand("modes", "Mode-set operations");
  modes->require_subcommand(1, 1);
  auto* modes_export = modes->add_subcommand("export", "Write sampled modes as CSV: x,phi_0,...,phi_{N-1}");
  add_psf_options(*modes_export, modes_psf);
  add_basis_options(*modes_export, modes_basis, 6);
  add_output_options(*modes_export, modes_out);
  modes_export->add_option("--window", modes_window, "Only emit rows with |x| <= window (0 = whole grid)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // fisher scan
  PsfOptions fisher_psf;
  OutputOptions fisher_out;
  BasisOptions fisher_basis;
  ScanOptions fisher_scan_opts;
  std::size_t fisher_depth = 0;
  auto* fisher = app.add_subcommand("fisher", "Fisher-information tables");
  fisher->require_subcommand(1, 1);
  auto* fisher_scan = fisher->add_subcommand(
      "scan", "Scan separations: s,F_direct,F_quantum,F_mode_0..F_mode_{N-1},cumulative_D,tail");
  add_psf_options(*fisher_scan, fisher_psf);
  add_basis_options(*fisher_scan, fisher_basis, 10);
  add_scan_options(*fisher_scan, fisher_scan_opts);
  add_output_options(*fisher_scan, fisher_out);
  fisher_scan->add_option("--depth", fisher_depth, "Mode budget D of the cumulative column (default: --n-modes)");

  // cumulative
  PsfOptions cum_psf;
  OutputOptions cum_out;
  BasisOptions cum_basis;
  ScanOptions cum_scan;
  auto* cumulative = app.add_subcommand("cumulative", "Cumulative Fisher vs mode budget: s,D,cumulative,fraction");
  add_psf_options(*cumulative, cum_psf);
  add_basis_options(*cumulative, cum_basis, 10);
  add_scan_options(*cumulative, cum_scan);
  add_output_options(*cumulative, cum_out);

  // planewave
  PsfOptions pw_psf;
  OutputOptions pw_out;
  ScanOptions pw_scan;
  auto* planewave = app.add_subcommand(
      "planewave", "Sine/cosine plane-wave channel Fisher (sinc PSF): s,F_sine,F_cosine,F_sum,F_printed,F_quantum");
  add_psf_options(*planewave, pw_psf);
  add_scan_options(*planewave, pw_scan);
  add_output_options(*planewave, pw_out);

  // simulate
  std::string sim_config;
  std::string sim_estimates;
  std::optional<std::uint64_t> sim_seed;
  OutputOptions sim_out;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo maximum-likelihood study from a JSON config");
  simulate->add_option("--config", sim_config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--estimates", sim_estimates, "Also write per-trial estimates CSV (trial,estimate,boundary_flag)");
  add_output_options(*simulate, sim_out, false);

  // figure1
  OutputOptions f1_out;
  std::size_t f1_modes = 6;
  double f1_window = 20.0;
  auto* figure1 = app.add_subcommand(
      "figure1", "Adapted sinc modes with their Bessel closed forms: x,phi_0..,closed_0..");
  figure1->add_option("--n-modes", f1_modes, "Number of modes")->check(CLI::PositiveNumber)->capture_default_str();
  figure1->add_option("--window", f1_window, "Only emit rows with |x| <= window (0 = whole grid)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_output_options(*figure1, f1_out);

  // figure2
  OutputOptions f2_out;
  std::vector<double> f2_s{1.0, 2.0, 15.0};
  std::size_t f2_adapted = 40;
  std::size_t f2_hg = 150;
  BasisOptions f2_basis;
  auto* figure2 = app.add_subcommand(
      "figure2", "Cumulative Fisher vs D for adapted and Hermite-Gauss bases (sinc PSF): basis,s,D,cumulative,fraction");
  figure2->add_option("--s", f2_s, "Separations (comma separated)")->delimiter(',')->capture_default_str();
  figure2->add_option("--adapted-modes", f2_adapted, "Adapted modes")->check(CLI::Range(1, 60))->capture_default_str();
  figure2->add_option("--hg-modes", f2_hg, "Hermite-Gauss modes")->check(CLI::Range(1, 200))->capture_default_str();
  figure2->add_option("--hg-sigma", f2_basis.hg_sigma, "Hermite-Gauss width parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  figure2->add_option("--hg-convention", f2_basis.hg_convention, "Hermite-Gauss width meaning: intensity or waist")
      ->check(CLI::IsMember({"intensity", "waist"}))
      ->capture_default_str();
  add_output_options(*figure2, f2_out);

  // figure3
  OutputOptions f3_out;
  ScanOptions f3_scan;
  f3_scan.s_max = 20.0;
  f3_scan.s_steps = 201;
  auto* figure3 = app.add_subcommand(
      "figure3", "Plane-wave channel Fisher for the sinc PSF: s,F_sine,F_cosine,F_sum,F_printed,F_quantum");
  add_scan_options(*figure3, f3_scan);
  add_output_options(*figure3, f3_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*qfi) {
      const PsfModel psf = build_psf(qfi_psf);
      const double fq = quantum_fisher(psf);
      std::string text;
      if (qfi_out.format == "json") {
        nlohmann::ordered_json j;
        j["psf"] = qfi_psf.psf;
        j["quantum_fisher"] = fq;
        text = j.dump(2) + "\n";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g\n", fq);
        text = buf;
      }
      emit(text, qfi_out, out);
    } else if (*modes_export) {
      const PsfModel psf = build_psf(modes_psf);
      const ModeSet set = build_modes(psf, modes_basis);
      emit(render(modes_table(set, modes_window, false), modes_out.format), modes_out, out);
    } else if (*fisher_scan) {
      const PsfModel psf = build_psf(fisher_psf);
      const ModeSet set = build_modes(psf, fisher_basis);
      const std::size_t depth = fisher_depth == 0 ? set.size() : fisher_depth;
      if (depth > set.size()) throw UsageError("--depth must not exceed --n-modes");
      const auto seps = separations(fisher_scan_opts);
      const FisherCurve curve = fisher_curve(psf, set, seps);
      Table table;
      table.header = {"s", "F_direct", "F_quantum"};
      for (std::size_t n = 0; n < set.size(); ++n) table.header.push_back("F_mode_" + std::to_string(n));
      table.header.push_back("cumulative_" + std::to_string(depth));
      table.header.push_back("tail");
      for (std::size_t i = 0; i < seps.size(); ++i) {
        std::vector<Cell> row{seps[i], curve.direct[i], curve.quantum};
        for (double f : curve.per_mode[i]) row.emplace_back(f);
        row.emplace_back(curve.cumulative[i][depth]);
        row.emplace_back(curve.tail[i]);
        table.rows.push_back(std::move(row));
      }
      emit(render(table, fisher_out.format), fisher_out, out);
    } else if (*cumulative) {
      const PsfModel psf = build_psf(cum_psf);
      const ModeSet set = build_modes(psf, cum_basis);
      const FisherCurve curve = fisher_curve(psf, set, separations(cum_scan), false);
      Table table;
      table.header = {"s", "D", "cumulative", "fraction"};
      append_cumulative_rows(table, std::nullopt, curve);
      emit(render(table, cum_out.format), cum_out, out);
    } else if (*planewave) {
      const PsfModel psf = build_psf(pw_psf);
      emit(render(plane_wave_table(psf, separations(pw_scan)), pw_out.format), pw_out, out);
    } else if (*simulate) {
      ExperimentConfig config = config_from_json(read_file(sim_config));
      if (sim_seed) config.seed = *sim_seed;
      const SimulationReport report = run_study(config);
      if (!sim_estimates.empty()) write_file_atomic(sim_estimates, estimates_csv(report));
      emit(report_to_json(report), sim_out, out);
    } else if (*figure1) {
      const PsfModel psf = make_sinc_psf();
      const ModeSet set = build_adapted_modes(psf, f1_modes);
      emit(render(modes_table(set, f1_window, true), f1_out.format), f1_out, out);
    } else if (*figure2) {
      const PsfModel psf = make_sinc_psf();
      const ModeSet adapted = build_adapted_modes(psf, f2_adapted);
      const double sigma = effective_hg_sigma(f2_basis);
      const ModeSet hg = build_hermite_gauss_modes(sigma, f2_hg, hermite_gauss_grid(sigma, f2_hg), psf.p_grid());
      Table table;
      table.header = {"basis", "s", "D", "cumulative", "fraction"};
      append_cumulative_rows(table, "adapted", fisher_curve(psf, adapted, f2_s, false));
      append_cumulative_rows(table, "hermite_gauss", fisher_curve(psf, hg, f2_s, false));
      emit(render(table, f2_out.format), f2_out, out);
    } else if (*figure3) {
      const PsfModel psf = make_sinc_psf();
      emit(render(plane_wave_table(psf, separations(f3_scan)), f3_out.format), f3_out, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace modefisher::cli
