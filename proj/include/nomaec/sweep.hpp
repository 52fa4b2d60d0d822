#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nomaec/eccalc.hpp"

namespace nomaec {

enum class Axis { rho_db, theta };

std::string_view to_string(Axis axis);
Axis axis_from_string(std::string_view name);

struct SweepSpec {
  std::string scenario_id = "sweep";
  SystemConfig base;
  Axis axis = Axis::rho_db;
  std::vector<double> grid;
  std::vector<Role> roles{Role::weak, Role::strong};
  std::vector<Method> methods{Method::closed_form, Method::monte_carlo};
  EvalControls controls;
  std::optional<double> d_max;  // adds the delay-violation column when set
  std::string output_path;      // empty: do not write

  void validate() const;
};

struct ResultRow {
  std::string scenario_id;
  std::string axis_name;
  double axis_value = 0.0;
  Role role = Role::weak;
  Method method = Method::closed_form;
  double ec_bits_per_cu = 0.0;
  double std_error = 0.0;
  std::optional<double> delay_violation_prob;
  std::optional<int> series_terms;
  bool converged = true;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "scenario_id,axis_name,axis_value,role,method,ec_bits_per_cu,std_error,delay_violation_prob,"
    "series_terms,converged";

/// Evaluates every grid x role x method cell. Evaluator failures become rows
/// with converged = false and a NaN value. Rows are ordered by
/// (axis value, role, method) whatever the completion order.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_csv_file(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_csv_file(const std::string& path);

/// Curves of one reproduced figure; each curve is its own sweep.
struct FigurePreset {
  std::string name;
  std::string title;
  std::vector<SweepSpec> curves;
};

/// fig3 | fig4 | fig5 | fig6. Grids are our reconstruction of the plotted
/// ranges: SNR 0..40 dB step 2, theta log-spaced 1e-4..1 with 30 points.
FigurePreset figure_preset(std::string_view name);

std::vector<double> linear_grid(double start, double step, double stop);
std::vector<double> log_grid(double lo, double hi, int points);

/// gnuplot commands that plot a written figure CSV.
std::string plot_script(const FigurePreset& preset, const std::string& csv_path);

/// Parses the line-oriented config format: `[scenario]` sections holding
/// `key = value` lines, `#` comments. See README for the keys.
std::vector<SweepSpec> parse_sweep_config(std::istream& is);
std::vector<SweepSpec> parse_sweep_config_file(const std::string& path);

}  // namespace nomaec
