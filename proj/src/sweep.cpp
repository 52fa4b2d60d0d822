#include "nomaec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "nomaec/delay.hpp"
#include "nomaec/error.hpp"

namespace nomaec {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("cannot parse integer " + what + " from '" + text + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `a:step:b`, `logspace(lo, hi, count)`, or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.rfind("logspace(", 0) == 0 && text.back() == ')') {
    const auto parts = split(std::string_view(text).substr(9, text.size() - 10), ',');
    if (parts.size() != 3) throw ConfigError("logspace needs (lo, hi, count)");
    return log_grid(parse_double(parts[0], "grid"), parse_double(parts[1], "grid"),
                    static_cast<int>(parse_int(parts[2], "grid count")));
  }
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range grid needs start:step:stop");
    return linear_grid(parse_double(parts[0], "grid"), parse_double(parts[1], "grid"),
                       parse_double(parts[2], "grid"));
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) {
    if (!p.empty()) out.push_back(parse_double(p, "grid"));
  }
  return out;
}

void apply_key(SweepSpec& spec, const std::string& key, const std::string& value) {
  SystemConfig& c = spec.base;
  EvalControls& k = spec.controls;
  if (key == "axis") spec.axis = axis_from_string(value);
  else if (key == "grid") spec.grid = parse_grid(value);
  else if (key == "roles") {
    spec.roles.clear();
    for (const auto& r : split(value, ',')) spec.roles.push_back(role_from_string(r));
  } else if (key == "methods") {
    spec.methods.clear();
    for (const auto& m : split(value, ',')) spec.methods.push_back(method_from_string(m));
  }
  else if (key == "V") c.V = static_cast<int>(parse_int(value, key));
  else if (key == "t") c.t = static_cast<int>(parse_int(value, key));
  else if (key == "u") c.u = static_cast<int>(parse_int(value, key));
  else if (key == "alpha_t") c.alpha_t = parse_double(value, key);
  else if (key == "alpha_u") c.alpha_u = parse_double(value, key);
  else if (key == "rho_db") c.rho = db_to_linear(parse_double(value, key));
  else if (key == "rho") c.rho = parse_double(value, key);
  else if (key == "n") c.n = static_cast<int>(parse_int(value, key));
  else if (key == "eps") c.eps = parse_double(value, key);
  else if (key == "theta") c.theta_t = c.theta_u = parse_double(value, key);
  else if (key == "theta_t") c.theta_t = parse_double(value, key);
  else if (key == "theta_u") c.theta_u = parse_double(value, key);
  else if (key == "allow_power_backoff") c.allow_power_backoff = (value == "true" || value == "1");
  else if (key == "d_max") spec.d_max = parse_double(value, key);
  else if (key == "mc_samples") k.mc_samples = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "seed") k.seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "quad_rel_tol") k.quad_rel_tol = parse_double(value, key);
  else if (key == "series_max_terms") k.series_max_terms = static_cast<int>(parse_int(value, key));
  else if (key == "series_rel_tol") k.series_rel_tol = parse_double(value, key);
  else if (key == "output") spec.output_path = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

ResultRow evaluate_cell(const SweepSpec& spec, double axis_value, Role role, Method method) {
  ResultRow row;
  row.scenario_id = spec.scenario_id;
  row.axis_name = std::string(to_string(spec.axis));
  row.axis_value = axis_value;
  row.role = role;
  row.method = method;

  SystemConfig cfg = spec.base;
  if (spec.axis == Axis::rho_db) {
    cfg.rho = db_to_linear(axis_value);
  } else {
    cfg.theta_t = cfg.theta_u = axis_value;
  }
  EvalControls ctl = spec.controls;
  ctl.threads = 1;
  try {
    const EcResult r = evaluate_ec(cfg, role, method, ctl);
    row.ec_bits_per_cu = r.value;
    row.std_error = r.std_error;
    row.converged = r.diag.converged;
    if (method == Method::closed_form && role == Role::weak) row.series_terms = r.diag.series_terms;
    if (spec.d_max) {
      row.delay_violation_prob =
          delay_violation_prob(cfg.theta(role), {*spec.d_max, 1.0, std::max(r.value, 0.0)});
    }
  } catch (const std::exception&) {
    row.ec_bits_per_cu = std::numeric_limits<double>::quiet_NaN();
    row.converged = false;
  }
  return row;
}

}  // namespace

std::string_view to_string(Axis axis) { return axis == Axis::rho_db ? "rho_db" : "theta"; }

Axis axis_from_string(std::string_view name) {
  if (name == "rho_db") return Axis::rho_db;
  if (name == "theta") return Axis::theta;
  throw ConfigError("unknown axis '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  if (scenario_id.empty() || scenario_id.find_first_of(",\n\"") != std::string::npos) {
    throw ConfigError("scenario_id must be non-empty and free of commas, quotes and newlines");
  }
  if (grid.empty()) throw ConfigError("sweep '" + scenario_id + "': empty grid");
  if (roles.empty()) throw ConfigError("sweep '" + scenario_id + "': no roles");
  if (methods.empty()) throw ConfigError("sweep '" + scenario_id + "': no methods");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("sweep grid must be ascending");
  if (axis == Axis::theta && grid.front() <= 0.0) throw ConfigError("theta grid must be positive");
  if (d_max && !(*d_max >= 0.0)) throw ConfigError("d_max must be non-negative");
  base.validate();
  controls.validate();
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<Role> roles = spec.roles;
  std::vector<Method> methods = spec.methods;
  std::sort(roles.begin(), roles.end());
  roles.erase(std::unique(roles.begin(), roles.end()), roles.end());
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const std::size_t cells_per_point = roles.size() * methods.size();
  std::vector<ResultRow> rows(spec.grid.size() * cells_per_point);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g = next.fetch_add(1); g < spec.grid.size(); g = next.fetch_add(1)) {
      std::size_t slot = g * cells_per_point;
      for (Role role : roles) {
        for (Method method : methods) rows[slot++] = evaluate_cell(spec, spec.grid[g], role, method);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = static_cast<unsigned>(
      std::min<std::size_t>(spec.controls.threads == 0 ? hw : spec.controls.threads, spec.grid.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (!spec.output_path.empty()) write_csv_file(spec.output_path, rows);
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << r.scenario_id << ',' << r.axis_name << ',' << format_double(r.axis_value) << ',' << to_string(r.role)
       << ',' << to_string(r.method) << ',' << format_double(r.ec_bits_per_cu) << ','
       << format_double(r.std_error) << ','
       << (r.delay_violation_prob ? format_double(*r.delay_violation_prob) : std::string()) << ','
       << (r.series_terms ? std::to_string(*r.series_terms) : std::string()) << ','
       << (r.converged ? "true" : "false") << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out, rows);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCsvHeader) throw ConfigError("CSV header mismatch");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    ResultRow r;
    r.scenario_id = f[0];
    r.axis_name = f[1];
    r.axis_value = parse_double(f[2], "axis_value");
    r.role = role_from_string(f[3]);
    r.method = method_from_string(f[4]);
    r.ec_bits_per_cu = parse_double(f[5], "ec_bits_per_cu");
    r.std_error = parse_double(f[6], "std_error");
    if (!f[7].empty()) r.delay_violation_prob = parse_double(f[7], "delay_violation_prob");
    if (!f[8].empty()) r.series_terms = static_cast<int>(parse_int(f[8], "series_terms"));
    if (f[9] != "true" && f[9] != "false") throw ConfigError("converged must be true/false");
    r.converged = f[9] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

std::vector<double> linear_grid(double start, double step, double stop) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  for (long long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw ConfigError("log grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  return out;
}

FigurePreset figure_preset(std::string_view name) {
  SystemConfig base;  // V = 10, t = 2, u = 8, alpha = (0.8, 0.2)
  FigurePreset preset;
  preset.name = std::string(name);
  auto curve = [&](std::string id, double rho_db) {
    SweepSpec s;
    s.scenario_id = std::move(id);
    s.base = base;
    s.base.rho = db_to_linear(rho_db);
    return s;
  };

  if (name == "fig3") {
    preset.title = "Effective capacity vs transmit SNR (theta = 0.01, n = 300, eps = 1e-5)";
    base.theta_t = base.theta_u = 0.01;
    base.n = 300;
    base.eps = 1e-5;
    SweepSpec s = curve("fig3", 0.0);
    s.axis = Axis::rho_db;
    s.grid = linear_grid(0.0, 2.0, 40.0);
    preset.curves.push_back(std::move(s));
    return preset;
  }

  base.n = 400;
  base.eps = 1e-6;
  std::vector<double> rhos;
  std::vector<Role> roles;
  std::optional<double> d_max;
  if (name == "fig4") {
    preset.title = "Effective capacity vs delay exponent (n = 400, eps = 1e-6)";
    rhos = {15.0, 20.0};
    roles = {Role::weak, Role::strong};
  } else if (name == "fig5" || name == "fig6") {
    const bool strong = name == "fig5";
    preset.title = std::string("Delay-violation probability of the ") + (strong ? "strong" : "weak") +
                   " user vs theta (D_max = 400, eps = 1e-6, n = 400)";
    rhos = {15.0, 20.0, 25.0};
    roles = {strong ? Role::strong : Role::weak};
    d_max = 400.0;
  } else {
    throw ConfigError("unknown figure preset '" + std::string(name) + "' (fig3, fig4, fig5, fig6)");
  }
  for (double rho_db : rhos) {
    char id[32];
    std::snprintf(id, sizeof id, "%s_rho%gdB", preset.name.c_str(), rho_db);
    SweepSpec s = curve(id, rho_db);
    s.axis = Axis::theta;
    s.grid = log_grid(1e-4, 1.0, 30);
    s.roles = roles;
    s.d_max = d_max;
    // theta n reaches 400 here and the weak-user series needs a few thousand terms.
    s.controls.series_max_terms = 20000;
    preset.curves.push_back(std::move(s));
  }
  return preset;
}

std::string plot_script(const FigurePreset& preset, const std::string& csv_path) {
  const bool theta_axis = preset.curves.front().axis == Axis::theta;
  const bool delay = preset.curves.front().d_max.has_value();
  std::ostringstream os;
  os << "# gnuplot script for " << preset.name << "\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << preset.title << "'\n"
     << "set xlabel '" << (theta_axis ? "theta (1/bit)" : "transmit SNR (dB)") << "'\n"
     << "set ylabel '" << (delay ? "delay-violation probability" : "effective capacity (bit/s/Hz)") << "'\n";
  if (theta_axis) os << "set logscale x\n";
  if (delay) os << "set logscale y\n";
  os << "set terminal pngcairo size 900,600\nset output '" << preset.name << ".png'\nplot ";
  const int column = delay ? 8 : 6;
  bool first = true;
  for (const SweepSpec& c : preset.curves) {
    for (Role role : c.roles) {
      for (Method m : c.methods) {
        if (!first) os << ", \\\n     ";
        first = false;
        os << "'" << csv_path << "' using 3:(strcol(1) eq '" << c.scenario_id << "' && strcol(4) eq '"
           << to_string(role) << "' && strcol(5) eq '" << to_string(m) << "' ? $" << column
           << " : 1/0) with " << (m == Method::monte_carlo ? "points" : "lines") << " title '" << c.scenario_id
           << " " << to_string(role) << " " << to_string(m) << "'";
      }
    }
  }
  os << "\n";
  return os.str();
}

std::vector<SweepSpec> parse_sweep_config(std::istream& is) {
  std::vector<SweepSpec> specs;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string text = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
      SweepSpec s;
      s.scenario_id = trim(std::string_view(text).substr(1, text.size() - 2));
      s.grid.clear();
      specs.push_back(std::move(s));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (specs.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a [section]");
    try {
      apply_key(specs.back(), trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (specs.empty()) throw ConfigError("config defines no [sweep] sections");
  for (const SweepSpec& s : specs) s.validate();
  return specs;
}

std::vector<SweepSpec> parse_sweep_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_sweep_config(in);
}

}  // namespace nomaec
