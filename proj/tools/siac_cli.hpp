#pragma once

// Command-line front end: filter, spectrum, kernel-response and bohm
// subcommands over plain-text column files.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "siac/siac.hpp"

namespace siac::tool {

/// Unreadable file or malformed contents (exit 1).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inconsistent or unsupported options (exit 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Degenerate points found under --strict (exit 3).
struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kInputError = 1, kConfigError = 2, kDegenerate = 3 };

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Column files

struct Table {
  std::vector<std::string> header; // empty unless the first data line was non-numeric
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> line_numbers; // source line of every row

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

inline std::vector<std::string> split_fields(const std::string &line) {
  std::string s = line;
  for (auto &c : s)
    if (c == ',')
      c = ' ';
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;)
    out.push_back(tok);
  return out;
}

inline std::optional<double> parse_double(const std::string &tok) {
  double v = 0.0;
  const char *first = tok.data();
  const char *last = tok.data() + tok.size();
  if (first != last && *first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    return std::nullopt;
  return v;
}

/// Whitespace or comma separated columns; `#` starts a comment. A leading
/// non-numeric line is taken as a header of column names.
inline Table parse_table(std::istream &in, const std::string &source) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto fields = split_fields(line);
    if (fields.empty())
      continue;
    std::vector<double> row;
    row.reserve(fields.size());
    std::size_t bad = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) {
        bad = i;
        break;
      }
      row.push_back(*v);
    }
    if (bad != fields.size()) {
      if (t.header.empty() && t.line_numbers.empty()) {
        t.header = fields;
        width = fields.size();
        t.columns.resize(width);
        continue;
      }
      throw InputError(source + ":" + std::to_string(lineno) + ": cannot parse '" + fields[bad] +
                       "' as a number");
    }
    if (width == 0) {
      width = row.size();
      t.columns.resize(width);
    }
    if (row.size() != width)
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " columns, found " + std::to_string(row.size()));
    for (std::size_t i = 0; i < width; ++i)
      t.columns[i].push_back(row[i]);
    t.line_numbers.push_back(lineno);
  }
  return t;
}

inline Table read_table(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open input file '" + path + "'");
  return parse_table(in, path);
}

inline void check_increasing(const Table &t, const std::string &source) {
  const auto &x = t.columns.front();
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw InputError(source + ":" + std::to_string(t.line_numbers[i]) +
                       ": x must be strictly increasing (" + fmt(x[i]) + " after " + fmt(x[i - 1]) +
                       ")");
}

inline void check_uniform(const std::vector<double> &x, const std::string &source) {
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-6 * h)
      throw InputError(source + ": grid must be uniform (spacing differs at row " +
                       std::to_string(i + 1) + ")");
}

/// Two-column (x, f) input with at least two rows.
inline PointwiseData read_xy(const std::string &path, std::optional<double> lo,
                             std::optional<double> hi) {
  const Table t = read_table(path);
  if (t.rows() == 0)
    throw InputError(path + ": no data rows");
  if (t.columns.size() != 2)
    throw InputError(path + ": expected 2 columns (x, f), found " + std::to_string(t.columns.size()));
  if (t.rows() < 2)
    throw InputError(path + ": need at least two rows");
  check_increasing(t, path);
  const auto &x = t.columns[0];
  PointwiseData d;
  d.xs = x;
  d.fs = t.columns[1];
  d.domain_lo = lo.value_or(x.front() - 0.5 * (x[1] - x[0]));
  d.domain_hi = hi.value_or(x.back() + 0.5 * (x[x.size() - 1] - x[x.size() - 2]));
  if (!(d.domain_lo <= x.front()) || !(d.domain_hi >= x.back()))
    throw ConfigError("domain [" + fmt(d.domain_lo) + ", " + fmt(d.domain_hi) +
                      "] does not contain every sample");
  return d;
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string output; // empty: standard output
  int r = 2;
  int l = 2;
  std::optional<double> H;
  std::optional<double> H_int;
  bool adaptive = false;
  std::optional<bool> generalized_spline;
  bool periodic = false;
  std::optional<bool> window;
  bool filtered = false;
  std::string scalings;
  bool strict = false;
  std::optional<double> domain_lo;
  std::optional<double> domain_hi;
  double k_min = 0.0;
  std::optional<double> k_max;
  std::size_t k_count = 201;
  bool raw = false;
  double Z = 1.0;
  double m_i = 1.0;
  double e_charge = 1.0;
  unsigned threads = 0;
};

/// SIAC_THREADS, when set, caps the worker count.
inline unsigned threads_from_env() {
  const char *v = std::getenv("SIAC_THREADS");
  if (v == nullptr || *v == '\0')
    return 0;
  unsigned n = 0;
  const char *end = v + std::char_traits<char>::length(v);
  const auto [ptr, ec] = std::from_chars(v, end, n);
  if (ec != std::errc() || ptr != end || n == 0)
    throw ConfigError(std::string("SIAC_THREADS must be a positive integer, got '") + v + "'");
  return n;
}

/// Kernel spec for filter and spectrum runs on the given data domain.
inline KernelSpec kernel_spec(const RunConfig &c, double lo, double hi, double h_grid) {
  if (c.r < 0 || c.l < 1)
    throw ConfigError("need --r >= 0 and --l >= 1");
  KernelSpec s;
  s.r = c.r;
  s.order = c.l;
  s.domain_lo = lo;
  s.domain_hi = hi;
  s.mode = c.periodic ? BoundaryMode::periodic : BoundaryMode::position_dependent;
  s.generalized_spline = c.generalized_spline.value_or(false);
  if (c.adaptive || c.H_int) {
    if (!c.H_int)
      throw ConfigError("--adaptive needs --H-int");
    if (c.H)
      throw ConfigError("give either --H or --H-int, not both");
    s.scaling = AdaptiveScaling{*c.H_int, h_grid};
  } else {
    if (!c.H)
      throw ConfigError("kernel scaling missing: give --H (or --adaptive --H-int)");
    s.scaling = ConstantScaling{*c.H};
  }
  if (c.periodic && s.generalized_spline)
    throw ConfigError("--periodic cannot be combined with --generalized-spline");
  if (c.periodic && s.is_adaptive())
    throw ConfigError("--periodic cannot be combined with adaptive scaling");
  try {
    s.validate();
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  return s;
}

inline std::string describe_kernel(const KernelSpec &s) {
  std::string out;
  out += "# r = " + std::to_string(s.r) + "\n";
  out += "# l = " + std::to_string(s.order) + "\n";
  if (const auto *a = std::get_if<AdaptiveScaling>(&s.scaling)) {
    out += "# scaling = adaptive\n";
    out += "# H_int = " + fmt(a->H_int) + "\n";
    out += "# h_grid = " + fmt(a->h_grid) + "\n";
  } else {
    out += "# scaling = constant\n";
    out += "# H = " + fmt(std::get<ConstantScaling>(s.scaling).H) + "\n";
  }
  out += std::string("# generalized_spline = ") + (s.generalized_spline ? "true" : "false") + "\n";
  out += std::string("# boundary = ") +
         (s.mode == BoundaryMode::periodic ? "periodic" : "position_dependent") + "\n";
  out += "# domain = " + fmt(s.domain_lo) + " " + fmt(s.domain_hi) + "\n";
  return out;
}

inline void emit(const RunConfig &c, const std::string &text, std::ostream &out) {
  if (c.output.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(c.output);
  if (!f)
    throw InputError("cannot open output file '" + c.output + "'");
  f << text;
  if (!f)
    throw InputError("failed writing output file '" + c.output + "'");
}

// ---------------------------------------------------------------------------
// Subcommands

inline int run_filter(const RunConfig &c, std::ostream &out) {
  const PointwiseData d = read_xy(c.input, c.domain_lo, c.domain_hi);
  const double h_grid = (d.domain_hi - d.domain_lo) / static_cast<double>(d.xs.size());
  const KernelSpec spec = kernel_spec(c, d.domain_lo, d.domain_hi, h_grid);
  const auto interp = piecewise_constant(d, c.periodic);
  const auto f = filter_grid(interp, spec, d.xs, c.threads);

  std::string text = "# siac filter\n# input = " + c.input + "\n" + describe_kernel(spec);
  text += "# initialization = piecewise_constant\n";
  text += "# columns = x filtered\n";
  std::size_t bad = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bad += std::isfinite(f[i]) ? 0 : 1;
    text += fmt(d.xs[i]) + " " + fmt(f[i]) + "\n";
  }
  emit(c, text, out);
  if (c.strict && bad > 0)
    throw StrictFailure(std::to_string(bad) + " non-finite filtered values");
  return kOk;
}

inline int run_spectrum(const RunConfig &c, std::ostream &out) {
  const PointwiseData d = read_xy(c.input, c.domain_lo, c.domain_hi);
  check_uniform(d.xs, c.input);
  const double dx = (d.xs.back() - d.xs.front()) / static_cast<double>(d.xs.size() - 1);
  const bool window = c.window.value_or(!c.periodic);
  const Spectrum raw = amplitude_spectrum(d.fs, dx, window);

  std::string text = "# siac spectrum\n# input = " + c.input + "\n";
  text += "# samples = " + std::to_string(d.xs.size()) + "\n";
  text += "# dx = " + fmt(dx) + "\n";
  text += std::string("# window = ") + (window ? "hann" : "none") + "\n";
  std::optional<Spectrum> filt;
  if (c.filtered) {
    const double h_grid = (d.domain_hi - d.domain_lo) / static_cast<double>(d.xs.size());
    const KernelSpec spec = kernel_spec(c, d.domain_lo, d.domain_hi, h_grid);
    const auto f = filter_grid(piecewise_constant(d, c.periodic), spec, d.xs, c.threads);
    filt = amplitude_spectrum(f, dx, window);
    text += describe_kernel(spec);
    text += "# columns = k amplitude filtered_amplitude\n";
  } else {
    text += "# columns = k amplitude\n";
  }
  for (std::size_t m = 0; m < raw.k.size(); ++m) {
    text += fmt(raw.k[m]) + " " + fmt(raw.amplitudes[m]);
    if (filt)
      text += " " + fmt(filt->amplitudes[m]);
    text += "\n";
  }
  emit(c, text, out);
  return kOk;
}

inline int run_kernel_response(const RunConfig &c, std::ostream &out) {
  if (c.adaptive || c.H_int)
    throw ConfigError("kernel-response covers constant scaling only (no --adaptive / --H-int)");
  if (c.generalized_spline.value_or(false))
    throw ConfigError("kernel-response covers the symmetric kernel only (no --generalized-spline)");
  if (!c.H)
    throw ConfigError("kernel-response needs --H");
  if (!(*c.H > 0.0))
    throw ConfigError("--H must be positive");
  if (c.r < 0 || c.l < 1)
    throw ConfigError("need --r >= 0 and --l >= 1");
  const double H = *c.H;
  const double k_max = c.k_max.value_or(20.0 / H);
  if (c.k_count < 2 || !(k_max > c.k_min))
    throw ConfigError("need --k-count >= 2 and --k-max > --k-min");
  std::vector<double> ks(c.k_count);
  std::vector<double> vals(c.k_count);
  for (std::size_t i = 0; i < c.k_count; ++i) {
    ks[i] = c.k_min + (k_max - c.k_min) * static_cast<double>(i) / static_cast<double>(c.k_count - 1);
    vals[i] = std::abs(analytic_kernel_fourier(c.r, c.l, H, ks[i]));
  }
  std::string text = "# siac kernel-response\n";
  text += "# r = " + std::to_string(c.r) + "\n# l = " + std::to_string(c.l) + "\n";
  text += "# scaling = constant\n# H = " + fmt(H) + "\n";
  text += "# k_min = " + fmt(c.k_min) + "\n# k_max = " + fmt(k_max) + "\n";
  text += "# k_count = " + std::to_string(c.k_count) + "\n";
  text += "# columns = k response\n";
  for (std::size_t i = 0; i < ks.size(); ++i)
    text += fmt(ks[i]) + " " + fmt(vals[i]) + "\n";
  emit(c, text, out);
  return kOk;
}

/// {"q_n_e": 8, ...} overriding the per-variable scalings (in cells).
inline void apply_scalings_file(const std::string &path, BohmConfig &cfg) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open scalings file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.is_object())
    throw InputError(path + ": expected a JSON object of variable -> scaling");
  for (const auto &[key, value] : j.items()) {
    const auto m = moment_from_name(key);
    if (!m)
      throw ConfigError(path + ": unknown variable '" + key + "'");
    if (!value.is_number())
      throw ConfigError(path + ": scaling for '" + key + "' must be a number");
    const double v = value.get<double>();
    if (!(v > 0.0))
      throw ConfigError(path + ": scaling for '" + key + "' must be positive");
    cfg.scaling(*m) = v;
  }
}

inline MomentSet read_moments(const std::string &path) {
  const Table t = read_table(path);
  if (t.header.empty())
    throw InputError(path + ": missing header row naming the columns");
  auto column = [&](std::string_view name) -> const std::vector<double> & {
    for (std::size_t i = 0; i < t.header.size(); ++i)
      if (t.header[i] == name)
        return t.columns[i];
    throw InputError(path + ": missing column '" + std::string(name) + "'");
  };
  MomentSet m;
  m.xs = column("x");
  if (m.xs.size() < 2)
    throw InputError(path + ": need at least two rows");
  for (std::size_t i = 0; i < kMomentCount; ++i)
    m.profiles[i] = column(kMomentNames[i]);
  check_increasing(Table{{}, {m.xs}, t.line_numbers}, path);
  check_uniform(m.xs, path);
  return m;
}

inline int run_bohm(const RunConfig &c, std::ostream &out, std::ostream &err) {
  BohmConfig cfg;
  cfg.Z = c.Z;
  cfg.m_i = c.m_i;
  cfg.e_charge = c.e_charge;
  cfg.r = c.r;
  cfg.order = c.l;
  cfg.adaptive = c.adaptive;
  cfg.generalized_spline = c.generalized_spline.value_or(!c.periodic);
  if (c.r < 0 || c.l < 1)
    throw ConfigError("need --r >= 0 and --l >= 1");
  if (c.periodic && cfg.generalized_spline)
    throw ConfigError("--periodic cannot be combined with --generalized-spline");
  if (c.periodic && c.adaptive)
    throw ConfigError("--periodic cannot be combined with --adaptive");
  try {
    cfg.validate();
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  if (!c.scalings.empty())
    apply_scalings_file(c.scalings, cfg);

  const MomentSet m = read_moments(c.input);
  MomentSet used = m;
  if (!c.raw) {
    KernelSpec tmpl = moment_kernel_template(cfg);
    if (c.periodic)
      tmpl.mode = BoundaryMode::periodic;
    used = filter_moments(m, cfg, tmpl, c.threads);
  }
  const BohmResult res = compute_bohm_speed(used, cfg);

  std::string text = "# siac bohm\n# input = " + c.input + "\n";
  text += "# Z = " + fmt(cfg.Z) + "\n# m_i = " + fmt(cfg.m_i) + "\n# e = " + fmt(cfg.e_charge) + "\n";
  text += std::string("# filtered = ") + (c.raw ? "false" : "true") + "\n";
  if (!c.raw) {
    text += "# r = " + std::to_string(cfg.r) + "\n# l = " + std::to_string(cfg.order) + "\n";
    text += std::string("# scaling = ") + (cfg.adaptive ? "adaptive" : "constant") + "\n";
    text += std::string("# generalized_spline = ") + (cfg.generalized_spline ? "true" : "false") + "\n";
    text += std::string("# boundary = ") + (c.periodic ? "periodic" : "position_dependent") + "\n";
    text += "# scaling_cells =";
    for (std::size_t i = 0; i < kMomentCount; ++i)
      text += " " + std::string(kMomentNames[i]) + ":" + fmt(cfg.scaling_cells[i]);
    text += "\n";
  }
  text += "# columns = x beta u_bohm validity\n";
  for (std::size_t j = 0; j < m.size(); ++j)
    text += fmt(m.xs[j]) + " " + fmt(res.beta[j]) + " " + fmt(res.u_bohm[j]) + " " +
            std::to_string(static_cast<int>(res.validity[j])) + "\n";
  const std::string summary = "summary: real = " + std::to_string(res.count(Validity::real)) +
                              ", complex_modulus = " +
                              std::to_string(res.count(Validity::complex_modulus)) +
                              ", degenerate = " + std::to_string(res.count(Validity::degenerate));
  text += "# " + summary + "\n";
  emit(c, text, out);
  err << summary << "\n";
  if (c.strict && res.count(Validity::real) != m.size())
    throw StrictFailure("non-real Bohm speed at " + std::to_string(m.size() - res.count(Validity::real)) +
                        " points");
  return kOk;
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch

inline void add_kernel_options(CLI::App *sub, RunConfig &c, bool scaling) {
  sub->add_option("--r", c.r, "Polynomial degree reproduced by the kernel")->capture_default_str();
  sub->add_option("--l", c.l, "B-spline order")->capture_default_str();
  if (scaling) {
    sub->add_option("--H", c.H, "Constant kernel scaling");
    sub->add_option("--H-int", c.H_int, "Interior scaling for adaptive scaling");
    sub->add_flag("--adaptive", c.adaptive, "Shrink the scaling towards the boundaries");
  }
  sub->add_flag("--generalized-spline{true},--no-generalized-spline{false}", c.generalized_spline,
                "Add the boundary spline to shifted kernels");
  sub->add_flag("--periodic", c.periodic, "Periodic data, symmetric kernel everywhere");
}

inline void add_io_options(CLI::App *sub, RunConfig &c) {
  sub->add_option("input", c.input, "Input column file")->required();
  sub->add_option("-o,--output", c.output, "Output file (default: standard output)");
  sub->add_flag("--strict", c.strict, "Exit with status 3 on numerically degenerate results");
}

/// Parse and run; returns the process exit status.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"SIAC filtering of 1D profile data", "siac"};
  app.require_subcommand(1);
  RunConfig c;

  auto *filter = app.add_subcommand("filter", "Filter a two-column (x, f) file");
  add_io_options(filter, c);
  add_kernel_options(filter, c, true);
  filter->add_option("--domain-lo", c.domain_lo, "Left end of the data domain");
  filter->add_option("--domain-hi", c.domain_hi, "Right end of the data domain");

  auto *spectrum = app.add_subcommand("spectrum", "Single-sided amplitude spectrum of (x, f)");
  add_io_options(spectrum, c);
  add_kernel_options(spectrum, c, true);
  spectrum->add_option("--domain-lo", c.domain_lo, "Left end of the data domain");
  spectrum->add_option("--domain-hi", c.domain_hi, "Right end of the data domain");
  spectrum->add_flag("--window{true},--no-window{false}", c.window,
                     "Hann window (default: on unless --periodic)");
  spectrum->add_flag("--filtered", c.filtered, "Also report the spectrum of the filtered data");

  auto *response = app.add_subcommand("kernel-response", "|K^(k)| of the symmetric kernel");
  response->add_option("-o,--output", c.output, "Output file (default: standard output)");
  add_kernel_options(response, c, true);
  response->add_option("--k-min", c.k_min, "First wavenumber")->capture_default_str();
  response->add_option("--k-max", c.k_max, "Last wavenumber (default 20/H)");
  response->add_option("--k-count", c.k_count, "Number of wavenumbers")->capture_default_str();

  auto *bohm = app.add_subcommand("bohm", "Bohm speed from a table of moment profiles");
  add_io_options(bohm, c);
  add_kernel_options(bohm, c, false);
  bohm->add_flag("--adaptive", c.adaptive, "Adaptive scaling for every variable");
  bohm->add_option("--scalings", c.scalings, "JSON object of per-variable scalings in cells");
  bohm->add_flag("--raw", c.raw, "Skip filtering");
  bohm->add_option("--Z", c.Z, "Ion charge state")->capture_default_str();
  bohm->add_option("--m-i", c.m_i, "Ion mass")->capture_default_str();
  bohm->add_option("--e", c.e_charge, "Elementary charge")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    c.threads = threads_from_env();
    if (filter->parsed())
      return run_filter(c, out);
    if (spectrum->parsed())
      return run_spectrum(c, out);
    if (response->parsed())
      return run_kernel_response(c, out);
    return run_bohm(c, out, err);
  } catch (const InputError &e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const StrictFailure &e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const DegenerateKernel &e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  std::vector<const char *> argv{"siac"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace siac::tool
