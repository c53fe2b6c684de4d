#pragma once

// Command implementations behind tools/evans_cli.cpp. Each command writes
// CSV to an ostream and diagnostics to a second one, and returns the
// process exit status (0 ok, 2 usage/config, 3 numerical failure).

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "evans/error_analysis.hpp"
#include "evans/errors.hpp"
#include "evans/evans.hpp"
#include "evans/method.hpp"
#include "evans/model.hpp"

namespace evans::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Below this every |E_D| counts as exact and no order is fitted.
inline constexpr double kExactThreshold = 1e-11;

struct ModelSpec {
  std::string name = "nagumo";
  double a = 0.3;
  double q = 0.0;
  double c = 0.0;
  double amplitude = 1.0;
  double width = 1.0;
  std::string profile_path;
};

struct LambdaSweep {
  double start = 1.0;
  double factor = 10.0;
  int count = 3;
};

struct RunConfig {
  ModelSpec model;
  Method method = Method::magnus4;
  std::vector<cplx> lambdas;
  std::optional<LambdaSweep> sweep;
  double L = 25.0;
  std::optional<int> N;
  std::vector<double> h;
  std::string output;
  std::string csv_path;
  int jobs = 0;
};

// Parsing helpers -----------------------------------------------------------

namespace detail {

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("cannot parse " + what + " '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw DomainError("cannot parse " + what + " '" + s + "'");
  return v;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Accepts "re", "re,im", "re+imi", "re-imi" and "imi".
inline cplx parse_lambda(const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw DomainError("empty lambda value");
  if (const auto comma = s.find(','); comma != std::string::npos)
    return {detail::parse_double(s.substr(0, comma), "lambda"), detail::parse_double(s.substr(comma + 1), "lambda")};
  if (s.back() != 'i' && s.back() != 'j') return {detail::parse_double(s, "lambda"), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // The split is the last sign that is not the leading one or part of an exponent.
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      std::string im = body.substr(i);
      if (im == "+" || im == "-") im += "1";
      return {detail::parse_double(body.substr(0, i), "lambda"), detail::parse_double(im, "lambda")};
    }
  }
  std::string im = body;
  if (im.empty() || im == "+" || im == "-") im += "1";
  return {0.0, detail::parse_double(im, "lambda")};
}

inline LambdaSweep parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw DomainError("--lambda-sweep expects start,factor,count");
  LambdaSweep sw;
  sw.start = detail::parse_double(parts[0], "sweep start");
  sw.factor = detail::parse_double(parts[1], "sweep factor");
  const double count = detail::parse_double(parts[2], "sweep count");
  if (count != std::floor(count) || count < 1 || count > 1e6) throw DomainError("sweep count must be a positive integer");
  sw.count = static_cast<int>(count);
  if (!(sw.start > 0.0) || !(sw.factor > 0.0) || sw.factor == 1.0)
    throw DomainError("sweep needs start > 0 and factor > 0, != 1");
  return sw;
}

inline std::vector<cplx> expand_sweep(const LambdaSweep& sw) {
  std::vector<cplx> out;
  double v = sw.start;
  for (int i = 0; i < sw.count; ++i, v *= sw.factor) out.emplace_back(v, 0.0);
  return out;
}

inline ReactionModel build_model(const ModelSpec& spec) {
  if (spec.name == "nagumo") return make_nagumo(spec.a);
  if (spec.name == "constant") return make_constant(spec.q, spec.c);
  if (spec.name == "bump") return make_bump(spec.q, spec.c, spec.amplitude, spec.width);
  if (spec.name == "profile") {
    if (spec.profile_path.empty()) throw DomainError("--model profile needs --profile <file>");
    std::ifstream in(spec.profile_path);
    if (!in) throw DomainError("cannot open profile file '" + spec.profile_path + "'");
    return make_tabulated(ingest_profile(in), spec.c);
  }
  throw DomainError("unknown model '" + spec.name + "' (nagumo, constant, bump, profile)");
}

// Formatting ----------------------------------------------------------------

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Worker pool ---------------------------------------------------------------

inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs task(i) for i in [0, n) on up to `jobs` threads. Results are stored
/// by index, so the output order never depends on scheduling. The first
/// exception (lowest index) is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& task) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Shared validation ---------------------------------------------------------

namespace detail {

/// Lists every inadmissible lambda in one message.
inline void check_admissible(const ReactionModel& model, const std::vector<cplx>& lambdas) {
  std::vector<std::string> bad;
  for (const cplx& l : lambdas)
    if (!build_frame(model, l).admissible) bad.push_back(format_lambda(l));
  if (bad.empty()) return;
  std::string msg = "inadmissible lambda (needs Re kappa_- > 0 and Re kappa_+ > 0):";
  for (const auto& b : bad) msg += " " + b;
  throw DomainError(msg);
}

inline std::vector<cplx> lambdas_of(const RunConfig& cfg) {
  std::vector<cplx> out = cfg.lambdas;
  if (cfg.sweep) {
    const auto more = expand_sweep(*cfg.sweep);
    out.insert(out.end(), more.begin(), more.end());
  }
  if (out.empty()) throw DomainError("no lambda given (use --lambda or --lambda-sweep)");
  return out;
}

/// The single grid of evaluate/sweep: exactly one of N or h.
inline GridSpec single_grid(const RunConfig& cfg, std::ostream& err) {
  if (cfg.N && !cfg.h.empty()) throw DomainError("give either --N or --h, not both");
  if (cfg.N) return GridSpec::from_steps(cfg.L, *cfg.N);
  if (cfg.h.size() != 1) throw DomainError("give exactly one of --N or --h");
  bool rounded = false;
  const GridSpec g = GridSpec::from_step(cfg.L, cfg.h.front(), &rounded);
  if (rounded)
    err << "warning: L/h = " << num(cfg.L / cfg.h.front()) << " is not an integer; using N = " << g.N
        << " (h = " << num(g.h()) << ")\n";
  return g;
}

inline std::vector<GridSpec> step_grids(const RunConfig& cfg, std::ostream& err) {
  if (cfg.N) throw DomainError("this command takes --h values, not --N");
  std::vector<GridSpec> out;
  for (double h : cfg.h) {
    bool rounded = false;
    out.push_back(GridSpec::from_step(cfg.L, h, &rounded));
    if (rounded)
      err << "warning: L/h = " << num(cfg.L / h) << " is not an integer; using N = " << out.back().N
          << " (h = " << num(out.back().h()) << ")\n";
  }
  return out;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

inline std::string fit_line(const std::string& key, const std::vector<std::pair<double, double>>& samples) {
  const bool exact = std::all_of(samples.begin(), samples.end(),
                                 [](const auto& s) { return s.second <= kExactThreshold; });
  if (exact) return "# " + key + "=exact";
  const bool fittable = samples.size() >= 3 && std::all_of(samples.begin(), samples.end(), [](const auto& s) {
                          return s.second > 0.0;
                        });
  if (!fittable) return "# " + key + "=undefined";
  return "# " + key + "=" + num(fit_order(samples).slope);
}

}  // namespace detail

// Commands ------------------------------------------------------------------

/// One row per lambda: lambda_re,lambda_im,D_re,D_im,method,h,L,N.
inline int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ReactionModel model = build_model(cfg.model);
    const auto lambdas = detail::lambdas_of(cfg);
    const GridSpec grid = detail::single_grid(cfg, err);
    detail::check_admissible(model, lambdas);
    const auto rows = parallel_map<std::string>(lambdas.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
      const auto r = evaluate_evans(model, lambdas[i], grid, cfg.method);
      return num(lambdas[i].real()) + "," + num(lambdas[i].imag()) + "," + num(r.value.real()) + "," +
             num(r.value.imag()) + "," + to_string(cfg.method) + "," + num(grid.h()) + "," + num(grid.L) + "," +
             std::to_string(grid.N);
    });
    out << "lambda_re,lambda_im,D_re,D_im,method,h,L,N\n";
    for (const auto& row : rows) out << row << "\n";
    return kExitOk;
  });
}

/// |E_D| for each step size at one lambda, then "# fitted_order=<slope>" or
/// "# exact".
inline int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ReactionModel model = build_model(cfg.model);
    const auto lambdas = detail::lambdas_of(cfg);
    if (lambdas.size() != 1) throw DomainError("converge takes exactly one lambda");
    if (cfg.h.size() < 3) throw DomainError("converge needs at least 3 --h values");
    const auto grids = detail::step_grids(cfg, err);
    detail::check_admissible(model, lambdas);
    const cplx lambda = lambdas.front();
    const cplx ref = reference_evans(model, lambda, cfg.L);
    const auto errs = parallel_map<double>(grids.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
      return std::abs(measure_evans_error(model, lambda, grids[i], cfg.method, ref).measured_E_D);
    });
    std::vector<std::pair<double, double>> samples;
    out << "h,abs_E_D\n";
    for (std::size_t i = 0; i < grids.size(); ++i) {
      out << num(grids[i].h()) << "," << num(errs[i]) << "\n";
      samples.emplace_back(grids[i].h(), errs[i]);
    }
    const std::string line = detail::fit_line("fitted_order", samples);
    out << (line == "# fitted_order=exact" ? std::string("# exact") : line) << "\n";
    return kExitOk;
  });
}

/// (|lambda|, |E_D|, |D_num - D_asym|) per lambda with fitted slopes of both
/// error columns against |lambda|.
inline int cmd_sweep_lambda(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ReactionModel model = build_model(cfg.model);
    const auto lambdas = detail::lambdas_of(cfg);
    if (lambdas.size() < 3) throw DomainError("lambda sweep needs at least 3 values");
    const GridSpec grid = detail::single_grid(cfg, err);
    detail::check_admissible(model, lambdas);
    const AsymptoticSeries series = asymptotic_series(model, 2);
    struct Row {
      double abs_lambda, e_d, asym;
    };
    const auto rows = parallel_map<Row>(lambdas.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
      const auto rep = measure_evans_error(model, lambdas[i], grid, cfg.method);
      return Row{std::abs(lambdas[i]), std::abs(rep.measured_E_D),
                 std::abs(rep.value - asymptotic_evans(series, lambdas[i]))};
    });
    std::vector<std::pair<double, double>> se, sa;
    out << "abs_lambda,abs_E_D,abs_asym_residual\n";
    for (const auto& r : rows) {
      out << num(r.abs_lambda) << "," << num(r.e_d) << "," << num(r.asym) << "\n";
      se.emplace_back(r.abs_lambda, r.e_d);
      sa.emplace_back(r.abs_lambda, r.asym);
    }
    out << detail::fit_line("fitted_slope_E_D", se) << "\n";
    out << detail::fit_line("fitted_slope_asym", sa) << "\n";
    return kExitOk;
  });
}

/// Measured against predicted E_D for every (lambda, h) pair.
inline int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (cfg.method == Method::gauss_legendre4)
      throw DomainError("gl4 has no closed-form prediction (only an order bound)");
    const ReactionModel model = build_model(cfg.model);
    const auto lambdas = detail::lambdas_of(cfg);
    std::vector<GridSpec> grids;
    if (cfg.N)
      grids.push_back(detail::single_grid(cfg, err));
    else
      grids = detail::step_grids(cfg, err);
    if (grids.empty()) throw DomainError("predict needs --h or --N");
    detail::check_admissible(model, lambdas);
    const auto refs = parallel_map<cplx>(lambdas.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
      return reference_evans(model, lambdas[i], cfg.L);
    });
    const std::size_t n = lambdas.size() * grids.size();
    const auto rows = parallel_map<std::string>(n, resolve_jobs(cfg.jobs), [&](std::size_t idx) {
      const std::size_t li = idx / grids.size(), gi = idx % grids.size();
      const auto rep = measure_evans_error(model, lambdas[li], grids[gi], cfg.method, refs[li]);
      const cplx pred = rep.predicted_E_D.value_or(cplx{});
      return num(lambdas[li].real()) + "," + num(lambdas[li].imag()) + "," + num(grids[gi].h()) + "," +
             num(rep.measured_E_D.real()) + "," + num(rep.measured_E_D.imag()) + "," + num(pred.real()) + "," +
             num(pred.imag()) + "," + (rep.ratio ? num(*rep.ratio) : std::string());
    });
    out << "lambda_re,lambda_im,h,measured_re,measured_im,predicted_re,predicted_im,ratio\n";
    for (const auto& row : rows) out << row << "\n";
    return kExitOk;
  });
}

/// Converged reference values, one row per lambda (used for fixtures).
inline int cmd_reference(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ReactionModel model = build_model(cfg.model);
    const auto lambdas = detail::lambdas_of(cfg);
    detail::check_admissible(model, lambdas);
    const auto refs = parallel_map<cplx>(lambdas.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
      return reference_evans(model, lambdas[i], cfg.L, cfg.method);
    });
    out << "lambda_re,lambda_im,D_re,D_im,method,L\n";
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      out << num(lambdas[i].real()) << "," << num(lambdas[i].imag()) << "," << num(refs[i].real()) << ","
          << num(refs[i].imag()) << "," << to_string(cfg.method) << "," << num(cfg.L) << "\n";
    return kExitOk;
  });
}

// Plot scripts --------------------------------------------------------------

enum class CsvKind { evaluate, converge, sweep, predict };

inline std::optional<CsvKind> classify_header(const std::string& header) {
  if (header == "lambda_re,lambda_im,D_re,D_im,method,h,L,N") return CsvKind::evaluate;
  if (header == "h,abs_E_D") return CsvKind::converge;
  if (header == "abs_lambda,abs_E_D,abs_asym_residual") return CsvKind::sweep;
  if (header == "lambda_re,lambda_im,h,measured_re,measured_im,predicted_re,predicted_im,ratio")
    return CsvKind::predict;
  return std::nullopt;
}

/// Gnuplot script for a CSV written by this tool; `csv_reference` is the
/// path written into the plot commands.
inline std::string plot_script(CsvKind kind, const std::string& csv_reference) {
  std::ostringstream s;
  s << "set datafile separator ','\n";
  s << "set key autotitle columnhead top right\n";
  const std::string file = "'" + csv_reference + "'";
  switch (kind) {
    case CsvKind::evaluate:
      s << "set xlabel 'Re lambda'\nset ylabel 'D(lambda)'\n";
      s << "plot " << file << " using 1:3 with linespoints title 'Re D', \\\n     " << file
        << " using 1:4 with linespoints title 'Im D'\n";
      break;
    case CsvKind::converge:
      s << "set logscale xy\nset format y '%g'\nset xlabel 'h'\nset ylabel '|E_D|'\n";
      s << "plot " << file << " using 1:2 with linespoints title '|E_D|'\n";
      break;
    case CsvKind::sweep:
      s << "set logscale xy\nset format y '%g'\nset xlabel '|lambda|'\nset ylabel 'error'\n";
      s << "plot " << file << " using 1:2 with linespoints title '|E_D|', \\\n     " << file
        << " using 1:3 with linespoints title '|D - D_asym|'\n";
      break;
    case CsvKind::predict:
      s << "set logscale x\nset xlabel 'h'\nset ylabel 'measured / predicted'\n";
      s << "plot " << file << " using 3:8 with points title 'ratio'\n";
      break;
  }
  return s.str();
}

inline int cmd_plotscript(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    namespace fs = std::filesystem;
    if (cfg.csv_path.empty()) throw DomainError("plotscript needs a CSV path");
    std::ifstream in(cfg.csv_path);
    if (!in) throw DomainError("cannot open CSV file '" + cfg.csv_path + "'");
    std::string header;
    for (std::string line; std::getline(in, line);) {
      line = detail::trim(line);
      if (line.empty() || line.front() == '#') continue;
      header = line;
      break;
    }
    const auto kind = classify_header(header);
    if (!kind) throw DomainError("unrecognized CSV header '" + header + "'");
    const fs::path base = cfg.output.empty() ? fs::current_path() : fs::absolute(cfg.output).parent_path();
    const std::string ref = fs::proximate(fs::absolute(cfg.csv_path), base).generic_string();
    out << plot_script(*kind, ref);
    return kExitOk;
  });
}

}  // namespace evans::cli
