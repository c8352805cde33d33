#include "odefilter/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "odefilter/diagnostics.hpp"
#include "odefilter/error.hpp"
#include "odefilter/format.hpp"
#include "odefilter/problems.hpp"
#include "odefilter/steady_state.hpp"
#include "odefilter/svg.hpp"

namespace odefilter {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) {
      out += sep;
    }
    out += parts[k];
  }
  return out;
}

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::ConfigError,
                "invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

template <class Int>
Int parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::ConfigError,
                "invalid integer '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::string vector_text(const Vector& v) {
  std::vector<std::string> parts;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    parts.push_back(format_shortest(v(k)));
  }
  return join(parts, ';');
}

struct PresetCurve {
  std::string problem;
  double sigma;
  std::vector<int> q;
  std::vector<std::string> noise;
};

struct Preset {
  std::string name;
  HGrid grid;
  std::vector<PresetCurve> curves;
  std::vector<int> guides;
  bool show_std;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    std::vector<std::string> fig3_noise;
    for (const char* k : {"0", "1", "10", "100", "3730", "1e4", "1e5", "1e6", "1e7"}) {
      fig3_noise.push_back(std::string("power:0.5:") + k);
    }
    return std::vector<Preset>{
        {"fig1",
         {0.1, 2.0, 8},
         {{"logistic", 50.0, {1, 2, 3, 4}, {"zero", "power:q:1"}},
          {"linear", 1.0, {1, 2, 3, 4}, {"zero", "power:q:1"}}},
         {1, 2, 3, 4, 5},
         false},
        {"fig2",
         {0.1, 2.0, 8},
         {{"logistic", 1.0, {1}, {"zero", "power:1:5e3"}},
          {"linear", 1.0, {1}, {"zero", "power:1:5e3"}}},
         {1, 2},
         true},
        {"fig3", {0.1, 4.0, 8}, {{"logistic", 1.0, {1}, fig3_noise}}, {1, 2}, true},
        {"figC", {0.1, 2.0, 8}, {{"riccati", std::sqrt(10.0), {1, 2, 3, 4}, {"zero"}}},
         {1, 2, 3, 4, 5}, false},
    };
  }();
  return table;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) {
      return p;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

}  // namespace

std::vector<double> HGrid::values() const {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(h0 / std::pow(factor, k));
  }
  return out;
}

std::string HGrid::to_string() const {
  return format_shortest(h0) + ":" + format_shortest(factor) + ":" + std::to_string(count);
}

HGrid HGrid::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw Error(ErrorCode::ConfigError, "h-grid must be H0:FACTOR:COUNT, got '" +
                                            std::string(text) + "'");
  }
  HGrid g;
  g.h0 = parse_number(parts[0], "h-grid H0");
  g.factor = parse_number(parts[1], "h-grid FACTOR");
  g.count = parse_integer<int>(parts[2], "h-grid COUNT");
  if (!(g.h0 > 0.0) || !(g.factor > 1.0) || g.count < 0) {
    throw Error(ErrorCode::ConfigError, "h-grid needs H0 > 0, FACTOR > 1 and COUNT >= 0");
  }
  return g;
}

NoiseModel resolve_noise(const std::string& spec, int q) {
  if (spec.starts_with("power:q:")) {
    return NoiseModel::parse("power:" + std::to_string(q) + ":" + spec.substr(8));
  }
  return NoiseModel::parse(spec);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Preset& p : presets()) {
      out.push_back(p.name);
    }
    return out;
  }();
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"problem", "q",    "prior", "theta", "sigma",
                                                "h",       "h-grid", "noise", "init",  "seed",
                                                "preset",  "out",  "svg"};
  return keys;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value(trim(raw));
  if (key == "problem") {
    const auto names = problem_names();
    if (std::find(names.begin(), names.end(), value) == names.end()) {
      throw Error(ErrorCode::ConfigError, "unknown problem '" + value + "'");
    }
    problem = value;
  } else if (key == "q") {
    std::vector<int> qs;
    for (const std::string& part : split(value, ',')) {
      const int v = parse_integer<int>(part, "q");
      if (v < 1) {
        throw Error(ErrorCode::ConfigError, "q must be >= 1");
      }
      qs.push_back(v);
    }
    q = qs;
  } else if (key == "prior") {
    prior = parse_prior_kind(value);
  } else if (key == "theta") {
    const double v = parse_number(value, "theta");
    if (v < 0.0) {
      throw Error(ErrorCode::ConfigError, "theta must be >= 0");
    }
    theta = v;
  } else if (key == "sigma") {
    const double v = parse_number(value, "sigma");
    if (!(v > 0.0)) {
      throw Error(ErrorCode::ConfigError, "sigma must be > 0");
    }
    sigma = v;
  } else if (key == "h") {
    const double v = parse_number(value, "h");
    if (!(v > 0.0)) {
      throw Error(ErrorCode::ConfigError, "h must be > 0");
    }
    h = v;
  } else if (key == "h-grid") {
    h_grid = HGrid::parse(value);
  } else if (key == "noise") {
    std::vector<std::string> specs = split(value, ',');
    for (const std::string& s : specs) {
      try {
        (void)resolve_noise(s, 1);
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
      }
    }
    noise = specs;
  } else if (key == "init") {
    (void)parse_init_mode(value, 0);
    init = value;
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(value, "seed");
  } else if (key == "preset") {
    (void)find_preset(value);
    preset = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "svg") {
    svg = value;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown setting '" + std::string(key) + "'");
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  if (problem) {
    os << "problem = " << *problem << '\n';
  }
  if (q) {
    std::vector<std::string> parts;
    for (int v : *q) {
      parts.push_back(std::to_string(v));
    }
    os << "q = " << join(parts, ',') << '\n';
  }
  if (prior) {
    os << "prior = " << odefilter::to_string(*prior) << '\n';
  }
  if (theta) {
    os << "theta = " << format_shortest(*theta) << '\n';
  }
  if (sigma) {
    os << "sigma = " << format_shortest(*sigma) << '\n';
  }
  if (h) {
    os << "h = " << format_shortest(*h) << '\n';
  }
  if (h_grid) {
    os << "h-grid = " << h_grid->to_string() << '\n';
  }
  if (noise) {
    os << "noise = " << join(*noise, ',') << '\n';
  }
  os << "init = " << init << '\n';
  os << "seed = " << seed << '\n';
  if (preset) {
    os << "preset = " << *preset << '\n';
  }
  if (!out.empty()) {
    os << "out = " << out << '\n';
  }
  if (!svg.empty()) {
    os << "svg = " << svg << '\n';
  }
  return os.str();
}

RunConfig RunConfig::from_text(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  for (const std::string& line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    cfg.set(trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
  }
  return cfg;
}

std::vector<RunSpec> expand_sweep(const RunConfig& config) {
  const InitMode init = parse_init_mode(config.init, config.seed);
  std::vector<PresetCurve> curves;
  std::vector<double> grid;
  if (config.preset) {
    if (config.problem || config.q || config.prior || config.theta || config.sigma ||
        config.noise || config.h) {
      throw Error(ErrorCode::ConfigError,
                  "preset '" + *config.preset +
                      "' fixes problem, q, prior, sigma and noise; only h-grid may be overridden");
    }
    const Preset& preset = find_preset(*config.preset);
    curves = preset.curves;
    grid = (config.h_grid ? *config.h_grid : preset.grid).values();
  } else {
    curves.push_back({config.problem.value_or("logistic"), config.sigma.value_or(1.0),
                      config.q.value_or(std::vector<int>{1}),
                      config.noise.value_or(std::vector<std::string>{"zero"})});
    if (config.h_grid) {
      grid = config.h_grid->values();
    } else if (config.h) {
      grid = {*config.h};
    }
  }
  const PriorKind kind = config.prior.value_or(PriorKind::IBM);
  const double theta = config.theta.value_or(0.0);

  std::vector<RunSpec> specs;
  for (const PresetCurve& curve : curves) {
    for (int q : curve.q) {
      for (const std::string& noise : curve.noise) {
        for (double h : grid) {
          RunSpec spec;
          spec.problem = curve.problem;
          spec.prior = kind == PriorKind::IBM ? PriorSpec::ibm(q, curve.sigma)
                                              : PriorSpec::ioup(q, theta, curve.sigma);
          if (kind == PriorKind::IBM && theta != 0.0) {
            throw Error(ErrorCode::ConfigError, "theta is only meaningful for the ioup prior");
          }
          spec.noise_spec = noise;
          spec.noise = resolve_noise(noise, q);
          spec.h = h;
          spec.init = init;
          specs.push_back(std::move(spec));
        }
      }
    }
  }
  return specs;
}

WpdRow run_point(const RunSpec& spec) {
  const IVProblem problem = problem_by_name(spec.problem);
  WpdRow row;
  row.problem = problem.name;
  row.params = problem.params;
  row.x0 = vector_text(problem.x0);
  row.T = problem.T;
  row.q = spec.prior.q;
  row.prior = odefilter::to_string(spec.prior.kind);
  row.theta = spec.prior.theta;
  row.sigma = spec.prior.sigma;
  row.noise = spec.noise.to_string();
  row.p = spec.noise.order();
  row.K_R = spec.noise.constant_factor();
  row.h = spec.h;
  row.n_evals = std::lround(problem.T / spec.h);
  row.permissible = spec.noise.is_permissible(spec.prior.q);

  const bool exact = problem.has_exact();
  auto state_error = [&](double t, const Matrix& m) {
    return (m.row(0).transpose() - problem.exact(t)).norm();
  };
  auto max_std = [](const std::vector<Matrix>& P) {
    double s = 0.0;
    for (const Matrix& Pj : P) {
      s = std::max(s, std::sqrt(std::max(Pj(0, 0), 0.0)));
    }
    return s;
  };
  auto delta1 = [&](const Matrix& m) {
    return (m.row(1).transpose() - problem.derivative(1, m.row(0).transpose())).norm();
  };

  SolveOptions options;
  options.keep_history = false;
  options.on_step = [&](const StepRecord& r) {
    if (exact) {
      row.max_error = std::max(row.max_error, state_error(r.t, r.m));
    }
    row.max_std = std::max(row.max_std, max_std(r.P));
    row.delta1_max = std::max(row.delta1_max, delta1(r.m));
  };
  const Trajectory traj = solve(problem, spec.prior, spec.h, spec.noise, spec.init, options);

  const Belief& init = traj.initial;
  if (exact) {
    row.max_error = std::max(row.max_error, state_error(0.0, init.m));
  } else {
    row.max_error = kNaN;
  }
  row.max_std = std::max(row.max_std, max_std(init.P));
  row.delta1_max = std::max(row.delta1_max, delta1(init.m));

  row.diverged = traj.diverged;
  if (traj.diverged) {
    row.final_error = row.final_std = row.delta1_final = kNaN;
    return row;
  }
  const Belief last = traj.records.empty() ? init : traj.records.back().posterior();
  row.final_error = exact ? state_error(last.t, last.m) : kNaN;
  row.final_std = max_std(last.P);
  row.delta1_final = delta1(last.m);
  return row;
}

std::vector<WpdRow> run_points(const std::vector<RunSpec>& specs, unsigned threads) {
  std::vector<WpdRow> rows(specs.size());
  std::vector<std::exception_ptr> failures(specs.size());
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      try {
        rows[k] = run_point(specs[k]);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& t : pool) {
    t.join();
  }
  for (const auto& f : failures) {
    if (f) {
      std::rethrow_exception(f);
    }
  }
  return rows;
}

void write_wpd_csv(std::ostream& os, const std::vector<WpdRow>& rows) {
  os << "problem,params,x0,T,q,prior,theta,sigma,noise,p,K_R,h,n_evals,final_error,max_error,"
        "final_std,max_std,delta1_final,delta1_max,diverged,permissible\n";
  for (const WpdRow& r : rows) {
    os << csv_field(r.problem) << ',' << csv_field(r.params) << ',' << csv_field(r.x0) << ','
       << format_double(r.T) << ',' << r.q << ',' << r.prior << ',' << format_double(r.theta)
       << ',' << format_double(r.sigma) << ',' << csv_field(r.noise) << ','
       << format_double(r.p) << ',' << format_double(r.K_R) << ',' << format_double(r.h) << ','
       << r.n_evals << ',' << format_double(r.final_error) << ','
       << format_double(r.max_error) << ',' << format_double(r.final_std) << ','
       << format_double(r.max_std) << ',' << format_double(r.delta1_final) << ','
       << format_double(r.delta1_max) << ',' << (r.diverged ? 1 : 0) << ','
       << (r.permissible ? 1 : 0) << '\n';
  }
}

namespace {

struct Curve {
  std::string label;
  std::vector<const WpdRow*> rows;
};

std::vector<Curve> group_curves(const std::vector<WpdRow>& rows) {
  std::vector<Curve> curves;
  std::map<std::string, std::size_t> index;
  for (const WpdRow& r : rows) {
    std::string label = r.problem + " q=" + std::to_string(r.q) + " " + r.noise +
                        " sigma=" + format_shortest(r.sigma);
    if (r.prior != "ibm") {
      label += " " + r.prior + " theta=" + format_shortest(r.theta);
    }
    auto [it, inserted] = index.emplace(label, curves.size());
    if (inserted) {
      curves.push_back({label, {}});
    }
    curves[it->second].rows.push_back(&r);
  }
  return curves;
}

std::string slope_text(const std::vector<const WpdRow*>& rows, double WpdRow::*field) {
  std::vector<double> h;
  std::vector<double> v;
  for (const WpdRow* r : rows) {
    if (r->diverged) {
      continue;
    }
    h.push_back(r->h);
    v.push_back(r->*field);
  }
  try {
    const OrderFit fit = fit_order(h, v);
    return fit.exact_zero ? std::string("exact") : format_shortest(std::round(fit.slope * 1000.0) / 1000.0);
  } catch (const Error&) {
    return "n/a";
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw Error(ErrorCode::ConfigError, "cannot open '" + path + "' for writing");
      }
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) {
    throw Error(ErrorCode::ConfigError, "cannot open '" + path + "' for writing");
  }
  f << text;
}

std::vector<double> require_sweep_grid(const RunConfig& cfg) {
  std::vector<double> grid;
  if (cfg.h_grid) {
    grid = cfg.h_grid->values();
  } else if (cfg.preset) {
    grid = find_preset(*cfg.preset).grid.values();
  }
  if (grid.size() < 4) {
    throw Error(ErrorCode::ConfigError, "this command needs --h-grid with at least 4 step sizes");
  }
  return grid;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.preset || cfg.h_grid) {
    throw Error(ErrorCode::ConfigError, "solve takes a single --h, not a preset or grid");
  }
  if (!cfg.h) {
    throw Error(ErrorCode::ConfigError, "solve needs --h");
  }
  if ((cfg.q && cfg.q->size() != 1) || (cfg.noise && cfg.noise->size() != 1)) {
    throw Error(ErrorCode::ConfigError, "solve takes a single q and a single noise model");
  }
  const std::vector<RunSpec> specs = expand_sweep(cfg);
  const RunSpec& spec = specs.front();
  const IVProblem problem = problem_by_name(spec.problem);
  const Trajectory traj = solve(problem, spec.prior, spec.h, spec.noise, spec.init);

  Output sink(cfg.out, out);
  std::ostream& os = sink.get();
  const int q = spec.prior.q;
  os << 't';
  for (int j = 0; j < problem.d; ++j) {
    for (int i = 0; i <= q; ++i) {
      os << ",m" << i << "_x" << j;
    }
  }
  for (int j = 0; j < problem.d; ++j) {
    os << ",std_x" << j;
  }
  os << ",residual_norm\n";
  for (const StepRecord& r : traj.records) {
    os << format_double(r.t);
    for (int j = 0; j < problem.d; ++j) {
      for (int i = 0; i <= q; ++i) {
        os << ',' << format_double(r.m(i, j));
      }
    }
    for (const Matrix& P : r.P) {
      os << ',' << format_double(std::sqrt(std::max(P(0, 0), 0.0)));
    }
    os << ',' << format_double(r.r.norm()) << '\n';
  }
  if (traj.diverged) {
    err << "diverged after " << traj.steps_taken << " steps: " << traj.diverged_reason << '\n';
    return 2;
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, bool misalign, std::ostream& out, std::ostream& err) {
  (void)require_sweep_grid(cfg);
  const std::vector<RunSpec> specs = expand_sweep(cfg);
  const std::vector<WpdRow> rows = run_points(specs);

  Output sink(cfg.out, out);
  std::ostream& os = sink.get();
  if (misalign) {
    os << "problem,params,T,q,sigma,noise,h,n_evals,delta1_final,delta1_max,diverged\n";
    for (const WpdRow& r : rows) {
      os << csv_field(r.problem) << ',' << csv_field(r.params) << ',' << format_double(r.T)
         << ',' << r.q << ',' << format_double(r.sigma) << ',' << csv_field(r.noise) << ','
         << format_double(r.h) << ',' << r.n_evals << ',' << format_double(r.delta1_final)
         << ',' << format_double(r.delta1_max) << ',' << (r.diverged ? 1 : 0) << '\n';
    }
  } else {
    write_wpd_csv(os, rows);
  }

  const std::vector<Curve> curves = group_curves(rows);
  const Preset* preset = cfg.preset ? &find_preset(*cfg.preset) : nullptr;
  const bool show_std = !misalign && (preset == nullptr || preset->show_std);
  for (const Curve& c : curves) {
    if (misalign) {
      err << c.label << ": delta1 slope " << slope_text(c.rows, &WpdRow::delta1_final) << '\n';
    } else {
      err << c.label << ": error slope " << slope_text(c.rows, &WpdRow::final_error)
          << ", std slope " << slope_text(c.rows, &WpdRow::max_std) << '\n';
    }
  }

  if (!cfg.svg.empty()) {
    LogLogChart chart;
    chart.title = preset != nullptr ? preset->name : (misalign ? "misalign" : "wpd");
    chart.x_label = "# evals of f";
    chart.y_label = misalign ? "final state misalignment" : "final global error";
    int max_q = 1;
    for (const Curve& c : curves) {
      ChartSeries s{c.label, {}, {}, false};
      ChartSeries sd{c.label + " std", {}, {}, true};
      for (const WpdRow* r : c.rows) {
        max_q = std::max(max_q, r->q);
        s.x.push_back(static_cast<double>(r->n_evals));
        s.y.push_back(misalign ? r->delta1_final : r->final_error);
        sd.x.push_back(static_cast<double>(r->n_evals));
        sd.y.push_back(r->final_std);
      }
      chart.series.push_back(std::move(s));
      if (show_std) {
        chart.series.push_back(std::move(sd));
      }
    }
    if (preset != nullptr) {
      chart.guide_orders = preset->guides;
    } else {
      for (int k = 1; k <= max_q + 1; ++k) {
        chart.guide_orders.push_back(k);
      }
    }
    write_text_file(cfg.svg, chart.render());
  }
  return 0;
}

int cmd_steady(const RunConfig& cfg, std::ostream& out) {
  if (cfg.preset) {
    throw Error(ErrorCode::ConfigError, "steady has no presets");
  }
  if (!cfg.h_grid) {
    throw Error(ErrorCode::ConfigError, "steady needs --h-grid");
  }
  if (cfg.noise && cfg.noise->size() != 1) {
    throw Error(ErrorCode::ConfigError, "steady takes a single noise model");
  }
  const std::vector<double> grid = cfg.h_grid->values();
  const double sigma = cfg.sigma.value_or(1.0);
  const NoiseModel noise = resolve_noise(cfg.noise ? cfg.noise->front() : "zero", 1);
  const OrderBoundReport report =
      verify_order_bounds(grid, sigma, noise.order(), noise.constant_factor());

  Output sink(cfg.out, out);
  std::ostream& os = sink.get();
  os << "h,R,quantity,closed_form,orbit_limit,discrepancy,bound_quantity,max_value,"
        "predicted_exponent,fitted_exponent\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double h = grid[k];
    const double R = noise.evaluate(h);
    const SteadyState cf = closed_form(h, sigma, R);
    const SteadyState ol = orbit_limit(h, sigma, R).state;
    struct Item {
      const char* name;
      double closed;
      double orbit;
      int bound;
    };
    const Item items[] = {{"P11_pred", cf.P11_pred, ol.P11_pred, 0},
                          {"P11", cf.P11, ol.P11, 1},
                          {"P01_pred", cf.P01_pred, ol.P01_pred, -1},
                          {"P01", cf.P01, ol.P01, 2},
                          {"beta0", cf.beta0, ol.beta0, 3},
                          {"beta1", cf.beta1, ol.beta1, 4}};
    for (const Item& it : items) {
      os << format_double(h) << ',' << format_double(R) << ',' << it.name << ','
         << format_double(it.closed) << ',' << format_double(it.orbit) << ','
         << format_double(std::abs(it.closed - it.orbit)) << ',';
      if (it.bound >= 0) {
        const OrderBoundQuantity& b = report.quantities[static_cast<std::size_t>(it.bound)];
        os << b.name << ',' << format_double(b.max_values[k]) << ','
           << format_double(b.predicted) << ',' << format_double(b.fitted) << '\n';
      } else {
        os << ",,,\n";
      }
    }
  }
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string key_help(const std::string& key) {
  static const std::map<std::string, std::string> help = {
      {"problem", "logistic|linear|riccati|constant"},
      {"q", "prior order, comma list for sweeps"},
      {"prior", "ibm|ioup"},
      {"theta", "ioup drift rate"},
      {"sigma", "diffusion scale"},
      {"h", "step size (solve)"},
      {"h-grid", "H0:FACTOR:COUNT, h_k = H0/FACTOR^k"},
      {"noise", "zero|const:R|power:P:K (P may be q or inf), comma list for sweeps"},
      {"init", "exact|perturbed:K0"},
      {"seed", "seed for perturbed initialisation"},
      {"preset", "fig1|fig2|fig3|figC"},
      {"out", "CSV output path (default stdout)"},
      {"svg", "log-log chart output path"},
  };
  return help.at(key);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian ODE filter experiments", "odefilter"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::string config_path;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "run one filter and print the trajectory"},
      {"wpd", "work-precision sweep over h, q and noise"},
      {"steady", "steady states and order bounds of the q = 1 recursion"},
      {"misalign", "final state misalignment sweep"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->set_help_flag("--help", "print this help and exit");
    sub->add_option("--config", config_path, "key = value settings file; flags override it");
    for (const std::string& key : config_keys()) {
      sub->add_option("--" + key, values[key], key_help(key));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = RunConfig::from_text(read_file(config_path));
    }
    for (const std::string& key : config_keys()) {
      if (sub->get_option("--" + key)->count() > 0) {
        cfg.set(key, values[key]);
      }
    }
    const std::string name = sub->get_name();
    if (name == "solve") {
      return cmd_solve(cfg, out, err);
    }
    if (name == "steady") {
      return cmd_steady(cfg, out);
    }
    return cmd_sweep(cfg, name == "misalign", out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace odefilter
