#include "jcasbeam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "jcasbeam/array.hpp"
#include "jcasbeam/combiner.hpp"
#include "jcasbeam/oracle.hpp"
#include "jcasbeam/rng.hpp"
#include "jcasbeam/sdr.hpp"
#include "jcasbeam/subbeam.hpp"

namespace jcasbeam {

namespace {

// ---------------------------------------------------------------------------
// formatting

std::string format_number(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

class CsvBuilder {
 public:
  CsvBuilder(const ExperimentConfig& cfg, const std::string& subcommand, const std::string& header,
             const std::vector<std::string>& comments = {}) {
    os_ << "# jcasbeam " << kVersion << "\n";
    os_ << "# subcommand=" << subcommand << "\n";
    char hash[32];
    std::snprintf(hash, sizeof(hash), "0x%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    os_ << "# config_hash=" << hash << " seed=" << cfg.seed << " trials=" << cfg.trials << "\n";
    for (const auto& c : comments) os_ << "# " << c << "\n";
    os_ << header << "\n";
  }

  void cell(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
  }
  void cell(double v) { cell(format_number(v)); }
  void cell(int v) { cell(std::to_string(v)); }
  void endrow() {
    os_ << '\n';
    first_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

// ---------------------------------------------------------------------------
// minimal SVG line chart (native, no plotting dependency)

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<SvgSeries>& series) {
  static const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49",
                                   "#775ca8", "#2e4057", "#8d96a3", "#00798c"};
  const int width = 920, height = 560;
  const double left = 80, right = 40, top = 50, bottom = 70;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"17\" "
        "font-family=\"sans-serif\">"
     << title << "</text>\n";
  // frame and ticks
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
     << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    os << "<line x1=\"" << px(xv) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(xv)
       << "\" y2=\"" << top + plot_h + 6 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << px(xv) << "\" y=\"" << top + plot_h + 22
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
       << format_number(xv) << "</text>\n";
    os << "<line x1=\"" << left - 6 << "\" y1=\"" << py(yv) << "\" x2=\"" << left << "\" y2=\""
       << py(yv) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << left - 10 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
       << format_number(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
     << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" << xlabel
     << "</text>\n";
  os << "<text x=\"20\" y=\"" << top + plot_h / 2
     << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
        "transform=\"rotate(-90 20 "
     << top + plot_h / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (auto [x, y] : series[i].points) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    const double ly = top + 18 + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
       << left + plot_w - 125 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2.5\"/>\n";
    os << "<text x=\"" << left + plot_w - 118 << "\" y=\"" << ly + 4
       << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[i].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// shared experiment machinery

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (trial + 0x51ULL));
  return splitmix64(s);
}

// Everything about one scanning direction that does not depend on the
// channel realization.
struct DirectionContext {
  double direction = 0.0;  // radians
  SubbeamPair pair;
  AngularPowerMatrix apm;
  CVec w_ref;              // waveform-optimized reference weights
  DesiredPattern desired;  // flat phases
  double waveform_budget = 0.0;
  double m1_phase = 0.0;
};

DirectionContext make_direction_context(const ExperimentConfig& cfg,
                                        const std::vector<double>& grid, double direction) {
  DirectionContext ctx;
  ctx.direction = direction;
  const double los = deg2rad(cfg.los_direction_deg);
  ctx.pair = SubbeamPair{
      conventional_beam(cfg.fixed_beam_elements, cfg.elements, los),
      steer(conventional_beam(cfg.scan_beam_elements, cfg.elements, 0.0), direction), cfg.rho};
  const double half_range = deg2rad(cfg.integration_range_deg) / 2.0;
  ctx.apm = angular_power_matrix(direction - half_range, direction + half_range,
                                 cfg.integration_steps, cfg.elements);
  ctx.desired = desired_multibeam(ctx.pair, grid);
  ctx.w_ref = ils_synthesize(ctx.desired, cfg.elements, cfg.ils_iterations).weights;
  ctx.waveform_budget = cfg.bounds_scale * waveform_mse(ctx.w_ref, ctx.desired);
  const CVec a_los = steering_vector(los, cfg.elements);
  const Complex pc = a_los.cwiseProduct(ctx.pair.w_fixed).sum();
  const Complex ps = a_los.cwiseProduct(ctx.pair.w_scan).sum();
  ctx.m1_phase = std::arg(pc * std::conj(ps));
  return ctx;
}

ChannelSimConfig channel_config(const ExperimentConfig& cfg) {
  ChannelSimConfig ch;
  ch.los_aod = deg2rad(cfg.los_direction_deg);
  ch.los_aoa = deg2rad(cfg.los_direction_deg);
  ch.num_paths = cfg.paths;
  ch.los_nlos_ratio_db = cfg.los_nlos_ratio_db;
  ch.angular_spread = deg2rad(cfg.angular_spread_deg);
  ch.tx_elements = cfg.elements;
  ch.rx_elements = cfg.elements;
  return ch;
}

/// Magnitude-fit mismatch: phases are taken from the pattern of w itself, so
/// the metric compares shapes, not phase conventions.
double pattern_fit_mse(const CVec& w, const DesiredPattern& base) {
  DesiredPattern d = base;
  const CVec pat = pattern(w, d.grid);
  for (Eigen::Index i = 0; i < pat.size(); ++i) {
    d.phases[i] = std::polar(1.0, std::arg(pat[i]));
  }
  return waveform_mse(w, d);
}

struct MethodOutcome {
  CVec w;          // unit norm
  bool ok = false;
};

MethodOutcome eval_combiner_method(const std::string& name, const DirectionContext& ctx,
                                   const CMat& h, const ExperimentConfig& cfg) {
  MethodOutcome out;
  double phi = 0.0;
  if (name == "m1-ref") {
    phi = ctx.m1_phase;
  } else if (name == "unconstrained") {
    phi = unconstrained_phi_opt(ctx.pair, h).phi;
  } else if (name == "p1") {
    const std::vector<double> thetas{ctx.direction};
    const std::vector<double> ratios{cfg.gain_ratio};
    const auto sol = solve_p1(ctx.pair, h, thetas, ratios);
    if (sol.status == SolveStatus::Infeasible) return out;
    phi = sol.phi;
  } else if (name == "p2") {
    const auto sol = solve_p2(ctx.pair, h, ctx.apm, cfg.scan_power_ratio, ctx.w_ref);
    if (sol.status == SolveStatus::Infeasible) return out;
    phi = sol.phi;
  } else if (name == "p3") {
    const auto sol = solve_p3(ctx.pair, h, ctx.direction, cfg.rx_power_ratio);
    if (sol.status == SolveStatus::Infeasible) return out;
    phi = sol.phi;
  } else if (name == "p4") {
    const auto sol = solve_p4(ctx.pair, h, ctx.apm, cfg.rx_power_ratio);
    if (sol.status == SolveStatus::Infeasible) return out;
    phi = sol.phi;
  } else {
    throw std::invalid_argument("unknown combiner method '" + name + "'");
  }
  CVec w = combine(ctx.pair, phi);
  const double n = w.norm();
  if (n == 0.0) return out;
  out.w = w / n;
  out.ok = true;
  return out;
}

GlobalKind global_kind(const std::string& name) {
  if (name == "p5") return GlobalKind::P5RxPower;
  if (name == "p6") return GlobalKind::P6WaveformFit;
  if (name == "p7") return GlobalKind::P7ScanGain;
  if (name == "p8") return GlobalKind::P8ScanPower;
  throw std::invalid_argument("unknown global method '" + name + "'");
}

MethodOutcome eval_global_method(const std::string& name, const DirectionContext& ctx,
                                 const CMat& h, const ExperimentConfig& cfg) {
  MethodOutcome out;
  const GlobalKind kind = global_kind(name);
  GlobalInputs gi;
  gi.channel = h;
  gi.num_elements = cfg.elements;
  gi.desired = ctx.desired;
  gi.scan_direction = ctx.direction;
  gi.waveform_bound = ctx.waveform_budget;
  if (kind != GlobalKind::P5RxPower) {
    gi.rx_power_bound = cfg.rx_power_ratio * communication_reference_power(ctx.pair, h);
  }
  if (kind == GlobalKind::P8ScanPower) gi.scan_range = ctx.apm;
  SdpIlsOptions opts;
  opts.max_outer_iters = cfg.global_iterations;
  const auto sol = sdp_ils(kind, gi, opts);
  if (sol.status != GlobalStatus::Optimal) return out;
  out.w = sol.w_t;
  out.ok = true;
  return out;
}

MethodOutcome eval_method(const std::string& name, const DirectionContext& ctx, const CMat& h,
                          const ExperimentConfig& cfg, bool is_global) {
  return is_global ? eval_global_method(name, ctx, h, cfg)
                   : eval_combiner_method(name, ctx, h, cfg);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct MetricAccumulator {
  double rx_sum = 0.0;
  double mse_sum = 0.0;
  int count = 0;
};

}  // namespace

bool OracleReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const OraclePropertyResult& p) { return p.passed; });
}

std::string OracleReport::to_text() const {
  std::ostringstream os;
  os << "oracle suite (jcasbeam " << kVersion << ")\n";
  for (const auto& p : properties) {
    os << (p.passed ? "PASS" : "FAIL") << "  " << p.name << "  max_gap=" << format_number(p.max_gap);
    if (!p.detail.empty()) os << "  (" << p.detail << ")";
    os << "\n";
  }
  os << (all_passed() ? "all properties passed\n" : "PROPERTY FAILURES DETECTED\n");
  return os.str();
}

ExperimentRunner::ExperimentRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

RunResult ExperimentRunner::run_pattern(bool with_svg) const {
  RunResult result;
  const auto grid = default_angle_grid(cfg_.grid_points);
  const auto ctx = make_direction_context(cfg_, grid, deg2rad(cfg_.pattern_direction_deg));
  const CMat h = sample_rician_channel(channel_config(cfg_), trial_seed(cfg_.seed, 0)).matrix;

  CsvBuilder csv(cfg_, "pattern", "method,angle_deg,gain_db",
                 {"scan_direction_deg=" + format_number(cfg_.pattern_direction_deg)});
  std::vector<SvgSeries> series;
  auto emit = [&](const std::string& name, bool is_global) {
    const auto outcome = eval_method(name, ctx, h, cfg_, is_global);
    if (!outcome.ok) {
      ++result.failures;
      return;
    }
    SvgSeries s;
    s.label = name;
    for (double theta : grid) {
      const double g = bf_gain(theta, outcome.w);
      const double db = 10.0 * std::log10(std::max(g, 1e-12));
      csv.cell(name);
      csv.cell(rad2deg(theta));
      csv.cell(db);
      csv.endrow();
      s.points.push_back({rad2deg(theta), db});
    }
    series.push_back(std::move(s));
  };
  for (const auto& m : cfg_.combiner_methods) emit(m, false);
  for (const auto& m : cfg_.global_methods) emit(m, true);
  result.csv = csv.str();
  if (with_svg) {
    result.svg = render_svg("beam patterns at " + format_number(cfg_.pattern_direction_deg) +
                                " deg scan",
                            "angle (deg)", "gain (dB)", series);
  }
  return result;
}

RunResult ExperimentRunner::run_sweep(const std::string& parameter, double from, double to,
                                      int steps, bool with_svg) const {
  if (parameter != "cs" && parameter != "cp") {
    throw std::invalid_argument("sweep parameter must be 'cs' or 'cp'");
  }
  if (steps < 1) throw std::invalid_argument("sweep needs at least one step");
  if (from < 0.0 || to > 1.0 || from > to) {
    throw std::invalid_argument("sweep bounds must satisfy 0 <= from <= to <= 1");
  }
  RunResult result;
  const auto grid = default_angle_grid(cfg_.grid_points);
  const auto ctx = make_direction_context(cfg_, grid, deg2rad(cfg_.sweep_direction_deg));
  const std::vector<std::string> methods =
      parameter == "cs" ? std::vector<std::string>{"unconstrained", "p1"}
                        : std::vector<std::string>{"unconstrained", "p3", "p4"};

  std::vector<double> values(steps);
  for (int k = 0; k < steps; ++k) {
    values[k] = steps == 1 ? from : from + (to - from) * k / (steps - 1);
  }

  // metrics[value][method] accumulated over trials in index order.
  std::vector<std::vector<MetricAccumulator>> acc(values.size(),
                                                  std::vector<MetricAccumulator>(methods.size()));
  std::vector<std::vector<std::vector<std::pair<double, double>>>> per_trial(
      cfg_.trials, std::vector<std::vector<std::pair<double, double>>>(
                       values.size(), std::vector<std::pair<double, double>>(
                                          methods.size(), {std::nan(""), std::nan("")})));
  const ChannelSimConfig ch = channel_config(cfg_);
  const CVec w_full =
      conventional_beam(cfg_.elements, cfg_.elements, deg2rad(cfg_.los_direction_deg));

  parallel_for(cfg_.trials, cfg_.threads, [&](int t) {
    const CMat h = sample_rician_channel(ch, trial_seed(cfg_.seed, t)).matrix;
    const double norm = (h * w_full).squaredNorm();
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      ExperimentConfig swept = cfg_;
      if (parameter == "cs") {
        swept.gain_ratio = values[vi];
      } else {
        swept.rx_power_ratio = values[vi];
      }
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto outcome = eval_combiner_method(methods[mi], ctx, h, swept);
        if (!outcome.ok) continue;
        per_trial[t][vi][mi] = {received_power(h, outcome.w) / norm,
                                pattern_fit_mse(outcome.w, ctx.desired)};
      }
    }
  });
  for (int t = 0; t < cfg_.trials; ++t) {
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto [rx, mse] = per_trial[t][vi][mi];
        if (std::isnan(rx)) {
          ++result.failures;
          continue;
        }
        acc[vi][mi].rx_sum += rx;
        acc[vi][mi].mse_sum += mse;
        ++acc[vi][mi].count;
      }
    }
  }

  CsvBuilder csv(cfg_, "sweep", "sweep_value,method,mean_normalized_rx_power,mean_waveform_mse",
                 {"parameter=" + parameter +
                  " direction_deg=" + format_number(cfg_.sweep_direction_deg)});
  std::vector<SvgSeries> series(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) series[mi].label = methods[mi];
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto& a = acc[vi][mi];
      if (a.count == 0) continue;
      csv.cell(values[vi]);
      csv.cell(methods[mi]);
      csv.cell(a.rx_sum / a.count);
      csv.cell(a.mse_sum / a.count);
      csv.endrow();
      series[mi].points.push_back({values[vi], a.rx_sum / a.count});
    }
  }
  result.csv = csv.str();
  if (with_svg) {
    result.svg = render_svg("constraint sweep (" + parameter + ")", parameter,
                            "mean normalized rx power", series);
  }
  return result;
}

RunResult ExperimentRunner::run_directions(bool with_svg) const {
  RunResult result;
  const auto grid = default_angle_grid(cfg_.grid_points);
  std::vector<DirectionContext> contexts;
  contexts.reserve(cfg_.scan_directions_deg.size());
  for (double deg : cfg_.scan_directions_deg) {
    contexts.push_back(make_direction_context(cfg_, grid, deg2rad(deg)));
  }
  std::vector<std::string> methods = cfg_.combiner_methods;
  const std::size_t first_global = methods.size();
  methods.insert(methods.end(), cfg_.global_methods.begin(), cfg_.global_methods.end());

  const ChannelSimConfig ch = channel_config(cfg_);
  const CVec w_full =
      conventional_beam(cfg_.elements, cfg_.elements, deg2rad(cfg_.los_direction_deg));
  std::vector<std::vector<std::vector<std::pair<double, double>>>> per_trial(
      cfg_.trials, std::vector<std::vector<std::pair<double, double>>>(
                       contexts.size(), std::vector<std::pair<double, double>>(
                                            methods.size(), {std::nan(""), std::nan("")})));

  parallel_for(cfg_.trials, cfg_.threads, [&](int t) {
    const CMat h = sample_rician_channel(ch, trial_seed(cfg_.seed, t)).matrix;
    const double norm = (h * w_full).squaredNorm();
    for (std::size_t di = 0; di < contexts.size(); ++di) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto outcome =
            eval_method(methods[mi], contexts[di], h, cfg_, mi >= first_global);
        if (!outcome.ok) continue;
        per_trial[t][di][mi] = {received_power(h, outcome.w) / norm,
                                pattern_fit_mse(outcome.w, contexts[di].desired)};
      }
    }
  });

  std::vector<std::vector<MetricAccumulator>> acc(
      contexts.size(), std::vector<MetricAccumulator>(methods.size()));
  for (int t = 0; t < cfg_.trials; ++t) {
    for (std::size_t di = 0; di < contexts.size(); ++di) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto [rx, mse] = per_trial[t][di][mi];
        if (std::isnan(rx)) {
          ++result.failures;
          continue;
        }
        acc[di][mi].rx_sum += rx;
        acc[di][mi].mse_sum += mse;
        ++acc[di][mi].count;
      }
    }
  }

  CsvBuilder csv(cfg_, "directions",
                 "direction_deg,method,mean_normalized_rx_power,mean_waveform_mse");
  std::vector<SvgSeries> series(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) series[mi].label = methods[mi];
  for (std::size_t di = 0; di < contexts.size(); ++di) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto& a = acc[di][mi];
      if (a.count == 0) continue;
      csv.cell(cfg_.scan_directions_deg[di]);
      csv.cell(methods[mi]);
      csv.cell(a.rx_sum / a.count);
      csv.cell(a.mse_sum / a.count);
      csv.endrow();
      series[mi].points.push_back({cfg_.scan_directions_deg[di], a.rx_sum / a.count});
    }
  }
  result.csv = csv.str();
  if (with_svg) {
    result.svg = render_svg("received power vs scanning direction", "scan direction (deg)",
                            "mean normalized rx power", series);
  }
  return result;
}

RunResult ExperimentRunner::run_paths(const std::vector<int>& path_counts, bool with_svg) const {
  if (path_counts.empty()) throw std::invalid_argument("paths run needs at least one count");
  for (int l : path_counts) {
    if (l < 1) throw std::invalid_argument("path counts must be positive");
  }
  RunResult result;
  const auto grid = default_angle_grid(cfg_.grid_points);
  const auto ctx = make_direction_context(cfg_, grid, deg2rad(cfg_.paths_direction_deg));
  std::vector<std::string> methods = cfg_.combiner_methods;
  const std::size_t first_global = methods.size();
  methods.insert(methods.end(), cfg_.global_methods.begin(), cfg_.global_methods.end());
  const CVec w_full =
      conventional_beam(cfg_.elements, cfg_.elements, deg2rad(cfg_.los_direction_deg));

  std::vector<std::vector<std::vector<std::pair<double, double>>>> per_trial(
      cfg_.trials, std::vector<std::vector<std::pair<double, double>>>(
                       path_counts.size(), std::vector<std::pair<double, double>>(
                                               methods.size(), {std::nan(""), std::nan("")})));
  parallel_for(cfg_.trials, cfg_.threads, [&](int t) {
    for (std::size_t li = 0; li < path_counts.size(); ++li) {
      ChannelSimConfig ch = channel_config(cfg_);
      ch.num_paths = path_counts[li];
      const CMat h = sample_rician_channel(ch, trial_seed(cfg_.seed, t)).matrix;
      const double norm = (h * w_full).squaredNorm();
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto outcome = eval_method(methods[mi], ctx, h, cfg_, mi >= first_global);
        if (!outcome.ok) continue;
        per_trial[t][li][mi] = {received_power(h, outcome.w) / norm,
                                pattern_fit_mse(outcome.w, ctx.desired)};
      }
    }
  });

  std::vector<std::vector<MetricAccumulator>> acc(path_counts.size(),
                                                  std::vector<MetricAccumulator>(methods.size()));
  for (int t = 0; t < cfg_.trials; ++t) {
    for (std::size_t li = 0; li < path_counts.size(); ++li) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto [rx, mse] = per_trial[t][li][mi];
        if (std::isnan(rx)) {
          ++result.failures;
          continue;
        }
        acc[li][mi].rx_sum += rx;
        acc[li][mi].mse_sum += mse;
        ++acc[li][mi].count;
      }
    }
  }

  CsvBuilder csv(cfg_, "paths", "num_paths,method,mean_normalized_rx_power,mean_waveform_mse",
                 {"direction_deg=" + format_number(cfg_.paths_direction_deg)});
  std::vector<SvgSeries> series(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) series[mi].label = methods[mi];
  for (std::size_t li = 0; li < path_counts.size(); ++li) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto& a = acc[li][mi];
      if (a.count == 0) continue;
      csv.cell(path_counts[li]);
      csv.cell(methods[mi]);
      csv.cell(a.rx_sum / a.count);
      csv.cell(a.mse_sum / a.count);
      csv.endrow();
      series[mi].points.push_back({double(path_counts[li]), a.rx_sum / a.count});
    }
  }
  result.csv = csv.str();
  if (with_svg) {
    result.svg = render_svg("received power vs path count", "paths",
                            "mean normalized rx power", series);
  }
  return result;
}

OracleReport ExperimentRunner::run_oracle_suite(int seeds, bool corrupt_solver) const {
  if (seeds < 1) throw std::invalid_argument("oracle suite needs at least one seed");
  OracleReport report;
  const double corruption = corrupt_solver ? 0.05 : 0.0;
  const auto grid = default_angle_grid(cfg_.grid_points);
  const ChannelSimConfig ch = channel_config(cfg_);
  const auto& dirs = cfg_.scan_directions_deg;

  // 1. Closed-form combining solvers dominate the exhaustive grid search.
  {
    OraclePropertyResult prop;
    prop.name = "combiner-grid-dominance";
    double worst = -1e300;
    bool ok = true;
    for (int s = 0; s < seeds; ++s) {
      const double dir = deg2rad(dirs[s % dirs.size()]);
      const auto ctx = make_direction_context(cfg_, grid, dir);
      const CMat h = sample_rician_channel(ch, trial_seed(cfg_.seed ^ 0xabcdULL, s)).matrix;
      const auto& pair = ctx.pair;

      const CVec hc = std::sqrt(pair.rho) * (h * pair.w_fixed);
      const CVec hs = std::sqrt(1 - pair.rho) * (h * pair.w_scan);
      const CVec wc = std::sqrt(pair.rho) * pair.w_fixed;
      const CVec ws = std::sqrt(1 - pair.rho) * pair.w_scan;
      auto rx = [&](double phi) {
        const Complex r = std::polar(1.0, phi);
        return (hc + r * hs).squaredNorm() / (wc + r * ws).squaredNorm();
      };
      const CVec a = steering_vector(dir, cfg_.elements);
      const Complex gc = std::sqrt(pair.rho) * a.cwiseProduct(pair.w_fixed).sum();
      const Complex gs = std::sqrt(1 - pair.rho) * a.cwiseProduct(pair.w_scan).sum();
      auto gain = [&](double phi) {
        const Complex r = std::polar(1.0, phi);
        return std::norm(gc + r * gs) / (wc + r * ws).squaredNorm();
      };
      auto spow = [&](double phi) { return combined_scan_power(pair, ctx.apm, phi); };

      const double gain_threshold =
          cfg_.gain_ratio * cfg_.gain_ratio * (1 - pair.rho) * cfg_.elements;
      const double spow_threshold =
          cfg_.scan_power_ratio * std::real(ctx.w_ref.dot(ctx.apm.matrix * ctx.w_ref));
      const double rx_threshold =
          cfg_.rx_power_ratio * communication_reference_power(pair, h);

      struct Instance {
        double phi;
        std::function<double(double)> objective;
        std::vector<std::function<double(double)>> constraints;
      };
      std::vector<Instance> instances;
      instances.push_back({unconstrained_phi_opt(pair, h).phi, rx, {}});
      {
        const std::vector<double> thetas{dir};
        const std::vector<double> ratios{cfg_.gain_ratio};
        const auto sol = solve_p1(pair, h, thetas, ratios);
        if (sol.status != SolveStatus::Infeasible && sol.relaxation_rounds == 0) {
          instances.push_back(
              {sol.phi, rx, {[&, gain_threshold](double p) { return gain(p) - gain_threshold; }}});
        }
      }
      {
        const auto sol = solve_p2(pair, h, ctx.apm, cfg_.scan_power_ratio, ctx.w_ref);
        if (sol.status != SolveStatus::Infeasible && sol.relaxation_rounds == 0) {
          instances.push_back(
              {sol.phi, rx, {[&, spow_threshold](double p) { return spow(p) - spow_threshold; }}});
        }
      }
      {
        const auto sol = solve_p3(pair, h, dir, cfg_.rx_power_ratio);
        if (sol.status != SolveStatus::Infeasible) {
          instances.push_back(
              {sol.phi, gain, {[&, rx_threshold](double p) { return rx(p) - rx_threshold; }}});
        }
      }
      {
        const auto sol = solve_p4(pair, h, ctx.apm, cfg_.rx_power_ratio);
        if (sol.status != SolveStatus::Infeasible) {
          instances.push_back(
              {sol.phi, spow, {[&, rx_threshold](double p) { return rx(p) - rx_threshold; }}});
        }
      }
      for (const auto& inst : instances) {
        const auto oracle = grid_search_phi(inst.objective, inst.constraints, 200000);
        if (!oracle.found) continue;
        const double got = inst.objective(inst.phi + corruption);
        const double gap = (oracle.value - got) / (1.0 + std::abs(oracle.value));
        worst = std::max(worst, gap);
        if (gap > 1e-8) ok = false;
      }
    }
    prop.passed = ok;
    prop.max_gap = worst;
    prop.detail = "objective shortfall relative to a 200k-point grid";
    report.properties.push_back(std::move(prop));
  }

  // 2. Real-embedding equivalence of every quadratic form.
  {
    OraclePropertyResult prop;
    prop.name = "embedding-equivalence";
    Rng rng(cfg_.seed ^ 0x5151ULL);
    double worst = 0.0;
    const int m = 6;
    for (int s = 0; s < 250; ++s) {
      CMat h(m, m);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) h(r, c) = rng.circular_gaussian();
      }
      CVec w(m);
      for (int i = 0; i < m; ++i) w[i] = rng.circular_gaussian();
      const RVec we = embed_complex_vector(w);
      const double theta = rng.uniform(-1.3, 1.3);
      const auto apm = angular_power_matrix(theta - 0.1, theta + 0.1, 8, m);

      DesiredPattern d;
      d.grid = {-0.9, -0.4, 0.1, 0.5, 1.0};
      d.weights = RVec::Ones(5);
      d.magnitudes.resize(5);
      for (int i = 0; i < 5; ++i) d.magnitudes[i] = rng.uniform(0.1, 2.0);
      d.phases.resize(5);
      for (int i = 0; i < 5; ++i) d.phases[i] = std::polar(1.0, rng.uniform(-kPi, kPi));

      const double rx_gap =
          std::abs(we.dot(build_rx_quadratic(h) * we) - (h * w).squaredNorm()) /
          (1.0 + (h * w).squaredNorm());
      const double gain_val = bf_gain(theta, w) * w.squaredNorm();
      const double gain_gap =
          std::abs(we.dot(build_gain_quadratic(theta, m) * we) - gain_val) / (1.0 + gain_val);
      const double pow_val = std::real(w.dot(apm.matrix * w));
      const double pow_gap =
          std::abs(we.dot(build_power_quadratic(apm) * we) - pow_val) / (1.0 + std::abs(pow_val));
      const double wv_val = waveform_mse(w, d);
      const double wv_gap =
          std::abs(we.dot(build_waveform_quadratic(d, m) * we) - wv_val) / (1.0 + wv_val);
      worst = std::max({worst, rx_gap, gain_gap, pow_gap, wv_gap});
    }
    prop.passed = worst <= 1e-9;
    prop.max_gap = worst;
    prop.detail = "relative mismatch between complex and embedded forms";
    report.properties.push_back(std::move(prop));
  }

  // 3. Coarse angular integration against the 4096-step reference.
  {
    OraclePropertyResult prop;
    prop.name = "integration-refinement";
    double worst = 0.0;
    for (double deg : dirs) {
      const double dir = deg2rad(deg);
      const double half = deg2rad(cfg_.integration_range_deg) / 2.0;
      const CMat ref = integration_reference(dir - half, dir + half, cfg_.elements);
      const auto coarse = angular_power_matrix(dir - half, dir + half, cfg_.integration_steps,
                                               cfg_.elements);
      worst = std::max(worst, (coarse.matrix - ref).cwiseAbs().maxCoeff());
    }
    prop.passed = worst < 1e-3;
    prop.max_gap = worst;
    prop.detail = "entrywise error at the configured step count";
    report.properties.push_back(std::move(prop));
  }

  // 4. Global design dominates sampled feasible beamformers at small scale.
  {
    OraclePropertyResult prop;
    prop.name = "sdr-sampled-dominance";
    double worst = -1e300;
    bool ok = true;
    ExperimentConfig small = cfg_;
    small.elements = 4;
    small.fixed_beam_elements = 4;
    small.scan_beam_elements = 3;
    const auto sgrid = default_angle_grid(91);
    ChannelSimConfig sch = channel_config(small);
    const int instances = std::min(seeds, 10);
    for (int s = 0; s < instances; ++s) {
      const double dir = deg2rad(dirs[s % dirs.size()]);
      const auto ctx = make_direction_context(small, sgrid, dir);
      const CMat h = sample_rician_channel(sch, trial_seed(small.seed ^ 0x4d4ULL, s)).matrix;
      GlobalInputs gi;
      gi.channel = h;
      gi.num_elements = 4;
      gi.desired = ctx.desired;
      gi.waveform_bound = ctx.waveform_budget;
      const auto sol = sdp_ils(GlobalKind::P5RxPower, gi, {});
      if (sol.status != GlobalStatus::Optimal) {
        ok = false;
        continue;
      }
      const RMat waveform = build_waveform_quadratic(ctx.desired, 4);
      std::vector<std::function<double(const CVec&)>> cons{[&](const CVec& w) {
        const RVec we = embed_complex_vector(w);
        return *gi.waveform_bound - we.dot(waveform * we);
      }};
      const auto oracle = sampled_search_w(
          [&](const CVec& w) { return (h * w).squaredNorm(); }, cons, 4, 10000,
          trial_seed(small.seed, 900 + s));
      if (!oracle.found) continue;
      const double got = sol.rx_power * (1.0 - corruption / 2.0);
      const double gap = oracle.value - got;
      worst = std::max(worst, gap);
      if (gap > 1e-6) ok = false;
    }
    prop.passed = ok;
    prop.max_gap = worst;
    prop.detail = "best sampled feasible received power minus the SDR design's";
    report.properties.push_back(std::move(prop));
  }

  // 5. Feasible-set membership against raw constraint evaluation.
  {
    OraclePropertyResult prop;
    prop.name = "feasible-set-membership";
    double worst = 0.0;
    bool ok = true;
    Rng rng(cfg_.seed ^ 0x777ULL);
    for (int s = 0; s < std::min(seeds, 20); ++s) {
      const double dir = deg2rad(dirs[s % dirs.size()]);
      const auto ctx = make_direction_context(cfg_, grid, dir);
      const CMat h = sample_rician_channel(ch, trial_seed(cfg_.seed ^ 0x88ULL, s)).matrix;
      const std::vector<double> thetas{dir};
      const std::vector<double> ratios{cfg_.gain_ratio};
      const auto gain_set = feasible_set_gain(ctx.pair, thetas, ratios);
      const auto rx_set = feasible_set_rxpower(ctx.pair, h, cfg_.rx_power_ratio);
      const double gain_threshold =
          cfg_.gain_ratio * cfg_.gain_ratio * (1 - ctx.pair.rho) * cfg_.elements;
      const double rx_threshold =
          cfg_.rx_power_ratio * communication_reference_power(ctx.pair, h);
      for (int k = 0; k < 500; ++k) {
        const double phi = rng.uniform(-kPi, kPi);
        const double raw_gain = combined_gain(ctx.pair, dir, phi) - gain_threshold;
        const double raw_rx = combined_rx_power(ctx.pair, h, phi) - rx_threshold;
        if (gain_set.contains(phi, -1e-9) && raw_gain < -1e-8) {
          ok = false;
          worst = std::max(worst, -raw_gain);
        }
        if (!gain_set.contains(phi, 1e-6) && raw_gain > 1e-8) {
          ok = false;
          worst = std::max(worst, raw_gain);
        }
        if (rx_set.contains(phi, -1e-9) && raw_rx < -1e-8) {
          ok = false;
          worst = std::max(worst, -raw_rx);
        }
        if (!rx_set.contains(phi, 1e-6) && raw_rx > 1e-8) {
          ok = false;
          worst = std::max(worst, raw_rx);
        }
      }
    }
    prop.passed = ok;
    prop.max_gap = worst;
    prop.detail = "largest raw-constraint disagreement at sampled phases";
    report.properties.push_back(std::move(prop));
  }

  return report;
}

}  // namespace jcasbeam
