#pragma once

// Sweeps behind the command-line subcommands. Each returns a Table that is
// written as CSV (or plotted as SVG); rows come out in a fixed order no
// matter how many worker threads computed them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "uvturb/cli/config.hpp"
#include "uvturb/geometry.hpp"
#include "uvturb/mcsim.hpp"
#include "uvturb/modem.hpp"

namespace uvturb::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int failures = 0;  // rows whose computation failed
};

inline std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(const Table& t, std::ostream& os) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) os << ',';
      os << csv_field(cells[k]);
    }
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

/// f(0..n-1) on up to `jobs` threads; results kept in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) out[k] = f(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Row cells plus the failure message, if any.
struct RowResult {
  std::vector<std::vector<std::string>> rows;
  int failures = 0;
};

inline void append(Table& t, std::vector<RowResult>&& parts) {
  for (auto& p : parts) {
    for (auto& r : p.rows) t.rows.push_back(std::move(r));
    t.failures += p.failures;
  }
}

// --- channels ---------------------------------------------------------------

struct LabeledChannel {
  double cn2 = std::numeric_limits<double>::quiet_NaN();  // NaN for explicit shapes
  NlosChannel channel;
  std::optional<LinkBudget> budget;
};

inline double tx_power(const RunConfig& c) { return c.link_budget ? c.link_budget->tx_power : 1.0; }

inline LinkBudget budget_for(const RunConfig& c, const LinkGeometry& g, double cn2) {
  Atmosphere atm = c.atmosphere;
  atm.cn2 = cn2;
  return link_budget(g, atm, tx_power(c), c.wavelength);
}

inline std::vector<LabeledChannel> channels_for(const RunConfig& c) {
  std::vector<LabeledChannel> out;
  if (c.channel) {
    LabeledChannel lc;
    lc.channel = build_channel(c.channel->omega_v, c.channel->e2, c.channel->link1, c.channel->link2);
    out.push_back(lc);
    return out;
  }
  for (double cn2 : c.cn2_list) {
    LabeledChannel lc;
    lc.cn2 = cn2;
    lc.budget = budget_for(c, c.geometry, cn2);
    lc.channel = lc.budget->channel;
    out.push_back(lc);
  }
  return out;
}

inline std::vector<Modulation> schemes_or_all(const RunConfig& c) {
  if (!c.schemes.empty()) return c.schemes;
  return {Modulation::bpsk(), Modulation::qpsk(), Modulation::dpsk(), Modulation::ncfsk()};
}

// --- channel ----------------------------------------------------------------

inline Table run_channel(const RunConfig& c) {
  Table t;
  t.header = {"cn2", "alpha1", "beta1", "alpha2", "beta2", "s", "a", "h", "omega_r", "perturbation_applied",
              "r1_m", "r2_m", "theta_s_deg", "omega_v", "e2"};
  for (const auto& lc : channels_for(c)) {
    const auto& ch = lc.channel;
    std::vector<std::string> row = {fmt(lc.cn2), fmt(ch.link1.alpha), fmt(ch.link1.beta), fmt(ch.alpha2),
                                    fmt(ch.beta2), fmt(ch.s), fmt(ch.a), fmt(ch.h), fmt(ch.omega_r),
                                    ch.perturbation_applied ? "1" : "0"};
    if (lc.budget) {
      row.insert(row.end(), {fmt(lc.budget->volume.r1), fmt(lc.budget->volume.r2),
                             fmt(lc.budget->volume.theta_s * 180.0 / std::numbers::pi), fmt(lc.budget->omega_v),
                             fmt(lc.budget->e2)});
    } else {
      row.insert(row.end(), {"", "", "", fmt(ch.link1.mean_power), fmt(ch.e2)});
    }
    t.rows.push_back(row);
  }
  return t;
}

// --- pdf --------------------------------------------------------------------

inline Table run_pdf(const RunConfig& c, unsigned jobs) {
  Table t;
  t.header = {"cn2", "i_n", "method", "pdf", "degenerate", "error"};
  const auto chans = channels_for(c);
  std::vector<double> grid;
  const int n = c.pdf.points;
  for (int k = 0; k < n; ++k) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    grid.push_back(c.pdf.i_start * std::pow(c.pdf.i_stop / c.pdf.i_start, frac));
  }
  for (const auto& lc : chans) {
    auto parts = parallel_map<RowResult>(grid.size(), jobs, [&](std::size_t k) {
      RowResult r;
      for (const auto& m : c.pdf.methods) {
        std::vector<std::string> row = {fmt(lc.cn2), fmt(grid[k]), m.label()};
        try {
          Density d;
          if (m.method == Method::meijer) d = pdf_meijer(lc.channel, grid[k]);
          else if (m.method == Method::series) d = pdf_series(lc.channel, grid[k], m.terms);
          else d = pdf_quadrature_normalized(lc.channel, grid[k]);
          row.insert(row.end(), {fmt(d.value), d.degenerate ? "1" : "0", ""});
        } catch (const std::exception& e) {
          row.insert(row.end(), {"", "", e.what()});
          ++r.failures;
        }
        r.rows.push_back(row);
      }
      return r;
    });
    append(t, std::move(parts));
  }
  return t;
}

// --- ber sweep --------------------------------------------------------------

inline std::string error_text(const std::exception& e) { return e.what(); }

inline Table run_ber_sweep(const RunConfig& c, unsigned jobs, std::uint64_t seed) {
  Table t;
  t.header = {"cn2", "snr_db", "scheme", "method", "error_rate", "trunc_bound", "stderr", "out_of_range", "error"};
  const auto schemes = schemes_or_all(c);
  const std::vector<MethodSpec> methods =
      c.methods.empty() ? std::vector<MethodSpec>{parse_method("meijer")} : c.methods;
  std::vector<double> snrs;
  for (double db : c.snr_db) snrs.push_back(db_to_linear(db));

  for (const auto& lc : channels_for(c)) {
    // Monte-Carlo estimates share one set of fading draws per method.
    std::map<std::size_t, std::vector<std::vector<ErrorRateResult>>> mc;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (methods[m].method != Method::monte_carlo || snrs.empty()) continue;
      SimConfig sim;
      sim.sample_count = methods[m].samples;
      sim.rng_seed = seed;
      sim.stream_count = c.mc.streams;
      sim.threads = jobs;
      mc[m] = empirical_error_rates(lc.channel, snrs, schemes, sim);
    }
    auto parts = parallel_map<RowResult>(snrs.size(), jobs, [&](std::size_t a) {
      RowResult r;
      for (std::size_t b = 0; b < schemes.size(); ++b) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
          std::vector<std::string> row = {fmt(lc.cn2), fmt(c.snr_db[a]), to_string(schemes[b].kind),
                                          methods[m].label()};
          try {
            ErrorRateResult res;
            double bound = std::numeric_limits<double>::quiet_NaN();
            std::string note;
            switch (methods[m].method) {
              case Method::meijer: res = error_rate(lc.channel, snrs[a], schemes[b], Route::meijer()); break;
              case Method::series:
                res = error_rate(lc.channel, snrs[a], schemes[b], Route::series(methods[m].terms));
                bound = res.truncation_upper;
                break;
              case Method::quadrature: res = error_rate_quadrature(lc.channel, snrs[a], schemes[b]); break;
              case Method::asymptotic: res = asymptotic_error(lc.channel, snrs[a], schemes[b]); break;
              case Method::monte_carlo: {
                res = mc.at(m)[a][b];
                const double expected = res.probability * static_cast<double>(methods[m].samples);
                if (expected < 100.0) {
                  throw StatisticalPowerError("fewer than 100 expected error events; raise the mc sample count");
                }
                break;
              }
            }
            row.insert(row.end(), {fmt(res.probability), fmt(bound),
                                   res.method == Method::monte_carlo ? fmt(res.standard_error) : "",
                                   res.out_of_range ? "1" : "0", note});
          } catch (const std::exception& e) {
            row.insert(row.end(), {"", "", "", "", error_text(e)});
            ++r.failures;
          }
          r.rows.push_back(row);
        }
      }
      return r;
    });
    append(t, std::move(parts));
  }
  return t;
}

// --- geometry sweep ---------------------------------------------------------

inline Table run_geometry_sweep(const RunConfig& c, unsigned jobs) {
  if (!c.geom_sweep) throw ConfigError("geom-sweep needs a [geom_sweep] section");
  if (c.cn2_list.empty()) throw ConfigError("geom-sweep derives shapes from geometry; give cn2 in [atmosphere]");
  const auto& gs = *c.geom_sweep;
  Table t;
  t.header = {"cn2", "theta_r_deg", "theta_t_deg", "e", "r", "alpha1", "beta1", "alpha2", "beta2", "omega_r",
              "snr_db", "scheme", "turbulence", "ber", "reason"};
  const auto schemes = schemes_or_all(c);
  const double deg = 180.0 / std::numbers::pi;
  const auto angles = detail::grid(gs.theta_start, gs.theta_stop, gs.theta_step, "[geom_sweep]");  // degrees

  for (double cn2 : c.cn2_list) {
    auto parts = parallel_map<RowResult>(angles.size(), jobs, [&](std::size_t k) {
      RowResult r;
      const double th = angles[k] / deg;
      LinkGeometry g = c.geometry;
      std::string reason;
      std::optional<LinkBudget> b;
      try {
        if (gs.ellipse) {
          g = ellipse_configuration(gs.e, gs.r, th, c.geometry);
        } else {
          g.theta_r = th;
          g.baseline_r = gs.r;
        }
        b = budget_for(c, g, cn2);
      } catch (const DomainError& e) {
        reason = e.what();
      }
      if (!b) {
        // Unreachable geometry: skipped with its reason, not a failure.
        r.rows.push_back({fmt(cn2), fmt(angles[k]), "", gs.ellipse ? fmt(gs.e) : "", fmt(gs.r), "", "", "", "", "",
                          "", "", "", "", reason});
        return r;
      }
      const auto& ch = b->channel;
      const double snr = gs.snr_db ? db_to_linear(*gs.snr_db)
                                   : mean_snr(ch.omega_r, c.link_budget->eta_f, c.link_budget->eta_r, c.wavelength,
                                              c.link_budget->bit_rate);
      for (const auto& m : schemes) {
        for (int turb = 1; turb >= 0; --turb) {
          if (turb ? !gs.with_turbulence : !gs.without_turbulence) continue;
          std::vector<std::string> row = {fmt(cn2), fmt(angles[k]), fmt(g.theta_t * deg), gs.ellipse ? fmt(gs.e) : "",
                                          fmt(gs.r), fmt(ch.link1.alpha), fmt(ch.link1.beta), fmt(ch.alpha2),
                                          fmt(ch.beta2), fmt(ch.omega_r), fmt(linear_to_db(snr)),
                                          to_string(m.kind), turb ? "on" : "off"};
          try {
            double ber = 0.0;
            if (!turb) {
              ber = conditional_error(m, snr);
            } else if (gs.route.method == Method::quadrature) {
              ber = error_rate_quadrature(ch, snr, m).probability;
            } else {
              const Route route = gs.route.method == Method::series ? Route::series(gs.route.terms) : Route::meijer();
              ber = error_rate(ch, snr, m, route).probability;
            }
            row.insert(row.end(), {fmt(ber), ""});
          } catch (const std::exception& e) {
            row.insert(row.end(), {"", e.what()});
            ++r.failures;
          }
          r.rows.push_back(row);
        }
      }
      return r;
    });
    append(t, std::move(parts));
  }
  return t;
}

// --- penalty ----------------------------------------------------------------

inline Table run_penalty(const RunConfig& c) {
  if (!c.penalty) throw ConfigError("penalty needs a [penalty] section");
  Table t;
  t.header = {"cn2", "scheme_pair", "target_ber", "bisection_db", "closed_form_db", "snr_a_db", "snr_b_db", "error"};
  for (const auto& lc : channels_for(c)) {
    for (const auto& [a, b] : c.penalty->pairs) {
      for (double target : c.penalty->targets) {
        std::vector<std::string> row = {fmt(lc.cn2), to_string(a.kind) + "-" + to_string(b.kind), fmt(target)};
        try {
          const auto p = snr_penalty(lc.channel, a, b, target);
          row.insert(row.end(), {fmt(p.bisection_db), p.closed_form_db ? fmt(*p.closed_form_db) : "",
                                 fmt(p.snr_a_db), fmt(p.snr_b_db), ""});
        } catch (const std::exception& e) {
          row.insert(row.end(), {"", "", "", "", e.what()});
          ++t.failures;
        }
        t.rows.push_back(row);
      }
    }
  }
  return t;
}

// --- monte carlo ------------------------------------------------------------

inline Table run_mc(const RunConfig& c, unsigned jobs, std::uint64_t seed) {
  Table t;
  t.header = {"cn2", "snr_db", "scheme", "samples", "mc_error_rate", "stderr", "meijer_error_rate", "z_score",
              "error"};
  const auto schemes = schemes_or_all(c);
  const std::vector<double>& dbs = c.mc.snr_db.empty() ? c.snr_db : c.mc.snr_db;
  std::vector<double> snrs;
  for (double db : dbs) snrs.push_back(db_to_linear(db));
  for (const auto& lc : channels_for(c)) {
    if (snrs.empty()) break;
    SimConfig sim;
    sim.sample_count = c.mc.samples;
    sim.rng_seed = seed;
    sim.stream_count = c.mc.streams;
    sim.threads = jobs;
    const auto est = empirical_error_rates(lc.channel, snrs, schemes, sim);
    auto parts = parallel_map<RowResult>(snrs.size(), jobs, [&](std::size_t a) {
      RowResult r;
      for (std::size_t b = 0; b < schemes.size(); ++b) {
        const auto& e = est[a][b];
        std::vector<std::string> row = {fmt(lc.cn2), fmt(dbs[a]), to_string(schemes[b].kind),
                                        std::to_string(c.mc.samples), fmt(e.probability), fmt(e.standard_error)};
        try {
          const double ref = error_rate(lc.channel, snrs[a], schemes[b], Route::meijer()).probability;
          row.insert(row.end(), {fmt(ref), fmt((e.probability - ref) / e.standard_error), ""});
        } catch (const std::exception& ex) {
          row.insert(row.end(), {"", "", ex.what()});
          ++r.failures;
        }
        r.rows.push_back(row);
      }
      return r;
    });
    append(t, std::move(parts));
  }
  return t;
}

// --- svg --------------------------------------------------------------------

struct PlotSpec {
  std::string x;
  std::string y;
  std::vector<std::string> series;  // columns whose values name a curve
  bool log_x = false;
  bool log_y = true;
  std::string title;
};

inline int column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw ConfigError("plot: no column '" + name + "'");
  return static_cast<int>(it - t.header.begin());
}

inline void write_svg(const Table& t, const PlotSpec& spec, std::ostream& os) {
  const int xc = column(t, spec.x), yc = column(t, spec.y);
  std::vector<int> sc;
  for (const auto& s : spec.series) sc.push_back(column(t, s));
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  std::vector<std::string> order;
  for (const auto& row : t.rows) {
    if (row[xc].empty() || row[yc].empty()) continue;
    const double x = std::stod(row[xc]), y = std::stod(row[yc]);
    if ((spec.log_x && !(x > 0)) || (spec.log_y && !(y > 0))) continue;
    std::string key;
    for (int k : sc) key += (key.empty() ? "" : " ") + row[k];
    if (!curves.count(key)) order.push_back(key);
    curves[key].emplace_back(spec.log_x ? std::log10(x) : x, spec.log_y ? std::log10(y) : y);
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& [k, pts] : curves) {
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (curves.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  constexpr double W = 720, H = 480, L = 70, R = 200, T = 40, B = 50;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto label = [](double v, bool lg) { return lg ? "1e" + fmt(std::round(v * 100) / 100) : fmt(std::round(v * 1000) / 1000); };
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << label(xv, spec.log_x) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << label(yv, spec.log_y) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">"
     << spec.x << "</text>\n";
  std::size_t ci = 0;
  for (const auto& key : order) {
    const char* col = colors[ci % 8];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : curves[key]) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 + 16 * ci << "\" font-size=\"11\" fill=\"" << col
       << "\">" << key << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace uvturb::cli
