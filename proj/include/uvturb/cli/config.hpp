#pragma once

// Run configuration: flat `key = value` text grouped under [section]
// headers. Comments start with '#' or ';'. Angles need a unit suffix
// (deg, mrad, rad); lengths take m or km; attenuation coefficients take
// /m or /km. Every key is checked against the schema before anything runs.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uvturb/geometry.hpp"
#include "uvturb/mcsim.hpp"
#include "uvturb/modem.hpp"

namespace uvturb::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawEntry {
  std::string value;
  int line = 0;
};

using RawConfig = std::map<std::string, std::map<std::string, RawEntry>>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"name"}},
      {"atmosphere", {"k_a", "k_r", "k_m", "gamma", "g", "f", "cn2", "wavelength"}},
      {"geometry", {"theta_t", "beta_t", "theta_r", "beta_r", "r", "aperture"}},
      {"channel", {"alpha1", "beta1", "alpha2", "beta2", "omega_v", "e2"}},
      {"modulation", {"schemes"}},
      {"snr", {"start", "stop", "step", "db"}},
      {"methods", {"list"}},
      {"link_budget", {"tx_power", "eta_f", "eta_r", "bit_rate"}},
      {"geom_sweep", {"mode", "e", "r", "theta_r_start", "theta_r_stop", "theta_r_step", "snr_db", "turbulence",
                      "route"}},
      {"penalty", {"pairs", "targets"}},
      {"pdf", {"i_start", "i_stop", "points", "methods"}},
      {"mc", {"samples", "streams", "snr_db"}},
  };
  return s;
}

inline RawConfig parse_raw(std::istream& in) {
  RawConfig raw;
  std::string line;
  std::string section;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto cut = line.find_first_of("#;");
    const std::string body = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (body.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError("line " + std::to_string(no) + ": " + what);
    };
    if (body.front() == '[') {
      if (body.back() != ']') fail("unterminated section header '" + body + "'");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!schema().count(section)) fail("unknown section [" + section + "]");
      if (raw.count(section)) fail("section [" + section + "] appears twice");
      raw[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + body + "'");
    if (section.empty()) fail("key outside of any [section]");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!schema().at(section).count(key)) fail("unknown key '" + key + "' in [" + section + "]");
    if (raw[section].count(key)) fail("key '" + key + "' repeated in [" + section + "]");
    raw[section][key] = {value, no};
  }
  return raw;
}

// --- scalar parsers ---------------------------------------------------------

inline double parse_number(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty() || !std::isfinite(v)) {
    throw ConfigError(what + ": '" + s + "' is not a finite number");
  }
  return v;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Splits "12.5 deg" / "12.5deg" into the number and one of the suffixes.
inline std::pair<double, std::string> number_with_unit(const std::string& text, const std::vector<std::string>& units,
                                                       const std::string& what) {
  const std::string s = trim(text);
  for (const auto& u : units) {
    if (ends_with(s, u)) return {parse_number(s.substr(0, s.size() - u.size()), what), u};
  }
  return {parse_number(s, what), ""};
}

inline double parse_angle(const std::string& text, const std::string& what) {
  const auto [v, unit] = number_with_unit(text, {"mrad", "deg", "rad"}, what);
  if (unit == "deg") return v * std::numbers::pi / 180.0;
  if (unit == "mrad") return v * 1e-3;
  if (unit == "rad") return v;
  throw ConfigError(what + ": angle '" + trim(text) + "' needs a unit suffix (deg, mrad or rad)");
}

inline double parse_angle_deg(const std::string& text, const std::string& what) {
  const auto [v, unit] = number_with_unit(text, {"mrad", "deg", "rad"}, what);
  if (unit == "deg") return v;
  if (unit == "mrad") return v * 0.18 / std::numbers::pi;
  if (unit == "rad") return v * 180.0 / std::numbers::pi;
  throw ConfigError(what + ": angle '" + trim(text) + "' needs a unit suffix (deg, mrad or rad)");
}

inline double parse_length(const std::string& text, const std::string& what) {
  const auto [v, unit] = number_with_unit(text, {"km", "nm", "um", "m"}, what);
  if (unit == "km") return v * 1e3;
  if (unit == "nm") return v * 1e-9;
  if (unit == "um") return v * 1e-6;
  return v;
}

inline double parse_coefficient(const std::string& text, const std::string& what) {
  const auto [v, unit] = number_with_unit(text, {"/km", "/m"}, what);
  return unit == "/km" ? v * 1e-3 : v;
}

inline Modulation parse_modulation(const std::string& name) {
  std::string up;
  for (char c : trim(name)) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "BPSK") return Modulation::bpsk();
  if (up == "QPSK") return Modulation::qpsk();
  if (up == "DPSK") return Modulation::dpsk();
  if (up == "NCFSK") return Modulation::ncfsk();
  throw ConfigError("unknown modulation '" + trim(name) + "' (expected BPSK, QPSK, DPSK or NCFSK)");
}

struct MethodSpec {
  Method method = Method::meijer;
  int terms = 30;                  // series:J
  std::uint64_t samples = 1000000;  // mc:N

  std::string label() const {
    if (method == Method::series) return "series:" + std::to_string(terms);
    if (method == Method::monte_carlo) return "mc:" + std::to_string(samples);
    return to_string(method);
  }
};

inline MethodSpec parse_method(const std::string& text) {
  const std::string s = trim(text);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  MethodSpec m;
  auto count = [&](const std::string& what, double lo) {
    const double v = parse_number(arg, what);
    if (v != std::floor(v) || v < lo) throw ConfigError(what + ": '" + arg + "' must be an integer >= " +
                                                        std::to_string(static_cast<long long>(lo)));
    return v;
  };
  if (head == "meijer" && arg.empty()) {
    m.method = Method::meijer;
  } else if (head == "quadrature" && arg.empty()) {
    m.method = Method::quadrature;
  } else if (head == "asymptotic" && arg.empty()) {
    m.method = Method::asymptotic;
  } else if (head == "series") {
    m.method = Method::series;
    if (!arg.empty()) m.terms = static_cast<int>(count("series terms", 0));
  } else if (head == "mc") {
    m.method = Method::monte_carlo;
    if (!arg.empty()) m.samples = static_cast<std::uint64_t>(count("mc samples", 1));
  } else {
    throw ConfigError("unknown method '" + s + "' (expected meijer, series:J, quadrature, asymptotic or mc:N)");
  }
  return m;
}

// --- structured configuration -----------------------------------------------

struct ExplicitChannel {
  ShapePair link1;
  ShapePair link2;
  double omega_v = 1.0;
  double e2 = 1.0;
};

struct GeomSweep {
  bool ellipse = true;  // otherwise fixed theta_t from [geometry]
  double e = 0.0;
  double r = 0.0;
  double theta_start = 0.0, theta_stop = 0.0, theta_step = 0.0;  // degrees
  std::optional<double> snr_db;  // fixed-SNR mode when set
  bool with_turbulence = true;
  bool without_turbulence = false;
  MethodSpec route;
};

struct LinkBudgetConfig {
  double tx_power = 1.0;  // W
  double eta_f = 0.1;
  double eta_r = 0.2;
  double bit_rate = 5000.0;
};

struct PenaltyConfig {
  std::vector<std::pair<Modulation, Modulation>> pairs;
  std::vector<double> targets;
};

struct PdfConfig {
  double i_start = 1e-3;
  double i_stop = 10.0;
  int points = 20;
  std::vector<MethodSpec> methods;
};

struct McConfig {
  std::uint64_t samples = 1000000;
  unsigned streams = 8;
  std::vector<double> snr_db;
};

struct RunConfig {
  std::string name = "run";
  Atmosphere atmosphere;
  std::vector<double> cn2_list;
  double wavelength = 260e-9;
  LinkGeometry geometry;
  bool geometry_given = false;
  std::optional<ExplicitChannel> channel;
  std::vector<Modulation> schemes;
  std::vector<double> snr_db;
  std::vector<MethodSpec> methods;
  std::optional<LinkBudgetConfig> link_budget;
  std::optional<GeomSweep> geom_sweep;
  std::optional<PenaltyConfig> penalty;
  PdfConfig pdf;
  McConfig mc;
};

namespace detail {

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has_section(const std::string& s) const { return raw_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    return has_section(s) && raw_.at(s).count(k) > 0;
  }
  std::string where(const std::string& s, const std::string& k) const {
    return "[" + s + "] " + k + " (line " + std::to_string(raw_.at(s).at(k).line) + ")";
  }
  const std::string& get(const std::string& s, const std::string& k) const { return raw_.at(s).at(k).value; }

  template <typename F>
  auto value(const std::string& s, const std::string& k, F&& parse) const {
    return parse(get(s, k), where(s, k));
  }
  std::string require(const std::string& s, const std::string& k) const {
    if (!has(s, k)) throw ConfigError("missing required key '" + k + "' in [" + s + "]");
    return get(s, k);
  }
  template <typename F>
  auto required(const std::string& s, const std::string& k, F&& parse) const {
    require(s, k);
    return value(s, k, parse);
  }

 private:
  const RawConfig& raw_;
};

inline double positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + ": must be positive");
  return v;
}

inline std::vector<double> grid(double start, double stop, double step, const std::string& what) {
  std::vector<double> out;
  if (!(step > 0.0)) throw ConfigError(what + ": step must be positive");
  if (stop < start) return out;
  const long n = std::lround(std::floor((stop - start) / step + 1e-9));
  if (n > 100000) throw ConfigError(what + ": grid has more than 100000 points");
  for (long k = 0; k <= n; ++k) out.push_back(start + step * static_cast<double>(k));
  return out;
}

}  // namespace detail

inline RunConfig build_config(const RawConfig& raw) {
  detail::Reader rd(raw);
  RunConfig c;
  auto num = [](const std::string& t, const std::string& w) { return parse_number(t, w); };
  auto pos = [](const std::string& t, const std::string& w) { return detail::positive(parse_number(t, w), w); };

  if (rd.has("scenario", "name")) c.name = rd.get("scenario", "name");

  // atmosphere
  auto& atm = c.atmosphere;
  if (rd.has("atmosphere", "k_a")) atm.k_a = rd.value("atmosphere", "k_a", parse_coefficient);
  if (rd.has("atmosphere", "k_r")) atm.k_r = rd.value("atmosphere", "k_r", parse_coefficient);
  if (rd.has("atmosphere", "k_m")) atm.k_m = rd.value("atmosphere", "k_m", parse_coefficient);
  if (rd.has("atmosphere", "gamma")) atm.gamma_ray = rd.value("atmosphere", "gamma", num);
  if (rd.has("atmosphere", "g")) atm.g_asym = rd.value("atmosphere", "g", num);
  if (rd.has("atmosphere", "f")) atm.f_mie = rd.value("atmosphere", "f", num);
  if (rd.has("atmosphere", "wavelength")) {
    c.wavelength = detail::positive(rd.value("atmosphere", "wavelength", parse_length),
                                    rd.where("atmosphere", "wavelength"));
  }
  if (rd.has("atmosphere", "cn2")) {
    for (const auto& item : split_list(rd.get("atmosphere", "cn2"))) {
      c.cn2_list.push_back(pos(item, rd.where("atmosphere", "cn2")));
    }
  }
  try {
    validate(atm);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[atmosphere]: ") + e.what());
  }

  // geometry
  if (rd.has_section("geometry")) {
    c.geometry_given = true;
    auto& g = c.geometry;
    auto ang = [&](const char* k, double& dst) {
      if (rd.has("geometry", k)) dst = rd.value("geometry", k, parse_angle);
    };
    ang("theta_t", g.theta_t);
    ang("beta_t", g.beta_t);
    ang("theta_r", g.theta_r);
    ang("beta_r", g.beta_r);
    if (rd.has("geometry", "r")) g.baseline_r = detail::positive(rd.value("geometry", "r", parse_length), rd.where("geometry", "r"));
    if (rd.has("geometry", "aperture")) g.aperture_a_r = rd.value("geometry", "aperture", pos);
  }

  // explicit channel shapes
  if (rd.has_section("channel")) {
    ExplicitChannel ch;
    ch.link1 = {rd.required("channel", "alpha1", pos),
                rd.required("channel", "beta1", pos)};
    ch.link2 = {rd.required("channel", "alpha2", pos),
                rd.required("channel", "beta2", pos)};
    if (rd.has("channel", "omega_v")) ch.omega_v = rd.value("channel", "omega_v", pos);
    if (rd.has("channel", "e2")) ch.e2 = rd.value("channel", "e2", pos);
    if (!(ch.link1.alpha > ch.link1.beta && ch.link2.alpha > ch.link2.beta)) {
      throw ConfigError("[channel]: each link needs alpha > beta");
    }
    c.channel = ch;
  }

  if (rd.has("modulation", "schemes")) {
    for (const auto& s : split_list(rd.get("modulation", "schemes"))) c.schemes.push_back(parse_modulation(s));
  }

  if (rd.has_section("snr")) {
    if (rd.has("snr", "db")) {
      if (rd.has("snr", "start") || rd.has("snr", "stop") || rd.has("snr", "step")) {
        throw ConfigError("[snr]: give either db = list or start/stop/step, not both");
      }
      for (const auto& s : split_list(rd.get("snr", "db"))) c.snr_db.push_back(num(s, rd.where("snr", "db")));
    } else {
      const double start = rd.required("snr", "start", num);
      const double stop = rd.required("snr", "stop", num);
      const double step = rd.required("snr", "step", num);
      c.snr_db = detail::grid(start, stop, step, "[snr]");
    }
  }

  if (rd.has("methods", "list")) {
    for (const auto& s : split_list(rd.get("methods", "list"))) c.methods.push_back(parse_method(s));
  }

  if (rd.has_section("link_budget")) {
    LinkBudgetConfig lb;
    if (rd.has("link_budget", "tx_power")) lb.tx_power = rd.value("link_budget", "tx_power", pos);
    if (rd.has("link_budget", "eta_f")) lb.eta_f = rd.value("link_budget", "eta_f", pos);
    if (rd.has("link_budget", "eta_r")) lb.eta_r = rd.value("link_budget", "eta_r", pos);
    if (rd.has("link_budget", "bit_rate")) lb.bit_rate = rd.value("link_budget", "bit_rate", pos);
    c.link_budget = lb;
  }

  if (rd.has_section("geom_sweep")) {
    GeomSweep gs;
    const std::string mode = rd.has("geom_sweep", "mode") ? rd.get("geom_sweep", "mode") : "ellipse";
    if (mode == "ellipse") {
      gs.ellipse = true;
      rd.require("geom_sweep", "e");
      gs.e = rd.value("geom_sweep", "e", num);
      if (!(gs.e > 0.0 && gs.e < 1.0)) {
        throw ConfigError(rd.where("geom_sweep", "e") + ": eccentricity must lie in (0, 1)");
      }
    } else if (mode == "fixed_theta_t") {
      gs.ellipse = false;
      if (!c.geometry_given || !(c.geometry.theta_t > 0.0)) {
        throw ConfigError("[geom_sweep] mode fixed_theta_t needs theta_t in [geometry]");
      }
    } else {
      throw ConfigError(rd.where("geom_sweep", "mode") + ": expected ellipse or fixed_theta_t");
    }
    if (rd.has("geom_sweep", "r")) {
      gs.r = detail::positive(rd.value("geom_sweep", "r", parse_length), rd.where("geom_sweep", "r"));
    } else if (c.geometry.baseline_r > 0.0) {
      gs.r = c.geometry.baseline_r;
    } else {
      throw ConfigError("[geom_sweep] needs r (or r in [geometry])");
    }
    gs.theta_start = rd.required("geom_sweep", "theta_r_start", parse_angle_deg);
    gs.theta_stop = rd.required("geom_sweep", "theta_r_stop", parse_angle_deg);
    gs.theta_step = rd.required("geom_sweep", "theta_r_step", parse_angle_deg);
    if (!(gs.theta_step > 0.0)) throw ConfigError("[geom_sweep] theta_r_step must be positive");
    if (rd.has("geom_sweep", "snr_db")) gs.snr_db = rd.value("geom_sweep", "snr_db", num);
    if (!gs.snr_db && !c.link_budget) {
      throw ConfigError("[geom_sweep] needs either snr_db (fixed SNR) or a [link_budget] section");
    }
    if (rd.has("geom_sweep", "turbulence")) {
      const std::string t = rd.get("geom_sweep", "turbulence");
      if (t == "on") {
        gs.with_turbulence = true, gs.without_turbulence = false;
      } else if (t == "off") {
        gs.with_turbulence = false, gs.without_turbulence = true;
      } else if (t == "both") {
        gs.with_turbulence = true, gs.without_turbulence = true;
      } else {
        throw ConfigError(rd.where("geom_sweep", "turbulence") + ": expected on, off or both");
      }
    }
    if (rd.has("geom_sweep", "route")) {
      gs.route = parse_method(rd.get("geom_sweep", "route"));
      if (gs.route.method == Method::monte_carlo || gs.route.method == Method::asymptotic) {
        throw ConfigError("[geom_sweep] route must be meijer, series:J or quadrature");
      }
    }
    c.geom_sweep = gs;
  }

  if (rd.has_section("penalty")) {
    PenaltyConfig p;
    for (const auto& item : split_list(rd.require("penalty", "pairs"))) {
      const auto dash = item.find('-');
      if (dash == std::string::npos) throw ConfigError("[penalty] pairs: expected A-B, got '" + item + "'");
      p.pairs.emplace_back(parse_modulation(item.substr(0, dash)), parse_modulation(item.substr(dash + 1)));
    }
    for (const auto& item : split_list(rd.require("penalty", "targets"))) {
      const double t = num(item, rd.where("penalty", "targets"));
      if (!(t > 0.0 && t < 0.5)) {
        throw ConfigError(rd.where("penalty", "targets") + ": target error rate " + item + " must lie in (0, 0.5)");
      }
      p.targets.push_back(t);
    }
    c.penalty = p;
  }

  if (rd.has("pdf", "i_start")) c.pdf.i_start = rd.value("pdf", "i_start", pos);
  if (rd.has("pdf", "i_stop")) c.pdf.i_stop = rd.value("pdf", "i_stop", pos);
  if (rd.has("pdf", "points")) {
    const double n = rd.value("pdf", "points", num);
    if (n < 1 || n != std::floor(n)) throw ConfigError(rd.where("pdf", "points") + ": must be a positive integer");
    c.pdf.points = static_cast<int>(n);
  }
  if (!(c.pdf.i_stop >= c.pdf.i_start)) throw ConfigError("[pdf]: i_stop must be >= i_start");
  if (rd.has("pdf", "methods")) {
    for (const auto& s : split_list(rd.get("pdf", "methods"))) {
      auto m = parse_method(s);
      if (m.method == Method::monte_carlo || m.method == Method::asymptotic) {
        throw ConfigError("[pdf] methods must be meijer, series:J or quadrature");
      }
      c.pdf.methods.push_back(m);
    }
  } else {
    c.pdf.methods = {parse_method("meijer"), parse_method("series:60"), parse_method("quadrature")};
  }

  if (rd.has("mc", "samples")) {
    const double n = rd.value("mc", "samples", num);
    if (n < 1 || n != std::floor(n)) throw ConfigError(rd.where("mc", "samples") + ": must be a positive integer");
    c.mc.samples = static_cast<std::uint64_t>(n);
  }
  if (rd.has("mc", "streams")) {
    const double n = rd.value("mc", "streams", num);
    if (n < 1 || n != std::floor(n) || n > 4096) throw ConfigError(rd.where("mc", "streams") + ": must be in 1..4096");
    c.mc.streams = static_cast<unsigned>(n);
  }
  if (rd.has("mc", "snr_db")) {
    for (const auto& s : split_list(rd.get("mc", "snr_db"))) c.mc.snr_db.push_back(num(s, rd.where("mc", "snr_db")));
  }

  // Cross-checks.
  if (!c.channel && c.cn2_list.empty()) {
    throw ConfigError("config needs either a [channel] section with explicit shapes or cn2 in [atmosphere]");
  }
  if (!c.channel && !c.geometry_given) {
    throw ConfigError("deriving shapes from cn2 needs a [geometry] section");
  }
  return c;
}

inline RunConfig parse_config(std::istream& in) { return build_config(parse_raw(in)); }

inline RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace uvturb::cli
