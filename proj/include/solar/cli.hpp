#pragma once

// Command-line front end: profile | center | verify | match | calibrate.
// Exit codes: 0 ok, 1 usage, 2 physics or verification failure, 3 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "solar/calibration.hpp"
#include "solar/energy.hpp"
#include "solar/oracle.hpp"
#include "solar/profiles.hpp"
#include "solar/radiative.hpp"

namespace solar::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_physics = 2;
inline constexpr int exit_io = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by parse_args for --help; what() is the help text.
class HelpRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CalibrationTarget { none, density, density_ratio, temperature };

struct CliConfig {
  std::string command;
  ModelParams params;
  std::optional<double> eps0;    // empty: solve
  std::optional<double> kappa0;  // empty: solve
  SolarCalibration calibration;
  std::size_t points = 201;
  std::optional<int> truncation;
  std::string output;  // empty: standard output
  std::string format = "csv";
  CalibrationTarget target = CalibrationTarget::none;
  double target_value = 0.0;
  double debug_perturb_rho_c = 0.0;

  int truncation_order() const { return truncation.value_or(default_truncation(params)); }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::optional<double> parse_real_or_solve(const std::string& text, const char* flag) {
  if (text == "solve") {
    return std::nullopt;
  }
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v) || !(v > 0.0)) {
    throw UsageError(std::string(flag) + " must be a positive number or 'solve'");
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path);
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Calibration from a JSON object; absent keys keep their defaults.
///   {"mass": kg, "radius": m, "lsun": W, "X": .., "Y": .., "Z": ..,
///    "constants": {"G", "k_B", "N_A", "a_rad", "c_light"}}
inline void apply_config(const nlohmann::json& j, SolarCalibration& c) {
  if (!j.is_object()) {
    throw UsageError("config must be a JSON object");
  }
  auto take = [&](const nlohmann::json& obj, const char* key, double& dst) {
    if (obj.contains(key)) {
      if (!obj.at(key).is_number()) {
        throw UsageError(std::string("config key '") + key + "' must be a number");
      }
      dst = obj.at(key).get<double>();
    }
  };
  take(j, "mass", c.mass_total);
  take(j, "radius", c.radius_total);
  take(j, "lsun", c.luminosity_target);
  take(j, "X", c.X);
  take(j, "Y", c.Y);
  take(j, "Z", c.Z);
  if (j.contains("constants")) {
    const auto& k = j.at("constants");
    if (!k.is_object()) {
      throw UsageError("config key 'constants' must be an object");
    }
    take(k, "G", c.constants.G);
    take(k, "k_B", c.constants.k_B);
    take(k, "N_A", c.constants.N_A);
    take(k, "a_rad", c.constants.a_rad);
    take(k, "c_light", c.constants.c_light);
  }
}

}  // namespace detail

/// Parses argv (argv[0] is the program name). Throws UsageError, IoError for
/// an unreadable --config, or HelpRequest.
inline CliConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Analytic solar interior model"};
  app.require_subcommand(1);

  CliConfig cfg;
  double delta = cfg.params.delta;
  int gamma = cfg.params.gamma;
  int n_exp = cfg.params.n_exp;
  int m_exp = cfg.params.m_exp;
  std::string eps0 = "solve";
  std::string kappa0 = "solve";
  double X = cfg.calibration.X;
  double Y = cfg.calibration.Y;
  double Z = cfg.calibration.Z;
  std::size_t points = cfg.points;
  int truncation = 0;
  double mass = cfg.calibration.mass_total;
  double radius = cfg.calibration.radius_total;
  double lsun = cfg.calibration.luminosity_target;
  std::string config_path;
  double target_density = 0.0;
  double target_ratio = 0.0;
  double target_temperature = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--delta", delta, "density exponent delta > 0");
    sub->add_option("--gamma", gamma, "integer density power gamma >= 1");
    sub->add_option("--n-exp", n_exp, "density exponent of the energy law");
    sub->add_option("--m-exp", m_exp, "temperature exponent of the energy law");
    sub->add_option("--eps0", eps0, "energy rate constant, or 'solve' for L(R) = L_sun");
    sub->add_option("--kappa0", kappa0, "Kramers constant, or 'solve' to match at x = 0.3");
    sub->add_option("--X", X, "hydrogen mass fraction");
    sub->add_option("--Y", Y, "helium mass fraction");
    sub->add_option("--Z", Z, "metal mass fraction");
    sub->add_option("--points", points, "grid points on [0, 1]");
    sub->add_option("--truncation", truncation, "order of the energy series");
    sub->add_option("--mass", mass, "total mass in kg");
    sub->add_option("--radius", radius, "radius in m");
    sub->add_option("--lsun", lsun, "target luminosity in W");
    sub->add_option("--config", config_path, "JSON calibration file");
    sub->add_option("--output", cfg.output, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* profile = app.add_subcommand("profile", "radial profile table");
  CLI::App* center = app.add_subcommand("center", "central and global values");
  CLI::App* verify = app.add_subcommand("verify", "check closed forms against the ODE oracle");
  CLI::App* match = app.add_subcommand("match", "radius where L_rad = L");
  CLI::App* calibrate = app.add_subcommand("calibrate", "find delta for a central target");
  for (CLI::App* sub : {profile, center, verify, match, calibrate}) {
    add_common(sub);
  }
  verify->add_option("--debug-perturb-rho-c", cfg.debug_perturb_rho_c,
                     "relative error injected into the oracle's rho_c");
  auto* t_density = calibrate->add_option("--target-density", target_density, "rho_c in kg m^-3");
  auto* t_ratio =
      calibrate->add_option("--target-density-ratio", target_ratio, "rho_c over mean density");
  auto* t_temp = calibrate->add_option("--target-temperature", target_temperature, "T_c in K");
  t_density->excludes(t_ratio)->excludes(t_temp);
  t_ratio->excludes(t_temp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequest(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequest(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  cfg.params = ModelParams{delta, gamma, n_exp, m_exp};
  if (sub->count("--truncation") > 0) {
    cfg.truncation = truncation;
  }
  cfg.points = points;

  try {
    cfg.eps0 = detail::parse_real_or_solve(eps0, "--eps0");
    cfg.kappa0 = detail::parse_real_or_solve(kappa0, "--kappa0");
    cfg.params.validate();
    if (m_exp < n_exp) {
      throw UsageError("--m-exp must be >= --n-exp");
    }
    if (cfg.truncation && *cfg.truncation < 0) {
      throw UsageError("--truncation must be >= 0");
    }
    if (points < 2) {
      throw UsageError("--points must be >= 2");
    }

    SolarCalibration& c = cfg.calibration;
    if (!config_path.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(detail::read_file(config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      detail::apply_config(j, c);
    }
    if (sub->count("--mass") > 0) c.mass_total = mass;
    if (sub->count("--radius") > 0) c.radius_total = radius;
    if (sub->count("--lsun") > 0) c.luminosity_target = lsun;
    if (sub->count("--X") > 0) c.X = X;
    if (sub->count("--Y") > 0) c.Y = Y;
    if (sub->count("--Z") > 0) c.Z = Z;
    c = SolarCalibration::make(c.mass_total, c.radius_total, c.luminosity_target, c.X, c.Y, c.Z,
                               c.constants);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  if (cfg.command == "calibrate") {
    if (t_density->count() > 0) {
      cfg.target = CalibrationTarget::density;
      cfg.target_value = target_density;
    } else if (t_ratio->count() > 0) {
      cfg.target = CalibrationTarget::density_ratio;
      cfg.target_value = target_ratio;
    } else if (t_temp->count() > 0) {
      cfg.target = CalibrationTarget::temperature;
      cfg.target_value = target_temperature;
    } else {
      throw UsageError(
          "calibrate needs --target-density, --target-density-ratio or --target-temperature");
    }
    if (!(cfg.target_value > 0.0) || !std::isfinite(cfg.target_value)) {
      throw UsageError("calibration target must be positive");
    }
  }
  if (!std::isfinite(cfg.debug_perturb_rho_c) || cfg.debug_perturb_rho_c <= -1.0) {
    throw UsageError("--debug-perturb-rho-c must be finite and > -1");
  }
  return cfg;
}

/// eps0 and kappa0 with "solve" resolved.
struct ResolvedModel {
  EnergyLaw law;
  EnergyExpansion expansion;
  OpacityLaw opacity;
};

inline ResolvedModel resolve(const CliConfig& cfg) {
  const ModelParams& p = cfg.params;
  const SolarCalibration& c = cfg.calibration;
  const double eps0 = cfg.eps0 ? *cfg.eps0 : solve_eps0(p, c, cfg.truncation);
  const EnergyLaw law = EnergyLaw::from(p, eps0);
  EnergyExpansion e = energy_rate_polynomial(p, law, c, cfg.truncation);
  const double kappa0 = cfg.kappa0 ? *cfg.kappa0 : solve_kappa0(p, e, c);
  return {law, std::move(e), OpacityLaw::kramers(kappa0)};
}

inline nlohmann::json params_json(const CliConfig& cfg, const ResolvedModel* m) {
  const SolarCalibration& c = cfg.calibration;
  nlohmann::json j = {
      {"delta", cfg.params.delta},
      {"gamma", cfg.params.gamma},
      {"n_exp", cfg.params.n_exp},
      {"m_exp", cfg.params.m_exp},
      {"truncation", cfg.truncation_order()},
      {"points", cfg.points},
      {"X", c.X},
      {"Y", c.Y},
      {"Z", c.Z},
      {"mu", c.mu},
      {"mass", c.mass_total},
      {"radius", c.radius_total},
      {"lsun", c.luminosity_target},
  };
  if (m != nullptr) {
    j["eps0"] = m->law.eps0;
    j["kappa0"] = m->opacity.kappa0;
  }
  return j;
}

inline nlohmann::json central_json(const CliConfig& cfg, const ResolvedModel& m) {
  const ModelParams& p = cfg.params;
  const SolarCalibration& c = cfg.calibration;
  const double l_total = total_luminosity(m.expansion, c);
  return {
      {"rho_c", central_density(p, c)},
      {"rho_c_over_mean", scaled::central_density(p)},
      {"P_c", central_pressure(p, c)},
      {"P_c_over_GM2_R4", scaled::central_pressure(p)},
      {"T_c", central_temperature(p, c)},
      {"T_c_over_muGM_kNR", scaled::central_temperature(p)},
      {"L_total", l_total},
      {"L_total_over_lsun", l_total / c.luminosity_target},
      {"eps_c", m.expansion.eps_central},
      {"eta", eta_gamma(p)},
      {"radiation_pressure_ratio", radiation_pressure_ratio(p, c, 0.0)},
  };
}

inline const std::vector<std::string>& profile_columns() {
  static const std::vector<std::string> cols = {
      "x",          "rho",   "mass",  "pressure", "temperature", "epsilon",
      "luminosity", "kappa", "luminosity_radiative"};
  return cols;
}

inline std::string profile_csv(const StellarProfile& prof) {
  std::string out;
  const auto& cols = profile_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += i + 1 < cols.size() ? ',' : '\n';
  }
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double row[] = {prof.x[i],          prof.rho[i],     prof.mass[i],
                          prof.pressure[i],   prof.temperature[i], prof.epsilon[i],
                          prof.luminosity[i], prof.kappa[i],   prof.luminosity_radiative[i]};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      out += format_number(row[k]);
      out += k + 1 < std::size(row) ? ',' : '\n';
    }
  }
  return out;
}

/// key,value lines for the scalar reports when --format csv is asked for.
inline std::string flat_value(const nlohmann::json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline std::string flat_csv(const nlohmann::json& j) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) {
        out += key + "." + k2 + "," + flat_value(v2) + "\n";
      }
    } else {
      out += key + "," + flat_value(value) + "\n";
    }
  }
  return out;
}

inline std::string render(const CliConfig& cfg, const nlohmann::json& j) {
  return cfg.format == "json" ? j.dump(2) + "\n" : flat_csv(j);
}

inline void emit(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    out.flush();
    if (!out) {
      throw IoError("write to standard output failed");
    }
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError("cannot open " + cfg.output + " for writing");
  }
  f << text;
  f.close();
  if (!f) {
    throw IoError("write to " + cfg.output + " failed");
  }
}

inline int run_profile(const CliConfig& cfg, std::ostream& out) {
  const ResolvedModel m = resolve(cfg);
  StellarProfile prof = build_profile(cfg.params, cfg.calibration, cfg.points);
  attach_energy(prof, m.expansion, m.law, cfg.calibration);
  attach_radiative(prof, cfg.params, cfg.calibration, m.opacity);
  if (cfg.format == "csv") {
    emit(cfg, profile_csv(prof), out);
    return exit_ok;
  }
  auto column = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double d : v) {
      a.push_back(std::isnan(d) ? nlohmann::json(nullptr) : nlohmann::json(d));
    }
    return a;
  };
  nlohmann::json j = {{"params", params_json(cfg, &m)}, {"central", central_json(cfg, m)}};
  nlohmann::json table = nlohmann::json::object();
  const std::vector<const std::vector<double>*> data = {
      &prof.x,          &prof.rho,        &prof.mass,
      &prof.pressure,   &prof.temperature, &prof.epsilon,
      &prof.luminosity, &prof.kappa,      &prof.luminosity_radiative};
  for (std::size_t i = 0; i < data.size(); ++i) {
    table[profile_columns()[i]] = column(*data[i]);
  }
  j["profile"] = std::move(table);
  emit(cfg, j.dump(2) + "\n", out);
  return exit_ok;
}

inline int run_center(const CliConfig& cfg, std::ostream& out) {
  const ResolvedModel m = resolve(cfg);
  const nlohmann::json j = {{"params", params_json(cfg, &m)}, {"central", central_json(cfg, m)}};
  emit(cfg, render(cfg, j), out);
  return exit_ok;
}

inline int run_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const ResolvedModel m = resolve(cfg);
  VerifyOptions options;
  options.density_perturbation = cfg.debug_perturb_rho_c;
  const VerificationReport r =
      verify_model(cfg.params, m.law, cfg.calibration, m.opacity, uniform_grid(cfg.points),
                   cfg.truncation, options);
  nlohmann::json j = {
      {"params", params_json(cfg, &m)},
      {"central", central_json(cfg, m)},
      {"errors",
       {{"mass", r.mass_error},
        {"pressure", r.pressure_error},
        {"luminosity", r.luminosity_error},
        {"temperature_gradient", r.gradient_error},
        {"structure_threshold", r.structure_threshold},
        {"gradient_threshold", r.gradient_threshold}}},
      {"pass", r.pass},
  };
  if (!r.failure.empty()) {
    j["failure"] = r.failure;
    err << "verify: " << r.failure << "\n";
  }
  emit(cfg, render(cfg, j), out);
  return r.pass ? exit_ok : exit_physics;
}

inline int run_match(const CliConfig& cfg, std::ostream& out) {
  const ResolvedModel m = resolve(cfg);
  const MatchResult r = matching_radius(cfg.params, m.expansion, cfg.calibration, m.opacity);
  const nlohmann::json j = {
      {"params", params_json(cfg, &m)},
      {"match",
       {{"x_star", r.x_star},
        {"luminosity", r.luminosity},
        {"luminosity_radiative", r.luminosity_radiative},
        {"luminosity_over_lsun", r.luminosity / cfg.calibration.luminosity_target},
        {"residual", r.residual},
        {"iterations", r.iterations}}},
  };
  emit(cfg, render(cfg, j), out);
  return exit_ok;
}

struct CalibrationResult {
  double delta;
  double achieved;
  int iterations;
};

inline constexpr double calibrate_delta_lo = 0.05;
inline constexpr double calibrate_delta_hi = 50.0;

/// Central quantity the calibration target refers to, as a function of delta.
inline double calibration_quantity(const CliConfig& cfg, double delta) {
  ModelParams p = cfg.params;
  p.delta = delta;
  switch (cfg.target) {
    case CalibrationTarget::density:
      return central_density(p, cfg.calibration);
    case CalibrationTarget::density_ratio:
      return scaled::central_density(p);
    case CalibrationTarget::temperature:
      return central_temperature(p, cfg.calibration);
    case CalibrationTarget::none:
      break;
  }
  throw std::logic_error("no calibration target");
}

class OutOfRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bisection on delta in [0.05, 50] at fixed gamma.
inline CalibrationResult calibrate_delta(const CliConfig& cfg) {
  double lo = calibrate_delta_lo;
  double hi = calibrate_delta_hi;
  const double f_lo0 = calibration_quantity(cfg, lo) - cfg.target_value;
  const double f_hi0 = calibration_quantity(cfg, hi) - cfg.target_value;
  if (f_lo0 == 0.0) {
    return {lo, cfg.target_value, 0};
  }
  if (f_hi0 == 0.0) {
    return {hi, cfg.target_value, 0};
  }
  if ((f_lo0 > 0.0) == (f_hi0 > 0.0)) {
    const double a = f_lo0 + cfg.target_value;
    const double b = f_hi0 + cfg.target_value;
    std::ostringstream msg;
    msg << "target " << format_number(cfg.target_value) << " is outside the achievable interval ["
        << format_number(std::min(a, b)) << ", " << format_number(std::max(a, b))
        << "] for delta in [" << calibrate_delta_lo << ", " << calibrate_delta_hi
        << "] at gamma = " << cfg.params.gamma;
    throw OutOfRangeError(msg.str());
  }
  double f_lo = f_lo0;
  int iterations = 0;
  while (hi - lo > 1e-13 * hi && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = calibration_quantity(cfg, mid) - cfg.target_value;
    ++iterations;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double delta = 0.5 * (lo + hi);
  return {delta, calibration_quantity(cfg, delta), iterations};
}

inline int run_calibrate(const CliConfig& cfg, std::ostream& out) {
  const CalibrationResult r = calibrate_delta(cfg);
  const char* name = cfg.target == CalibrationTarget::density         ? "rho_c"
                     : cfg.target == CalibrationTarget::density_ratio ? "rho_c_over_mean"
                                                                      : "T_c";
  CliConfig calibrated = cfg;
  calibrated.params.delta = r.delta;
  const nlohmann::json j = {
      {"params", params_json(calibrated, nullptr)},
      {"calibration",
       {{"target", name},
        {"target_value", cfg.target_value},
        {"delta", r.delta},
        {"achieved", r.achieved},
        {"iterations", r.iterations}}},
  };
  emit(cfg, render(cfg, j), out);
  return exit_ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequest& h) {
    out << h.what();
    return exit_ok;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return exit_io;
  }

  try {
    if (cfg.command == "profile") return run_profile(cfg, out);
    if (cfg.command == "center") return run_center(cfg, out);
    if (cfg.command == "verify") return run_verify(cfg, out, err);
    if (cfg.command == "match") return run_match(cfg, out);
    return run_calibrate(cfg, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const NoBracketError& e) {
    err << "match: " << e.what() << "\n";
    return exit_physics;
  } catch (const OutOfRangeError& e) {
    err << "calibrate: " << e.what() << "\n";
    return exit_physics;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << e.what() << "\n";
    return exit_physics;
  }
}

}  // namespace solar::cli
