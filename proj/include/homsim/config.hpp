#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "homsim/channels.hpp"
#include "homsim/errors.hpp"
#include "homsim/fock.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"
#include "homsim/units.hpp"

// JSON literals for profiles, polarizations, detectors, channels and the
// apparatus, plus dotted-path overrides. Every error names the offending field.
namespace homsim::config {

using json = nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field " + join(path, key));
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + " must be finite");
  return v;
}

inline double number(const json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), join(path, key));
}

inline double number_or(const json& j, const std::string& key, double fallback,
                        const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j.at(key), join(path, key));
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + " must be an integer");
  return j.get<int>();
}

inline int integer_or(const json& j, const std::string& key, int fallback,
                      const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return integer(j.at(key), join(path, key));
}

inline std::string string_or(const json& j, const std::string& key, const std::string& fallback,
                             const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(join(path, key) + " must be a string");
  return j.at(key).get<std::string>();
}

inline const json& object_or_empty(const json& j, const std::string& key) {
  static const json empty = json::object();
  if (!j.is_object() || !j.contains(key)) return empty;
  return j.at(key);
}

// Re-throws validation failures with the field path prepended.
template <typename F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// {shape, center_thz | center_nm | center_rad_ps,
//  width_thz | width_rad_ps | duration_ps | fwhm_nm | fwhm_thz, delay_ps, broadening}
inline SpectralProfile parse_profile(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + " must be an object");
  SpectralProfile p;
  p.shape = at_path(join(path, "shape"), [&] { return parse_shape(string_or(j, "shape", "gaussian", path)); });
  int centers = 0;
  if (j.contains("center_thz")) {
    p.center = units::thz_to_rad_ps(number(j, "center_thz", path));
    ++centers;
  }
  if (j.contains("center_nm")) {
    const double nm = number(j, "center_nm", path);
    if (nm <= 0.0) throw ConfigError(join(path, "center_nm") + " must be > 0");
    p.center = units::nm_to_rad_ps(nm);
    ++centers;
  }
  if (j.contains("center_rad_ps")) {
    p.center = number(j, "center_rad_ps", path);
    ++centers;
  }
  if (centers != 1) {
    throw ConfigError(path + " needs exactly one of center_thz, center_nm, center_rad_ps");
  }
  int widths = 0;
  if (j.contains("width_thz")) {
    p.width = units::thz_to_rad_ps(number(j, "width_thz", path));
    ++widths;
  }
  if (j.contains("width_rad_ps")) {
    p.width = number(j, "width_rad_ps", path);
    ++widths;
  }
  if (j.contains("duration_ps")) {
    if (p.shape != Shape::Sinc) throw ConfigError(join(path, "duration_ps") + " applies to sinc only");
    p.width = number(j, "duration_ps", path);
    ++widths;
  }
  for (const char* key : {"fwhm_nm", "fwhm_thz"}) {
    if (!j.contains(key)) continue;
    const double v = number(j, key, path);
    const double f = std::string(key) == "fwhm_nm"
                         ? at_path(join(path, key), [&] {
                             detail::require(v > 0.0, "must be > 0");
                             return units::wavelength_width_to_frequency(units::rad_ps_to_nm(p.center), v);
                           })
                         : units::thz_to_rad_ps(v);
    p.width = at_path(join(path, key), [&] { return width_for_fwhm(p.shape, f); });
    ++widths;
  }
  if (widths != 1) {
    throw ConfigError(path +
                      " needs exactly one of width_thz, width_rad_ps, duration_ps, fwhm_nm, fwhm_thz");
  }
  p.delay = number_or(j, "delay_ps", 0.0, path);
  p.broadening = number_or(j, "broadening", 1.0, path);
  at_path(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

// "H" | "V" | "D" | "A" | {h_re, h_im, v_re, v_im} | {angle_rad}
inline PolarizationVector parse_polarization(const json& j, const std::string& path) {
  if (j.is_string()) return at_path(path, [&] { return pol::from_name(j.get<std::string>()); });
  if (!j.is_object()) throw ConfigError(path + " must be a name or an object");
  if (j.contains("angle_rad")) return pol::linear(number(j, "angle_rad", path));
  const PolarizationVector p{{number_or(j, "h_re", 0.0, path), number_or(j, "h_im", 0.0, path)},
                             {number_or(j, "v_re", 0.0, path), number_or(j, "v_im", 0.0, path)}};
  at_path(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

inline Detector parse_detector(const json& j, const std::string& path) {
  if (j.is_number()) {
    const double eta = number(j, path);
    return at_path(path, [&] {
      const auto d = Detector::uniform(eta);
      d.validate();
      return d;
    });
  }
  const Detector d{number_or(j, "eta_h", 1.0, path), number_or(j, "eta_v", 1.0, path)};
  at_path(path, [&] {
    d.validate();
    return 0;
  });
  return d;
}

inline ChannelSpec parse_channel(const json& j, const std::string& path) {
  const ChannelSpec c{number_or(j, "gamma", 0.0, path), number_or(j, "p_depol", 0.0, path),
                      number_or(j, "xi", 1.0, path)};
  at_path(path, [&] {
    c.validate();
    return 0;
  });
  return c;
}

// {T, det_a, det_b}; missing pieces default to a 50:50 splitter and ideal detectors.
inline Apparatus parse_apparatus(const json& j, const std::string& path) {
  Apparatus a;
  const double T = number_or(j, "T", 0.5, path);
  if (!(T >= 0.0 && T <= 1.0)) throw ConfigError(join(path, "T") + " must lie in [0,1]");
  a.bs = BeamSplitter::from_transmissivity(T);
  if (j.is_object() && j.contains("det_a")) a.det_a = parse_detector(j.at("det_a"), join(path, "det_a"));
  if (j.is_object() && j.contains("det_b")) a.det_b = parse_detector(j.at("det_b"), join(path, "det_b"));
  return a;
}

// {min, max} with optional "log": true; n comes from the caller.
inline std::vector<double> parse_range(const json& j, int n, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    if (v.empty()) throw ConfigError(path + " must not be empty");
    return v;
  }
  const double lo = number(j, "min", path), hi = number(j, "max", path);
  n = integer_or(j, "n", n, path);
  if (n < 1) throw ConfigError(join(path, "n") + " must be >= 1");
  if (j.is_object() && j.value("log", false)) {
    if (!(lo > 0.0 && hi > 0.0)) throw ConfigError(path + " log range needs positive bounds");
    return logspace(lo, hi, n);
  }
  return linspace(lo, hi, n);
}

// "a.b.c=value": value is parsed as JSON, or taken as a string if that fails.
inline void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("--set key '" + key + "' descends into a non-object");
      *node = json::object();
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

}  // namespace homsim::config
