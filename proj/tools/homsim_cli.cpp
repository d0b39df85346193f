// homsim: HOM interference sweeps from JSON scenarios to CSV / JSON.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "homsim/homsim.hpp"

namespace {

using namespace homsim;
using config::json;

struct Options {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> sets;
  int grid = 61;
  unsigned threads = 1;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const json default_spectrum = {{"shape", "gaussian"}, {"center_thz", 193.55}, {"fwhm_nm", 1.0}};
const json default_apparatus = {{"T", 0.5},
                                {"det_a", {{"eta_h", 1.0}, {"eta_v", 1.0}}},
                                {"det_b", {{"eta_h", 1.0}, {"eta_v", 1.0}}}};

// Keys that select one of several alternatives; a user value for any of them
// replaces every default in the group.
const std::vector<std::vector<std::string>> exclusive_groups = {
    {"center_thz", "center_nm", "center_rad_ps"},
    {"width_thz", "width_rad_ps", "duration_ps", "fwhm_nm", "fwhm_thz"},
    {"h_re", "h_im", "v_re", "v_im", "angle_rad"},
};

json merged(json base, const json& user) {
  if (!base.is_object() || !user.is_object()) return user;
  for (const auto& group : exclusive_groups) {
    bool hit = false;
    for (const auto& k : group) hit = hit || user.contains(k);
    if (hit) {
      for (const auto& k : group) base.erase(k);
    }
  }
  for (const auto& [k, v] : user.items()) base[k] = base.contains(k) ? merged(base[k], v) : v;
  return base;
}

json load_user_config(const Options& opt) {
  json user = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config file " + opt.config_path);
    user = json::parse(in, nullptr, false);
    if (user.is_discarded() || !user.is_object()) {
      throw ConfigError("config file " + opt.config_path + " is not a JSON object");
    }
  }
  for (const auto& s : opt.sets) config::apply_override(user, s);
  return user;
}

std::string user_mode(const json& user, const std::string& fallback) {
  return config::string_or(user, "mode", fallback, "");
}

void csv_header(std::ostream& os, const std::string& command, const json& cfg) {
  os << "# homsim " << command << "\n# config " << cfg.dump() << "\n";
}

struct Arm {
  int count;
  PolarizationVector pol;
  SpectralProfile spec;
};

Arm parse_arm(const json& cfg, const std::string& key, const char* count_key) {
  const json& j = config::field(cfg, key, "");
  Arm a;
  a.count = config::integer(config::field(j, count_key, key), key + "." + count_key);
  if (a.count < 0) throw ConfigError(key + "." + count_key + " must be >= 0");
  a.pol = config::parse_polarization(config::field(j, "pol", key), key + ".pol");
  a.spec = config::parse_profile(config::field(j, "spectrum", key), key + ".spectrum");
  return a;
}

std::vector<double> range(const json& cfg, const std::string& key, const Options& opt) {
  return config::parse_range(config::field(cfg, key, ""), opt.grid, key);
}

// ------------------------------------------------------------------ dip

json dip_defaults() {
  return {{"arm_a", {{"m", 1}, {"pol", "H"}, {"spectrum", default_spectrum}}},
          {"arm_b", {{"n", 1}, {"pol", "H"}, {"spectrum", default_spectrum}}},
          {"apparatus", default_apparatus},
          {"tau_ps", {{"min", -10.0}, {"max", 10.0}}},
          {"numbers", json::array({json::array({1, 1})})},
          {"phis", json::array({0.0})}};
}

void cmd_dip(const json& cfg, const Options& opt, std::ostream& os) {
  const Arm a = parse_arm(cfg, "arm_a", "m"), b = parse_arm(cfg, "arm_b", "n");
  const Apparatus app = config::parse_apparatus(cfg.at("apparatus"), "apparatus");
  const auto taus = range(cfg, "tau_ps", opt);
  const json& numbers = config::field(cfg, "numbers", "");
  if (!numbers.is_array() || numbers.empty()) throw ConfigError("numbers must be a non-empty array of [m, n]");
  const auto phis = config::parse_range(config::field(cfg, "phis", ""), opt.grid, "phis");
  csv_header(os, "dip", cfg);
  for (std::size_t k = 0; k < numbers.size(); ++k) {
    const std::string path = "numbers[" + std::to_string(k) + "]";
    const json& mn = numbers[k];
    if (!mn.is_array() || mn.size() != 2) throw ConfigError(path + " must be [m, n]");
    FockPair pair{config::integer(mn[0], path + "[0]"), config::integer(mn[1], path + "[1]"),
                  a.pol, b.pol, a.spec, b.spec};
    if (pair.m < 0 || pair.n < 0 || pair.m + pair.n < 1) {
      throw ConfigError(path + " needs m, n >= 0 and m + n >= 1");
    }
    for (double phi : phis) {
      pair.pol_b = rotate(b.pol, phi);
      const auto dip = dip_curve(pair, taus, app, opt.threads);
      os << "# block m=" << pair.m << " n=" << pair.n << " phi_rad=" << num(phi)
         << " visibility=" << num(visibility(pair, app)) << "\n";
      os << "tau_ps,p_co\n";
      for (const auto& d : dip) os << num(d.tau) << "," << num(d.p_co) << "\n";
    }
  }
}

// ------------------------------------------------------------------ contour

json contour_defaults() {
  return {{"arm_a", {{"spectrum", default_spectrum}}},
          {"shape_b", "gaussian"},
          {"m", 1},
          {"n", 1},
          {"apparatus", default_apparatus},
          {"center_offset_thz", {{"min", -0.3}, {"max", 0.3}}},
          {"fwhm_nm", {{"min", 0.2}, {"max", 5.0}, {"log", true}}}};
}

void cmd_contour(const json& cfg, const Options& opt, std::ostream& os) {
  const auto a = config::parse_profile(cfg.at("arm_a").at("spectrum"), "arm_a.spectrum");
  const Shape shape_b = config::at_path("shape_b", [&] {
    return parse_shape(config::string_or(cfg, "shape_b", "gaussian", ""));
  });
  const int m = config::integer(cfg.at("m"), "m"), n = config::integer(cfg.at("n"), "n");
  if (m < 0 || n < 0 || m + n < 1) throw ConfigError("m, n must be >= 0 with m + n >= 1");
  const Apparatus app = config::parse_apparatus(cfg.at("apparatus"), "apparatus");
  const auto offsets = range(cfg, "center_offset_thz", opt);
  const auto widths_nm = range(cfg, "fwhm_nm", opt);
  std::vector<double> centers, fwhms;
  for (double d : offsets) centers.push_back(a.center + units::thz_to_rad_ps(d));
  const double lambda0 = units::rad_ps_to_nm(a.center);
  for (double w : widths_nm) {
    if (!(w > 0.0)) throw ConfigError("fwhm_nm values must be > 0");
    fwhms.push_back(units::wavelength_width_to_frequency(lambda0, w));
  }
  const auto g = spectral_visibility_contour(a, shape_b, centers, fwhms, m, n, app, opt.threads);
  csv_header(os, "contour", cfg);
  os << "# x = center offset of photon B (THz), y = FWHM of photon B (nm)\n";
  os << "x,y,visibility\n";
  for (std::size_t i = 0; i < offsets.size(); ++i)
    for (std::size_t j = 0; j < widths_nm.size(); ++j)
      os << num(offsets[i]) << "," << num(widths_nm[j]) << "," << num(g.visibility[i][j]) << "\n";
}

// ------------------------------------------------------------------ tables

json tables_defaults() { return {{"center_thz", 193.55}, {"fwhm_nm", 1.0}}; }

void cmd_tables(const json& cfg, const Options& opt, std::ostream& os) {
  const double center = units::thz_to_rad_ps(config::number(cfg, "center_thz", ""));
  const double width_nm = config::number(cfg, "fwhm_nm", "");
  if (!(center > 0.0) || !(width_nm > 0.0)) throw ConfigError("center_thz and fwhm_nm must be > 0");
  const double fw = units::wavelength_width_to_frequency(units::rad_ps_to_nm(center), width_nm);
  const auto t = max_visibility_tables(center, fw, opt.threads);
  csv_header(os, "tables", cfg);
  auto print = [&](const char* title, const auto& m) {
    os << "# " << title << ": max visibility | FWHM_A/FWHM_B (rows: photon A, columns: photon B)\n";
    os << "A\\B";
    for (Shape s : all_shapes) os << "," << shape_name(s);
    os << "\n";
    char buf[64];
    for (int i = 0; i < 4; ++i) {
      os << shape_name(all_shapes[i]);
      for (int j = 0; j < 4; ++j) {
        std::snprintf(buf, sizeof buf, ",%.4f|%.4f", m[i][j].visibility, m[i][j].fwhm_ratio);
        os << buf;
      }
      os << "\n";
    }
  };
  print("m=n=1", t.m11);
  print("m=n=2", t.m22);
}

// ------------------------------------------------------------------ coherent

json coherent_defaults(const std::string& mode) {
  json d = {{"mode", mode},
            {"pol_a", "H"},
            {"pol_b", "H"},
            {"spectrum_a", default_spectrum},
            {"spectrum_b", default_spectrum},
            {"apparatus", default_apparatus}};
  if (mode == "ratio_map") {
    d["mu"] = 1.0;
    d["mu_ratio"] = {{"min", 0.25}, {"max", 4.0}, {"log", true}};
    d["tr_ratio"] = {{"min", 0.25}, {"max", 4.0}, {"log", true}};
  } else {
    d["mu_ratio"] = 1.0;
    d["mu"] = {{"min", 0.01}, {"max", 5.0}, {"log", true}};
    d["phi"] = {{"min", 0.0}, {"max", std::numbers::pi / 2}};
  }
  return d;
}

void cmd_coherent(const json& cfg, const Options& opt, std::ostream& os) {
  const std::string mode = cfg.at("mode").get<std::string>();
  const auto pa = config::parse_polarization(cfg.at("pol_a"), "pol_a");
  const auto pb = config::parse_polarization(cfg.at("pol_b"), "pol_b");
  const auto sa = config::parse_profile(cfg.at("spectrum_a"), "spectrum_a");
  const auto sb = config::parse_profile(cfg.at("spectrum_b"), "spectrum_b");
  const Apparatus app = config::parse_apparatus(cfg.at("apparatus"), "apparatus");
  const double cs = overlap(sa, sb).magnitude;
  if (mode == "ratio_map") {
    const double mu = config::number(cfg, "mu", "");
    const auto rs = range(cfg, "mu_ratio", opt), ts = range(cfg, "tr_ratio", opt);
    const auto m = visibility_ratio_map(mu, rs, ts, pa, pb, app.det_a, app.det_b, cs, opt.threads);
    csv_header(os, "coherent", cfg);
    os << "# argmax mu_ratio=" << num(rs[m.argmax_mu]) << " tr_ratio=" << num(ts[m.argmax_tr]) << "\n";
    os << "mu_ratio,tr_ratio,visibility\n";
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < ts.size(); ++j)
        os << num(rs[i]) << "," << num(ts[j]) << "," << num(m.visibility[i][j]) << "\n";
    return;
  }
  if (mode != "visibility") throw ConfigError("mode must be visibility or ratio_map");
  const double ratio = config::number(cfg, "mu_ratio", "");
  if (!(ratio > 0.0)) throw ConfigError("mu_ratio must be > 0");
  const auto mus = range(cfg, "mu", opt), phis = range(cfg, "phi", opt);
  for (double mu : mus) {
    if (!(mu > 0.0)) throw ConfigError("mu values must be > 0");
  }
  const std::size_t np = phis.size();
  const auto flat = parallel_map(
      mus.size() * np,
      [&](std::size_t k) {
        const auto rb = rotate(pb, phis[k % np]);
        const double c = cos_phi(pa, rb) * cs;
        const double mu = mus[k / np];
        return coherent_pair_visibility(mu * std::sqrt(ratio), mu / std::sqrt(ratio), app.bs, c,
                                        Efficiencies::of(app, pa, rb));
      },
      opt.threads);
  csv_header(os, "coherent", cfg);
  os << "# photon B polarization rotated by phi_rad; mu is the geometric mean of mu_A and mu_B\n";
  os << "mu,phi_rad,visibility\n";
  for (std::size_t k = 0; k < flat.size(); ++k)
    os << num(mus[k / np]) << "," << num(phis[k % np]) << "," << num(flat[k]) << "\n";
}

// ------------------------------------------------------------------ channels

json channels_defaults(const std::string& mode) {
  json d = {{"mode", mode},
            {"arm_a", {{"m", 2}, {"pol", "H"}, {"spectrum", default_spectrum}}},
            {"arm_b", {{"n", 1}, {"pol", "H"}, {"spectrum", default_spectrum}}},
            {"apparatus", default_apparatus},
            {"channel_a", json::object()},
            {"channel_b", json::object()}};
  if (mode == "broadening") {
    d["arm_b"]["spectrum"]["center_thz"] = 193.65;
    d["x"] = {{"min", 0.5}, {"max", 4.0}, {"log", true}};
    d["y"] = {{"min", 0.5}, {"max", 4.0}, {"log", true}};
  } else if (mode == "depolarizing") {
    d["x"] = {{"min", 0.0}, {"max", 1.0}};
    d["y"] = {{"min", 0.0}, {"max", 1.0}};
  } else if (mode == "number_distribution") {
    d = {{"mode", mode}, {"n", 4}, {"gammas", {0.0, 0.25, 0.5, 0.75, 1.0}}};
  } else {
    d["x"] = {{"min", 0.0}, {"max", 0.95}};
    d["y"] = {{"min", 0.0}, {"max", 0.95}};
  }
  return d;
}

void cmd_channels(const json& cfg, const Options& opt, std::ostream& os) {
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode == "number_distribution") {
    const int n = config::integer(cfg.at("n"), "n");
    const auto gammas = config::parse_range(cfg.at("gammas"), opt.grid, "gammas");
    csv_header(os, "channels", cfg);
    os << "gamma,k,probability\n";
    for (double g : gammas) {
      for (const auto& w : config::at_path("gammas", [&] { return damp_number(n, g); }))
        os << num(g) << "," << w.k << "," << num(w.p) << "\n";
    }
    return;
  }
  double ChannelSpec::*axis = nullptr;
  if (mode == "damping") axis = &ChannelSpec::gamma;
  else if (mode == "depolarizing") axis = &ChannelSpec::p_depol;
  else if (mode == "broadening") axis = &ChannelSpec::xi;
  else throw ConfigError("mode must be damping, depolarizing, broadening or number_distribution");
  const Arm a = parse_arm(cfg, "arm_a", "m"), b = parse_arm(cfg, "arm_b", "n");
  if (a.count + b.count < 1) throw ConfigError("arm_a.m + arm_b.n must be >= 1");
  const Apparatus app = config::parse_apparatus(cfg.at("apparatus"), "apparatus");
  const ChannelSpec base_a = config::parse_channel(cfg.at("channel_a"), "channel_a");
  const ChannelSpec base_b = config::parse_channel(cfg.at("channel_b"), "channel_b");
  const auto xs = range(cfg, "x", opt), ys = range(cfg, "y", opt);
  auto make = [&](double x, double y) {
    ChannelSpec ca = base_a, cb = base_b;
    ca.*axis = x;
    cb.*axis = y;
    config::at_path("x", [&] { ca.validate(); return 0; });
    config::at_path("y", [&] { cb.validate(); return 0; });
    return std::pair{ca, cb};
  };
  const auto g = channel_visibility_contour({a.count, a.pol, a.spec}, {b.count, b.pol, b.spec}, app,
                                            xs, ys, make, opt.threads);
  csv_header(os, "channels", cfg);
  os << "# x, y = " << (mode == "damping" ? "gamma" : mode == "depolarizing" ? "p_depol" : "xi")
     << " of arm A, arm B\n";
  os << "x,y,visibility\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      os << num(xs[i]) << "," << num(ys[j]) << "," << num(g.visibility[i][j]) << "\n";
}

// ------------------------------------------------------------------ swap

json swap_defaults(const std::string& mode) {
  json d = {{"mode", mode}};
  if (mode == "bandwidth_sweep") {
    d["sigma_c"] = 1.0;
    d["detunings"] = {0.0, 0.5, 1.0, 2.0};
    d["sigma_b"] = {{"min", 0.1}, {"max", 10.0}, {"log", true}};
    d["phi"] = 0.0;
  } else if (mode == "separable_contour") {
    d["sigma_c"] = 1.0;
    d["sigma_ratio"] = {{"min", 0.1}, {"max", 10.0}, {"log", true}};
    d["detuning"] = {{"min", 0.0}, {"max", 3.0}};
    d["phi"] = 0.0;
  } else {
    d["pump_center_rad_ps"] = 2430.0;
    d["sigma_p"] = {{"min", 0.1}, {"max", 10.0}, {"log", true}};
    d["phis"] = {0.0, std::numbers::pi / 8, std::numbers::pi / 4};
    d["pmf"] = {{"sigma", 1.0}, {"slope_s", 1.0}, {"slope_i", -0.5}};
    d["jsa_grid"] = {{"n", 128}, {"span", 6.0}};
  }
  return d;
}

void cmd_swap(const json& cfg, const Options& opt, std::ostream& os) {
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode == "bandwidth_sweep") {
    const double sc = config::number(cfg, "sigma_c", "");
    if (!(sc > 0.0)) throw ConfigError("sigma_c must be > 0");
    const auto dets = config::parse_range(cfg.at("detunings"), opt.grid, "detunings");
    const auto sbs = range(cfg, "sigma_b", opt);
    for (double s : sbs) {
      if (!(s > 0.0)) throw ConfigError("sigma_b values must be > 0");
    }
    const auto curves = detuned_bandwidth_sweep(dets, sbs, sc, config::number(cfg, "phi", ""));
    csv_header(os, "swap", cfg);
    for (const auto& c : curves) {
      os << "# detuning=" << num(c.detuning) << " best_sigma_b=" << num(c.best_sigma_b)
         << " best_fidelity=" << num(c.best_fidelity) << "\n";
    }
    os << "detuning,sigma_b,fidelity\n";
    for (const auto& c : curves)
      for (std::size_t i = 0; i < sbs.size(); ++i)
        os << num(c.detuning) << "," << num(sbs[i]) << "," << num(c.fidelity[i]) << "\n";
    return;
  }
  if (mode == "separable_contour") {
    const double sc = config::number(cfg, "sigma_c", "");
    if (!(sc > 0.0)) throw ConfigError("sigma_c must be > 0");
    const double phi = config::number(cfg, "phi", "");
    const auto rs = range(cfg, "sigma_ratio", opt), ds = range(cfg, "detuning", opt);
    csv_header(os, "swap", cfg);
    os << "sigma_ratio,detuning,fidelity\n";
    for (double r : rs) {
      if (!(r > 0.0)) throw ConfigError("sigma_ratio values must be > 0");
      for (double d : ds) {
        const double ov = gaussian_overlap_closed_form(r * sc, sc, d, 0.0);
        os << num(r) << "," << num(d) << ","
           << num(swap_fidelity_separable(phi, std::acos(std::min(1.0, ov)))) << "\n";
      }
    }
    return;
  }
  if (mode != "pump_sweep") {
    throw ConfigError("mode must be pump_sweep, bandwidth_sweep or separable_contour");
  }
  const double wp = config::number(cfg, "pump_center_rad_ps", "");
  const json& pj = cfg.at("pmf");
  const PhaseMatchSpec pmf{config::number(pj, "sigma", "pmf"), config::number(pj, "slope_s", "pmf"),
                           config::number(pj, "slope_i", "pmf")};
  const GridSpec grid{config::integer(cfg.at("jsa_grid").at("n"), "jsa_grid.n"),
                      config::number(cfg.at("jsa_grid"), "span", "jsa_grid")};
  const auto sps = range(cfg, "sigma_p", opt);
  const auto phis = config::parse_range(cfg.at("phis"), opt.grid, "phis");
  struct Row {
    double K, schmidt;
  };
  const auto rows = parallel_map(
      sps.size(),
      [&](std::size_t i) {
        const auto j = config::at_path("sigma_p", [&] {
          return build_gaussian_jsa({wp, sps[i]}, pmf, grid);
        });
        return Row{spectral_gram(j, j, grid), schmidt_number(j)};
      },
      opt.threads);
  csv_header(os, "swap", cfg);
  os << "# identical sources; K = spectral Gram element entering the heralded fidelity\n";
  os << "sigma_p,phi_rad,schmidt_number,K,probability,fidelity\n";
  for (std::size_t i = 0; i < sps.size(); ++i) {
    for (double phi : phis) {
      const auto o = swap_core(phi, rows[i].K);
      os << num(sps[i]) << "," << num(phi) << "," << num(rows[i].schmidt) << "," << num(rows[i].K)
         << "," << num(o.probability[0]) << "," << num(o.fidelity[0]) << "\n";
    }
  }
}

// ------------------------------------------------------------------ protocols

json protocols_defaults() {
  return {{"mdi", {{"phi", 0.0}, {"theta", 0.0}}},
          {"errors", {{"e_b", 0.0}, {"e_a", 0.0}, {"e_p", 0.0}, {"e_t", 0.0}}},
          {"key_rate", {{"p_z11", 1.0}, {"y_z11", 0.1}, {"e_z11", 0.02}, {"q_z", 0.1}, {"e_z", 0.02},
                        {"f_e", 1.16}}},
          {"sensing", {{"theta", 0.0}, {"phase", std::numbers::pi / 2}, {"n_max", 5}}},
          {"classifier", {{"theta", 0.0}, {"theta_perp", 0.0}}},
          {"fusion", {{"theta", 0.0}}}};
}

void cmd_protocols(const json& cfg, const Options&, std::ostream& os) {
  json out;
  out["config"] = cfg;
  const json& m = cfg.at("mdi");
  const double phi = config::number(m, "phi", "mdi"), theta = config::number(m, "theta", "mdi");
  json table = json::array();
  for (auto sa : {Bb84State::H, Bb84State::V, Bb84State::D, Bb84State::A}) {
    for (auto sb : {Bb84State::H, Bb84State::V, Bb84State::D, Bb84State::A}) {
      const bool rect = !is_diagonal(sa) && !is_diagonal(sb);
      const bool diag = is_diagonal(sa) && is_diagonal(sb);
      if (!rect && !diag) continue;
      const auto t = config::at_path("mdi", [&] { return mdi_outcome_table({sa, sb, phi, theta}); });
      json row = {{"state", std::string(state_name(sa)) + state_name(sb)}};
      for (int k = 0; k < 4; ++k) row[mdi_outcome_names[k]] = t.p[k];
      table.push_back(row);
    }
  }
  out["mdi"] = {{"table", table}, {"conclusive_probability", mdi_conclusive_probability(phi, theta)}};

  const json& e = cfg.at("errors");
  const ErrorBudget budget{config::number(e, "e_b", "errors"), config::number(e, "e_a", "errors"),
                           config::number(e, "e_p", "errors"), config::number(e, "e_t", "errors"),
                           spectral_error(theta)};
  const auto te = config::at_path("errors", [&] { return total_error(budget); });
  out["errors"] = {{"e_f", budget.e_f}, {"e_x", te.e_x}, {"useless", te.useless}};

  const json& k = cfg.at("key_rate");
  const KeyRateInputs kr{config::number(k, "p_z11", "key_rate"), config::number(k, "y_z11", "key_rate"),
                         config::number(k, "e_z11", "key_rate"), config::number(k, "q_z", "key_rate"),
                         config::number(k, "e_z", "key_rate"), config::number(k, "f_e", "key_rate")};
  out["key_rate"] = {{"bound", config::at_path("key_rate", [&] { return key_rate_bound(kr); })}};

  const json& s = cfg.at("sensing");
  const double st = config::number(s, "theta", "sensing"), sp = config::number(s, "phase", "sensing");
  const int nmax = config::integer(s.at("n_max"), "sensing.n_max");
  if (nmax < 1) throw ConfigError("sensing.n_max must be >= 1");
  json sens = json::array();
  for (int n = 1; n <= nmax; ++n) {
    sens.push_back({{"N", n}, {"signal", noon_signal(n, st, sp)}, {"sensitivity", noon_sensitivity(n, st)}});
  }
  out["sensing"] = sens;

  const json& c = cfg.at("classifier");
  const double ct = config::number(c, "theta", "classifier"), cp = config::number(c, "theta_perp", "classifier");
  out["classifier"] = {{"p0", classifier_coincidence(ct, cp)}, {"floor", classifier_floor(ct)}};
  out["fusion"] = {{"fidelity", fusion_fidelity(config::number(cfg.at("fusion"), "theta", "fusion"))}};
  os << out.dump(2) << "\n";
}

// ------------------------------------------------------------------ driver

using Handler = void (*)(const json&, const Options&, std::ostream&);

int run(const std::string& name, json (*defaults)(const std::string&), const std::string& default_mode,
        Handler handler, const Options& opt) {
  try {
    const json user = load_user_config(opt);
    const json cfg = merged(defaults(user_mode(user, default_mode)), user);
    std::ostringstream os;
    handler(cfg, opt, os);
    if (opt.out_path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(opt.out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + opt.out_path);
      f << os.str();
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "homsim " << name << ": config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "homsim " << name << ": config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "homsim " << name << ": numeric error: " << e.what() << " (residual "
              << num(e.residual()) << ")\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hong-Ou-Mandel interference simulator"};
  app.require_subcommand(1);
  Options opt;
  opt.threads = default_threads();

  struct Command {
    const char* name;
    const char* help;
    json (*defaults)(const std::string&);
    const char* mode;
    Handler handler;
  };
  const Command commands[] = {
      {"dip", "coincidence probability versus delay", [](const std::string&) { return dip_defaults(); }, "",
       cmd_dip},
      {"contour", "visibility over photon B's center and FWHM",
       [](const std::string&) { return contour_defaults(); }, "", cmd_contour},
      {"tables", "maximum visibility per shape pairing", [](const std::string&) { return tables_defaults(); },
       "", cmd_tables},
      {"coherent", "coherent-state visibility maps", coherent_defaults, "visibility", cmd_coherent},
      {"channels", "visibility under loss, depolarization and broadening", channels_defaults, "damping",
       cmd_channels},
      {"swap", "entanglement-swapping fidelity sweeps", swap_defaults, "pump_sweep", cmd_swap},
      {"protocols", "MDI-QKD, sensing, classifier and fusion report",
       [](const std::string&) { return protocols_defaults(); }, "", cmd_protocols},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config_path, "JSON scenario file");
    sub->add_option("--out", opt.out_path, "output file (default stdout)");
    sub->add_option("--set", opt.sets, "override a config value, e.g. arm_a.m=2")->take_all();
    sub->add_option("--grid", opt.grid, "points per sweep axis when not given in the config")
        ->check(CLI::Range(1, 100000));
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) return run(c->name, c->defaults, c->mode, c->handler, opt);
  }
  return 2;
}
