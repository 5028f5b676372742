#include "cogur/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace cogur {

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// strip a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& tok, const std::string& where) {
  double v = 0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw config_error("config: bad number '" + tok + "' at " + where);
  return v;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
  const std::string v = strip(raw);
  if (v.empty()) throw config_error("config: empty value at " + where);
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw config_error("config: unterminated string at " + where);
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') throw config_error("config: unterminated array at " + where);
    std::vector<double> arr;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = strip(tok);
      if (tok.empty()) continue;
      arr.push_back(parse_number(tok, where));
    }
    return arr;
  }
  return parse_number(v, where);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfigTree parse_config_text(const std::string& text, const std::string& origin) {
  ConfigTree tree;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config: malformed section header at " + where);
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config: empty section name at " + where);
      tree[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: expected key = value at " + where);
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) throw config_error("config: empty key at " + where);
    if (section.empty())
      throw config_error("config: key outside any section at " + where);
    if (tree[section].count(key))
      throw config_error("config: duplicate key '" + section + "." + key +
                         "' at " + where);
    tree[section][key] = parse_value(line.substr(eq + 1), where);
  }
  return tree;
}

ConfigTree parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

struct SchemaReader {
  const ConfigTree& tree;
  std::vector<std::string> errors;
  std::set<std::string> consumed;

  bool has(const std::string& sec, const std::string& key) const {
    auto it = tree.find(sec);
    return it != tree.end() && it->second.count(key);
  }

  template <typename T>
  T get(const std::string& sec, const std::string& key, std::optional<T> fallback) {
    consumed.insert(sec + "." + key);
    if (!has(sec, key)) {
      if (fallback) return *fallback;
      errors.push_back("missing required key " + sec + "." + key);
      return T{};
    }
    const ConfigValue& v = tree.at(sec).at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (std::holds_alternative<double>(v)) return std::get<double>(v);
    } else if constexpr (std::is_same_v<T, int>) {
      if (std::holds_alternative<double>(v)) {
        const double d = std::get<double>(v);
        if (d == static_cast<int>(d)) return static_cast<int>(d);
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (std::holds_alternative<std::vector<double>>(v))
        return std::get<std::vector<double>>(v);
    }
    errors.push_back("wrong type for " + sec + "." + key);
    return T{};
  }

  void check_unknown() {
    static const std::set<std::string> known_sections = {
        "geometry",     "model",   "kernel_omega", "kernel_gamma",
        "nonlinearity", "discretization", "initial", "output"};
    for (const auto& [sec, kv] : tree) {
      if (!known_sections.count(sec)) {
        errors.push_back("unknown section [" + sec + "]");
        continue;
      }
      for (const auto& [key, _] : kv)
        if (!consumed.count(sec + "." + key))
          errors.push_back("unknown key " + sec + "." + key);
    }
  }
};

MemoryKernel read_kernel(SchemaReader& r, const std::string& sec, KernelSide side) {
  const std::string fam = r.get<std::string>(sec, "family", std::nullopt);
  // consume family-specific keys so strictness reports the right ones
  const bool tab = fam == "tabulated";
  std::vector<double> params, ts, tmu;
  if (tab) {
    ts = r.get<std::vector<double>>(sec, "s", std::nullopt);
    tmu = r.get<std::vector<double>>(sec, "mu", std::nullopt);
  } else {
    params = r.get<std::vector<double>>(sec, "params", std::nullopt);
  }
  if (!r.errors.empty()) return MemoryKernel{};
  try {
    if (fam == "exponential") {
      if (params.size() != 2) throw config_error("expected params = [amplitude, rate]");
      return exponential_kernel(params[0], params[1], side);
    }
    if (fam == "biexponential") {
      if (params.size() != 4) throw config_error("expected params = [a0, d0, a1, d1]");
      return biexponential_kernel(params[0], params[1], params[2], params[3], side);
    }
    if (fam == "power_law") {
      if (params.size() != 2) throw config_error("expected params = [amplitude, exponent]");
      return power_law_kernel(params[0], params[1], side);
    }
    if (fam == "tabulated") return tabulated_kernel(ts, tmu, side);
    r.errors.push_back(sec + ".family: unknown family '" + fam + "'");
  } catch (const config_error& e) {
    r.errors.push_back(sec + ": " + e.what());
  }
  return MemoryKernel{};
}

ScalarFunc read_scalar(SchemaReader& r, const std::string& name,
                       const std::string& coeff_key) {
  const std::string fam =
      r.get<std::string>("nonlinearity", name, std::optional<std::string>("zero"));
  const auto coeffs = r.get<std::vector<double>>("nonlinearity", coeff_key,
                                                 std::make_optional(std::vector<double>{}));
  if (fam == "poly") return ScalarFunc::poly(coeffs);
  if (fam == "zero") return ScalarFunc::zero();
  if (fam == "arctan") return ScalarFunc::arctan();
  r.errors.push_back("nonlinearity." + name + ": unknown family '" + fam + "'");
  return ScalarFunc::zero();
}

}  // namespace

RunConfig resolve_config(const ConfigTree& tree) {
  SchemaReader r{tree, {}, {}};
  RunConfig rc;

  const std::string backend =
      r.get<std::string>("geometry", "backend", std::nullopt);
  if (backend == "interval") rc.backend = Backend::interval;
  else if (backend == "disk") rc.backend = Backend::disk;
  else if (!backend.empty())
    r.errors.push_back("geometry.backend: expected 'interval' or 'disk'");
  rc.size = r.get<double>("geometry", "size", std::nullopt);
  rc.refine = r.get<int>("geometry", "refine", std::nullopt);

  rc.alpha = r.get<double>("model", "alpha", std::nullopt);
  rc.beta = r.get<double>("model", "beta", std::nullopt);
  rc.nu = r.get<double>("model", "nu", std::nullopt);
  rc.omega = r.get<double>("model", "omega", std::nullopt);

  rc.kernel_omega = read_kernel(r, "kernel_omega", KernelSide::omega);
  rc.kernel_gamma = read_kernel(r, "kernel_gamma", KernelSide::gamma);

  rc.nonlin.f = read_scalar(r, "f", "f_coeffs");
  rc.nonlin.g = read_scalar(r, "g", "g_coeffs");

  rc.n_modes = r.get<int>("discretization", "n_modes", std::nullopt);
  rc.dt = r.get<double>("discretization", "dt", std::nullopt);
  rc.t_end = r.get<double>("discretization", "t_end", std::nullopt);
  const std::string scheme = r.get<std::string>(
      "discretization", "scheme", std::optional<std::string>("imex-euler"));
  if (scheme == "imex-euler") rc.scheme = Scheme::imex_euler;
  else if (scheme == "imex-bdf2") rc.scheme = Scheme::imex_bdf2;
  else r.errors.push_back("discretization.scheme: expected 'imex-euler' or 'imex-bdf2'");
  rc.s_max = r.get<double>("discretization", "s_max", std::optional<double>(0.0));

  rc.u0_kind = r.get<std::string>("initial", "u0", std::optional<std::string>("zero"));
  rc.u0_coeffs = r.get<std::vector<double>>("initial", "u0_coeffs",
                                            std::make_optional(std::vector<double>{}));
  rc.u0_value = r.get<double>("initial", "u0_value", std::optional<double>(0.0));
  rc.v0_value = r.get<double>("initial", "v0_value", std::optional<double>(0.0));
  rc.phi0_kind = r.get<std::string>("initial", "phi0", std::optional<std::string>("zero"));
  rc.phi0_scale = r.get<double>("initial", "phi0_scale", std::optional<double>(1.0));
  rc.phi0_rate = r.get<double>("initial", "phi0_rate", std::optional<double>(1.0));
  rc.phi0_coeffs = r.get<std::vector<double>>("initial", "phi0_coeffs",
                                              std::make_optional(std::vector<double>{}));

  rc.out_dir = r.get<std::string>("output", "dir", std::optional<std::string>("out"));
  rc.stride = r.get<int>("output", "stride", std::optional<int>(1));
  {
    // channels given as a quoted comma-separated string, default all
    const std::string ch = r.get<std::string>(
        "output", "channels",
        std::optional<std::string>("energy_X2,energy_M1,dissipation,V1_norm"));
    rc.channels.clear();
    std::stringstream ss(ch);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = strip(tok);
      if (!tok.empty()) rc.channels.push_back(tok);
    }
  }

  r.check_unknown();

  // value-range validation, collected alongside schema errors
  if (r.errors.empty()) {
    if (!(rc.nu > 0.0 && rc.nu < 1.0)) r.errors.push_back("model.nu must lie in (0,1)");
    if (!(rc.omega > 0.0 && rc.omega < 1.0))
      r.errors.push_back("model.omega must lie in (0,1)");
    if (rc.alpha <= 0) r.errors.push_back("model.alpha must be positive");
    if (rc.beta <= 0) r.errors.push_back("model.beta must be positive");
    if (rc.dt <= 0) r.errors.push_back("discretization.dt must be positive");
    if (rc.t_end < 0) r.errors.push_back("discretization.t_end must be nonnegative");
    if (rc.n_modes < 1) r.errors.push_back("discretization.n_modes must be >= 1");
    if (rc.stride < 1) r.errors.push_back("output.stride must be >= 1");
    if (rc.t_end > 0) {
      const double k = rc.t_end / rc.dt;
      if (std::abs(k - std::llround(k)) > 1e-12 * std::max(1.0, k))
        r.errors.push_back("discretization.dt must divide t_end");
    }
    static const std::set<std::string> valid_channels = {
        "energy_X2", "energy_M1", "dissipation", "V1_norm"};
    for (const auto& c : rc.channels)
      if (!valid_channels.count(c))
        r.errors.push_back("output.channels: unknown channel '" + c + "'");
  }

  if (!r.errors.empty()) {
    std::string msg = "config rejected:";
    for (const auto& e : r.errors) msg += "\n  - " + e;
    throw config_error(msg);
  }
  return rc;
}

RunConfig parse_config(const std::string& path) {
  return resolve_config(parse_config_file(path));
}

SimConfig build_sim(const RunConfig& rc, bool force) {
  SimConfig cfg;
  auto geom = std::make_shared<Geometry>(
      rc.backend == Backend::interval ? build_interval(rc.size, rc.refine)
                                      : build_disk(rc.size, rc.refine));
  cfg.geom = geom;
  cfg.op = assemble(geom, rc.alpha, rc.beta, rc.omega, rc.nu);
  if (rc.n_modes > geom->n_bulk())
    throw config_error("discretization.n_modes exceeds the space dimension");
  cfg.basis = eigenbasis(cfg.op, rc.n_modes);
  cfg.kernels = {rc.kernel_omega, rc.kernel_gamma};
  cfg.nonlin = rc.nonlin;
  cfg.scheme = rc.scheme;
  cfg.dt = rc.dt;
  cfg.t_end = rc.t_end;
  cfg.s_max = rc.s_max;
  cfg.n_modes = rc.n_modes;
  cfg.stride = rc.stride;
  cfg.force = force;

  const int n = geom->n_bulk();
  if (rc.u0_kind == "zero") {
    cfg.u0 = {Vec::Zero(n), Vec::Zero(geom->n_gamma()), SpaceTag::V1};
  } else if (rc.u0_kind == "constant") {
    cfg.u0 = make_v1_field(*geom, Vec::Constant(n, rc.u0_value));
  } else if (rc.u0_kind == "pair_constant") {
    cfg.u0 = {Vec::Constant(n, rc.u0_value),
              Vec::Constant(geom->n_gamma(), rc.v0_value), SpaceTag::X2};
  } else if (rc.u0_kind == "modal") {
    if (static_cast<int>(rc.u0_coeffs.size()) > rc.n_modes)
      throw config_error("initial.u0_coeffs longer than n_modes");
    Vec a = Vec::Zero(rc.n_modes);
    for (size_t i = 0; i < rc.u0_coeffs.size(); ++i) a[i] = rc.u0_coeffs[i];
    cfg.u0 = make_v1_field(*geom, cfg.basis.Psi * a);
  } else {
    throw config_error("initial.u0: unknown preset '" + rc.u0_kind + "'");
  }

  if (rc.phi0_kind == "zero") {
    cfg.phi0 = nullptr;
  } else if (rc.phi0_kind == "linear_in_s") {
    const Vec base = cfg.u0.u;
    const double scale = rc.phi0_scale;
    cfg.phi0 = [base, scale](double s) { return Vec((scale * s) * base); };
  } else if (rc.phi0_kind == "modal_exp") {
    if (static_cast<int>(rc.phi0_coeffs.size()) > rc.n_modes)
      throw config_error("initial.phi0_coeffs longer than n_modes");
    Vec a = Vec::Zero(rc.n_modes);
    for (size_t i = 0; i < rc.phi0_coeffs.size(); ++i) a[i] = rc.phi0_coeffs[i];
    const Vec base = cfg.basis.Psi * a;
    const double rate = rc.phi0_rate;
    cfg.phi0 = [base, rate](double s) { return Vec(std::exp(-rate * s) * base); };
  } else {
    throw config_error("initial.phi0: unknown preset '" + rc.phi0_kind + "'");
  }
  return cfg;
}

namespace {

void canon_kernel(std::ostream& os, const std::string& sec, const MemoryKernel& k) {
  os << sec << ".family=";
  switch (k.family) {
    case KernelFamily::exponential:
      os << "exponential\n" << sec << ".params=[" << fmt17(k.a0) << "," << fmt17(k.d0) << "]\n";
      break;
    case KernelFamily::biexponential:
      os << "biexponential\n" << sec << ".params=[" << fmt17(k.a0) << "," << fmt17(k.d0)
         << "," << fmt17(k.a1) << "," << fmt17(k.d1) << "]\n";
      break;
    case KernelFamily::power_law:
      os << "power_law\n" << sec << ".params=[" << fmt17(k.a0) << "," << fmt17(k.p) << "]\n";
      break;
    case KernelFamily::tabulated: {
      os << "tabulated\n" << sec << ".s=[";
      for (size_t i = 0; i < k.tab_s.size(); ++i)
        os << (i ? "," : "") << fmt17(k.tab_s[i]);
      os << "]\n" << sec << ".mu=[";
      for (size_t i = 0; i < k.tab_mu.size(); ++i)
        os << (i ? "," : "") << fmt17(k.tab_mu[i]);
      os << "]\n";
      break;
    }
  }
}

void canon_scalar(std::ostream& os, const std::string& key, const ScalarFunc& f) {
  os << "nonlinearity." << key << "=";
  switch (f.kind) {
    case ScalarFunc::Kind::polynomial: {
      os << "poly\nnonlinearity." << key << "_coeffs=[";
      for (size_t i = 0; i < f.coeffs.size(); ++i)
        os << (i ? "," : "") << fmt17(f.coeffs[i]);
      os << "]\n";
      break;
    }
    case ScalarFunc::Kind::arctan:
      os << "arctan\n";
      break;
    case ScalarFunc::Kind::custom:
      os << "custom\n";
      break;
  }
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "geometry.backend=" << (backend == Backend::interval ? "interval" : "disk")
     << "\ngeometry.size=" << fmt17(size) << "\ngeometry.refine=" << refine << "\n";
  os << "model.alpha=" << fmt17(alpha) << "\nmodel.beta=" << fmt17(beta)
     << "\nmodel.nu=" << fmt17(nu) << "\nmodel.omega=" << fmt17(omega) << "\n";
  canon_kernel(os, "kernel_omega", kernel_omega);
  canon_kernel(os, "kernel_gamma", kernel_gamma);
  canon_scalar(os, "f", nonlin.f);
  canon_scalar(os, "g", nonlin.g);
  os << "discretization.n_modes=" << n_modes << "\ndiscretization.dt=" << fmt17(dt)
     << "\ndiscretization.t_end=" << fmt17(t_end) << "\ndiscretization.scheme="
     << (scheme == Scheme::imex_euler ? "imex-euler" : "imex-bdf2")
     << "\ndiscretization.s_max=" << fmt17(s_max) << "\n";
  os << "initial.u0=" << u0_kind << "\ninitial.u0_coeffs=[";
  for (size_t i = 0; i < u0_coeffs.size(); ++i) os << (i ? "," : "") << fmt17(u0_coeffs[i]);
  os << "]\ninitial.u0_value=" << fmt17(u0_value)
     << "\ninitial.v0_value=" << fmt17(v0_value) << "\ninitial.phi0=" << phi0_kind
     << "\ninitial.phi0_scale=" << fmt17(phi0_scale)
     << "\ninitial.phi0_rate=" << fmt17(phi0_rate) << "\ninitial.phi0_coeffs=[";
  for (size_t i = 0; i < phi0_coeffs.size(); ++i)
    os << (i ? "," : "") << fmt17(phi0_coeffs[i]);
  os << "]\noutput.dir=" << out_dir << "\noutput.stride=" << stride
     << "\noutput.channels=";
  for (size_t i = 0; i < channels.size(); ++i) os << (i ? "," : "") << channels[i];
  os << "\n";
  return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cogur
