#include "grpavg/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "grpavg/harness/experiments.hpp"

namespace grpavg::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail("'" + path + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      fail("unknown key '" + (path.empty() ? k : path + "." + k) + "'");
    }
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail("'" + path + "' must be an integer");
  return v.get<std::int64_t>();
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail("'" + path + "' must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail("'" + path + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const json& v, const std::string& path) {
  if (!v.is_array()) fail("'" + path + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <class T>
T narrow(std::int64_t v, const std::string& path) {
  if (v < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
      v > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
    fail("'" + path + "' is out of range");
  }
  return static_cast<T>(v);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

InlineModel parse_inline_model(const json& m, double row_tol) {
  allow_keys(m, "model", {"matrix", "pi"});
  const json& rows = m.at("matrix");
  if (!rows.is_array() || rows.empty()) fail("'model.matrix' must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  InlineModel out;
  out.matrix = Matrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string rp = "model.matrix[" + std::to_string(i) + "]";
    const std::vector<double> row = as_doubles(rows[static_cast<std::size_t>(i)], rp);
    if (static_cast<Eigen::Index>(row.size()) != n) fail("'" + rp + "' has " + std::to_string(row.size()) +
                                                        " entries, expected " + std::to_string(n));
    double sum = 0.0;
    for (Eigen::Index jx = 0; jx < n; ++jx) {
      const double v = row[static_cast<std::size_t>(jx)];
      if (!(v >= 0.0)) fail("'" + rp + "' has a negative or non-finite entry");
      out.matrix(i, jx) = v;
      sum += v;
    }
    if (std::abs(sum - 1.0) > row_tol) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << i << " of 'model.matrix' sums to " << sum << ", expected 1 within " << row_tol;
      fail(os.str());
    }
  }
  if (const json* pi = find(m, "pi")) {
    out.pi = as_doubles(*pi, "model.pi");
    if (static_cast<Eigen::Index>(out.pi->size()) != n) fail("'model.pi' must have one entry per state");
    try {
      Distribution d(Eigen::Map<const Vector>(out.pi->data(), n));
      if (!is_stationary(MarkovKernel(out.matrix, row_tol), d, row_tol)) fail("'model.pi' is not stationary");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(std::string("'model.pi': ") + e.what());
    }
  }
  return out;
}

NamedModelSpec parse_named_model(const json& m) {
  allow_keys(m, "model", {"name", "n", "beta", "delta", "a", "noise", "lazy"});
  NamedModelSpec s;
  const json* name = find(m, "name");
  if (!name) fail("'model' needs 'name' or 'matrix'");
  s.name = as_string(*name, "model.name");
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), s.name) == names.end()) fail("unknown model '" + s.name + "'");
  if (const json* v = find(m, "n")) s.params.n = narrow<int>(as_int(*v, "model.n"), "model.n");
  if (const json* v = find(m, "beta")) s.params.beta = as_double(*v, "model.beta");
  if (const json* v = find(m, "delta")) s.params.delta = as_double(*v, "model.delta");
  if (const json* v = find(m, "a")) s.params.a = as_int(*v, "model.a");
  if (const json* v = find(m, "noise")) s.params.noise = as_doubles(*v, "model.noise");
  if (const json* v = find(m, "lazy")) {
    if (!v->is_boolean()) fail("'model.lazy' must be a boolean");
    s.params.lazy = v->get<bool>();
  }
  try {
    (void)named_model(s.name, s.params);
  } catch (const Error& e) {
    fail(std::string("'model': ") + e.what());
  }
  return s;
}

std::variant<NamedGroupSpec, InlineGroup> parse_group(const json& g) {
  if (g.is_object() && g.contains("perms")) {
    allow_keys(g, "group", {"perms"});
    InlineGroup out;
    const json& ps = g.at("perms");
    if (!ps.is_array() || ps.empty()) fail("'group.perms' must be a non-empty array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string pp = "group.perms[" + std::to_string(i) + "]";
      if (!ps[i].is_array()) fail("'" + pp + "' must be an array of indices");
      std::vector<std::size_t> map;
      for (std::size_t k = 0; k < ps[i].size(); ++k) {
        map.push_back(narrow<std::size_t>(as_int(ps[i][k], pp + "[" + std::to_string(k) + "]"), pp));
      }
      try {
        (void)Perm(map);
      } catch (const Error& e) {
        fail("'" + pp + "': " + e.what());
      }
      if (!out.perms.empty() && map.size() != out.perms.front().size()) fail("'" + pp + "' has the wrong degree");
      out.perms.push_back(std::move(map));
    }
    return out;
  }
  allow_keys(g, "group", {"name", "n", "j", "a", "k"});
  NamedGroupSpec s;
  const json* name = find(g, "name");
  if (!name) fail("'group' needs 'name' or 'perms'");
  s.name = as_string(*name, "group.name");
  const auto& names = group_names();
  if (std::find(names.begin(), names.end(), s.name) == names.end()) fail("unknown group '" + s.name + "'");
  if (const json* v = find(g, "n")) s.params.n = narrow<int>(as_int(*v, "group.n"), "group.n");
  if (const json* v = find(g, "j")) s.params.j = narrow<int>(as_int(*v, "group.j"), "group.j");
  if (const json* v = find(g, "a")) s.params.a = as_int(*v, "group.a");
  if (const json* v = find(g, "k")) s.params.k = as_int(*v, "group.k");
  try {
    (void)named_group(s.name, s.params);
  } catch (const Error& e) {
    fail(std::string("'group': ") + e.what());
  }
  return s;
}

NuSpec parse_nu(const json& v) {
  NuSpec s;
  auto kind = [&](const json& k, const std::string& path) {
    try {
      s.kind = average_kind_from_string(as_string(k, path));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail("'" + path + "': " + e.what());
    }
  };
  if (v.is_string()) {
    kind(v, "nu");
    return s;
  }
  allow_keys(v, "nu", {"kind", "atoms"});
  if (v.contains("kind") == v.contains("atoms")) fail("'nu' needs exactly one of 'kind' and 'atoms'");
  if (const json* k = find(v, "kind")) {
    kind(*k, "nu.kind");
    return s;
  }
  const json& atoms = v.at("atoms");
  if (!atoms.is_array() || atoms.empty()) fail("'nu.atoms' must be a non-empty array of [g, h, weight]");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string ap = "nu.atoms[" + std::to_string(i) + "]";
    if (!atoms[i].is_array() || atoms[i].size() != 3) fail("'" + ap + "' must be [g, h, weight]");
    s.atoms.push_back({narrow<std::size_t>(as_int(atoms[i][0], ap), ap), narrow<std::size_t>(as_int(atoms[i][1], ap), ap),
                       as_double(atoms[i][2], ap)});
  }
  return s;
}

MixingSpec parse_mixing(const json& m) {
  allow_keys(m, "mixing", {"norm", "eps", "t_max"});
  MixingSpec s;
  if (const json* v = find(m, "norm")) {
    try {
      s.norm = norm_from_string(as_string(*v, "mixing.norm"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(std::string("'mixing.norm': ") + e.what());
    }
  }
  if (const json* v = find(m, "eps")) {
    s.eps = as_doubles(*v, "mixing.eps");
    for (double e : s.eps)
      if (!(e > 0.0)) fail("'mixing.eps' entries must be positive");
  }
  if (const json* v = find(m, "t_max")) {
    const auto t = as_int(*v, "mixing.t_max");
    if (t < 1) fail("'mixing.t_max' must be at least 1");
    s.t_max = static_cast<std::uint64_t>(t);
  }
  return s;
}

json params_json(const ModelParams& p) {
  json j{{"n", p.n}, {"beta", p.beta}, {"delta", p.delta}, {"a", p.a}, {"lazy", p.lazy}};
  if (p.noise) j["noise"] = *p.noise;
  return j;
}

} // namespace

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names{"stationarity", "spectral", "average", "cheeger", "mixing",
                                              "isotropy", "invariance"};
  return names;
}

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names{"stochastic", "derived", "exact", "cluster"};
  return names;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError("config: parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what(),
                      line, col);
  }
  allow_keys(root, "", {"schema_version", "name", "experiment", "params", "model", "group", "nu", "diagnostics",
                        "seeds", "tolerances", "mixing"});
  ExperimentConfig c;
  const json* version = find(root, "schema_version");
  if (!version) fail("missing required key 'schema_version'");
  c.schema_version = narrow<int>(as_int(*version, "schema_version"), "schema_version");
  if (c.schema_version != config_schema_version) {
    fail("unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
         std::to_string(config_schema_version) + ")");
  }
  const json* name = find(root, "name");
  if (!name) fail("missing required key 'name'");
  c.name = as_string(*name, "name");

  if (const json* t = find(root, "tolerances")) {
    allow_keys(*t, "tolerances", {"stochastic", "derived", "exact", "cluster"});
    for (const auto& [k, v] : t->items()) {
      const double x = as_double(v, "tolerances." + k);
      if (!(x > 0.0)) fail("'tolerances." + k + "' must be positive");
      c.tolerances[k] = x;
    }
  }
  const double row_tol = c.tolerances.count("stochastic") ? c.tolerances.at("stochastic") : tol::stochastic;

  if (const json* e = find(root, "experiment")) {
    c.experiment = as_string(*e, "experiment");
    const ExperimentInfo* info = find_experiment(*c.experiment);
    if (!info) fail("unknown experiment '" + *c.experiment + "'");
    c.params = info->defaults;
    if (const json* p = find(root, "params")) {
      if (!p->is_object()) fail("'params' must be an object");
      for (const auto& [k, v] : p->items()) {
        if (!info->defaults.contains(k)) fail("unknown key 'params." + k + "' for experiment '" + info->name + "'");
        if (v.type() != info->defaults.at(k).type() &&
            !(v.is_number() && info->defaults.at(k).is_number_float())) {
          fail("'params." + k + "' has the wrong type");
        }
        c.params[k] = v;
      }
    }
  } else if (root.contains("params")) {
    fail("'params' requires 'experiment'");
  }

  if (const json* m = find(root, "model")) {
    if (m->is_object() && m->contains("matrix")) c.model = parse_inline_model(*m, row_tol);
    else c.model = parse_named_model(*m);
  }
  if (!c.experiment && !c.model) fail("config needs 'experiment' or 'model'");
  if (c.experiment && c.model) fail("'experiment' and 'model' are mutually exclusive");
  if (const json* g = find(root, "group")) c.group = parse_group(*g);
  if (const json* v = find(root, "nu")) c.nu = parse_nu(*v);
  if (c.nu && !c.group) fail("'nu' requires 'group'");
  if (const json* d = find(root, "diagnostics")) {
    if (!d->is_array()) fail("'diagnostics' must be an array of names");
    const auto& known = diagnostic_names();
    for (std::size_t i = 0; i < d->size(); ++i) {
      const std::string n = as_string((*d)[i], "diagnostics[" + std::to_string(i) + "]");
      if (std::find(known.begin(), known.end(), n) == known.end()) fail("unknown diagnostic '" + n + "'");
      c.diagnostics.push_back(n);
    }
  } else if (c.model) {
    c.diagnostics = {"stationarity", "spectral"};
  }
  if (const json* s = find(root, "seeds")) {
    if (!s->is_array() || s->empty()) fail("'seeds' must be a non-empty array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      const std::string sp = "seeds[" + std::to_string(i) + "]";
      if (!(*s)[i].is_number_unsigned()) fail("'" + sp + "' must be a nonnegative integer");
      c.seeds.push_back((*s)[i].get<std::uint64_t>());
    }
  }
  if (const json* m = find(root, "mixing")) c.mixing = parse_mixing(*m);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  if (c.experiment) {
    j["experiment"] = *c.experiment;
    j["params"] = c.params;
  }
  if (c.model) {
    if (const auto* m = std::get_if<NamedModelSpec>(&*c.model)) {
      json mj = params_json(m->params);
      mj["name"] = m->name;
      j["model"] = std::move(mj);
    } else {
      const auto& im = std::get<InlineModel>(*c.model);
      json rows = json::array();
      for (Eigen::Index i = 0; i < im.matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < im.matrix.cols(); ++k) row.push_back(im.matrix(i, k));
        rows.push_back(std::move(row));
      }
      j["model"] = {{"matrix", std::move(rows)}};
      if (im.pi) j["model"]["pi"] = *im.pi;
    }
  }
  if (c.group) {
    if (const auto* g = std::get_if<NamedGroupSpec>(&*c.group)) {
      j["group"] = {{"name", g->name}, {"n", g->params.n}, {"a", g->params.a}, {"k", g->params.k}};
      if (g->params.j) j["group"]["j"] = *g->params.j;
    } else {
      j["group"] = {{"perms", std::get<InlineGroup>(*c.group).perms}};
    }
  }
  if (c.nu) {
    if (c.nu->kind) {
      j["nu"] = {{"kind", to_string(*c.nu->kind)}};
    } else {
      json atoms = json::array();
      for (const auto& a : c.nu->atoms) atoms.push_back(json::array({a.left, a.right, a.weight}));
      j["nu"] = {{"atoms", std::move(atoms)}};
    }
  }
  j["diagnostics"] = c.diagnostics;
  j["seeds"] = c.seeds;
  j["tolerances"] = c.tolerances;
  j["mixing"] = {{"norm", to_string(c.mixing.norm)}, {"eps", c.mixing.eps}, {"t_max", c.mixing.t_max}};
  return j;
}

std::string emit_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

} // namespace grpavg::harness
