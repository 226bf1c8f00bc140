#include "stochopt/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <concepts>
#include <cmath>
#include <set>
#include <sstream>

#include "stochopt/errors.hpp"
#include "stochopt/io.hpp"
#include "stochopt/metrics.hpp"

namespace stochopt {

namespace pt = boost::property_tree;

std::string_view to_string(DataSource source) {
  switch (source) {
    case DataSource::synthetic: return "synthetic";
    case DataSource::libsvm: return "libsvm";
    case DataSource::csv: return "csv";
  }
  return "synthetic";
}

std::string algorithm_list() {
  std::string out;
  for (auto name : kAlgorithms) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

namespace {

bool is_algorithm(std::string_view name) {
  for (auto a : kAlgorithms) {
    if (a == name) return true;
  }
  return false;
}

bool is_baseline(std::string_view name) {
  return name == "sgd" || name == "momentum" || name == "svrg";
}

// Typed reader over one INI section. Remembers which keys were read so the
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name, std::vector<std::string>& errors)
      : tree_(tree), name_(std::move(name)), errors_(errors) {}

  void read(const char* key, double& out) {
    with(key, [&](const std::string& text) {
      double v = 0.0;
      if (!parse_number(text, v) || std::isnan(v)) return fail(key, "expected a number", text);
      out = v;
    });
  }
  template <std::unsigned_integral T>
  void read(const char* key, T& out) {
    with(key, [&](const std::string& text) {
      T v = 0;
      if (!parse_number(text, v)) return fail(key, "expected a non-negative integer", text);
      out = v;
    });
  }
  void read(const char* key, bool& out) {
    with(key, [&](const std::string& text) {
      if (text == "true" || text == "1") out = true;
      else if (text == "false" || text == "0") out = false;
      else fail(key, "expected true or false", text);
    });
  }
  void read(const char* key, std::string& out) {
    with(key, [&](const std::string& text) { out = text; });
  }
  template <class Parse, class T>
  void read_enum(const char* key, T& out, Parse parse) {
    with(key, [&](const std::string& text) {
      try {
        out = parse(text);
      } catch (const std::invalid_argument& e) {
        errors_.push_back(name_ + "." + key + ": " + e.what());
      }
    });
  }
  bool has(const char* key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  void finish() {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) errors_.push_back(name_ + "." + key + ": unknown key");
    }
  }

 private:
  template <class T>
  static bool parse_number(const std::string& text, T& v) {
    const char* b = text.data();
    const char* e = b + text.size();
    if (b != e && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    return b != e && res.ec == std::errc() && res.ptr == e;
  }

  template <class F>
  void with(const char* key, F f) {
    used_.insert(key);
    if (!tree_) return;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return;
    f(it->second.get_value<std::string>());
  }

  void fail(const char* key, const char* what, const std::string& text) {
    errors_.push_back(name_ + "." + key + ": " + what + ", got '" + text + "'");
  }

  const pt::ptree* tree_;
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

LossKind parse_loss(const std::string& s) {
  if (s == "logistic") return LossKind::logistic;
  if (s == "sigmoid_svm") return LossKind::sigmoid_svm;
  throw std::invalid_argument("unknown loss '" + s + "' (valid: logistic, sigmoid_svm)");
}

DataSource parse_source(const std::string& s) {
  if (s == "synthetic") return DataSource::synthetic;
  if (s == "libsvm") return DataSource::libsvm;
  if (s == "csv") return DataSource::csv;
  throw std::invalid_argument("unknown source '" + s + "' (valid: synthetic, libsvm, csv)");
}

OracleMode parse_oracle(const std::string& s) {
  if (s == "exact") return OracleMode::exact;
  if (s == "inexact_gradient") return OracleMode::inexact_gradient;
  if (s == "inexact_gradient_and_value") return OracleMode::inexact_gradient_and_value;
  throw std::invalid_argument("unknown oracle '" + s +
                              "' (valid: exact, inexact_gradient, inexact_gradient_and_value)");
}

std::string_view oracle_name(OracleMode mode) {
  switch (mode) {
    case OracleMode::exact: return "exact";
    case OracleMode::inexact_gradient: return "inexact_gradient";
    case OracleMode::inexact_gradient_and_value: return "inexact_gradient_and_value";
  }
  return "exact";
}

void read_schedule(Section& s, StepSchedule& schedule) {
  s.read_enum("schedule", schedule.kind, [](const std::string& t) { return parse_schedule_kind(t); });
  s.read("step", schedule.c);
  s.read("beta", schedule.beta);
}

void read_baseline(Section& s, BaselineParams& p) {
  read_schedule(s, p.schedule);
  s.read("momentum", p.momentum);
  s.read("batch_size", p.batch_size);
  s.read("epochs", p.epochs);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> out;
  auto add = [&](const char* section, std::vector<std::string> v) {
    for (auto& msg : v) out.push_back(std::string(section) + ": " + msg);
  };
  if (problem.kind == LossKind::quadratic) out.push_back("problem: kind must be logistic or sigmoid_svm");
  if (!(std::isfinite(problem.lambda) && problem.lambda >= 0.0)) {
    out.push_back("problem: lambda must be finite and >= 0");
  }
  if (problem.source == DataSource::synthetic) {
    add("synthetic", problem.synthetic.violations());
  } else if (problem.path.empty()) {
    out.push_back("problem: path is required for source " + std::string(to_string(problem.source)));
  }
  if (!is_algorithm(algorithm)) {
    out.push_back("algorithm: unknown name '" + algorithm + "' (valid: " + algorithm_list() + ")");
  } else if (algorithm == "arig") {
    add("arig", arig.violations());
  } else if (algorithm == "aras") {
    add("aras", aras.violations());
  } else if (algorithm == "varchen") {
    add("varchen", varchen.violations());
  } else {
    add(algorithm.c_str(), baseline.violations());
  }
  if (output.empty()) out.push_back("run: output must not be empty");
  return out;
}

void ExperimentConfig::validate() const { throw_if_invalid(violations()); }

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError({"syntax: line " + std::to_string(e.line()) + ": " + e.message()});
  }

  std::vector<std::string> errors;
  ExperimentConfig c;
  static const std::set<std::string> known = {"problem", "synthetic", "algorithm", "run", "arig",
                                              "aras",    "varchen",   "sgd",       "momentum", "svrg"};
  for (const auto& [name, sub] : tree) {
    if (sub.empty() && !sub.data().empty()) {
      errors.push_back(name + ": key outside any section");
    } else if (!known.count(name)) {
      errors.push_back(name + ": unknown section");
    }
  }
  auto section = [&](const char* name) {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name, errors);
  };

  {
    Section s = section("problem");
    s.read_enum("kind", c.problem.kind, parse_loss);
    s.read("lambda", c.problem.lambda);
    s.read_enum("source", c.problem.source, parse_source);
    std::string path;
    s.read("path", path);
    if (!path.empty()) c.problem.path = resolve(base_dir, path);
    std::size_t dim = 0;
    s.read("dim", dim);
    if (s.has("dim")) c.problem.dim = dim;
    s.read("label_column", c.problem.label_column);
    s.read("has_header", c.problem.has_header);
    std::string test_path;
    s.read("test_path", test_path);
    if (!test_path.empty()) c.problem.test_path = resolve(base_dir, test_path);
    s.finish();
  }
  {
    Section s = section("synthetic");
    auto& spec = c.problem.synthetic;
    s.read("samples", spec.samples);
    s.read("features", spec.features);
    s.read("noise", spec.noise);
    s.read("kappa", spec.kappa);
    s.read_enum("labels", spec.labels, [](const std::string& t) { return parse_label_model(t); });
    s.read("seed", spec.seed);
    s.read("test_samples", c.problem.synthetic_test_samples);
    s.finish();
  }
  {
    Section s = section("algorithm");
    s.read("name", c.algorithm);
    s.finish();
  }
  {
    Section s = section("run");
    s.read("seed", c.seed);
    std::string output;
    s.read("output", output);
    if (s.has("output")) c.output = output;
    s.read("cadence", c.cadence);
    s.finish();
  }
  {
    Section s = section("arig");
    auto& p = c.arig;
    s.read("epsilon", p.epsilon);
    s.read("sigma0", p.sigma0);
    s.read("sigma_min", p.sigma_min);
    s.read("eta1", p.eta1);
    s.read("eta2", p.eta2);
    s.read("gamma1", p.gamma1);
    s.read("gamma2", p.gamma2);
    s.read("gamma3", p.gamma3);
    s.read("eta0", p.eta0);
    s.read("max_iters", p.max_iters);
    s.read("max_consecutive_rejections", p.max_consecutive_rejections);
    s.read_enum("oracle", c.arig_oracle, parse_oracle);
    s.finish();
  }
  {
    Section s = section("aras");
    auto& p = c.aras;
    s.read("sigma0", p.sigma0);
    s.read("sigma_min", p.sigma_min);
    s.read("eta", p.eta);
    s.read("gamma1", p.gamma1);
    s.read("gamma2", p.gamma2);
    s.read("m0", p.m0);
    s.read("m_max", p.m_max);
    s.read("burn_in", p.burn_in);
    s.read("epochs", p.epochs);
    s.finish();
  }
  {
    Section s = section("varchen");
    auto& p = c.varchen;
    s.read("memory", p.memory);
    s.read("eta", p.eta);
    s.read("lambda_min", p.lambda_min);
    s.read("lambda_max", p.lambda_max);
    s.read("gamma_under", p.gamma_under);
    s.read("gamma_over", p.gamma_over);
    s.read("batch_size", p.batch_size);
    read_schedule(s, p.schedule);
    s.read("epochs", p.epochs);
    bool control = true;
    s.read("control", control);
    if (!control) p = p.without_control();
    s.finish();
  }
  for (const char* name : {"sgd", "momentum", "svrg"}) {
    Section s = section(name);
    BaselineParams p;
    read_baseline(s, p);
    s.finish();
    if (c.algorithm == name) c.baseline = p;
  }

  for (auto& v : c.violations()) errors.push_back(std::move(v));
  throw_if_invalid(std::move(errors));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ValidationError({e.what()});
  }
  return parse_config(text, path.parent_path());
}

std::string canonical_config(const ExperimentConfig& c) {
  pt::ptree tree;
  auto num = [](double v) { return format_double(v); };
  auto put = [&](const std::string& key, const std::string& value) { tree.put(pt::ptree::path_type(key, '/'), value); };

  put("problem/kind", std::string(to_string(c.problem.kind)));
  put("problem/lambda", num(c.problem.lambda));
  put("problem/source", std::string(to_string(c.problem.source)));
  if (c.problem.source != DataSource::synthetic) put("problem/path", c.problem.path.generic_string());
  if (c.problem.source == DataSource::libsvm && c.problem.dim) put("problem/dim", std::to_string(*c.problem.dim));
  if (c.problem.source == DataSource::csv) {
    put("problem/label_column", std::to_string(c.problem.label_column));
    put("problem/has_header", c.problem.has_header ? "true" : "false");
  }
  if (c.problem.test_path) put("problem/test_path", c.problem.test_path->generic_string());
  if (c.problem.source == DataSource::synthetic) {
    const auto& s = c.problem.synthetic;
    put("synthetic/samples", std::to_string(s.samples));
    put("synthetic/features", std::to_string(s.features));
    put("synthetic/noise", num(s.noise));
    put("synthetic/kappa", num(s.kappa));
    put("synthetic/labels", std::string(to_string(s.labels)));
    put("synthetic/seed", std::to_string(s.seed));
    put("synthetic/test_samples", std::to_string(c.problem.synthetic_test_samples));
  }
  put("algorithm/name", c.algorithm);

  auto schedule = [&](const std::string& sec, const StepSchedule& s) {
    put(sec + "/schedule", std::string(to_string(s.kind)));
    put(sec + "/step", num(s.c));
    if (s.kind == StepSchedule::Kind::power) put(sec + "/beta", num(s.beta));
  };
  if (c.algorithm == "arig") {
    const auto& p = c.arig;
    put("arig/epsilon", num(p.epsilon));
    put("arig/sigma0", num(p.sigma0));
    put("arig/sigma_min", num(p.sigma_min));
    put("arig/eta1", num(p.eta1));
    put("arig/eta2", num(p.eta2));
    put("arig/gamma1", num(p.gamma1));
    put("arig/gamma2", num(p.gamma2));
    put("arig/gamma3", num(p.gamma3));
    put("arig/eta0", num(p.eta0));
    put("arig/max_iters", std::to_string(p.max_iters));
    put("arig/max_consecutive_rejections", std::to_string(p.max_consecutive_rejections));
    put("arig/oracle", std::string(oracle_name(c.arig_oracle)));
  } else if (c.algorithm == "aras") {
    const auto& p = c.aras;
    put("aras/sigma0", num(p.sigma0));
    put("aras/sigma_min", num(p.sigma_min));
    put("aras/eta", num(p.eta));
    put("aras/gamma1", num(p.gamma1));
    put("aras/gamma2", num(p.gamma2));
    put("aras/m0", std::to_string(p.m0));
    put("aras/m_max", std::to_string(p.m_max));
    put("aras/burn_in", std::to_string(p.burn_in));
    put("aras/epochs", std::to_string(p.epochs));
  } else if (c.algorithm == "varchen") {
    const auto& p = c.varchen;
    put("varchen/memory", std::to_string(p.memory));
    put("varchen/eta", num(p.eta));
    put("varchen/lambda_min", num(p.lambda_min));
    put("varchen/lambda_max", num(p.lambda_max));
    put("varchen/gamma_under", num(p.gamma_under));
    put("varchen/gamma_over", num(p.gamma_over));
    put("varchen/batch_size", std::to_string(p.batch_size));
    schedule("varchen", p.schedule);
    put("varchen/epochs", std::to_string(p.epochs));
  } else if (is_baseline(c.algorithm)) {
    const auto& p = c.baseline;
    schedule(c.algorithm, p.schedule);
    if (c.algorithm == "momentum") put("momentum/momentum", num(p.momentum));
    put(c.algorithm + "/batch_size", std::to_string(p.batch_size));
    put(c.algorithm + "/epochs", std::to_string(p.epochs));
  }
  put("run/seed", std::to_string(c.seed));
  put("run/output", c.output.generic_string());
  put("run/cadence", std::to_string(c.cadence));

  std::ostringstream out;
  pt::ini_parser::write_ini(out, tree);
  return out.str();
}

}  // namespace stochopt
