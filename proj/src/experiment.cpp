#include "stochopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stochopt/aras.hpp"
#include "stochopt/baselines.hpp"
#include "stochopt/errors.hpp"
#include "stochopt/io.hpp"
#include "stochopt/regularization.hpp"
#include "stochopt/synthetic.hpp"
#include "stochopt/varchen.hpp"

namespace stochopt {

namespace {

std::unique_ptr<FiniteSumProblem> make_problem(LossKind kind, std::shared_ptr<const Dataset> data,
                                               double lambda) {
  switch (kind) {
    case LossKind::logistic:
      return std::make_unique<LinearModelProblem>(std::move(data), lambda, LossKind::logistic);
    case LossKind::sigmoid_svm:
      return std::make_unique<LinearModelProblem>(std::move(data), lambda, LossKind::sigmoid_svm);
    case LossKind::quadratic:
      break;
  }
  throw std::invalid_argument("quadratic problems cannot be built from a data file");
}

Dataset parse_source(const ProblemConfig& c, const std::string& bytes, const std::string& name,
                     std::optional<std::size_t> dim) {
  std::istringstream in(bytes);
  if (c.source == DataSource::libsvm) return parse_libsvm(in, name, dim);
  return parse_csv(in, name, c.label_column, c.has_header);
}

// Batch-size limits that depend on the data.
std::vector<std::string> data_violations(const ExperimentConfig& c, std::size_t n) {
  std::vector<std::string> out;
  auto need = [&](std::size_t m, const std::string& what) {
    if (m > n) out.push_back(what + " (" + std::to_string(m) + ") exceeds the sample count " + std::to_string(n));
  };
  if (c.algorithm == "aras") need(c.aras.m_max, "aras: m_max");
  if (c.algorithm == "varchen") need(c.varchen.batch_size, "varchen: batch_size");
  if (c.algorithm == "sgd" || c.algorithm == "momentum" || c.algorithm == "svrg") {
    need(c.baseline.batch_size, c.algorithm + ": batch_size");
  }
  return out;
}

std::string final_loss_text(const RunResult& run) {
  for (auto it = run.trace.rbegin(); it != run.trace.rend(); ++it) {
    if (it->train_loss) return format_double(*it->train_loss);
  }
  return {};
}

}  // namespace

LoadedProblem load_problem(const ProblemConfig& c) {
  LoadedProblem out;
  std::string test_hash;
  if (c.source == DataSource::synthetic) {
    auto [train, test] = generate_synthetic_split(c.synthetic, c.synthetic_test_samples);
    std::ostringstream bytes;
    write_libsvm(bytes, train.data);
    out.dataset_hash = git_blob_hash(bytes.str());
    out.train = std::make_shared<const Dataset>(std::move(train.data));
    if (test) {
      std::ostringstream tb;
      write_libsvm(tb, *test);
      test_hash = git_blob_hash(tb.str());
      out.test = std::make_shared<const Dataset>(std::move(*test));
    }
  } else {
    const std::string bytes = read_file(c.path);
    out.dataset_hash = git_blob_hash(bytes);
    out.train = std::make_shared<const Dataset>(parse_source(c, bytes, c.path.string(), c.dim));
  }
  if (c.test_path) {
    if (c.source == DataSource::synthetic) {
      throw std::invalid_argument("problem: test_path needs a file data source");
    }
    const std::string bytes = read_file(*c.test_path);
    test_hash = git_blob_hash(bytes);
    out.test = std::make_shared<const Dataset>(
        parse_source(c, bytes, c.test_path->string(), out.train->dim()));
    if (out.test->dim() != out.train->dim()) {
      throw DataError(c.test_path->string() + ": dimension differs from the training data");
    }
  }
  out.problem = make_problem(c.kind, out.train, c.lambda);
  out.problem_hash = sha1_hex("dataset " + out.dataset_hash + "\ntest " + test_hash + "\nkind " +
                              std::string(to_string(c.kind)) + "\nlambda " + format_double(c.lambda) + "\n");
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const LoadedProblem loaded = load_problem(config.problem);
  return run_experiment(config, loaded);
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const LoadedProblem& loaded) {
  config.validate();
  const FiniteSumProblem& problem = *loaded.problem;
  throw_if_invalid(data_violations(config, problem.size()));

  ExperimentOutcome out;
  out.metrics_path = config.output;
  out.manifest_path = config.output;
  out.manifest_path += ".manifest.json";
  out.dataset_hash = loaded.dataset_hash;
  out.problem_hash = loaded.problem_hash;
  const std::string canonical = canonical_config(config);
  // Where the metrics land does not change what was run.
  ExperimentConfig identity = config;
  identity.output.clear();
  out.config_hash = sha1_hex(canonical_config(identity));
  out.run_hash = sha1_hex("config " + out.config_hash + "\nproblem " + out.problem_hash + "\n");

  if (out.metrics_path.has_parent_path()) std::filesystem::create_directories(out.metrics_path.parent_path());
  std::ofstream csv(out.metrics_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + out.metrics_path.string());
  csv << metrics_csv_header() << '\n';

  RecorderOptions rec;
  rec.cadence = config.cadence;
  rec.test_set = loaded.test;
  rec.sink = [&csv](const MetricsRecord& r) { csv << metrics_csv_row(r) << '\n'; };

  const std::string& algo = config.algorithm;
  if (algo == "arig") {
    out.run = arig_run(problem, config.arig, config.arig_oracle, config.seed, std::nullopt, rec).run;
  } else if (algo == "aras") {
    out.run = aras_run(problem, config.aras, config.seed, std::nullopt, rec).run;
  } else if (algo == "varchen") {
    out.run = varchen_run(problem, config.varchen, config.seed, std::nullopt, rec).run;
  } else if (algo == "sgd") {
    out.run = sgd_run(problem, config.baseline, config.seed, std::nullopt, rec);
  } else if (algo == "momentum") {
    out.run = sgd_momentum_run(problem, config.baseline, config.seed, std::nullopt, rec);
  } else if (algo == "svrg") {
    out.run = svrg_run(problem, config.baseline, config.seed, std::nullopt, rec);
  }
  csv.flush();
  if (!csv) throw std::runtime_error("failed writing " + out.metrics_path.string());

  nlohmann::ordered_json m;
  m["algorithm"] = algo;
  m["seed"] = config.seed;
  m["config"] = canonical;
  m["config_hash"] = out.config_hash;
  m["dataset"] = {{"source", std::string(to_string(config.problem.source))},
                  {"hash", out.dataset_hash},
                  {"samples", loaded.train->size()},
                  {"features", loaded.train->dim()}};
  if (config.problem.source != DataSource::synthetic) {
    m["dataset"]["path"] = config.problem.path.generic_string();
  }
  m["problem_hash"] = out.problem_hash;
  m["run_hash"] = out.run_hash;
  m["metrics_file"] = out.metrics_path.filename().string();
  m["columns"] = nlohmann::ordered_json::array();
  for (auto col : kMetricsColumns) m["columns"].push_back(std::string(col));
  m["status"] = std::string(to_string(out.run.status));
  if (!out.run.message.empty()) m["message"] = out.run.message;
  m["iterations"] = out.run.iterations;
  m["samples"] = out.run.samples;
  m["final_train_loss"] = final_loss_text(out.run);

  std::ofstream manifest(out.manifest_path, std::ios::binary | std::ios::trunc);
  if (!manifest) throw std::runtime_error("cannot write " + out.manifest_path.string());
  manifest << m.dump(2) << '\n';
  return out;
}

SummaryRow summarize(const std::string& label, const ExperimentConfig& config,
                     const ExperimentOutcome& outcome) {
  SummaryRow row;
  row.label = label;
  row.algorithm = config.algorithm;
  row.problem_hash = outcome.problem_hash;
  row.samples = outcome.run.samples;
  row.iterations = outcome.run.iterations;
  row.status = outcome.run.status;
  row.metrics_path = outcome.metrics_path;
  for (const auto& r : outcome.run.trace) {
    if (r.train_loss) {
      row.final_loss = r.train_loss;
      if (!row.best_loss || *r.train_loss < *row.best_loss) row.best_loss = r.train_loss;
    }
    if (r.test_accuracy) row.final_accuracy = r.test_accuracy;
  }
  return row;
}

std::size_t thread_budget(std::size_t fallback) {
  if (const char* env = std::getenv("STOCHOPT_THREADS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v >= 1) return v;
  }
  return std::max<std::size_t>(1, fallback);
}

std::vector<SummaryRow> compare(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& out_dir, std::size_t threads) {
  if (configs.size() < 2) throw ValidationError({"compare needs at least two configs"});
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (auto& v : configs[i].violations()) problems.push_back("config " + std::to_string(i + 1) + ": " + v);
  }
  throw_if_invalid(std::move(problems));

  std::vector<LoadedProblem> loaded;
  for (const auto& c : configs) loaded.push_back(load_problem(c.problem));
  for (std::size_t i = 1; i < loaded.size(); ++i) {
    if (loaded[i].problem_hash != loaded[0].problem_hash) {
      throw ValidationError({"config " + std::to_string(i + 1) +
                             " uses a different problem than config 1"});
    }
  }

  std::filesystem::create_directories(out_dir);
  std::vector<ExperimentConfig> jobs = configs;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    jobs[i].output = out_dir / ("run" + std::to_string(i + 1) + "_" + jobs[i].algorithm + ".csv");
  }

  if (threads == 0) threads = thread_budget(std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());

  std::vector<SummaryRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto outcome = run_experiment(jobs[i], loaded[i]);
        rows[i] = summarize("run" + std::to_string(i + 1), jobs[i], outcome);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); }

}  // namespace

std::string format_summary(const std::vector<SummaryRow>& rows) {
  const std::vector<std::string> header = {"run", "algorithm", "final_loss", "best_loss",
                                           "accuracy", "samples", "status", "problem"};
  std::vector<std::vector<std::string>> table = {header};
  for (const auto& r : rows) {
    table.push_back({r.label, r.algorithm, opt_cell(r.final_loss), opt_cell(r.best_loss),
                     opt_cell(r.final_accuracy), std::to_string(r.samples),
                     std::string(to_string(r.status)), r.problem_hash.substr(0, 12)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << '\n';
  }
  return out.str();
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "run,algorithm,final_loss,best_loss,accuracy,samples,iterations,status,problem_hash,metrics\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.label << ',' << r.algorithm << ',' << cell(r.final_loss) << ',' << cell(r.best_loss) << ','
        << cell(r.final_accuracy) << ',' << r.samples << ',' << r.iterations << ','
        << to_string(r.status) << ',' << r.problem_hash << ',' << r.metrics_path.generic_string() << '\n';
  }
}

}  // namespace stochopt
