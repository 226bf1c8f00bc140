#include "stochopt/metrics.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace stochopt {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::converged: return "converged";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::rejection_limit: return "rejection_limit";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

Recorder::Recorder(const FiniteSumProblem& problem, RecorderOptions options)
    : problem_(problem), options_(std::move(options)), start_(std::chrono::steady_clock::now()) {}

void Recorder::observe(MetricsRecord record, const Vec& x, bool epoch_end) {
  const bool keep = record.iteration == 0 || epoch_end ||
                    (options_.cadence > 0 && record.iteration % options_.cadence == 0);
  if (!keep) return;
  if (!trace_.empty() && trace_.back().iteration == record.iteration) return;
  if (x.allFinite()) {
    record.train_loss = problem_.full_loss(x);
    record.grad_norm = problem_.full_grad(x).norm();
    if (options_.test_set) record.test_accuracy = sign_accuracy(*options_.test_set, x);
  }
  record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  trace_.push_back(record);
  if (options_.sink) options_.sink(trace_.back());
}

double sign_accuracy(const Dataset& data, const Vec& x) {
  if (data.dim() != static_cast<std::size_t>(x.size())) {
    throw std::invalid_argument("test set dimension does not match the model");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double predicted = data.dot_row(i, x) >= 0.0 ? 1.0 : -1.0;
    if (predicted == data.label(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string metrics_csv_header() {
  std::string line;
  for (std::size_t c = 0; c < std::size(kMetricsColumns); ++c) {
    if (c) line += ',';
    line += kMetricsColumns[c];
  }
  return line;
}

namespace {

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) {
    return format_double(*v);
  } else if constexpr (std::is_same_v<T, bool>) {
    return *v ? "1" : "0";
  } else if constexpr (std::is_same_v<T, Phase>) {
    return *v == Phase::transient ? "transient" : "stationary";
  } else {
    return std::to_string(*v);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(std::move(current));
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  cells.push_back(std::move(current));
  return cells;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("metrics line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("metrics line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::string metrics_csv_row(const MetricsRecord& r, bool include_wall_clock) {
  std::string line;
  line += std::to_string(r.epoch);
  line += ',' + std::to_string(r.iteration);
  line += ',' + std::to_string(r.samples);
  line += ',' + (include_wall_clock ? format_double(r.wall_ms) : std::string{});
  line += ',' + cell(r.train_loss);
  line += ',' + cell(r.grad_norm);
  line += ',' + cell(r.batch_size);
  line += ',' + cell(r.sigma);
  line += ',' + cell(r.pflug_sum);
  line += ',' + cell(r.lambda_lower);
  line += ',' + cell(r.lambda_upper);
  line += ',' + cell(r.phase);
  line += ',' + cell(r.flushed);
  line += ',' + cell(r.test_accuracy);
  return line;
}

void write_metrics_csv(std::ostream& out, const Trace& trace, bool include_wall_clock) {
  out << metrics_csv_header() << '\n';
  for (const auto& r : trace) out << metrics_csv_row(r, include_wall_clock) << '\n';
}

Trace read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("metrics file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != metrics_csv_header()) throw std::runtime_error("unexpected metrics header");
  Trace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != std::size(kMetricsColumns)) {
      throw std::runtime_error("metrics line " + std::to_string(lineno) + ": wrong column count");
    }
    MetricsRecord r;
    r.epoch = parse_count(c[0], lineno);
    r.iteration = parse_count(c[1], lineno);
    r.samples = parse_count(c[2], lineno);
    if (!c[3].empty()) r.wall_ms = parse_double(c[3], lineno);
    auto opt_d = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s, lineno);
    };
    r.train_loss = opt_d(c[4]);
    r.grad_norm = opt_d(c[5]);
    if (!c[6].empty()) r.batch_size = parse_count(c[6], lineno);
    r.sigma = opt_d(c[7]);
    r.pflug_sum = opt_d(c[8]);
    r.lambda_lower = opt_d(c[9]);
    r.lambda_upper = opt_d(c[10]);
    if (c[11] == "transient") r.phase = Phase::transient;
    else if (c[11] == "stationary") r.phase = Phase::stationary;
    else if (!c[11].empty()) throw std::runtime_error("metrics line " + std::to_string(lineno) + ": bad phase");
    if (c[12] == "1") r.flushed = true;
    else if (c[12] == "0") r.flushed = false;
    else if (!c[12].empty()) throw std::runtime_error("metrics line " + std::to_string(lineno) + ": bad flag");
    r.test_accuracy = opt_d(c[13]);
    trace.push_back(r);
  }
  return trace;
}

}  // namespace stochopt
