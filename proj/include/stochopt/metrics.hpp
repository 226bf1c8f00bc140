#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochopt/dataset.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

enum class Phase { transient, stationary };

// One row of per-iteration telemetry. Fields an algorithm does not produce
// stay empty and are written as empty CSV cells.
struct MetricsRecord {
  std::size_t epoch = 0;
  std::size_t iteration = 0;
  std::size_t samples = 0;  // cumulative samples consumed
  double wall_ms = 0.0;
  std::optional<double> train_loss;
  std::optional<double> grad_norm;
  std::optional<std::size_t> batch_size;
  std::optional<double> sigma;
  std::optional<double> pflug_sum;
  std::optional<double> lambda_lower;
  std::optional<double> lambda_upper;
  std::optional<Phase> phase;
  std::optional<bool> flushed;
  std::optional<double> test_accuracy;
};

using Trace = std::vector<MetricsRecord>;

enum class RunStatus { completed, converged, budget_exhausted, rejection_limit, diverged };
std::string_view to_string(RunStatus status);

struct RunResult {
  Trace trace;
  Vec x;
  std::size_t iterations = 0;
  std::size_t samples = 0;
  RunStatus status = RunStatus::completed;
  std::string message;
};

struct RecorderOptions {
  // 0: one row per epoch end. k > 0: additionally every k-th iteration.
  std::size_t cadence = 0;
  // Optional held-out split; enables the test_accuracy column.
  std::shared_ptr<const Dataset> test_set;
  // Called with each row as soon as it is complete.
  std::function<void(const MetricsRecord&)> sink;
};

// Decides which iterations become rows and fills the expensive full-data
// columns (train loss, gradient norm, test accuracy) only for those.
class Recorder {
 public:
  Recorder(const FiniteSumProblem& problem, RecorderOptions options);

  // Row 0 is always kept; later rows at cadence points and epoch ends.
  void observe(MetricsRecord record, const Vec& x, bool epoch_end);

  const Trace& trace() const { return trace_; }
  Trace take() { return std::move(trace_); }

 private:
  const FiniteSumProblem& problem_;
  RecorderOptions options_;
  std::chrono::steady_clock::time_point start_;
  Trace trace_;
};

// Fraction of samples with sign(u_i^T x) == v_i (zero margin counts as +1).
double sign_accuracy(const Dataset& data, const Vec& x);

// Fixed column order; first line is the header.
inline constexpr std::string_view kMetricsColumns[] = {
    "epoch",  "iteration", "samples",      "wall_ms",      "train_loss",
    "grad_norm", "batch_size", "sigma",    "pflug_s",      "lambda_lower",
    "lambda_upper", "phase", "flushed",    "test_accuracy"};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& record, bool include_wall_clock = true);
void write_metrics_csv(std::ostream& out, const Trace& trace, bool include_wall_clock = true);
Trace read_metrics_csv(std::istream& in);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace stochopt
