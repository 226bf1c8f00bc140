#include "stochopt/varchen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochopt/errors.hpp"
#include "stochopt/sampling.hpp"

namespace stochopt {

AnchorState make_anchor(const FiniteSumProblem& problem, const Vec& x) {
  return {x, problem.full_grad(x), 0};
}

Vec svrg_gradient(const FiniteSumProblem& problem, BatchView batch, const Vec& batch_grad_x,
                  const AnchorState& anchor, std::size_t population) {
  if (batch_grad_x.size() != anchor.full_grad.size() || anchor.x.size() != anchor.full_grad.size()) {
    throw std::invalid_argument("svrg gradient: dimension mismatch");
  }
  if (batch.size() == population) return batch_grad_x;
  Vec g = batch_grad_x - problem.batch_grad(batch, anchor.x);
  g += anchor.full_grad;
  return g;
}

Vec svrg_gradient(const FiniteSumProblem& problem, BatchView batch, const Vec& x,
                  const AnchorState& anchor) {
  if (x.size() != anchor.x.size()) throw std::invalid_argument("svrg gradient: dimension mismatch");
  return svrg_gradient(problem, batch, problem.batch_grad(batch, x), anchor, problem.size());
}

std::vector<std::string> VarchenParams::violations() const {
  std::vector<std::string> out;
  if (!(eta > 0.0 && eta < 1.0)) out.push_back("eta must lie in (0, 1)");
  if (!(gamma_under > 0.0 && gamma_under < gamma_over && std::isfinite(gamma_over))) {
    out.push_back("need 0 < gamma_under < gamma_over < inf");
  }
  if (!(lambda_min >= 0.0 && lambda_min <= gamma_under)) {
    out.push_back("need 0 <= lambda_min <= gamma_under");
  }
  if (!(lambda_max >= gamma_over)) out.push_back("need lambda_max >= gamma_over");
  if (batch_size == 0) out.push_back("batch_size must be >= 1");
  if (epochs == 0) out.push_back("epochs must be >= 1");
  for (auto& v : schedule.violations()) out.push_back(std::move(v));
  return out;
}

void VarchenParams::validate() const { throw_if_invalid(violations()); }

VarchenResult varchen_run(const FiniteSumProblem& problem, const VarchenParams& params,
                          std::uint64_t seed, std::optional<Vec> x0,
                          RecorderOptions recorder_options) {
  params.validate();
  const std::size_t n = problem.size();
  if (params.batch_size > n) throw std::invalid_argument("batch_size exceeds the number of samples");

  Vec x = x0 ? std::move(*x0) : Vec::Zero(static_cast<Eigen::Index>(problem.dim()));
  if (x.size() != static_cast<Eigen::Index>(problem.dim())) {
    throw std::invalid_argument("x0 has the wrong dimension");
  }

  LbfgsMemory memory({params.memory, params.eta, params.gamma_under, params.gamma_over, 1.0});
  Sampler sampler(n, params.batch_size, params.batch_size, seed);
  Recorder recorder(problem, std::move(recorder_options));
  VarchenResult result;
  std::size_t k = 0;
  std::size_t samples = 0;

  {
    MetricsRecord r;
    r.batch_size = params.batch_size;
    recorder.observe(r, x, false);
  }

  try {
    for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
      AnchorState anchor = make_anchor(problem, x);
      sampler.start_epoch();
      while (anchor.consumed < n) {
        const std::size_t m = std::min(params.batch_size, n - anchor.consumed);
        const Batch batch = sampler.next_in_epoch(m);
        const Vec g_x = problem.batch_grad(batch, x);
        const Vec g = svrg_gradient(problem, batch, g_x, anchor, n);

        const EnforceResult enforced = enforce_bounds(memory, params.lambda_min, params.lambda_max);
        if (enforced.flushed) ++result.stats.flushes;
        result.stats.max_upper = std::max(result.stats.max_upper, enforced.bounds.upper);
        result.stats.min_lower = std::min(result.stats.min_lower, enforced.bounds.lower);

        const Vec d = memory.apply(g);
        const double alpha = step_size(params.schedule, k);
        Vec x_next = x;
        x_next += alpha * d;
        if (!x_next.allFinite()) throw std::domain_error("iterate became non-finite");

        const Vec g_next = problem.batch_grad(batch, x_next);
        if (memory.push(x_next - x, g_next - g_x)) {
          ++result.stats.pushes;
        } else if (params.memory > 0) {
          ++result.stats.skipped_pushes;
        }
        x = std::move(x_next);
        anchor.consumed += m;
        samples += m;
        ++k;

        MetricsRecord r;
        r.epoch = epoch;
        r.iteration = k;
        r.samples = samples;
        r.batch_size = m;
        r.lambda_lower = enforced.bounds.lower;
        r.lambda_upper = enforced.bounds.upper;
        r.flushed = enforced.flushed;
        recorder.observe(r, x, anchor.consumed >= n);
      }
    }
  } catch (const std::domain_error& e) {
    result.run.status = RunStatus::diverged;
    result.run.message = e.what();
  }

  result.run.trace = recorder.take();
  result.run.x = std::move(x);
  result.run.iterations = k;
  result.run.samples = samples;
  return result;
}

}  // namespace stochopt
