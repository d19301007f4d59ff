#include "robustq/sim/priority_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "robustq/parallel.hpp"

namespace robustq::sim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PriorityConfig::validate() const {
  const std::size_t k = instance.num_classes();
  if (k == 0) throw std::invalid_argument("priority model needs at least one class");
  if (instance.service_rates.size() != k) throw std::invalid_argument("one service rate per class");
  std::vector<std::size_t> sorted = priority;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expect(k);
  std::iota(expect.begin(), expect.end(), 0);
  if (sorted != expect) throw std::invalid_argument("priority must be a permutation of the class indices");
  if (!(scaling > 0.0) || !(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("scaling and horizon must be > 0");
  }
  if (!arrivals.empty() && arrivals.size() != k) throw std::invalid_argument("one arrival spec per class");
  if (!services.empty() && services.size() != k) throw std::invalid_argument("one service spec per class");
  for (const auto& s : arrivals) sim::validate(s);
  for (const auto& s : services) sim::validate(s);
  if (arrivals.empty()) {
    for (double r : instance.arrival_rates) {
      if (!(r >= 0.0)) throw std::invalid_argument("arrival rates must be >= 0");
    }
  }
  if (services.empty()) {
    for (double r : instance.service_rates) {
      if (!(r > 0.0)) throw std::invalid_argument("service rates must be > 0");
    }
  }
}

PriorityOutcome simulate_multiclass_priority(const PriorityConfig& cfg) {
  cfg.validate();
  const std::size_t k = cfg.instance.num_classes();
  const double scale = 1.0 / cfg.scaling;

  std::vector<PointStream> arr, srv;
  for (std::size_t i = 0; i < k; ++i) {
    const PrimitiveProcessSpec a = cfg.arrivals.empty() ? PrimitiveProcessSpec{PoissonProcess{cfg.instance.arrival_rates[i]}}
                                                        : cfg.arrivals[i];
    const PrimitiveProcessSpec s = cfg.services.empty() ? PrimitiveProcessSpec{PoissonProcess{cfg.instance.service_rates[i]}}
                                                        : cfg.services[i];
    arr.emplace_back(a, make_stream(cfg.seed, cfg.replication, Stream::classes, 2 * i));
    srv.emplace_back(s, make_stream(cfg.seed, cfg.replication, Stream::classes, 2 * i + 1));
  }

  PriorityOutcome out;
  out.queue.assign(k, 0);
  out.busy_time.assign(k, 0.0);
  out.arrivals.assign(k, 0);
  out.departures.assign(k, 0);
  std::vector<double> area(k, 0.0), sojourn_sum(k, 0.0);
  std::vector<double> next_arr(k), next_srv(k);
  std::vector<std::deque<double>> fifo(k);
  for (std::size_t i = 0; i < k; ++i) {
    next_arr[i] = arr[i].next() * scale;
    next_srv[i] = srv[i].next() * scale;
  }

  std::vector<double> prev_u = out.busy_time;
  double t = 0.0;
  for (;;) {
    std::size_t c = k;
    for (std::size_t p : cfg.priority) {
      if (out.queue[p] > 0) {
        c = p;
        break;
      }
    }
    const double t_arr = *std::min_element(next_arr.begin(), next_arr.end());
    const double t_done = c < k ? t + (next_srv[c] - out.busy_time[c]) : kInf;
    const double t_ev = std::min(t_arr, t_done);
    const double end = std::min(t_ev, cfg.horizon);
    for (std::size_t i = 0; i < k; ++i) area[i] += static_cast<double>(out.queue[i]) * (end - t);
    if (c < k) out.busy_time[c] += end - t;
    const double dt = end - t;
    t = end;
    if (t_ev > cfg.horizon) break;

    if (c < k && t_done == t_ev) {
      out.busy_time[c] = next_srv[c];
      --out.queue[c];
      ++out.departures[c];
      sojourn_sum[c] += t - fifo[c].front();
      fifo[c].pop_front();
      next_srv[c] = srv[c].next() * scale;
    }
    for (std::size_t i = 0; i < k; ++i) {
      while (next_arr[i] == t_ev) {
        ++out.queue[i];
        ++out.arrivals[i];
        fifo[i].push_back(t);
        next_arr[i] = arr[i].next() * scale;
      }
    }

    if (cfg.assert_invariants) {
      const double eps = 1e-9 * std::max(1.0, t);
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double du = out.busy_time[i] - prev_u[i];
        if (du < -eps || du > dt + eps) {
          throw std::logic_error("busy-time allocation of class " + std::to_string(i) + " is not 1-Lipschitz/nondecreasing");
        }
        if (out.queue[i] < 0) throw std::logic_error("negative queue length in class " + std::to_string(i));
        if (out.queue[i] != out.arrivals[i] - out.departures[i]) throw std::logic_error("X = A - S(U) violated");
        total += out.busy_time[i];
      }
      if (total > t + eps) throw std::logic_error("sum of busy-time allocations exceeds elapsed time");
      prev_u = out.busy_time;
    }
  }

  out.time_average.resize(k);
  out.mean_sojourn.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.time_average[i] = area[i] / cfg.horizon;
    out.mean_sojourn[i] = out.departures[i] > 0 ? sojourn_sum[i] / static_cast<double>(out.departures[i])
                                                : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<PriorityOutcome> simulate_multiclass_priority_batch(const PriorityConfig& cfg, int reps, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("need at least one replication");
  cfg.validate();
  std::vector<PriorityOutcome> out(static_cast<std::size_t>(reps));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    PriorityConfig c = cfg;
    c.replication = cfg.replication + r;
    out[r] = simulate_multiclass_priority(c);
  });
  return out;
}

}  // namespace robustq::sim
