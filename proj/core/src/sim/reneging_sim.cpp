#include "robustq/sim/reneging_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "robustq/parallel.hpp"

namespace robustq::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void write_double(std::ostream& os, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::arrival: return "arrival";
    case EventKind::departure: return "departure";
    case EventKind::routing: return "routing";
    case EventKind::reneging: return "reneging";
  }
  return "?";
}

void EventLog::write_csv(std::ostream& os) const {
  os << "t,kind,customer_id,server_id\n";
  for (const auto& r : records) {
    write_double(os, r.t);
    os << ',' << to_string(r.kind) << ',';
    if (r.customer >= 0) os << r.customer;
    os << ',';
    if (r.server >= 0) os << r.server;
    os << '\n';
  }
}

std::string EventLog::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

void RenegingConfig::validate() const {
  if (servers < 1) throw std::invalid_argument("reneging model needs n >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite and > 0");
  if (initial_customers < 0) throw std::invalid_argument("initial customer count must be >= 0");
  if (!patience.law && !(patience.constant > 0.0)) throw std::invalid_argument("patience must be > 0");
  if (services.empty() || (services.size() != 1 && services.size() != static_cast<std::size_t>(servers))) {
    throw std::invalid_argument("give one service spec, or one per server");
  }
  sim::validate(arrivals);
  for (const auto& s : services) sim::validate(s);
}

const PrimitiveProcessSpec& RenegingConfig::service_spec(int j) const {
  return services.size() == 1 ? services.front() : services[static_cast<std::size_t>(j)];
}

std::string SystemState::dump() const {
  std::ostringstream os;
  os << "clock=" << clock << " A=" << A_total << " Q=" << Q_total << " K=" << K_total << " R=" << R_total
     << " B=" << B_total << " D=" << D_total << '\n';
  const std::size_t shown = std::min<std::size_t>(A.size(), 40);
  for (std::size_t i = 0; i < shown; ++i) {
    os << "  customer " << i << ": T=" << arrival_time[i] << " deadline=" << deadline[i] << " A=" << int(A[i])
       << " Q=" << int(Q[i]) << " K=" << int(K_cust[i]) << " R=" << int(R[i]) << '\n';
  }
  if (shown < A.size()) os << "  ... " << A.size() - shown << " more customers\n";
  for (std::size_t j = 0; j < B.size(); ++j) {
    os << "  server " << j << ": B=" << int(B[j]) << " Kserv=" << K_serv[j] << " D=" << D[j] << '\n';
  }
  return os.str();
}

void SystemState::check(int servers) const {
  auto fail = [&](const std::string& what) { throw std::logic_error("state invariant violated: " + what + "\n" + dump()); };
  long a = 0, q = 0, kc = 0, r = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i] > 1 || Q[i] > 1 || K_cust[i] > 1 || R[i] > 1) fail("customer flag outside {0,1}");
    if (int(Q[i]) != int(A[i]) - int(K_cust[i]) - int(R[i])) fail("Q_i = A_i - K_i - R_i for customer " + std::to_string(i));
    if (R[i] && !(deadline[i] <= clock)) fail("customer " + std::to_string(i) + " reneged before its deadline");
    a += A[i];
    q += Q[i];
    kc += K_cust[i];
    r += R[i];
  }
  long b = 0, ks = 0, d = 0;
  for (std::size_t j = 0; j < B.size(); ++j) {
    if (B[j] > 1) fail("B_j outside {0,1}");
    if (K_serv[j] - D[j] != B[j]) fail("B_j = K_serv_j - D_j for server " + std::to_string(j));
    b += B[j];
    ks += K_serv[j];
    d += D[j];
  }
  if (a != A_total || q != Q_total || r != R_total || b != B_total || d != D_total) fail("aggregate counters out of sync");
  if (kc != ks || kc != K_total) fail("sum K_cust = sum K_serv");
  if (A_total != Q_total + K_total + R_total) fail("A = Q + K + R");
  if (K_total != D_total + B_total) fail("K = D + B");
  if (B_total != std::min<long>(Q_total + B_total, servers)) fail("B = X ^ n");
}

RenegingOutcome simulate_reneging(const RenegingConfig& cfg) {
  cfg.validate();
  const int n = cfg.servers;
  const double scale = 1.0 / n;

  PointStream arrivals(cfg.arrivals, make_stream(cfg.seed, cfg.replication, Stream::arrivals));
  CounterRng patience_rng = make_stream(cfg.seed, cfg.replication, Stream::patience);
  std::vector<PointStream> service;
  service.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    service.emplace_back(cfg.service_spec(j), make_stream(cfg.seed, cfg.replication, Stream::service, j));
  }

  RenegingOutcome out;
  SystemState& st = out.state;
  st.B.assign(static_cast<std::size_t>(n), 0);
  st.K_serv.assign(static_cast<std::size_t>(n), 0);
  st.D.assign(static_cast<std::size_t>(n), 0);
  if (cfg.record_log) out.log.emplace();
  auto log = [&](double t, EventKind k, long c, int s) {
    if (out.log) out.log->records.push_back({t, k, c, s});
  };

  // Server j works on its own busy-time clock; its departures sit at the points of S_j on that clock.
  std::vector<double> busy_clock(static_cast<std::size_t>(n), 0.0), next_point(static_cast<std::size_t>(n));
  std::vector<double> dep_time(static_cast<std::size_t>(n), kInf);
  for (int j = 0; j < n; ++j) next_point[static_cast<std::size_t>(j)] = service[static_cast<std::size_t>(j)].next();
  std::set<std::pair<double, int>> departures;
  std::set<int> idle;
  for (int j = 0; j < n; ++j) idle.insert(j);
  std::set<long> queued;
  using Deadline = std::pair<double, long>;
  std::priority_queue<Deadline, std::vector<Deadline>, std::greater<>> deadlines;

  int pending_initial = cfg.initial_customers;
  double next_arrival = arrivals.next() * scale;
  std::vector<int> freed;

  auto add_customer = [&](double t) {
    const long id = static_cast<long>(st.A.size());
    const double p = cfg.patience.draw(patience_rng);
    if (!(p > 0.0)) throw std::domain_error("patience draw must be > 0");
    st.A.push_back(1);
    st.Q.push_back(1);
    st.K_cust.push_back(0);
    st.R.push_back(0);
    st.arrival_time.push_back(t);
    st.deadline.push_back(t + p);
    ++st.A_total;
    ++st.Q_total;
    queued.insert(id);
    if (std::isfinite(t + p)) deadlines.emplace(t + p, id);
    log(t, EventKind::arrival, id, -1);
  };

  for (;;) {
    while (!deadlines.empty() && !st.Q[static_cast<std::size_t>(deadlines.top().second)]) deadlines.pop();
    double t = std::min(next_arrival, deadlines.empty() ? kInf : deadlines.top().first);
    if (!departures.empty()) t = std::min(t, departures.begin()->first);
    if (pending_initial > 0) t = 0.0;
    if (!(t <= cfg.horizon)) break;
    if (t < st.clock) throw std::logic_error("event times went backwards\n" + st.dump());
    st.clock = t;

    // Departures at t.
    freed.clear();
    while (!departures.empty() && departures.begin()->first == t) {
      const int j = departures.begin()->second;
      const auto ju = static_cast<std::size_t>(j);
      departures.erase(departures.begin());
      ++st.D[ju];
      ++st.D_total;
      st.B[ju] = 0;
      --st.B_total;
      busy_clock[ju] = next_point[ju];
      next_point[ju] = service[ju].next();
      dep_time[ju] = kInf;
      idle.insert(j);
      log(t, EventKind::departure, -1, j);
    }

    // Arrivals at t.
    for (; pending_initial > 0; --pending_initial) add_customer(0.0);
    while (next_arrival == t) {
      add_customer(t);
      next_arrival = arrivals.next() * scale;
    }

    // Routing: lowest-indexed available customers to lowest-indexed available servers.
    while (!queued.empty() && !idle.empty()) {
      const long i = *queued.begin();
      const int j = *idle.begin();
      const auto iu = static_cast<std::size_t>(i);
      const auto ju = static_cast<std::size_t>(j);
      queued.erase(queued.begin());
      idle.erase(idle.begin());
      st.Q[iu] = 0;
      --st.Q_total;
      st.K_cust[iu] = 1;
      ++st.K_serv[ju];
      ++st.K_total;
      st.B[ju] = 1;
      ++st.B_total;
      dep_time[ju] = t + (next_point[ju] - busy_clock[ju]);
      departures.emplace(dep_time[ju], j);
      log(t, EventKind::routing, i, j);
    }

    // Reneging of customers still unrouted at their deadline.
    while (!deadlines.empty() && deadlines.top().first <= t) {
      const long i = deadlines.top().second;
      deadlines.pop();
      const auto iu = static_cast<std::size_t>(i);
      if (!st.Q[iu]) continue;
      st.Q[iu] = 0;
      --st.Q_total;
      st.R[iu] = 1;
      ++st.R_total;
      queued.erase(i);
      log(t, EventKind::reneging, i, -1);
    }

    if (cfg.assert_invariants) st.check(n);
  }

  st.clock = cfg.horizon;
  if (cfg.assert_invariants) st.check(n);
  out.reneging_count = st.R_total;
  out.reneging_rate = static_cast<double>(st.R_total) / (cfg.horizon * n);
  return out;
}

std::vector<RenegingOutcome> simulate_reneging_batch(const RenegingConfig& cfg, int reps, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("need at least one replication");
  cfg.validate();
  std::vector<RenegingOutcome> out(static_cast<std::size_t>(reps));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    RenegingConfig c = cfg;
    c.replication = cfg.replication + r;
    out[r] = simulate_reneging(c);
  });
  return out;
}

RenegingConfig markovian_reneging_config(int n, double horizon, double lambda, double mu, double theta,
                                         std::uint64_t seed) {
  RenegingConfig c;
  c.servers = n;
  c.horizon = horizon;
  c.arrivals = PoissonProcess{lambda};
  c.patience.law = RenewalSpec::exponential(theta);
  c.services = {PoissonProcess{mu}};
  c.seed = seed;
  return c;
}

}  // namespace robustq::sim
