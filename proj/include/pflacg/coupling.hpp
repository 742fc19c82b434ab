#ifndef PFLACG_COUPLING_HPP_
#define PFLACG_COUPLING_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "pflacg/acc.hpp"
#include "pflacg/cg.hpp"

namespace pflacg {

enum class CouplingMode { lockstep, parallel };

enum class SnapshotSource { afw, acc };

/// Immutable view of one stream's state, exchanged at restart barriers.
struct CouplingSnapshot {
  ActiveSet set;
  double w = 0.0;
  SnapshotSource source = SnapshotSource::afw;
  long stamp = 0;  // restart epoch at creation
};

struct RestartDecision {
  bool adopt_afw = false;  // reseed ACC from the AFW snapshot, output AFW
  bool reseed_afw = false; // adopt ACC and also replace the AFW stream
};

/// The branch fired once the AFW stream has halved its gap: keep the AFW
/// point when it beats both the accelerated stream's fresh gap and half its
/// previous one; otherwise adopt the accelerated point. The CG stream itself
/// is replaced only when the accelerated point is at least a full halving
/// ahead with a support no larger; a marginally better point would perturb
/// the CG trajectory without the headroom to keep it never-worse than a
/// standalone run.
inline RestartDecision decide_restart(double w_afw, double w_acc,
                                      double w_acc_prev,
                                      std::size_t acc_support,
                                      std::size_t afw_support) {
  RestartDecision d;
  if (w_afw <= std::min(w_acc, w_acc_prev / 2.0)) {
    d.adopt_afw = true;
  } else {
    d.adopt_afw = false;
    d.reseed_afw = w_acc <= w_afw / 2.0 && acc_support <= afw_support;
  }
  return d;
}

struct CouplingConfig {
  double epsilon = 1e-8;
  CouplingMode mode = CouplingMode::lockstep;
  RunBudget budget;
  CgVariant cg_variant = CgVariant::afw;
  AccConfig acc;
};

struct CouplingTraceEvent {
  long sequence = 0;   // total order of rows within the run
  long iteration = 0;  // AFW iteration clock
  double f_value = 0.0;
  double w = 0.0;
  std::size_t support_size = 0;
  bool restart = false;
  long epoch = 0;
  std::int64_t foo_calls = 0;  // cumulative at emission
  std::int64_t lmo_calls = 0;
};
using CouplingTraceFn = std::function<void(const CouplingTraceEvent&)>;

/// Per-restart record kept for analysis and tests.
struct CouplingEpoch {
  long epoch = 0;
  long iteration = 0;
  double w_afw = 0.0;
  double w_acc = 0.0;
  double w_out = 0.0;
  bool adopted_afw = false;
  bool reseeded_afw = false;
  long adopted_stamp = 0;
  ActiveSet acc_set;  // S^ACC after the exchange
  ActiveSet out_set;
};

struct CouplingResult {
  ActiveSet out_set;
  double w_out = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<CouplingEpoch> epochs;
  FirstOrderCounters counters;
};

class CouplingError : public std::runtime_error {
 public:
  CouplingError(long epoch, const std::string& what)
      : std::runtime_error("pflacg epoch " + std::to_string(epoch) + ": " +
                           what),
        epoch(epoch) {}
  long epoch;
};

namespace detail {

inline double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Reseed the accelerated stream from a snapshot; the probe for the curvature
// estimate is the snapshot gap's FW vertex when available.
inline void reseed_acc_stream(AccStream& stream, const ActiveSet& set,
                              const std::shared_ptr<const Vertex>& probe) {
  if (probe != nullptr && (probe->coords - set.point()).norm() > 1e-13) {
    const Vector coords = probe->coords;
    stream.seed(set, &coords);
  } else {
    stream.seed(set, nullptr);
  }
}

}  // namespace detail

/// Lockstep PF-LaCG: one accelerated unit per AFW iteration, single
/// threaded, fully deterministic for a fixed problem.
inline CouplingResult pflacg_run_lockstep(const ObjectiveOracle& obj,
                                          const FeasibleRegion& region,
                                          ActiveSet start,
                                          const CouplingConfig& cfg,
                                          const CouplingTraceFn& trace = {}) {
  CouplingResult result;
  FirstOrderCounters& counters = result.counters;
  CgStream afw(obj, region, std::move(start), cfg.cg_variant, counters);
  AccStream acc_stream(obj, counters, cfg.acc);

  long sequence = 0;
  long epoch = 0;
  const auto t0 = std::chrono::steady_clock::now();
  auto emit = [&](long iter, double f, double w, std::size_t sup, bool restart) {
    if (trace) {
      trace(CouplingTraceEvent{sequence++, iter, f, w, sup, restart, epoch,
                               counters.foo_calls, counters.lmo_calls});
    }
  };

  const double w0 = afw.w();
  CouplingSnapshot out{afw.active(), w0, SnapshotSource::afw, 0};
  double criterion_prev = w0;   // last fired value of the AFW measure
  double w_acc = w0;            // last computed w^ACC
  ActiveSet acc_set = afw.active();
  emit(0, afw.f_value(), w0, afw.active().size(), false);

  if (w0 <= cfg.epsilon) {
    result.out_set = out.set;
    result.w_out = out.w;
    result.converged = true;
    return result;
  }

  while (afw.iteration() < cfg.budget.max_iterations &&
         detail::elapsed_seconds(t0) <= cfg.budget.max_seconds) {
    if (!afw.step()) break;
    if (acc_stream.active()) {
      try {
        acc_stream.advance();
      } catch (const std::exception& e) {
        throw CouplingError(epoch, e.what());
      }
    }
    const bool fired =
        afw.w() <= criterion_prev / 2.0 || afw.w() <= cfg.epsilon;
    emit(afw.iteration(), afw.f_value(), afw.w(), afw.active().size(), false);
    if (!fired) continue;

    ++epoch;
    const double w_afw = cfg.cg_variant == CgVariant::lazy_afw
                             ? afw.refresh_gap().w
                             : afw.gap().w;
    criterion_prev = afw.w();
    const double w_acc_prev = w_acc;
    if (acc_stream.active() || acc_stream.converged()) {
      acc_set = acc_stream.snapshot();
      w_acc = strong_wolfe_gap(obj, region, acc_set, counters).w;
    }
    CouplingSnapshot afw_snap{afw.active(), w_afw, SnapshotSource::afw, epoch};
    CouplingSnapshot acc_snap{acc_set, w_acc, SnapshotSource::acc, epoch};

    const RestartDecision d = decide_restart(w_afw, w_acc, w_acc_prev,
                                             acc_set.size(),
                                             afw.active().size());
    if (d.adopt_afw) {
      detail::reseed_acc_stream(acc_stream, afw_snap.set, afw.gap().fw_vertex);
      acc_set = afw_snap.set;
    } else if (d.reseed_afw) {
      afw.reseed(acc_snap.set);
    }
    // The output snapshot takes the smaller gap (ties to AFW) and never
    // regresses across epochs.
    if (w_afw <= out.w && w_afw <= w_acc) {
      out = afw_snap;
    } else if (w_acc <= out.w) {
      out = acc_snap;
    }

    CouplingEpoch record;
    record.epoch = epoch;
    record.iteration = afw.iteration();
    record.w_afw = w_afw;
    record.w_acc = w_acc;
    record.w_out = out.w;
    record.adopted_afw = d.adopt_afw;
    record.reseeded_afw = d.reseed_afw;
    record.adopted_stamp = out.stamp;
    record.acc_set = acc_set;
    record.out_set = out.set;
    result.epochs.push_back(std::move(record));
    emit(afw.iteration(), afw.f_value(), out.w, out.set.size(), true);

    if (out.w <= cfg.epsilon) break;
  }

  result.out_set = out.set;
  result.w_out = out.w;
  result.iterations = afw.iteration();
  result.converged = out.w <= cfg.epsilon;
  return result;
}

/// Parallel PF-LaCG: an AFW worker and an accelerated worker run freely; a
/// coordinator processes restart events. Communication is immutable
/// snapshots through mutex-protected mailboxes, exchanged only at restart
/// barriers; the AFW worker never waits on the accelerated worker.
inline CouplingResult pflacg_run_parallel(const ObjectiveOracle& obj,
                                          const FeasibleRegion& region,
                                          ActiveSet start,
                                          const CouplingConfig& cfg,
                                          const CouplingTraceFn& trace = {}) {
  struct RestartRequest {
    ActiveSet set;
    double w;
    std::shared_ptr<const Vertex> probe;
    long iteration;
  };
  // All cross-thread state lives on the heap: a fresh address per run keeps
  // sanitizer bookkeeping exact across repeated runs (std::mutex has a
  // trivial destructor, so a stack slot reused by a later run would alias).
  struct SharedState {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<RestartRequest> requests;
    std::shared_ptr<const ActiveSet> latest_acc;
    std::shared_ptr<const ActiveSet> afw_mailbox;
    std::shared_ptr<const ActiveSet> acc_mailbox;
    std::shared_ptr<const Vector> acc_probe;
    std::atomic<bool> stop{false};
    std::atomic<long> epoch{0};
    std::atomic<long> afw_iterations{0};
    std::exception_ptr failure;
    std::atomic<std::int64_t> pub_foo[3] = {{0}, {0}, {0}};
    std::atomic<std::int64_t> pub_lmo[3] = {{0}, {0}, {0}};
  };
  auto shared = std::make_unique<SharedState>();
  std::mutex& mu = shared->mu;
  std::condition_variable& cv = shared->cv;
  std::deque<RestartRequest>& requests = shared->requests;
  std::shared_ptr<const ActiveSet>& latest_acc = shared->latest_acc;
  std::shared_ptr<const ActiveSet>& afw_mailbox = shared->afw_mailbox;
  std::shared_ptr<const ActiveSet>& acc_mailbox = shared->acc_mailbox;
  std::shared_ptr<const Vector>& acc_probe = shared->acc_probe;
  std::atomic<bool>& stop = shared->stop;
  std::atomic<long>& epoch = shared->epoch;
  std::atomic<long>& afw_iterations = shared->afw_iterations;
  std::exception_ptr& failure = shared->failure;

  CouplingResult result;
  FirstOrderCounters afw_counters, acc_counters, coord_counters;
  // Single-writer published totals so any thread can emit a consistent
  // cumulative counter snapshot without touching another worker's live
  // accumulator.
  auto publish = [&](int who, const FirstOrderCounters& own) {
    shared->pub_foo[who].store(own.foo_calls, std::memory_order_relaxed);
    shared->pub_lmo[who].store(own.lmo_calls, std::memory_order_relaxed);
  };
  auto totals = [&]() -> std::pair<std::int64_t, std::int64_t> {
    std::int64_t f = 0, l = 0;
    for (int i = 0; i < 3; ++i) {
      f += shared->pub_foo[i].load(std::memory_order_relaxed);
      l += shared->pub_lmo[i].load(std::memory_order_relaxed);
    }
    return {f, l};
  };

  long sequence = 0;
  auto emit = [&](const CouplingTraceEvent& base) {
    if (!trace) return;
    CouplingTraceEvent ev = base;
    ev.sequence = sequence++;
    auto [f, l] = totals();
    ev.foo_calls = f;
    ev.lmo_calls = l;
    trace(ev);
  };

  const auto t0 = std::chrono::steady_clock::now();
  CgStream afw(obj, region, std::move(start), cfg.cg_variant, afw_counters);
  publish(0, afw_counters);
  const double w0 = afw.w();
  CouplingSnapshot out{afw.active(), w0, SnapshotSource::afw, 0};
  {
    std::lock_guard<std::mutex> lock(mu);
    latest_acc = std::make_shared<const ActiveSet>(afw.active());
    emit(CouplingTraceEvent{0, 0, afw.f_value(), w0, afw.active().size(),
                            false, 0});
  }
  if (w0 <= cfg.epsilon) {
    result.out_set = out.set;
    result.w_out = out.w;
    result.converged = true;
    result.counters = afw_counters;
    return result;
  }

  auto guard = [&](auto&& fn) {
    try {
      fn();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      stop.store(true);
      cv.notify_all();
    }
  };

  std::thread afw_worker([&] {
    guard([&] {
      double criterion_prev = w0;
      bool reported_converged = false;
      while (!stop.load()) {
        if (afw.iteration() >= cfg.budget.max_iterations ||
            detail::elapsed_seconds(t0) > cfg.budget.max_seconds) {
          stop.store(true);
          cv.notify_all();
          break;
        }
        std::shared_ptr<const ActiveSet> adopt;
        {
          std::lock_guard<std::mutex> lock(mu);
          adopt = std::exchange(afw_mailbox, nullptr);
        }
        if (adopt) {
          afw.reseed(*adopt);
          reported_converged = false;
        }
        const bool stepped = afw.step();
        afw_iterations.store(afw.iteration());
        publish(0, afw_counters);
        {
          std::lock_guard<std::mutex> lock(mu);
          emit(CouplingTraceEvent{0, afw.iteration(), afw.f_value(), afw.w(),
                                  afw.active().size(), false, epoch.load()});
        }
        const bool halved =
            afw.w() <= criterion_prev / 2.0 && afw.w() < criterion_prev;
        const bool hit_eps = afw.w() <= cfg.epsilon && !reported_converged;
        if (halved || hit_eps) {
          const double w_afw = cfg.cg_variant == CgVariant::lazy_afw
                                   ? afw.refresh_gap().w
                                   : afw.gap().w;
          criterion_prev = afw.w();
          reported_converged = afw.w() <= cfg.epsilon;
          {
            std::lock_guard<std::mutex> lock(mu);
            requests.push_back(RestartRequest{afw.active(), w_afw,
                                              afw.gap().fw_vertex,
                                              afw.iteration()});
          }
          cv.notify_all();
        }
        if (!stepped) {
          // Stationary point: nothing further to compute locally; idle until
          // a reseed or shutdown arrives.
          std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
      }
    });
  });

  std::thread acc_worker([&] {
    guard([&] {
      AccStream stream(obj, acc_counters, cfg.acc);
      while (!stop.load()) {
        std::shared_ptr<const ActiveSet> adopt;
        std::shared_ptr<const Vector> probe;
        {
          std::lock_guard<std::mutex> lock(mu);
          adopt = std::exchange(acc_mailbox, nullptr);
          probe = std::exchange(acc_probe, nullptr);
        }
        if (adopt) stream.seed(*adopt, probe ? probe.get() : nullptr);
        if (!stream.active()) {
          std::this_thread::sleep_for(std::chrono::microseconds(200));
          continue;
        }
        stream.advance();
        publish(1, acc_counters);
        auto snap = std::make_shared<const ActiveSet>(stream.snapshot());
        std::lock_guard<std::mutex> lock(mu);
        latest_acc = std::move(snap);
      }
    });
  });

  // Coordinator: process restart events in order, never blocking the AFW
  // worker.
  guard([&] {
    double w_acc = w0;
    while (!stop.load()) {
      RestartRequest req;
      {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait_for(lock, std::chrono::milliseconds(2), [&] {
          return stop.load() || !requests.empty();
        });
        if (requests.empty()) continue;
        req = std::move(requests.front());
        requests.pop_front();
      }
      const long e = epoch.fetch_add(1) + 1;
      std::shared_ptr<const ActiveSet> acc_view;
      {
        std::lock_guard<std::mutex> lock(mu);
        acc_view = latest_acc;
      }
      const double w_acc_prev = w_acc;
      w_acc = strong_wolfe_gap(obj, region, *acc_view, coord_counters).w;
      publish(2, coord_counters);

      CouplingSnapshot afw_snap{req.set, req.w, SnapshotSource::afw, e};
      CouplingSnapshot acc_snap{*acc_view, w_acc, SnapshotSource::acc, e};
      const RestartDecision d = decide_restart(
          req.w, w_acc, w_acc_prev, acc_view->size(), req.set.size());
      {
        std::lock_guard<std::mutex> lock(mu);
        if (d.adopt_afw) {
          acc_mailbox = std::make_shared<const ActiveSet>(req.set);
          acc_probe = req.probe
                          ? std::make_shared<const Vector>(req.probe->coords)
                          : nullptr;
          latest_acc = acc_mailbox;
        } else if (d.reseed_afw) {
          afw_mailbox = acc_view;
        }
      }
      if (req.w <= out.w && req.w <= w_acc) {
        out = afw_snap;
      } else if (w_acc <= out.w) {
        out = acc_snap;
      }

      CouplingEpoch record;
      record.epoch = e;
      record.iteration = req.iteration;
      record.w_afw = req.w;
      record.w_acc = w_acc;
      record.w_out = out.w;
      record.adopted_afw = d.adopt_afw;
      record.reseeded_afw = d.reseed_afw;
      record.adopted_stamp = out.stamp;
      record.acc_set = d.adopt_afw ? req.set : *acc_view;
      record.out_set = out.set;
      result.epochs.push_back(std::move(record));
      {
        std::lock_guard<std::mutex> lock(mu);
        emit(CouplingTraceEvent{0, req.iteration, 0.0, out.w, out.set.size(),
                                true, e});
      }
      if (out.w <= cfg.epsilon) {
        stop.store(true);
        cv.notify_all();
      }
    }
  });

  stop.store(true);
  cv.notify_all();
  afw_worker.join();
  acc_worker.join();
  if (failure) std::rethrow_exception(failure);

  result.out_set = out.set;
  result.w_out = out.w;
  result.iterations = afw_iterations.load();
  result.converged = out.w <= cfg.epsilon;
  result.counters = afw_counters;
  result.counters += acc_counters;
  result.counters += coord_counters;
  return result;
}

/// PF-LaCG entry point: couples the chosen CG variant with the restarted
/// accelerated stream over the CG active-set hull.
inline CouplingResult pflacg_run(const ObjectiveOracle& obj,
                                 const FeasibleRegion& region,
                                 const std::shared_ptr<const Vertex>& x0,
                                 const CouplingConfig& cfg,
                                 const CouplingTraceFn& trace = {}) {
  ActiveSet start(x0);
  return cfg.mode == CouplingMode::lockstep
             ? pflacg_run_lockstep(obj, region, std::move(start), cfg, trace)
             : pflacg_run_parallel(obj, region, std::move(start), cfg, trace);
}

}  // namespace pflacg

#endif  // PFLACG_COUPLING_HPP_
