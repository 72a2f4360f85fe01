#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "busyq/distributions.hpp"
#include "busyq/network.hpp"

namespace busyq {

/// Simulation target: either a busy-period count or a time horizon
/// (periods straddling the horizon are discarded). Busy periods are
/// regeneration cycles, so warmup defaults to zero.
struct SimConfig {
    std::uint64_t seed = 1;
    long periods = 0;
    double horizon = 0.0;
    double warmup = 0.0;
};

struct BusyPeriodSample {
    std::vector<double> busy;  // one duration per observed busy period
    std::vector<double> idle;  // idle gap following each period

    double busy_mean() const;
    double busy_stderr() const;
};

/// Event-free busy-period extraction: with infinitely many servers a busy
/// period is a maximal union of service intervals, so it extends while each
/// next arrival lands before the running cover end. A zero service drawn by
/// an opening arrival yields a zero-length period, matching the point mass
/// at the origin of the busy law when the service has one.
BusyPeriodSample simulate_queue(const QueueModel& queue, const SimConfig& cfg);

/// Runs `replications` independent substreams (substream(seed, r)) and
/// merges the samples ordered by replication index; the result does not
/// depend on scheduling. Honors BUSYQ_THREADS.
BusyPeriodSample simulate_queue_replicated(const QueueModel& queue, const SimConfig& cfg,
                                           int replications);

/// Sojourn sampling: a customer enters at node j with probability
/// lambda_j / lambda, accumulates one service draw per visited node and
/// routes by the corresponding row (travel is instantaneous and servers
/// never queue, so the sojourn is the plain sum of services). A customer
/// exceeding 1e6 hops raises ROUTING_TRAP.
std::vector<double> simulate_network(const NetworkModel& net, long customers,
                                     const SimConfig& cfg);

/// Fraction of samples <= t. `sorted` must be ascending.
double empirical_df(std::span<const double> sorted, double t);
std::vector<double> empirical_df_grid(std::vector<double> samples,
                                      std::span<const double> tgrid);

/// Two-sided Kolmogorov-Smirnov distance against an analytic d.f.; point
/// masses in either distribution are handled through left limits.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& df);

}  // namespace busyq
