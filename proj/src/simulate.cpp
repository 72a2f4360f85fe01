#include "busyq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "busyq/errors.hpp"
#include "busyq/rng.hpp"

namespace busyq {
namespace {

int thread_budget() {
    if (const char* env = std::getenv("BUSYQ_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

double BusyPeriodSample::busy_mean() const {
    if (busy.empty()) return 0.0;
    double s = 0.0;
    for (double b : busy) s += b;
    return s / static_cast<double>(busy.size());
}

double BusyPeriodSample::busy_stderr() const {
    if (busy.size() < 2) return 0.0;
    const double m = busy_mean();
    double ss = 0.0;
    for (double b : busy) ss += (b - m) * (b - m);
    return std::sqrt(ss / (static_cast<double>(busy.size()) - 1.0) /
                     static_cast<double>(busy.size()));
}

BusyPeriodSample simulate_queue(const QueueModel& queue, const SimConfig& cfg) {
    if (cfg.periods < 1 && !(cfg.horizon > 0.0))
        fail_validation("SIM_TARGET", "/periods",
                        "simulation needs a period count >= 1 or a horizon > 0");
    rng::Stream stream = rng::Stream::substream(cfg.seed, 0);
    const double lambda = queue.lambda();
    const ServiceModel& svc = queue.service();
    BusyPeriodSample out;
    if (cfg.periods > 0) {
        out.busy.reserve(cfg.periods);
        out.idle.reserve(cfg.periods);
    }

    double arrival = stream.exponential(lambda);
    while (true) {
        if (cfg.horizon > 0.0 && arrival > cfg.horizon) break;
        const double start = arrival;
        double cover = arrival + svc.sample(stream);
        arrival += stream.exponential(lambda);
        while (arrival < cover) {
            cover = std::max(cover, arrival + svc.sample(stream));
            arrival += stream.exponential(lambda);
        }
        const bool after_warmup = start >= cfg.warmup;
        const bool inside_horizon = !(cfg.horizon > 0.0) || cover <= cfg.horizon;
        if (after_warmup && inside_horizon) {
            out.busy.push_back(cover - start);
            out.idle.push_back(arrival - cover);
        }
        if (cfg.periods > 0 && static_cast<long>(out.busy.size()) >= cfg.periods) break;
        if (cfg.horizon > 0.0 && !inside_horizon) break;
    }
    if (out.busy.empty())
        fail_numerical("SIM_NO_PERIODS", "no complete busy period fit the simulation target");
    return out;
}

BusyPeriodSample simulate_queue_replicated(const QueueModel& queue, const SimConfig& cfg,
                                           int replications) {
    if (replications < 1)
        fail_validation("SIM_TARGET", "/replications", "need at least one replication");
    if (cfg.periods < 1)
        fail_validation("SIM_TARGET", "/periods", "replicated runs need a period count");
    std::vector<SimConfig> slices(replications, cfg);
    const long base = cfg.periods / replications;
    for (int r = 0; r < replications; ++r) {
        slices[r].periods = base + (r < cfg.periods % replications ? 1 : 0);
        slices[r].seed = cfg.seed;
    }

    std::vector<BusyPeriodSample> parts(replications);
    const int workers = std::min(thread_budget(), replications);
    std::atomic<int> next{0};
    const double lambda = queue.lambda();
    const ServiceModel& svc = queue.service();
    auto worker = [&]() {
        while (true) {
            const int r = next.fetch_add(1);
            if (r >= replications) return;
            if (slices[r].periods < 1) continue;
            rng::Stream stream = rng::Stream::substream(slices[r].seed, r);
            BusyPeriodSample sample;
            double arrival = stream.exponential(lambda);
            while (static_cast<long>(sample.busy.size()) < slices[r].periods) {
                const double start = arrival;
                double cover = arrival + svc.sample(stream);
                arrival += stream.exponential(lambda);
                while (arrival < cover) {
                    cover = std::max(cover, arrival + svc.sample(stream));
                    arrival += stream.exponential(lambda);
                }
                if (start >= slices[r].warmup) {
                    sample.busy.push_back(cover - start);
                    sample.idle.push_back(arrival - cover);
                }
            }
            parts[r] = std::move(sample);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    BusyPeriodSample merged;
    for (const auto& part : parts) {
        merged.busy.insert(merged.busy.end(), part.busy.begin(), part.busy.end());
        merged.idle.insert(merged.idle.end(), part.idle.begin(), part.idle.end());
    }
    if (merged.busy.empty()) fail_numerical("SIM_NO_PERIODS", "no busy periods collected");
    return merged;
}

std::vector<double> simulate_network(const NetworkModel& net, long customers,
                                     const SimConfig& cfg) {
    if (customers < 1)
        fail_validation("SIM_TARGET", "/customers", "need at least one customer");
    rng::Stream stream = rng::Stream::substream(cfg.seed, 0);
    const int j = net.node_count();
    const double lambda = net.total_rate();
    std::vector<double> sojourns;
    sojourns.reserve(customers);
    for (long c = 0; c < customers; ++c) {
        // entry node with probability lambda_j / lambda
        double u = stream.uniform() * lambda;
        int node = 0;
        for (; node < j - 1; ++node) {
            u -= net.exogenous_rates()(node);
            if (u < 0.0) break;
        }
        double total = 0.0;
        long hops = 0;
        while (true) {
            if (++hops > 1'000'000)
                fail_numerical("ROUTING_TRAP", "customer exceeded 1e6 hops; routing traps");
            total += net.services()[node].sample(stream);
            double v = stream.uniform();
            int next_node = -1;
            for (int l = 0; l < j; ++l) {
                v -= net.routing()(node, l);
                if (v < 0.0) {
                    next_node = l;
                    break;
                }
            }
            if (next_node < 0) break;  // exit
            node = next_node;
        }
        sojourns.push_back(total);
    }
    return sojourns;
}

double empirical_df(std::span<const double> sorted, double t) {
    if (sorted.empty()) fail_validation("EMPTY_SAMPLE", "", "empty sample");
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

std::vector<double> empirical_df_grid(std::vector<double> samples,
                                      std::span<const double> tgrid) {
    if (samples.empty()) fail_validation("EMPTY_SAMPLE", "", "empty sample");
    std::sort(samples.begin(), samples.end());
    std::vector<double> out;
    out.reserve(tgrid.size());
    for (double t : tgrid) out.push_back(empirical_df(samples, t));
    return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& df) {
    if (samples.empty()) fail_validation("EMPTY_SAMPLE", "", "empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t run = i;
        while (run + 1 < samples.size() && samples[run + 1] == samples[i]) ++run;
        const double x = samples[i];
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(run + 1) / n;
        const double fx = df(x);
        const double fx_left = df(std::nextafter(x, -1e300));
        d = std::max({d, std::abs(above - fx), std::abs(below - fx_left)});
        i = run + 1;
    }
    return d;
}

}  // namespace busyq
