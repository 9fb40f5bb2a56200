#pragma once

#include "pcpd/parallel.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pcpd {

enum class Decision { reject, fail_to_reject };

std::string_view to_string(Decision d);

enum class EarlyStop { continue_sampling, accept_null, reject_null };

// Sequential wedge on the exceedance count A_l after l permutations:
//   accept H0 when A_l >= (log 0.1 + l log(47/48)) / log(47/72)
//   reject H0 when A_l <= (log 10  + l log(47/48)) / log(47/72)
double accept_boundary(std::size_t l);
double reject_boundary(std::size_t l);
EarlyStop early_stop_decision(std::size_t l, std::size_t exceedances);

enum class StoppingRule {
    none,            // always run all permutations
    sequential_wedge, // the wedge above
    futility,        // stop once p <= alpha is no longer reachable within max_perms
};

struct PermutationPlan {
    std::size_t max_perms = 500;
    double alpha = 0.05;
    StoppingRule rule = StoppingRule::sequential_wedge;
    std::size_t threads = 0;
};

struct PermutationResult {
    double p_value = 1.0;
    std::size_t stopped_at = 0;
    std::size_t exceedances = 0;
    Decision decision = Decision::fail_to_reject;
};

// Consumes permuted statistics stat(1), stat(2), ... strictly in index order.
// A permuted statistic counts as an exceedance when it is >= observed; the
// identity ordering always counts, so p = (1 + A_l) / (l + 1).
class SequentialPermutationTest {
public:
    SequentialPermutationTest(double observed, PermutationPlan plan) : observed_(observed), plan_(plan) {}

    // Returns true once the test has stopped.
    bool add(double permuted_statistic);
    bool done() const noexcept { return done_; }
    PermutationResult result() const;

private:
    double observed_;
    PermutationPlan plan_;
    std::size_t l_ = 0;
    std::size_t exceed_ = 0;
    bool done_ = false;
    Decision decision_ = Decision::fail_to_reject;
};

// Evaluates permuted statistics in parallel batches. `make_worker()` is called
// once per thread and must return a callable double(std::size_t l) computing
// the statistic for permutation l (1-based) from its own substream. Results
// are independent of the thread count.
template <class MakeWorker>
PermutationResult run_permutation_test(double observed, const PermutationPlan& plan, MakeWorker&& make_worker) {
    SequentialPermutationTest test(observed, plan);
    if (plan.max_perms == 0) {
        return test.result();
    }
    const std::size_t threads = std::min(resolve_threads(plan.threads), plan.max_perms);
    using Worker = decltype(make_worker());
    std::vector<Worker> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.push_back(make_worker());
    }
    const std::size_t batch = plan.rule == StoppingRule::none ? plan.max_perms : std::max<std::size_t>(8, 4 * threads);
    std::vector<double> values;
    std::size_t next = 1;
    while (!test.done()) {
        const std::size_t count = std::min(batch, plan.max_perms - next + 1);
        values.assign(count, 0.0);
        parallel_for(count, threads, [&](std::size_t w, std::size_t i) { values[i] = workers[w](next + i); });
        for (const double v : values) {
            if (test.add(v)) {
                break;
            }
        }
        next += count;
    }
    return test.result();
}

} // namespace pcpd
