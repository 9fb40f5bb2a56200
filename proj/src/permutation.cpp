#include "pcpd/permutation.hpp"

#include <cmath>

namespace pcpd {

std::string_view to_string(Decision d) {
    return d == Decision::reject ? "reject" : "fail_to_reject";
}

namespace {

const double kSlopeLog = std::log(47.0 / 48.0);
const double kScaleLog = std::log(47.0 / 72.0);

} // namespace

double accept_boundary(std::size_t l) {
    return (std::log(0.1) + static_cast<double>(l) * kSlopeLog) / kScaleLog;
}

double reject_boundary(std::size_t l) {
    return (std::log(10.0) + static_cast<double>(l) * kSlopeLog) / kScaleLog;
}

EarlyStop early_stop_decision(std::size_t l, std::size_t exceedances) {
    const auto a = static_cast<double>(exceedances);
    if (a >= accept_boundary(l)) {
        return EarlyStop::accept_null;
    }
    if (a <= reject_boundary(l)) {
        return EarlyStop::reject_null;
    }
    return EarlyStop::continue_sampling;
}

bool SequentialPermutationTest::add(double permuted_statistic) {
    if (done_) {
        return true;
    }
    ++l_;
    if (permuted_statistic >= observed_) {
        ++exceed_;
    }
    switch (plan_.rule) {
    case StoppingRule::none:
        break;
    case StoppingRule::sequential_wedge: {
        const auto step = early_stop_decision(l_, exceed_);
        if (step != EarlyStop::continue_sampling) {
            done_ = true;
            decision_ = step == EarlyStop::reject_null ? Decision::reject : Decision::fail_to_reject;
            return true;
        }
        break;
    }
    case StoppingRule::futility: {
        // Even with no further exceedances p would stay above alpha.
        const double best_p = static_cast<double>(1 + exceed_) / static_cast<double>(plan_.max_perms + 1);
        if (best_p > plan_.alpha) {
            done_ = true;
            decision_ = Decision::fail_to_reject;
            return true;
        }
        break;
    }
    }
    if (l_ >= plan_.max_perms) {
        done_ = true;
        decision_ = result().p_value <= plan_.alpha ? Decision::reject : Decision::fail_to_reject;
    }
    return done_;
}

PermutationResult SequentialPermutationTest::result() const {
    PermutationResult r;
    r.stopped_at = l_;
    r.exceedances = exceed_;
    r.p_value = static_cast<double>(1 + exceed_) / static_cast<double>(l_ + 1);
    r.decision = decision_;
    if (!done_ && l_ == plan_.max_perms) {
        r.decision = r.p_value <= plan_.alpha ? Decision::reject : Decision::fail_to_reject;
    }
    return r;
}

} // namespace pcpd
