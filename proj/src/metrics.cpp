#include "eitfuse/metrics.hpp"

#include "eitfuse/errors.hpp"

#include <cmath>
#include <limits>

namespace eitfuse {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double ScoreEntry::location_error_cm() const {
    return matched ? location_error_sum / static_cast<double>(matched) : kNaN;
}

double ScoreEntry::force_error_n() const {
    return matched ? force_error_sum / static_cast<double>(matched) : kNaN;
}

double ScoreEntry::force_ape_percent() const {
    const std::size_t n = ape_count();
    return n ? 100.0 * ape_sum / static_cast<double>(n) : kNaN;
}

double ScoreEntry::total_normalized_ape_percent() const {
    return true_force_total > 0.0 && matched ? 100.0 * force_error_sum / true_force_total : kNaN;
}

ScoreEntry& ScoreEntry::operator+=(const ScoreEntry& o) {
    matched += o.matched;
    missed += o.missed;
    spurious += o.spurious;
    ape_excluded += o.ape_excluded;
    location_error_sum += o.location_error_sum;
    force_error_sum += o.force_error_sum;
    ape_sum += o.ape_sum;
    true_force_total += o.true_force_total;
    return *this;
}

ScoreEntry score(const Assignment& assignment, std::span<const ContactEstimate> estimates,
                 std::span<const ContactSpec> truth) {
    ScoreEntry s;
    s.matched = assignment.pairs.size();
    s.missed = assignment.missed.size();
    s.spurious = assignment.spurious.size();
    if (s.matched + s.missed != truth.size() || s.matched + s.spurious != estimates.size()) {
        throw ConfigError("assignment does not fit the estimate and truth lists");
    }
    for (const ContactSpec& t : truth) s.true_force_total += t.force;
    for (const auto& [e, t] : assignment.pairs) {
        if (e >= estimates.size() || t >= truth.size()) {
            throw ConfigError("assignment index out of range");
        }
        const double df = std::abs(estimates[e].force - truth[t].force);
        s.location_error_sum += distance(estimates[e].position, truth[t].center);
        s.force_error_sum += df;
        if (truth[t].force > 0.0) {
            s.ape_sum += df / truth[t].force;
        } else {
            s.ape_excluded += 1;
        }
    }
    return s;
}

ScoreEntry score_result(const PipelineResult& result, const Scenario& truth) {
    std::vector<Point> est, tru;
    for (const auto& e : result.estimates) est.push_back(e.position);
    for (const auto& c : truth.contacts) tru.push_back(c.center);
    return score(match_contacts(est, tru), result.estimates, truth.contacts);
}

} // namespace eitfuse
