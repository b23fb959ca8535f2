#pragma once

#include "eitfuse/fuse.hpp"
#include "eitfuse/mesh.hpp"
#include "eitfuse/phantoms.hpp"

#include <span>
#include <utility>
#include <vector>

namespace eitfuse {

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (estimate, truth), by truth index
    std::vector<std::size_t> missed;    // unmatched truth indices
    std::vector<std::size_t> spurious;  // unmatched estimate indices
    double total_distance = 0.0;
};

/// Minimum total Euclidean distance over all one-to-one matchings of size
/// min(m, n) (Hungarian method on the rectangular cost matrix).
Assignment match_contacts(std::span<const Point> estimates, std::span<const Point> truth);

/// Reference implementation by enumeration, for testing only. Exponential.
double brute_force_matching_cost(std::span<const Point> estimates, std::span<const Point> truth);

struct ScoreEntry {
    std::size_t matched = 0;
    std::size_t missed = 0;
    std::size_t spurious = 0;
    std::size_t ape_excluded = 0;  // matches whose true force is zero
    double location_error_sum = 0.0;  // cm, summed over matches
    double force_error_sum = 0.0;     // N, summed over matches
    double ape_sum = 0.0;             // fraction, summed over APE-eligible matches
    double true_force_total = 0.0;    // N, over all truths

    double location_error_cm() const;
    double force_error_n() const;
    double force_ape_percent() const;
    /// sum |F_hat - F| over matches divided by the total true force.
    double total_normalized_ape_percent() const;
    std::size_t ape_count() const { return matched - ape_excluded; }

    ScoreEntry& operator+=(const ScoreEntry& other);
};

ScoreEntry score(const Assignment& assignment, std::span<const ContactEstimate> estimates,
                 std::span<const ContactSpec> truth);

/// match_contacts followed by score.
ScoreEntry score_result(const PipelineResult& result, const Scenario& truth);

} // namespace eitfuse
