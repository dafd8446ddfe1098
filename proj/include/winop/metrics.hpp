#pragma once

#include "winop/timeseries.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace winop {

enum class Direction : std::uint8_t { opening, closing };

/// A state change at `index` (index >= 1; the value differs from index - 1).
struct TransitionEvent {
    std::size_t index = 0;
    Direction direction = Direction::opening;

    bool operator==(const TransitionEvent&) const = default;
};

/// Per-timestep confusion counts with "open" as the positive class.
struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    [[nodiscard]] std::size_t total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

struct MatchPair {
    std::size_t guess_index = 0;   // timestep of the predicted transition
    std::size_t action_index = 0;  // timestep of the true transition

    bool operator==(const MatchPair&) const = default;
};

struct MatchOptions {
    int tolerance = 2;  // timesteps
    bool require_same_direction = true;
};

struct MatchResult {
    std::size_t hits = 0;
    std::size_t near_hits = 0;
    std::vector<MatchPair> pairs;
};

struct OpeningTime {
    double true_hours = 0.0;
    double false_hours = 0.0;
};

struct CustomMetrics {
    double hits_near_hits_over_guesses = 0.0;
    double guesses_over_actions = 0.0;  // +inf when guesses > 0 and actions == 0
    bool ratio_undefined = false;
    std::size_t hits = 0;
    std::size_t near_hits = 0;
    std::size_t guesses = 0;
    std::size_t actions = 0;
    std::vector<MatchPair> pairs;
};

struct MetricsReport {
    double macro_f1 = 0.0;
    double true_opening_hours = 0.0;
    double false_opening_hours = 0.0;
    std::size_t hits = 0;
    std::size_t near_hits = 0;
    std::size_t guesses = 0;
    std::size_t actions = 0;
    double hits_near_hits_over_guesses = 0.0;
    double guesses_over_actions = 0.0;
    bool guesses_over_actions_undefined = false;
    Confusion confusion;
    std::vector<MatchPair> match_pairs;
    MatchOptions matching;
};

[[nodiscard]] Confusion confusion(const BinarySeries& predicted, const BinarySeries& truth);

/// Unweighted mean of the per-class F1 scores. A class absent from both
/// series scores 1; a class with zero precision and recall scores 0.
[[nodiscard]] double macro_f1(const BinarySeries& predicted, const BinarySeries& truth);

[[nodiscard]] OpeningTime opening_time(const BinarySeries& predicted, const BinarySeries& truth,
                                       double step_hours);

[[nodiscard]] std::vector<TransitionEvent> extract_transitions(const BinarySeries& series);

/// One-to-one matching of predicted to true transitions within a tolerance.
/// Guesses are visited in time order and take the earliest compatible
/// unmatched action; with equal-width windows this yields a maximum matching.
[[nodiscard]] MatchResult match_transitions(std::span<const TransitionEvent> guesses,
                                            std::span<const TransitionEvent> actions,
                                            const MatchOptions& options = {});

[[nodiscard]] CustomMetrics custom_metrics(const BinarySeries& predicted,
                                           const BinarySeries& truth,
                                           const MatchOptions& options = {});

[[nodiscard]] MetricsReport evaluate(const BinarySeries& predicted, const BinarySeries& truth,
                                     const MatchOptions& options = {});

[[nodiscard]] std::string to_string(Direction direction);

}  // namespace winop
