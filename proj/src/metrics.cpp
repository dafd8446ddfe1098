#include "winop/metrics.hpp"

#include "winop/error.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace winop {

namespace {

double class_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp + fp + fn == 0) {
        return 1.0;
    }
    // 2PR / (P + R) written on counts; equals 0 when P + R = 0.
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

Confusion confusion(const BinarySeries& predicted, const BinarySeries& truth) {
    require_aligned(predicted.grid(), truth.grid());
    Confusion c;
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        const bool p = predicted[t] == 1;
        const bool w = truth[t] == 1;
        if (p && w) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (w) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

double macro_f1(const BinarySeries& predicted, const BinarySeries& truth) {
    const Confusion c = confusion(predicted, truth);
    // For the closed class the roles swap: tn are its hits, fn its false alarms.
    return 0.5 * (class_f1(c.tp, c.fp, c.fn) + class_f1(c.tn, c.fn, c.fp));
}

OpeningTime opening_time(const BinarySeries& predicted, const BinarySeries& truth,
                         double step_hours) {
    if (!(step_hours > 0.0)) {
        throw InvalidArgument("step length in hours must be positive");
    }
    const Confusion c = confusion(predicted, truth);
    return {static_cast<double>(c.tp) * step_hours, static_cast<double>(c.fp) * step_hours};
}

std::vector<TransitionEvent> extract_transitions(const BinarySeries& series) {
    std::vector<TransitionEvent> events;
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (series[t] != series[t - 1]) {
            events.push_back({t, series[t] == 1 ? Direction::opening : Direction::closing});
        }
    }
    return events;
}

MatchResult match_transitions(std::span<const TransitionEvent> guesses,
                              std::span<const TransitionEvent> actions,
                              const MatchOptions& options) {
    if (options.tolerance < 0) {
        throw InvalidArgument("matching tolerance must be non-negative");
    }
    const auto tol = static_cast<std::size_t>(options.tolerance);
    MatchResult result;
    std::vector<bool> taken(actions.size(), false);
    std::size_t lo = 0;
    for (const TransitionEvent& g : guesses) {
        while (lo < actions.size() && actions[lo].index + tol < g.index) {
            ++lo;
        }
        for (std::size_t a = lo; a < actions.size() && actions[a].index <= g.index + tol; ++a) {
            if (taken[a]) {
                continue;
            }
            if (options.require_same_direction && actions[a].direction != g.direction) {
                continue;
            }
            taken[a] = true;
            if (actions[a].index == g.index) {
                ++result.hits;
            } else {
                ++result.near_hits;
            }
            result.pairs.push_back({g.index, actions[a].index});
            break;
        }
    }
    return result;
}

CustomMetrics custom_metrics(const BinarySeries& predicted, const BinarySeries& truth,
                             const MatchOptions& options) {
    require_aligned(predicted.grid(), truth.grid());
    const auto guesses = extract_transitions(predicted);
    const auto actions = extract_transitions(truth);
    MatchResult match = match_transitions(guesses, actions, options);

    CustomMetrics m;
    m.hits = match.hits;
    m.near_hits = match.near_hits;
    m.guesses = guesses.size();
    m.actions = actions.size();
    m.pairs = std::move(match.pairs);

    const double matched = static_cast<double>(m.hits + m.near_hits);
    if (m.guesses > 0) {
        m.hits_near_hits_over_guesses = matched / static_cast<double>(m.guesses);
    } else {
        m.hits_near_hits_over_guesses = m.actions == 0 ? 1.0 : 0.0;
    }

    if (m.actions > 0) {
        m.guesses_over_actions = static_cast<double>(m.guesses) / static_cast<double>(m.actions);
    } else if (m.guesses == 0) {
        m.guesses_over_actions = 1.0;
    } else {
        m.guesses_over_actions = std::numeric_limits<double>::infinity();
        m.ratio_undefined = true;
    }
    return m;
}

MetricsReport evaluate(const BinarySeries& predicted, const BinarySeries& truth,
                       const MatchOptions& options) {
    MetricsReport r;
    r.confusion = confusion(predicted, truth);
    r.macro_f1 = macro_f1(predicted, truth);
    const OpeningTime ot = opening_time(predicted, truth, truth.step_hours());
    r.true_opening_hours = ot.true_hours;
    r.false_opening_hours = ot.false_hours;

    CustomMetrics cm = custom_metrics(predicted, truth, options);
    r.hits = cm.hits;
    r.near_hits = cm.near_hits;
    r.guesses = cm.guesses;
    r.actions = cm.actions;
    r.hits_near_hits_over_guesses = cm.hits_near_hits_over_guesses;
    r.guesses_over_actions = cm.guesses_over_actions;
    r.guesses_over_actions_undefined = cm.ratio_undefined;
    r.match_pairs = std::move(cm.pairs);
    r.matching = options;
    return r;
}

std::string to_string(Direction direction) {
    return direction == Direction::opening ? "opening" : "closing";
}

}  // namespace winop
