#pragma once

// Independent tallies over a raw event list, for cross-checking the analytics.

#include "classpulse/domain.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct KcCount {
    long incorrect = 0;
    long hints = 0;
};

/// Totals keyed by KC id; every incorrect response and every hint counts.
inline std::map<std::string, KcCount> kc_totals(const std::vector<classpulse::ActivityEvent>& events,
                                                const classpulse::ActivitySpec& spec) {
    std::map<std::string, std::string> kc_of;
    for (const auto& q : spec.questions()) kc_of[q.id] = q.kc_id;
    std::map<std::string, KcCount> out;
    for (const auto& kc : spec.kcs()) out[kc.id];
    for (const auto& e : events) {
        auto& c = out[kc_of.at(e.question_id)];
        if (e.kind == classpulse::EventKind::Hint)
            ++c.hints;
        else if (e.correct == false)
            ++c.incorrect;
    }
    return out;
}

/// Score per roster student from first responses, nullopt when nothing answered.
inline std::vector<std::optional<double>> scores(const std::vector<classpulse::ActivityEvent>& events,
                                                 const classpulse::ActivitySpec& spec) {
    std::vector<std::optional<double>> out;
    for (const auto& s : spec.roster()) {
        std::set<std::string> seen;
        int answered = 0, right = 0;
        for (const auto& e : events) {
            if (e.student_id != s.id || e.kind != classpulse::EventKind::Response) continue;
            if (!seen.insert(e.question_id).second) continue;
            ++answered;
            if (e.correct == true) ++right;
        }
        if (answered == 0)
            out.push_back(std::nullopt);
        else
            out.push_back(100.0 * right / answered);
    }
    return out;
}

}  // namespace oracle
