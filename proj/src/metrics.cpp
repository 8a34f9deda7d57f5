#include "veoact/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

namespace veoact::metrics {

std::string to_string(FailureKind k) {
    switch (k) {
        case FailureKind::video_generation: return "video_generation";
        case FailureKind::guidance: return "guidance";
        case FailureKind::interaction: return "interaction";
        case FailureKind::none: return "none";
    }
    return "?";
}

bool instruction_follow_success(const executor::EpisodeLog& log,
                                const MetricsConfig& cfg) {
    for (const auto& s : log.steps) {
        if (s.d_ins <= cfg.tau_ins) return true;
    }
    return false;
}

bool overall_success(const executor::EpisodeLog& log, const MetricsConfig& cfg) {
    for (const auto& s : log.steps) {
        if (s.target_vel.norm() <= cfg.tau_static && s.d_task <= cfg.tau_task) {
            return true;
        }
    }
    return false;
}

FailureKind classify_failure(const executor::EpisodeLog& log, const MetricsConfig& cfg) {
    if (overall_success(log, cfg)) return FailureKind::none;
    if (log.plan_meta.semantic_failure_fired ||
        log.plan_meta.final_frame_target_distance > cfg.tau_task) {
        return FailureKind::video_generation;
    }
    if (!instruction_follow_success(log, cfg)) return FailureKind::guidance;
    return FailureKind::interaction;
}

Aggregate aggregate(const std::vector<EpisodeOutcome>& episodes) {
    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, std::array<int, 2>> success;  // {instr, overall}
    std::map<Key, FailureRow> failures;
    std::map<Key, int> trials;

    for (const auto& e : episodes) {
        const Key key{e.method, to_string(e.setting), to_string(e.condition)};
        trials[key] += 1;
        auto& s = success[key];
        s[0] += e.instr ? 1 : 0;
        s[1] += e.overall ? 1 : 0;
        auto& f = failures[key];
        switch (e.kind) {
            case FailureKind::video_generation: f.video_generation += 1; break;
            case FailureKind::guidance: f.guidance += 1; break;
            case FailureKind::interaction: f.interaction += 1; break;
            case FailureKind::none: break;
        }
    }

    Aggregate agg;
    for (const auto& [key, counts] : success) {
        const auto& [method, setting, condition] = key;
        const int n = trials[key];
        agg.results.push_back({method, setting, condition, "instr_follow", counts[0], n});
        agg.results.push_back({method, setting, condition, "overall", counts[1], n});
        FailureRow row = failures[key];
        row.method = method;
        row.setting = setting;
        row.condition = condition;
        row.trials = n;
        row.total_failures = row.video_generation + row.guidance + row.interaction;
        agg.failures.push_back(row);
    }
    return agg;
}

std::string results_to_csv(const std::vector<ResultsRow>& rows) {
    std::string out = "method,setting,condition,metric,suc,all,rate\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%d,%d,%.4f\n", r.method.c_str(),
                      r.setting.c_str(), r.condition.c_str(), r.metric.c_str(),
                      r.successes, r.trials, r.rate());
        out += buf;
    }
    return out;
}

std::string failures_to_csv(const std::vector<FailureRow>& rows) {
    std::string out =
        "method,setting,condition,video_generation,guidance,interaction,"
        "total_failures,trials\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%d,%d,%d,%d\n", r.method.c_str(),
                      r.setting.c_str(), r.condition.c_str(), r.video_generation,
                      r.guidance, r.interaction, r.total_failures, r.trials);
        out += buf;
    }
    return out;
}

std::string render_text_table(const std::vector<ResultsRow>& rows) {
    std::string out;
    char buf[256];
    std::size_t label_width = 0;
    for (const auto& r : rows) {
        label_width = std::max(label_width, r.method.size() + r.setting.size() +
                                                r.condition.size() + r.metric.size() + 3);
    }
    for (const auto& r : rows) {
        const std::string label =
            r.method + " " + r.setting + " " + r.condition + " " + r.metric;
        std::snprintf(buf, sizeof(buf), "%-*s  %d/%d  %.2f\n", int(label_width),
                      label.c_str(), r.successes, r.trials, r.rate());
        out += buf;
    }
    return out;
}

}  // namespace veoact::metrics
