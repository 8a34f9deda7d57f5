#pragma once

#include <string>
#include <vector>

#include "veoact/executor.hpp"

// Success metrics, Suc/All aggregation and the failure taxonomy.
namespace veoact::metrics {

struct MetricsConfig {
    double tau_ins{0.05};     // grasp_radius + 0.01 with the default world
    double tau_task{0.06};
    double tau_static{1e-4};  // per-step displacement norm
};

enum class FailureKind { video_generation, guidance, interaction, none };

std::string to_string(FailureKind k);

// Minimum end-effector-to-target-surface distance over the episode falls
// below tau_ins. Empty logs fail.
bool instruction_follow_success(const executor::EpisodeLog& log, const MetricsConfig& cfg);

// Some step has the target both static and within tau_task of the container.
bool overall_success(const executor::EpisodeLog& log, const MetricsConfig& cfg);

// Stage-ordered taxonomy on failed episodes: video_generation when the plan
// was semantically wrong or never depicted the placement, else guidance when
// the target was never reached, else interaction. Successful episodes map to
// none.
FailureKind classify_failure(const executor::EpisodeLog& log, const MetricsConfig& cfg);

struct EpisodeOutcome {
    std::string method;
    Setting setting{Setting::similar_distractors};
    Condition condition{Condition::control};
    bool instr{false};
    bool overall{false};
    FailureKind kind{FailureKind::none};
};

struct ResultsRow {
    std::string method;
    std::string setting;
    std::string condition;
    std::string metric;  // "instr_follow" | "overall"
    int successes{0};
    int trials{0};
    double rate() const { return trials ? double(successes) / trials : 0.0; }
};

struct FailureRow {
    std::string method;
    std::string setting;
    std::string condition;
    int video_generation{0};
    int guidance{0};
    int interaction{0};
    int total_failures{0};
    int trials{0};
};

struct Aggregate {
    std::vector<ResultsRow> results;
    std::vector<FailureRow> failures;
};

Aggregate aggregate(const std::vector<EpisodeOutcome>& episodes);

std::string results_to_csv(const std::vector<ResultsRow>& rows);
std::string failures_to_csv(const std::vector<FailureRow>& rows);
// Aligned Suc/All table, e.g. "20/30  0.67".
std::string render_text_table(const std::vector<ResultsRow>& rows);

}  // namespace veoact::metrics
