#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "veoact/idm.hpp"
#include "veoact/lowlevel.hpp"
#include "veoact/planner.hpp"
#include "veoact/smoother.hpp"
#include "veoact/types.hpp"
#include "veoact/world.hpp"

// The inference architectures: pure-IDM chunk execution, hierarchical gated
// switching with persistence and queue pruning, simultaneous factorized
// control, and a plain low-level-only baseline.
namespace veoact::executor {

enum class Variant { pure_idm, hierarchical, simultaneous, lowlevel_only };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ExecutorConfig {
    double tau{0.5};         // gate threshold; 1.0 disables switching entirely
    int persistence{3};      // K
    std::optional<int> max_switches{};  // empty = unlimited; 1 = the paper's 1-switch setting
    int step_budget{600};
    bool final_fallback{false};
};

// true iff the history has at least K entries and the last K are all > tau.
bool stable_high(const std::vector<double>& gate_history, double tau, int k);
// true iff the history has at least K entries and the last K are all <= tau.
bool stable_low(const std::vector<double>& gate_history, double tau, int k);

// Smallest index j >= k with predicted_gates[j] <= tau; the gate count when
// no such index exists (queue abandoned).
int truncate_to_next_low(int k, const std::vector<double>& predicted_gates, double tau);

// Engage/disengage state machine over the gate history; factored out of the
// episode loop so it can be exhaustively tested.
struct SwitchDecision {
    bool use_lowlevel{false};
    bool switched_on{false};
    bool switched_off{false};
};

class GateSwitch {
public:
    SwitchDecision on_gate(const std::vector<double>& gate_history,
                           const ExecutorConfig& cfg);
    // Unconditional engagement, used by the final_fallback path.
    void force_engage() {
        enabled_ = true;
        switches_ += 1;
    }
    bool enabled() const { return enabled_; }
    int switches_used() const { return switches_; }

private:
    bool enabled_{false};
    int switches_{0};
};

enum class Mode { plan, lowlevel };
enum class HandSource { plan, lowlevel };
enum class Termination { completed, plan_exhausted, step_budget, policy_done, plan_infeasible };

std::string to_string(Mode m);
std::string to_string(Termination t);

struct StepRecord {
    int t{0};
    Mode mode{Mode::plan};
    HandSource hand_source{HandSource::plan};
    Action action;
    double gate{0.0};      // realtime G_t
    int queue_index{-1};   // chunk index consumed in plan mode
    Vec3 ee;               // post-step
    double aperture{1.0};
    bool held{false};
    double d_ins{0.0};     // ee to target surface
    double d_task{0.0};    // target to container reference
    Vec3 target_pos;
    Vec3 target_vel;
};

struct EpisodeLog {
    std::uint64_t seed{0};
    std::string method;
    TaskSpec task;
    Vec3 container_pos;
    double target_radius{0.0};
    idm::PlannedChunk chunk;  // smoothed queue content with aligned gates
    planner::PlanMeta plan_meta;
    std::vector<int> switch_steps;
    Termination reason{Termination::step_budget};
    std::vector<StepRecord> steps;
};

// Everything an episode needs besides the scene seed.
struct EpisodeContext {
    WorldConfig world;
    planner::PlannerConfig planner;
    planner::CorruptionModel corruption;
    smoother::SmootherConfig smoother;
    lowlevel::LowLevelConfig lowlevel;
    ExecutorConfig exec;
    double tau_task{0.06};     // completion detection
    double tau_static{1e-4};
    const idm::IdmModel* model{nullptr};  // required unless lowlevel_only
};

EpisodeLog run_episode(Variant variant, const EpisodeContext& ctx, Setting setting,
                       Condition condition, std::uint64_t seed);

EpisodeLog run_pure_idm(const EpisodeContext& ctx, Setting setting, Condition condition,
                        std::uint64_t seed);
EpisodeLog run_hierarchical(const EpisodeContext& ctx, Setting setting,
                            Condition condition, std::uint64_t seed);
EpisodeLog run_simultaneous(const EpisodeContext& ctx, Setting setting,
                            Condition condition, std::uint64_t seed);
EpisodeLog run_lowlevel_only(const EpisodeContext& ctx, Setting setting,
                             Condition condition, std::uint64_t seed);

}  // namespace veoact::executor
