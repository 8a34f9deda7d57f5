#pragma once

#include <cstdint>
#include <vector>

#include "veoact/types.hpp"
#include "veoact/world.hpp"

// Mock video model. oracle_plan scripts an ideal pick-and-place rollout
// through the real world dynamics, so every frame is the perception of a
// reachable state; generate() then corrupts it the way an imperfect video
// model would.
namespace veoact::planner {

struct FrameTrajectory {
    std::vector<Observation> frames;  // I*_0 .. I*_n
    int width{0};

    std::size_t size() const { return frames.size(); }
};

struct CorruptionModel {
    double interaction_noise_sigma{0.0};  // extra noise on interaction-phase frames
    double global_drift_sigma{0.0};
    double semantic_failure_prob{0.0};  // plan targets a wrong object
    double truncation_prob{0.0};        // plan ends early

    static CorruptionModel none() { return {}; }
    // Documented presets for the interaction-phase distortion knob.
    static CorruptionModel interaction_low();
    static CorruptionModel interaction_high();
};

struct OraclePlan {
    FrameTrajectory frames;
    std::vector<Action> actions;  // ground-truth absolute commands per transition
    std::vector<int> gates;       // 1 during grasp/hold, else 0; one per transition
};

struct PlannerConfig {
    double hover_height{0.10};
    double transport_height{0.15};
    double place_height{0.10};
    double position_eps{0.006};
    int settle_hold_steps{3};
    int retreat_steps{5};
    int step_budget{800};
    int subsample_stride{1};
};

// Metadata about a generated trajectory, consumed by failure classification.
struct PlanMeta {
    int planned_target{-1};
    bool semantic_failure_fired{false};
    bool truncated{false};
    // Distance between the task target and the task container in the final
    // emitted frame; large when the plan is semantically wrong or cut short.
    double final_frame_target_distance{0.0};
};

// Scripted phase plan: approach above target, descend, close, lift, transport,
// lower, open, retreat. Throws PlanInfeasibleError when the step budget runs
// out before completion.
OraclePlan oracle_plan(const WorldConfig& cfg, const PlannerConfig& pcfg,
                       const SceneState& scene, const TaskSpec& task);

FrameTrajectory generate(const Observation& initial_obs, const SceneState& scene,
                         const TaskSpec& task, const CorruptionModel& corruption,
                         const WorldConfig& cfg, const PlannerConfig& pcfg,
                         std::uint64_t seed);

FrameTrajectory generate_with_meta(const Observation& initial_obs,
                                   const SceneState& scene, const TaskSpec& task,
                                   const CorruptionModel& corruption,
                                   const WorldConfig& cfg, const PlannerConfig& pcfg,
                                   std::uint64_t seed, PlanMeta* meta);

}  // namespace veoact::planner
