#include "veoact/planner.hpp"

#include <algorithm>
#include <cmath>

#include "veoact/error.hpp"
#include "veoact/rng.hpp"

namespace veoact::planner {

CorruptionModel CorruptionModel::interaction_low() {
    CorruptionModel c;
    c.interaction_noise_sigma = 0.02;
    return c;
}

CorruptionModel CorruptionModel::interaction_high() {
    CorruptionModel c;
    c.interaction_noise_sigma = 0.08;
    return c;
}

namespace {

enum class PlanPhase { approach, descend, close, lift, transport, lower, open, retreat };

}  // namespace

OraclePlan oracle_plan(const WorldConfig& cfg, const PlannerConfig& pcfg,
                       const SceneState& start, const TaskSpec& task) {
    if (task.target_id < 0 || task.target_id >= int(start.objects.size())) {
        throw PlanInfeasibleError("task target does not exist");
    }
    if (task.container_id < 0 || task.container_id >= int(start.containers.size())) {
        throw PlanInfeasibleError("task container does not exist");
    }

    OraclePlan plan;
    SceneState scene = start;
    plan.frames.width = cfg.layout().width();
    plan.frames.frames.push_back(perception(cfg, scene).first);

    PlanPhase phase = PlanPhase::approach;
    int hold_left = pcfg.settle_hold_steps;
    int retreat_left = pcfg.retreat_steps;

    for (int t = 0; t < pcfg.step_budget; ++t) {
        const Vec3 target = scene.objects[task.target_id].center;
        const Vec3 container = scene.containers[task.container_id].center;

        // Advance the phase from the current scene, then command for it.
        switch (phase) {
            case PlanPhase::approach: {
                const Vec3 hover{target.x, target.y, target.z + pcfg.hover_height};
                if (distance(scene.ee, hover) <= pcfg.position_eps) {
                    phase = PlanPhase::descend;
                }
                break;
            }
            case PlanPhase::descend:
                if (distance(scene.ee, target) <= 0.5 * cfg.grasp_radius) {
                    phase = PlanPhase::close;
                }
                break;
            case PlanPhase::close:
                if (scene.held && scene.aperture <= 0.1) phase = PlanPhase::lift;
                break;
            case PlanPhase::lift:
                if (std::abs(scene.ee.z - pcfg.transport_height) <= pcfg.position_eps) {
                    phase = PlanPhase::transport;
                }
                break;
            case PlanPhase::transport:
                if (std::hypot(scene.ee.x - container.x, scene.ee.y - container.y) <=
                    pcfg.position_eps) {
                    phase = PlanPhase::lower;
                }
                break;
            case PlanPhase::lower:
                if (std::abs(scene.ee.z - pcfg.place_height) <= pcfg.position_eps) {
                    phase = PlanPhase::open;
                }
                break;
            case PlanPhase::open:
                if (!scene.held && scene.aperture >= 0.95) {
                    if (hold_left-- <= 0) phase = PlanPhase::retreat;
                }
                break;
            case PlanPhase::retreat:
                break;
        }

        Action cmd;
        switch (phase) {
            case PlanPhase::approach:
                cmd = {{target.x, target.y, target.z + pcfg.hover_height}, 1.0};
                break;
            case PlanPhase::descend:
                cmd = {target, 1.0};
                break;
            case PlanPhase::close:
                cmd = {target, 0.0};
                break;
            case PlanPhase::lift:
                cmd = {{scene.ee.x, scene.ee.y, pcfg.transport_height}, 0.0};
                break;
            case PlanPhase::transport:
                cmd = {{container.x, container.y, pcfg.transport_height}, 0.0};
                break;
            case PlanPhase::lower:
                cmd = {{container.x, container.y, pcfg.place_height}, 0.0};
                break;
            case PlanPhase::open:
                cmd = {scene.ee, 1.0};
                break;
            case PlanPhase::retreat:
                cmd = {{scene.ee.x, scene.ee.y, pcfg.transport_height}, 1.0};
                break;
        }

        // Interaction label: commanded closing on the target, or holding it.
        const int gate = (phase == PlanPhase::close || scene.held.has_value()) ? 1 : 0;

        scene = step(cfg, scene, cmd);
        plan.frames.frames.push_back(perception(cfg, scene).first);
        plan.actions.push_back(cmd);
        plan.gates.push_back(gate);

        if (phase == PlanPhase::retreat && retreat_left-- <= 0) {
            return plan;
        }
    }
    throw PlanInfeasibleError("oracle plan exceeded step budget");
}

namespace {

// Frame k (k >= 1) belongs to the interaction segment when the transition
// that produced it has gate 1. Frame 0 is the real conditioning frame and is
// never perturbed.
bool interaction_frame(const std::vector<int>& gates, std::size_t k) {
    return k >= 1 && gates[k - 1] == 1;
}

double frame_pair_distance(const ObservationLayout& layout, const Observation& frame,
                           int target_id, int container_id) {
    const Vec3 obj = layout.object_pos(frame, target_id);
    const Vec3 ctr = layout.container_pos(frame, container_id);
    return distance(obj, ctr);
}

}  // namespace

FrameTrajectory generate_with_meta(const Observation& initial_obs,
                                   const SceneState& scene, const TaskSpec& task,
                                   const CorruptionModel& corruption,
                                   const WorldConfig& cfg, const PlannerConfig& pcfg,
                                   std::uint64_t seed, PlanMeta* meta_out) {
    Rng rng(mix_seed(seed, 0x6eULL));
    const ObservationLayout layout = cfg.layout();

    // Semantic failure: plan for the wrong object. The draw happens
    // unconditionally so the stream position does not depend on the config.
    TaskSpec planned = task;
    const double semantic_draw = rng.uniform01();
    if (semantic_draw < corruption.semantic_failure_prob &&
        scene.objects.size() >= 2) {
        int pick = rng.uniform_int(0, int(scene.objects.size()) - 2);
        if (pick >= task.target_id) ++pick;
        planned.target_id = pick;
    }

    OraclePlan plan = oracle_plan(cfg, pcfg, scene, planned);
    std::vector<Observation> frames = std::move(plan.frames.frames);
    frames[0] = initial_obs;

    if (corruption.global_drift_sigma > 0.0) {
        for (std::size_t k = 1; k < frames.size(); ++k) {
            for (int idx : layout.perturbable_indices(frames[k])) {
                frames[k][idx] += corruption.global_drift_sigma * rng.normal();
            }
        }
    }
    if (corruption.interaction_noise_sigma > 0.0) {
        for (std::size_t k = 1; k < frames.size(); ++k) {
            if (!interaction_frame(plan.gates, k)) continue;
            for (int idx : layout.perturbable_indices(frames[k])) {
                frames[k][idx] += corruption.interaction_noise_sigma * rng.normal();
            }
        }
    }

    bool truncated = false;
    const double trunc_draw = rng.uniform01();
    if (trunc_draw < corruption.truncation_prob) {
        // First frame inside the interaction segment.
        int first = -1;
        for (std::size_t g = 0; g < plan.gates.size(); ++g) {
            if (plan.gates[g] == 1) {
                first = int(g) + 1;
                break;
            }
        }
        if (first >= 1 && first < int(frames.size()) - 1) {
            const int cut = rng.uniform_int(first, int(frames.size()) - 2);
            frames.resize(std::size_t(cut) + 1);
            truncated = true;
        }
    }

    if (pcfg.subsample_stride > 1) {
        const bool last_aligned = (frames.size() - 1) % pcfg.subsample_stride == 0;
        std::vector<Observation> strided;
        for (std::size_t k = 0; k < frames.size(); k += pcfg.subsample_stride) {
            strided.push_back(std::move(frames[k]));
        }
        if (!last_aligned) strided.push_back(std::move(frames.back()));
        frames = std::move(strided);
    }

    if (meta_out) {
        meta_out->planned_target = planned.target_id;
        meta_out->semantic_failure_fired = planned.target_id != task.target_id;
        meta_out->truncated = truncated;
        meta_out->final_frame_target_distance = frame_pair_distance(
            layout, frames.back(), task.target_id, task.container_id);
    }

    FrameTrajectory out;
    out.frames = std::move(frames);
    out.width = layout.width();
    return out;
}

FrameTrajectory generate(const Observation& initial_obs, const SceneState& scene,
                         const TaskSpec& task, const CorruptionModel& corruption,
                         const WorldConfig& cfg, const PlannerConfig& pcfg,
                         std::uint64_t seed) {
    return generate_with_meta(initial_obs, scene, task, corruption, cfg, pcfg, seed,
                              nullptr);
}

}  // namespace veoact::planner
