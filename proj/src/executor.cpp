#include "veoact/executor.hpp"

#include <cmath>

#include "veoact/error.hpp"
#include "veoact/rng.hpp"

namespace veoact::executor {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::pure_idm: return "pure_idm";
        case Variant::hierarchical: return "hierarchical";
        case Variant::simultaneous: return "simultaneous";
        case Variant::lowlevel_only: return "lowlevel_only";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "pure_idm") return Variant::pure_idm;
    if (s == "hierarchical") return Variant::hierarchical;
    if (s == "simultaneous") return Variant::simultaneous;
    if (s == "lowlevel_only") return Variant::lowlevel_only;
    throw Error("unknown method: " + s);
}

std::string to_string(Mode m) { return m == Mode::plan ? "plan" : "lowlevel"; }

std::string to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::plan_exhausted: return "plan_exhausted";
        case Termination::step_budget: return "step_budget";
        case Termination::policy_done: return "policy_done";
        case Termination::plan_infeasible: return "plan_infeasible";
    }
    return "?";
}

bool stable_high(const std::vector<double>& gate_history, double tau, int k) {
    if (int(gate_history.size()) < k) return false;
    for (int i = 0; i < k; ++i) {
        if (!(gate_history[gate_history.size() - 1 - i] > tau)) return false;
    }
    return true;
}

bool stable_low(const std::vector<double>& gate_history, double tau, int k) {
    if (int(gate_history.size()) < k) return false;
    for (int i = 0; i < k; ++i) {
        if (!(gate_history[gate_history.size() - 1 - i] <= tau)) return false;
    }
    return true;
}

int truncate_to_next_low(int k, const std::vector<double>& predicted_gates, double tau) {
    for (int j = k; j < int(predicted_gates.size()); ++j) {
        if (predicted_gates[j] <= tau) return j;
    }
    return int(predicted_gates.size());
}

SwitchDecision GateSwitch::on_gate(const std::vector<double>& gate_history,
                                   const ExecutorConfig& cfg) {
    SwitchDecision d;
    if (!enabled_) {
        const bool may_switch = !cfg.max_switches || switches_ < *cfg.max_switches;
        if (may_switch && stable_high(gate_history, cfg.tau, cfg.persistence)) {
            enabled_ = true;
            switches_ += 1;
            d.switched_on = true;
        }
    }
    if (enabled_) {
        d.use_lowlevel = true;
        if (stable_low(gate_history, cfg.tau, cfg.persistence)) {
            enabled_ = false;
            d.switched_off = true;
        }
    }
    return d;
}

namespace {

struct QueueState {
    std::vector<Action> actions;
    std::vector<double> gates;
    int k{0};

    bool exhausted() const { return k >= int(actions.size()); }
};

void validate_config(const ExecutorConfig& cfg) {
    if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) throw Error("tau must be in (0, 1]");
    if (cfg.persistence < 1) throw Error("persistence must be >= 1");
    if (cfg.step_budget < 1) throw Error("step budget must be >= 1");
}

}  // namespace

EpisodeLog run_episode(Variant variant, const EpisodeContext& ctx, Setting setting,
                       Condition condition, std::uint64_t seed) {
    validate_config(ctx.exec);
    const bool needs_model = variant != Variant::lowlevel_only;
    if (needs_model && !ctx.model) throw Error("episode variant requires an IDM model");

    EpisodeLog log;
    log.seed = seed;
    log.method = to_string(variant);

    // Independent streams per component; the method is deliberately not part
    // of the derivation so variants can be compared on identical scenes.
    const std::uint64_t scene_seed = mix_seed(seed, 1);
    const std::uint64_t planner_seed = mix_seed(seed, 2);
    const std::uint64_t lowlevel_seed = mix_seed(seed, 3);

    auto [scene, task] = reset_and_sample_task(ctx.world, setting, condition, scene_seed);
    log.task = task;
    log.container_pos = scene.containers[task.container_id].center;
    log.target_radius = scene.objects[task.target_id].radius;

    auto [initial_obs, initial_state] = perception(ctx.world, scene);

    QueueState queue;
    if (needs_model) {
        planner::FrameTrajectory frames;
        try {
            frames = planner::generate_with_meta(initial_obs, scene, task,
                                                 ctx.corruption, ctx.world, ctx.planner,
                                                 planner_seed, &log.plan_meta);
        } catch (const PlanInfeasibleError&) {
            log.reason = Termination::plan_infeasible;
            return log;
        }
        const idm::PlannedChunk raw =
            idm::predict_chunk(*ctx.model, frames.frames, initial_state);
        const smoother::SmoothedChunk smoothed =
            smoother::smooth_indexed(raw.actions, ctx.smoother);
        queue.actions = smoothed.actions;
        queue.gates.reserve(smoothed.source_index.size());
        for (int src : smoothed.source_index) {
            queue.gates.push_back(raw.predicted_gates[src]);
        }
        log.chunk.actions = queue.actions;
        log.chunk.predicted_gates = queue.gates;
    }

    GateSwitch gate_switch;
    std::vector<double> gate_history;
    lowlevel::PolicyState policy = lowlevel::PolicyState::seeded(lowlevel_seed);
    Observation prev_obs = initial_obs;
    int done_settle = 0;

    log.reason = Termination::step_budget;
    for (int t = 0; t < ctx.exec.step_budget; ++t) {
        auto [obs, state] = perception(ctx.world, scene);

        double gate = 0.0;
        if (needs_model) {
            gate = idm::predict(*ctx.model, prev_obs, obs, state).second.value;
        }
        gate_history.push_back(gate);

        Action action;
        Mode mode = Mode::plan;
        HandSource hand_source = HandSource::plan;
        int queue_index = -1;
        bool stop_plan_exhausted = false;

        switch (variant) {
            case Variant::pure_idm: {
                if (queue.exhausted()) {
                    stop_plan_exhausted = true;
                    break;
                }
                queue_index = queue.k;
                action = queue.actions[queue.k++];
                break;
            }
            case Variant::hierarchical: {
                SwitchDecision d = gate_switch.on_gate(gate_history, ctx.exec);
                if (!d.use_lowlevel && queue.exhausted() && ctx.exec.final_fallback &&
                    (!ctx.exec.max_switches ||
                     gate_switch.switches_used() < *ctx.exec.max_switches)) {
                    // One-shot engagement when the plan ran dry; off by default.
                    gate_switch.force_engage();
                    d.use_lowlevel = true;
                    d.switched_on = true;
                }
                if (d.switched_on) log.switch_steps.push_back(t);
                if (d.use_lowlevel) {
                    mode = Mode::lowlevel;
                    hand_source = HandSource::lowlevel;
                    auto [a, ps] =
                        lowlevel::react(ctx.world, obs, state, task, policy, ctx.lowlevel);
                    action = a;
                    policy = std::move(ps);
                    if (d.switched_off) {
                        queue.k = truncate_to_next_low(queue.k, queue.gates, ctx.exec.tau);
                    }
                } else {
                    if (queue.exhausted()) {
                        stop_plan_exhausted = true;
                        break;
                    }
                    queue_index = queue.k;
                    action = queue.actions[queue.k++];
                }
                break;
            }
            case Variant::simultaneous: {
                if (queue.exhausted()) {
                    stop_plan_exhausted = true;
                    break;
                }
                queue_index = queue.k;
                const Action planned = queue.actions[queue.k++];
                auto [aperture, ps] = lowlevel::hand_component(ctx.world, obs, state,
                                                               task, policy, ctx.lowlevel);
                policy = std::move(ps);
                // compose(a_pose, a_hand)
                action = {planned.pose, aperture};
                hand_source = HandSource::lowlevel;
                break;
            }
            case Variant::lowlevel_only: {
                mode = Mode::lowlevel;
                hand_source = HandSource::lowlevel;
                auto [a, ps] =
                    lowlevel::react(ctx.world, obs, state, task, policy, ctx.lowlevel);
                action = a;
                policy = std::move(ps);
                break;
            }
        }

        if (stop_plan_exhausted) {
            log.reason = Termination::plan_exhausted;
            break;
        }

        scene = step(ctx.world, scene, action);

        const SceneObject& target = scene.objects[task.target_id];
        StepRecord rec;
        rec.t = t;
        rec.mode = mode;
        rec.hand_source = hand_source;
        rec.action = action;
        rec.gate = gate;
        rec.queue_index = queue_index;
        rec.ee = scene.ee;
        rec.aperture = scene.aperture;
        rec.held = scene.held.has_value();
        rec.d_ins = point_to_surface_distance(scene.ee, target);
        rec.d_task = distance(target.center, log.container_pos);
        rec.target_pos = target.center;
        rec.target_vel = target.velocity;
        log.steps.push_back(rec);

        // Incremental overall-success detection (static and placed).
        if (rec.target_vel.norm() <= ctx.tau_static && rec.d_task <= ctx.tau_task) {
            log.reason = Termination::completed;
            break;
        }
        if (variant == Variant::lowlevel_only &&
            policy.phase == lowlevel::Phase::done) {
            if (++done_settle >= 3) {
                log.reason = Termination::policy_done;
                break;
            }
        }

        prev_obs = std::move(obs);
    }
    return log;
}

EpisodeLog run_pure_idm(const EpisodeContext& ctx, Setting setting, Condition condition,
                        std::uint64_t seed) {
    return run_episode(Variant::pure_idm, ctx, setting, condition, seed);
}

EpisodeLog run_hierarchical(const EpisodeContext& ctx, Setting setting,
                            Condition condition, std::uint64_t seed) {
    return run_episode(Variant::hierarchical, ctx, setting, condition, seed);
}

EpisodeLog run_simultaneous(const EpisodeContext& ctx, Setting setting,
                            Condition condition, std::uint64_t seed) {
    return run_episode(Variant::simultaneous, ctx, setting, condition, seed);
}

EpisodeLog run_lowlevel_only(const EpisodeContext& ctx, Setting setting,
                             Condition condition, std::uint64_t seed) {
    return run_episode(Variant::lowlevel_only, ctx, setting, condition, seed);
}

}  // namespace veoact::executor
