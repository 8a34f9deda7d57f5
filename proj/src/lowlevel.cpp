#include "veoact/lowlevel.hpp"

#include <cmath>
#include <vector>

namespace veoact::lowlevel {

namespace {

struct SlotView {
    int id;
    int kind;
    Vec3 pos;
};

std::vector<SlotView> present_objects(const ObservationLayout& layout,
                                      const Observation& obs) {
    std::vector<SlotView> out;
    for (int i = 0; i < layout.max_objects; ++i) {
        if (!layout.object_present(obs, i)) continue;
        out.push_back({i, layout.object_kind(obs, i), layout.object_pos(obs, i)});
    }
    return out;
}

bool visible(const WorldConfig& cfg, const Vec3& ee, const Vec3& p) {
    return distance(ee, p) <= cfg.wrist_fov_radius;
}

// Confound-driven target selection on the first call. Both rng draws happen
// unconditionally so the stream position is independent of the scene.
void select_target(const WorldConfig& cfg, const Observation& obs, const Vec3& ee,
                   const TaskSpec& task, PolicyState& ps, const LowLevelConfig& lcfg) {
    const auto objects = present_objects(cfg.layout(), obs);
    ps.passby_armed = ps.rng.uniform01() < lcfg.passby_capture_prob;
    const double confusion_draw = ps.rng.uniform01();

    if (objects.empty()) {
        ps.locked_target.reset();
        return;
    }

    const SlotView* target = nullptr;
    for (const auto& o : objects) {
        if (o.id == task.target_id) target = &o;
    }
    if (!target) {
        ps.locked_target = objects.front().id;
        return;
    }

    int selected = target->id;
    if (lcfg.wrist_reliance && !visible(cfg, ee, target->pos)) {
        // Over-reliance on the wrist view: lock onto the nearest visible
        // object instead; fall back to the true target if nothing is visible.
        const SlotView* best = nullptr;
        double best_d = 0.0;
        for (const auto& o : objects) {
            if (o.id == target->id || !visible(cfg, ee, o.pos)) continue;
            const double d = distance(ee, o.pos);
            if (!best || d < best_d) {
                best = &o;
                best_d = d;
            }
        }
        if (best) selected = best->id;
    } else if (confusion_draw < lcfg.similar_confusion_prob) {
        // Fine-grained ambiguity: a same-kind object near the target.
        const SlotView* best = nullptr;
        double best_d = 0.0;
        for (const auto& o : objects) {
            if (o.id == target->id || o.kind != target->kind) continue;
            const double d = distance(o.pos, target->pos);
            if (d <= lcfg.confusion_radius && (!best || d < best_d)) {
                best = &o;
                best_d = d;
            }
        }
        if (best) selected = best->id;
    }
    ps.locked_target = selected;
}

}  // namespace

std::pair<Action, PolicyState> react(const WorldConfig& cfg, const Observation& obs,
                                     const RobotState& state, const TaskSpec& task,
                                     PolicyState ps, const LowLevelConfig& lcfg) {
    const ObservationLayout layout = cfg.layout();
    const Vec3 ee = state.ee;

    if (!ps.initialized) {
        ps.initialized = true;
        select_target(cfg, obs, ee, task, ps, lcfg);
        // Engaged mid-hold (hierarchical switch after a successful plan
        // grasp): go straight to transport.
        if (state.held) ps.phase = Phase::lift;
    }

    if (!ps.locked_target || !layout.object_present(obs, *ps.locked_target)) {
        return {{ee, state.aperture}, ps};  // no-op
    }

    const Vec3 target = layout.object_pos(obs, *ps.locked_target);
    const Vec3 container = layout.container_pos(obs, task.container_id);

    // Pass-by capture: while seeking, retarget to a distractor that enters the
    // wrist view before the locked target does.
    if (ps.phase == Phase::seek && ps.passby_armed &&
        *ps.locked_target == task.target_id && !visible(cfg, ee, target)) {
        for (const auto& o : present_objects(layout, obs)) {
            if (o.id != task.target_id && visible(cfg, ee, o.pos)) {
                ps.locked_target = o.id;
                ps.passby_armed = false;
                break;
            }
        }
    }

    const Vec3 locked = layout.object_pos(obs, *ps.locked_target);

    switch (ps.phase) {
        case Phase::seek: {
            const Vec3 hover{locked.x, locked.y, locked.z + lcfg.hover_height};
            if (distance(ee, hover) <= lcfg.position_eps) ps.phase = Phase::descend;
            break;
        }
        case Phase::descend:
            if (distance(ee, locked) <= 0.5 * cfg.grasp_radius) ps.phase = Phase::close;
            break;
        case Phase::close:
            if (state.held && state.aperture <= 0.1) {
                ps.phase = Phase::lift;
            } else if (!state.held && state.aperture <= 0.05) {
                ps.phase = Phase::seek;  // missed grasp, re-approach
            }
            break;
        case Phase::lift:
            if (!state.held) {
                ps.phase = Phase::seek;  // dropped
            } else if (std::abs(ee.z - lcfg.transport_height) <= lcfg.position_eps) {
                ps.phase = Phase::transport;
            }
            break;
        case Phase::transport:
            if (std::hypot(ee.x - container.x, ee.y - container.y) <=
                lcfg.position_eps) {
                ps.phase = Phase::lower;
            }
            break;
        case Phase::lower:
            if (std::abs(ee.z - lcfg.place_height) <= lcfg.position_eps) {
                ps.phase = Phase::open;
            }
            break;
        case Phase::open:
            if (!state.held && state.aperture >= 0.95) ps.phase = Phase::done;
            break;
        case Phase::done:
            break;
    }

    auto toward = [&](const Vec3& goal) {
        return ee + (goal - ee) * lcfg.approach_gain;
    };

    Action cmd;
    switch (ps.phase) {
        case Phase::seek:
            cmd = {toward({locked.x, locked.y, locked.z + lcfg.hover_height}), 1.0};
            break;
        case Phase::descend:
            cmd = {toward(locked), 1.0};
            break;
        case Phase::close:
            cmd = {toward(locked), 0.0};
            break;
        case Phase::lift:
            cmd = {toward({ee.x, ee.y, lcfg.transport_height}), 0.0};
            break;
        case Phase::transport:
            cmd = {toward({container.x, container.y, lcfg.transport_height}), 0.0};
            break;
        case Phase::lower:
            cmd = {toward({container.x, container.y, lcfg.place_height}), 0.0};
            break;
        case Phase::open:
            cmd = {ee, 1.0};
            break;
        case Phase::done:
            cmd = {ee, 1.0};
            break;
    }
    return {cmd, ps};
}

std::pair<double, PolicyState> hand_component(const WorldConfig& cfg,
                                              const Observation& obs,
                                              const RobotState& state,
                                              const TaskSpec& task, PolicyState ps,
                                              const LowLevelConfig& lcfg) {
    auto [action, next] = react(cfg, obs, state, task, std::move(ps), lcfg);
    return {action.aperture, std::move(next)};
}

}  // namespace veoact::lowlevel
