#include "veoact/world.hpp"

#include <algorithm>
#include <cmath>

#include "veoact/error.hpp"
#include "veoact/rng.hpp"

namespace veoact {

namespace {

// Scene sampling geometry. Objects rest on the table with their centers at
// table height; the end effector spawns in a low band so tabletop objects can
// fall inside the wrist proximity ball.
constexpr double kSpawnMarginXy = 0.12;
constexpr double kEeSpawnZMin = 0.05;
constexpr double kEeSpawnZMax = 0.10;
constexpr double kMinObjectSeparation = 0.08;
constexpr double kMinTargetContainerDist = 0.30;
constexpr int kObjectKinds = 5;  // semantic class codes 1..5

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Vec3 clamp_to_box(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    return {clamp(p.x, lo.x, hi.x), clamp(p.y, lo.y, hi.y), clamp(p.z, lo.z, hi.z)};
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 <= 0.0) return distance(p, a);
    double t = ((p - a).x * ab.x + (p - a).y * ab.y + (p - a).z * ab.z) / len2;
    t = clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

struct ScenePlacer {
    const WorldConfig& cfg;
    Rng& rng;
    std::vector<SceneObject> placed;

    Vec3 random_table_point() {
        const double x = rng.uniform(cfg.workspace_min.x + kSpawnMarginXy,
                                     cfg.workspace_max.x - kSpawnMarginXy);
        const double y = rng.uniform(cfg.workspace_min.y + kSpawnMarginXy,
                                     cfg.workspace_max.y - kSpawnMarginXy);
        return {x, y, cfg.table_height};
    }

    bool separated(const Vec3& p, double min_dist) const {
        for (const auto& o : placed) {
            if (distance(p, o.center) < min_dist) return false;
        }
        return true;
    }

    // Rejection-sample a table point satisfying `accept`.
    template <class Pred>
    Vec3 place(Pred accept) {
        for (int attempt = 0; attempt < cfg.placement_attempts; ++attempt) {
            Vec3 p = random_table_point();
            if (separated(p, kMinObjectSeparation) && accept(p)) return p;
        }
        throw PlacementInfeasibleError("scene placement failed after attempt budget");
    }

    SceneObject& add(int kind, const Vec3& center) {
        SceneObject obj;
        obj.id = int(placed.size());
        obj.kind = kind;
        obj.center = center;
        obj.radius = cfg.object_radius;
        placed.push_back(obj);
        return placed.back();
    }
};

}  // namespace

std::string to_string(Setting s) {
    switch (s) {
        case Setting::wrist_invisible: return "wrist_invisible";
        case Setting::similar_distractors: return "similar_distractors";
        case Setting::pass_by: return "pass_by";
        case Setting::richer_semantics: return "richer_semantics";
    }
    return "?";
}

std::string to_string(Condition c) {
    return c == Condition::control ? "control" : "experimental";
}

Setting setting_from_string(const std::string& s) {
    if (s == "wrist_invisible") return Setting::wrist_invisible;
    if (s == "similar_distractors") return Setting::similar_distractors;
    if (s == "pass_by") return Setting::pass_by;
    if (s == "richer_semantics") return Setting::richer_semantics;
    throw Error("unknown setting: " + s);
}

Condition condition_from_string(const std::string& s) {
    if (s == "control") return Condition::control;
    if (s == "experimental") return Condition::experimental;
    throw Error("unknown condition: " + s);
}

SceneState make_scene(const WorldConfig& cfg, Vec3 ee, double aperture,
                      std::vector<SceneObject> objects,
                      std::vector<SceneObject> containers) {
    if (int(objects.size()) > cfg.max_objects) {
        throw CapacityError("scene has more objects than layout slots");
    }
    if (int(containers.size()) > cfg.max_containers) {
        throw CapacityError("scene has more containers than layout slots");
    }
    SceneState s;
    s.ee = clamp_to_box(ee, cfg.workspace_min, cfg.workspace_max);
    s.aperture = clamp(aperture, 0.0, 1.0);
    s.objects = std::move(objects);
    s.containers = std::move(containers);
    return s;
}

std::pair<SceneState, TaskSpec> reset_and_sample_task(const WorldConfig& cfg,
                                                      Setting setting,
                                                      Condition condition,
                                                      std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xedULL));
    ScenePlacer placer{cfg, rng, {}};

    const Vec3 ee{rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75),
                  rng.uniform(kEeSpawnZMin, kEeSpawnZMax)};
    const int target_kind = rng.uniform_int(1, kObjectKinds);
    const bool experimental = condition == Condition::experimental;

    // Target first. wrist_invisible keeps the target outside the wrist FOV in
    // both conditions; the confound is the extra wrist-visible distractor.
    Vec3 target_pos;
    if (setting == Setting::wrist_invisible) {
        target_pos = placer.place([&](const Vec3& p) {
            return distance(p, ee) > cfg.wrist_fov_radius * 1.2;
        });
    } else {
        target_pos = placer.place([&](const Vec3& p) { return distance(p, ee) > 0.15; });
    }
    placer.add(target_kind, target_pos);

    switch (setting) {
        case Setting::wrist_invisible:
            if (experimental) {
                // A dissimilar object inside the wrist proximity ball.
                const double zgap = ee.z - cfg.table_height;
                const double max_r =
                    std::sqrt(std::max(cfg.wrist_fov_radius * cfg.wrist_fov_radius -
                                           zgap * zgap,
                                       1e-6));
                Vec3 p = placer.place([&](const Vec3& q) {
                    const double dxy = std::hypot(q.x - ee.x, q.y - ee.y);
                    return dxy <= max_r * 0.9 && distance(q, target_pos) > 0.15;
                });
                int kind = rng.uniform_int(1, kObjectKinds);
                if (kind == target_kind) kind = 1 + kind % kObjectKinds;
                placer.add(kind, p);
            }
            break;
        case Setting::similar_distractors:
            if (experimental) {
                // Same-kind object near the target.
                Vec3 p = placer.place([&](const Vec3& q) {
                    const double d = distance(q, target_pos);
                    return d >= kMinObjectSeparation && d <= cfg.similar_proximity;
                });
                placer.add(target_kind, p);
            }
            break;
        case Setting::pass_by:
            if (experimental) {
                // A dissimilar object inside the ee->target corridor.
                Vec3 p = placer.place([&](const Vec3& q) {
                    const double corridor =
                        point_segment_distance(q, {ee.x, ee.y, cfg.table_height},
                                               target_pos);
                    return corridor <= cfg.corridor_radius &&
                           distance(q, target_pos) > 0.15 &&
                           std::hypot(q.x - ee.x, q.y - ee.y) > 0.05;
                });
                int kind = rng.uniform_int(1, kObjectKinds);
                if (kind == target_kind) kind = 1 + kind % kObjectKinds;
                placer.add(kind, p);
            }
            break;
        case Setting::richer_semantics:
            if (experimental) {
                const int extra = std::min(3, cfg.max_objects - 1);
                for (int i = 0; i < extra; ++i) {
                    Vec3 p = placer.place([&](const Vec3&) { return true; });
                    int kind = rng.uniform_int(1, kObjectKinds);
                    if (kind == target_kind) kind = 1 + kind % kObjectKinds;
                    placer.add(kind, p);
                }
            }
            break;
    }

    // One container, away from the target so success is never trivial.
    Vec3 container_pos = placer.place([&](const Vec3& p) {
        return distance(p, target_pos) >= kMinTargetContainerDist;
    });
    SceneObject container;
    container.id = 0;
    container.kind = 100;
    container.center = container_pos;
    container.radius = cfg.object_radius * 1.5;

    SceneState scene =
        make_scene(cfg, ee, 1.0, std::move(placer.placed), {container});
    TaskSpec task{0, 0, setting, condition};
    return {std::move(scene), task};
}

SceneState sample_play_scene(const WorldConfig& cfg, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x9aULL));
    ScenePlacer placer{cfg, rng, {}};
    const Vec3 ee{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8),
                  rng.uniform(kEeSpawnZMin, 0.25)};
    const int n = std::min(rng.uniform_int(1, 3), cfg.max_objects);
    for (int i = 0; i < n; ++i) {
        Vec3 p = placer.place([&](const Vec3&) { return true; });
        placer.add(rng.uniform_int(1, kObjectKinds), p);
    }
    SceneObject container;
    container.id = 0;
    container.kind = 100;
    container.center = placer.place([&](const Vec3&) { return true; });
    container.radius = cfg.object_radius * 1.5;
    return make_scene(cfg, ee, 1.0, std::move(placer.placed), {container});
}

SceneState step(const WorldConfig& cfg, const SceneState& scene, const Action& action) {
    SceneState next = scene;

    const std::vector<Vec3> old_centers = [&] {
        std::vector<Vec3> c;
        c.reserve(scene.objects.size());
        for (const auto& o : scene.objects) c.push_back(o.center);
        return c;
    }();

    // End effector: move toward the absolute target, Euclidean-norm clipped.
    Vec3 target = action.pose;
    if (!finite(target)) target = scene.ee;
    Vec3 delta = target - scene.ee;
    const double dnorm = delta.norm();
    if (dnorm > cfg.max_step_displacement) {
        delta = delta * (cfg.max_step_displacement / dnorm);
    }
    next.ee = clamp_to_box(scene.ee + delta, cfg.workspace_min, cfg.workspace_max);

    // Aperture: rate-limited tracking of the command.
    double ap_cmd = std::isfinite(action.aperture) ? action.aperture : scene.aperture;
    ap_cmd = clamp(ap_cmd, 0.0, 1.0);
    double ap_delta = ap_cmd - scene.aperture;
    ap_delta = clamp(ap_delta, -cfg.max_aperture_rate, cfg.max_aperture_rate);
    next.aperture = clamp(scene.aperture + ap_delta, 0.0, 1.0);

    // Held object tracks the gripper rigidly.
    if (next.held) {
        next.objects[*next.held].center = next.ee + next.grasp_offset;
    }

    // Release on upward crossing of the open threshold.
    if (next.held && scene.aperture <= cfg.grasp_open_threshold &&
        next.aperture > cfg.grasp_open_threshold) {
        SceneObject& obj = next.objects[*next.held];
        obj.center.z = cfg.table_height;  // instantaneous drop
        next.held.reset();
        next.grasp_offset = {};
    }

    // Grasp on downward crossing of the close threshold, nearest object in range.
    if (!next.held && scene.aperture >= cfg.grasp_close_threshold &&
        next.aperture < cfg.grasp_close_threshold) {
        int best = -1;
        double best_dist = cfg.grasp_radius;
        for (const auto& obj : next.objects) {
            const double d = distance(next.ee, obj.center);
            if (d <= best_dist) {
                best_dist = d;
                best = obj.id;
            }
        }
        if (best >= 0) {
            next.held = best;
            next.grasp_offset = next.objects[best].center - next.ee;
        }
    }

    for (std::size_t i = 0; i < next.objects.size(); ++i) {
        next.objects[i].velocity = next.objects[i].center - old_centers[i];
    }
    next.step_index = scene.step_index + 1;
    return next;
}

std::pair<Observation, RobotState> perception(const WorldConfig& cfg,
                                              const SceneState& scene) {
    const ObservationLayout layout = cfg.layout();
    if (int(scene.objects.size()) > layout.max_objects ||
        int(scene.containers.size()) > layout.max_containers) {
        throw CapacityError("scene exceeds observation layout capacity");
    }
    Observation obs(layout.width(), 0.0);
    obs[0] = scene.ee.x;
    obs[1] = scene.ee.y;
    obs[2] = scene.ee.z;
    obs[3] = scene.aperture;
    obs[4] = scene.held ? 1.0 : 0.0;
    for (const auto& o : scene.objects) {
        const int b = layout.object_base(o.id);
        obs[b] = double(o.kind);
        obs[b + 1] = o.center.x;
        obs[b + 2] = o.center.y;
        obs[b + 3] = o.center.z;
        obs[b + 4] = 1.0;
    }
    for (std::size_t j = 0; j < scene.containers.size(); ++j) {
        const int b = layout.container_base(int(j));
        obs[b] = scene.containers[j].center.x;
        obs[b + 1] = scene.containers[j].center.y;
        obs[b + 2] = scene.containers[j].center.z;
        obs[b + 3] = 1.0;
    }
    RobotState state{scene.ee, scene.aperture, scene.held.has_value()};
    return {std::move(obs), state};
}

double point_to_surface_distance(const Vec3& p, const SceneObject& obj) {
    return std::max(0.0, distance(p, obj.center) - obj.radius);
}

bool wrist_visible(const WorldConfig& cfg, const SceneState& scene,
                   const SceneObject& obj) {
    return distance(scene.ee, obj.center) <= cfg.wrist_fov_radius;
}

}  // namespace veoact
