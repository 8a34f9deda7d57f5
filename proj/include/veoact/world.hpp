#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "veoact/types.hpp"

// Deterministic kinematic pick-and-place environment: absolute-pose actions
// with per-step displacement clipping, hysteresis grasping, confounded scene
// sampling and fixed-layout perception.
namespace veoact {

enum class Setting { wrist_invisible, similar_distractors, pass_by, richer_semantics };
enum class Condition { control, experimental };

std::string to_string(Setting s);
std::string to_string(Condition c);
Setting setting_from_string(const std::string& s);
Condition condition_from_string(const std::string& s);

struct WorldConfig {
    Vec3 workspace_min{0.0, 0.0, 0.0};
    Vec3 workspace_max{1.0, 1.0, 1.0};
    double grasp_radius{0.04};
    double table_height{0.0};
    double max_step_displacement{0.02};
    double max_aperture_rate{0.15};
    double wrist_fov_radius{0.15};
    double grasp_close_threshold{0.35};
    double grasp_open_threshold{0.65};
    double static_epsilon{1e-4};

    int max_objects{6};
    int max_containers{2};

    // Scene sampling.
    double object_radius{0.03};
    double corridor_radius{0.08};
    double similar_proximity{0.15};
    int placement_attempts{1000};

    ObservationLayout layout() const { return {max_objects, max_containers}; }
};

struct SceneObject {
    int id{0};
    int kind{0};
    Vec3 center;
    double radius{0.03};
    Vec3 velocity;  // displacement recorded last step
};

struct SceneState {
    Vec3 ee;
    double aperture{1.0};
    std::optional<int> held;  // object id
    Vec3 grasp_offset;        // held object center relative to ee
    std::vector<SceneObject> objects;
    std::vector<SceneObject> containers;
    long step_index{0};
};

struct TaskSpec {
    int target_id{0};
    int container_id{0};
    Setting setting{Setting::similar_distractors};
    Condition condition{Condition::control};
};

// Validating constructor for hand-built scenes; throws CapacityError when the
// layout cannot hold the scene.
SceneState make_scene(const WorldConfig& cfg, Vec3 ee, double aperture,
                      std::vector<SceneObject> objects,
                      std::vector<SceneObject> containers);

// Samples a scene realizing the named confound. Identical inputs yield
// bit-identical scenes. Throws PlacementInfeasibleError when rejection
// sampling exhausts its attempt budget.
std::pair<SceneState, TaskSpec> reset_and_sample_task(const WorldConfig& cfg,
                                                      Setting setting,
                                                      Condition condition,
                                                      std::uint64_t seed);

// Task-free scene with 1..3 random objects and one container, for random-play
// data collection.
SceneState sample_play_scene(const WorldConfig& cfg, std::uint64_t seed);

// Pure kinematic transition. All inputs are clipped; never throws.
SceneState step(const WorldConfig& cfg, const SceneState& scene, const Action& action);

std::pair<Observation, RobotState> perception(const WorldConfig& cfg,
                                              const SceneState& scene);

// max(0, ||p - center|| - radius); exact for spheres.
double point_to_surface_distance(const Vec3& p, const SceneObject& obj);

// Closed ball at the boundary.
bool wrist_visible(const WorldConfig& cfg, const SceneState& scene,
                   const SceneObject& obj);

}  // namespace veoact
