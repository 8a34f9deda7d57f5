#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "veoact/rng.hpp"
#include "veoact/types.hpp"
#include "veoact/world.hpp"

// Scripted reactive manipulation policy standing in for the learned low-level
// executor: approach-grasp-transport behavior driven by the current
// observation, with configurable confound sensitivities (wrist reliance,
// similar-object confusion, pass-by capture) that reproduce the baseline's
// failure modes under the experimental scene conditions.
namespace veoact::lowlevel {

struct LowLevelConfig {
    bool wrist_reliance{true};
    double similar_confusion_prob{0.6};
    double passby_capture_prob{0.6};
    double confusion_radius{0.20};
    double approach_gain{1.0};

    double hover_height{0.10};
    double transport_height{0.15};
    double place_height{0.10};
    double position_eps{0.006};

    static LowLevelConfig confound_free() {
        LowLevelConfig c;
        c.wrist_reliance = false;
        c.similar_confusion_prob = 0.0;
        c.passby_capture_prob = 0.0;
        return c;
    }
};

enum class Phase { seek, descend, close, lift, transport, lower, open, done };

struct PolicyState {
    std::optional<int> locked_target;
    Phase phase{Phase::seek};
    Rng rng{0};
    bool initialized{false};
    bool passby_armed{false};

    static PolicyState seeded(std::uint64_t seed) {
        PolicyState ps;
        ps.rng = Rng(mix_seed(seed, 0x77ULL));
        return ps;
    }
};

// One reactive step. Selects the locked target on the first call according to
// the confound rules, then follows the phase machine toward it and the task
// container. Deterministic given the PolicyState rng.
std::pair<Action, PolicyState> react(const WorldConfig& cfg, const Observation& obs,
                                     const RobotState& state, const TaskSpec& task,
                                     PolicyState ps, const LowLevelConfig& lcfg);

// Aperture command only (pose components are ignored by the caller in
// simultaneous mode). Advances the same phase machine.
std::pair<double, PolicyState> hand_component(const WorldConfig& cfg,
                                              const Observation& obs,
                                              const RobotState& state,
                                              const TaskSpec& task, PolicyState ps,
                                              const LowLevelConfig& lcfg);

}  // namespace veoact::lowlevel
