#pragma once

#include <cstdint>
#include <vector>

#include "veoact/nnet.hpp"
#include "veoact/types.hpp"
#include "veoact/world.hpp"

// Multi-head inverse dynamics model: a shared MLP encoder over
// (prev_obs, obs, state), an action head and an interaction-gate head,
// with joint training on random-play data.
namespace veoact::idm {

// One transition sample. `state` is the proprioceptive state at the start of
// the transition; `action` is the command that produced obs from prev_obs.
struct FramePairSample {
    Observation prev_obs;
    Observation obs;
    RobotState state;
    Action action;
    int gate_label{0};  // 1 during grasp/hold, else 0
};

struct LossConfig {
    double lambda_act{1.0};
    double lambda_gate{1.0};
    double huber_beta{0.1};
    std::vector<double> action_weights{1.0, 1.0, 1.0, 1.0};
};

struct IdmModel {
    ObservationLayout layout;
    nnet::Mlp encoder;      // concat(prev_obs, obs, state) -> feature
    nnet::Mlp action_head;  // feature -> act_dim
    nnet::Mlp gate_head;    // feature -> 1 logit
    // Inference-time action clipping, from the world the model was trained for.
    Vec3 pose_min{0, 0, 0};
    Vec3 pose_max{1, 1, 1};

    int input_dim() const { return 2 * layout.width() + kRobotStateDim; }
};

struct GateValue {
    double value{0.5};  // sigmoid output, in [0, 1]
};

struct PlannedChunk {
    std::vector<Action> actions;
    std::vector<double> predicted_gates;  // same length, values in [0, 1]
};

IdmModel make_model(const WorldConfig& world_cfg, const std::vector<int>& encoder_hidden,
                    int head_hidden, Rng& rng);

std::pair<Action, GateValue> predict(const IdmModel& m, const Observation& prev_obs,
                                     const Observation& obs, const RobotState& state);

// Runs inverse dynamics over every frame transition. The state for pair
// (k, k+1) is state0 for k = 0 and the proprioceptive slice of frame k
// afterwards.
PlannedChunk predict_chunk(const IdmModel& m, const std::vector<Observation>& frames,
                           const RobotState& state0);

// Piecewise Huber with per-dimension weights:
//   0.5 * w * e^2 / beta   when |e| < beta,  else  w * (|e| - 0.5 * beta)
double weighted_smooth_l1(const std::vector<double>& truth,
                          const std::vector<double>& pred, double beta,
                          const std::vector<double>& weights);

// Binary cross entropy with the prediction clamped to [1e-7, 1 - 1e-7].
double bce(double pred, int label);

struct Gradients {
    nnet::MlpGradients encoder;
    nnet::MlpGradients action_head;
    nnet::MlpGradients gate_head;
};

// Mean over the batch of lambda_act * L_act + lambda_gate * L_gate, plus the
// full gradient through both heads and the shared encoder.
struct LossResult {
    double total{0.0};
    double action_loss{0.0};
    double gate_loss{0.0};
    Gradients grads;
};

LossResult total_loss(const IdmModel& m, const std::vector<FramePairSample>& batch,
                      const LossConfig& cfg);

struct TrainConfig {
    std::vector<int> encoder_hidden{256, 256};
    int head_hidden{256};
    int epochs{6};
    int batch_size{64};
    double base_lr{2e-3};
    int warmup_steps{-1};  // -1: 10% of total steps
    double encoder_lr_mult{1.0};
    double action_lr_mult{1.0};
    double gate_lr_mult{1.0};
    nnet::OptimConfig optim;
    LossConfig loss;
    std::uint64_t seed{0};
};

struct CurvePoint {
    long step{0};
    double loss{0.0};
    double action_loss{0.0};
    double gate_loss{0.0};
    double lr{0.0};
};

struct TrainResult {
    IdmModel model;
    std::vector<CurvePoint> curve;
};

// Seeded shuffle each epoch, mini-batches, AdamW with the cosine schedule.
// Deterministic given the seed. Throws TrainingDivergedError on non-finite
// loss.
TrainResult train(const std::vector<FramePairSample>& dataset,
                  const WorldConfig& world_cfg, const TrainConfig& cfg);

// Gaussian noise on continuous entries of present slots; flags and kind codes
// untouched.
Observation augment_observation(const Observation& obs, const ObservationLayout& layout,
                                double sigma, Rng& rng);

}  // namespace veoact::idm
