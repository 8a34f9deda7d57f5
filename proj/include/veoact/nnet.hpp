#pragma once

#include <cstdint>
#include <vector>

#include "veoact/rng.hpp"

// Minimal feed-forward substrate: MLPs with ReLU hidden layers and linear
// output, reverse-mode gradients, AdamW, and a warmup+cosine LR schedule.
// Everything is float64; the heavy loops run on the kernels backend.
namespace veoact::nnet {

struct Layer {
    int in{0};
    int out{0};
    std::vector<double> weights;  // row-major, out x in
    std::vector<double> bias;     // out
};

struct Mlp {
    std::vector<int> sizes;  // layer widths, input first
    std::vector<Layer> layers;

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    std::size_t parameter_count() const;
};

// He-normal initialization for ReLU stacks.
Mlp make_mlp(const std::vector<int>& sizes, Rng& rng);

// Cached per-layer inputs and pre-activations, enough for backward.
struct Tape {
    std::vector<std::vector<double>> inputs;  // input to each layer
    std::vector<std::vector<double>> pre;     // pre-activation of each layer
};

struct MlpGradients {
    std::vector<Layer> layers;  // same shapes as the model, gradient values
    std::vector<double> input;  // dL/dx

    void add_scaled(const MlpGradients& other, double scale);
    void scale(double s);
};

MlpGradients zero_gradients(const Mlp& m);

std::vector<double> forward(const Mlp& m, const std::vector<double>& x, Tape* tape);

inline std::vector<double> forward(const Mlp& m, const std::vector<double>& x) {
    return forward(m, x, nullptr);
}

// Exact reverse-mode gradients for the forward pass recorded in `tape`,
// accumulated into `grads` (so multiple heads can share an encoder tape).
void backward(const Mlp& m, const Tape& tape, const std::vector<double>& dl_dy,
              MlpGradients& grads);

struct OptimConfig {
    double beta1{0.9};
    double beta2{0.999};
    double eps{0.01};
    double weight_decay{0.01};
};

struct OptimState {
    OptimConfig cfg;
    long step_count{0};
    std::vector<Layer> m;  // first moments, shaped like the model
    std::vector<Layer> v;  // second moments
};

OptimState make_optim_state(const Mlp& m, const OptimConfig& cfg);

// One AdamW step (decoupled weight decay, bias-corrected moments). Throws
// TrainingDivergedError on non-finite gradients.
void adam_step(Mlp& m, const MlpGradients& grads, OptimState& opt, double lr);

struct LrSchedule {
    double base_lr{1e-3};
    int warmup_steps{0};
    int total_steps{1};
};

// Linear warmup to base_lr, then cosine decay to zero at total_steps.
double lr_at(const LrSchedule& s, long step);

}  // namespace veoact::nnet
