#include "veoact/idm.hpp"

#include <algorithm>
#include <cmath>

#include "veoact/error.hpp"

namespace veoact::idm {

namespace {

constexpr double kBceClamp = 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

std::vector<double> build_input(const IdmModel& m, const Observation& prev_obs,
                                const Observation& obs, const RobotState& state) {
    const int w = m.layout.width();
    if (int(prev_obs.size()) != w || int(obs.size()) != w) {
        throw DimensionError("predict: observation width mismatch");
    }
    std::vector<double> x;
    x.reserve(m.input_dim());
    x.insert(x.end(), prev_obs.begin(), prev_obs.end());
    x.insert(x.end(), obs.begin(), obs.end());
    const auto s = state.flat();
    x.insert(x.end(), s.begin(), s.end());
    return x;
}

}  // namespace

IdmModel make_model(const WorldConfig& world_cfg, const std::vector<int>& encoder_hidden,
                    int head_hidden, Rng& rng) {
    IdmModel m;
    m.layout = world_cfg.layout();
    m.pose_min = world_cfg.workspace_min;
    m.pose_max = world_cfg.workspace_max;

    std::vector<int> enc_sizes = {m.input_dim()};
    enc_sizes.insert(enc_sizes.end(), encoder_hidden.begin(), encoder_hidden.end());
    m.encoder = nnet::make_mlp(enc_sizes, rng);

    const int feature = m.encoder.output_dim();
    m.action_head = nnet::make_mlp({feature, head_hidden, kActDim}, rng);
    m.gate_head = nnet::make_mlp({feature, head_hidden, 1}, rng);
    return m;
}

std::pair<Action, GateValue> predict(const IdmModel& m, const Observation& prev_obs,
                                     const Observation& obs, const RobotState& state) {
    const auto x = build_input(m, prev_obs, obs, state);
    const auto feature = nnet::forward(m.encoder, x);
    auto raw = nnet::forward(m.action_head, feature);
    const auto logit = nnet::forward(m.gate_head, feature);

    Action a;
    a.pose.x = clamp(raw[0], m.pose_min.x, m.pose_max.x);
    a.pose.y = clamp(raw[1], m.pose_min.y, m.pose_max.y);
    a.pose.z = clamp(raw[2], m.pose_min.z, m.pose_max.z);
    a.aperture = clamp(raw[3], 0.0, 1.0);
    return {a, GateValue{sigmoid(logit[0])}};
}

PlannedChunk predict_chunk(const IdmModel& m, const std::vector<Observation>& frames,
                           const RobotState& state0) {
    if (frames.size() < 2) throw DimensionError("predict_chunk: need at least 2 frames");
    PlannedChunk chunk;
    RobotState state = state0;
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        if (k > 0) state = m.layout.proprio(frames[k]);
        auto [action, gate] = predict(m, frames[k], frames[k + 1], state);
        chunk.actions.push_back(action);
        chunk.predicted_gates.push_back(gate.value);
    }
    return chunk;
}

double weighted_smooth_l1(const std::vector<double>& truth,
                          const std::vector<double>& pred, double beta,
                          const std::vector<double>& weights) {
    if (truth.size() != pred.size() || truth.size() != weights.size()) {
        throw DimensionError("weighted_smooth_l1: length mismatch");
    }
    if (beta <= 0.0) throw Error("weighted_smooth_l1: beta must be positive");
    double total = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = std::abs(truth[i] - pred[i]);
        if (e < beta) {
            total += 0.5 * weights[i] * e * e / beta;
        } else {
            total += weights[i] * (e - 0.5 * beta);
        }
    }
    return total;
}

double bce(double pred, int label) {
    const double p = clamp(pred, kBceClamp, 1.0 - kBceClamp);
    return label ? -std::log(p) : -std::log(1.0 - p);
}

LossResult total_loss(const IdmModel& m, const std::vector<FramePairSample>& batch,
                      const LossConfig& cfg) {
    if (batch.empty()) throw Error("total_loss: empty batch");
    if (int(cfg.action_weights.size()) != kActDim) {
        throw DimensionError("action_weights length must equal act_dim");
    }

    LossResult res;
    res.grads.encoder = nnet::zero_gradients(m.encoder);
    res.grads.action_head = nnet::zero_gradients(m.action_head);
    res.grads.gate_head = nnet::zero_gradients(m.gate_head);

    const double inv_n = 1.0 / double(batch.size());
    for (const auto& sample : batch) {
        const auto x = build_input(m, sample.prev_obs, sample.obs, sample.state);
        nnet::Tape enc_tape, act_tape, gate_tape;
        const auto feature = nnet::forward(m.encoder, x, &enc_tape);
        const auto pred_act = nnet::forward(m.action_head, feature, &act_tape);
        const auto logit = nnet::forward(m.gate_head, feature, &gate_tape);

        const auto truth = sample.action.flat();
        const std::vector<double> truth_v(truth.begin(), truth.end());
        res.action_loss +=
            inv_n * weighted_smooth_l1(truth_v, pred_act, cfg.huber_beta,
                                       cfg.action_weights);
        const double p = sigmoid(logit[0]);
        res.gate_loss += inv_n * bce(p, sample.gate_label);

        // d(action loss)/d(pred) per dimension, scaled by lambda and 1/n.
        std::vector<double> d_act(kActDim);
        for (int d = 0; d < kActDim; ++d) {
            const double e = pred_act[d] - truth[d];
            double g;
            if (std::abs(e) < cfg.huber_beta) {
                g = cfg.action_weights[d] * e / cfg.huber_beta;
            } else {
                g = cfg.action_weights[d] * (e > 0.0 ? 1.0 : -1.0);
            }
            d_act[d] = cfg.lambda_act * inv_n * g;
        }
        const std::vector<double> d_logit = {cfg.lambda_gate * inv_n *
                                             (p - double(sample.gate_label))};

        // Head gradients; the two feature gradients sum at the encoder.
        nnet::MlpGradients act_g = nnet::zero_gradients(m.action_head);
        nnet::MlpGradients gate_g = nnet::zero_gradients(m.gate_head);
        nnet::backward(m.action_head, act_tape, d_act, act_g);
        nnet::backward(m.gate_head, gate_tape, d_logit, gate_g);

        std::vector<double> d_feature(feature.size());
        for (std::size_t i = 0; i < feature.size(); ++i) {
            d_feature[i] = act_g.input[i] + gate_g.input[i];
        }
        nnet::backward(m.encoder, enc_tape, d_feature, res.grads.encoder);

        res.grads.action_head.add_scaled(act_g, 1.0);
        res.grads.gate_head.add_scaled(gate_g, 1.0);
    }
    res.total = cfg.lambda_act * res.action_loss + cfg.lambda_gate * res.gate_loss;
    return res;
}

TrainResult train(const std::vector<FramePairSample>& dataset,
                  const WorldConfig& world_cfg, const TrainConfig& cfg) {
    if (dataset.empty()) throw Error("train: empty dataset");

    Rng rng(mix_seed(cfg.seed, 0x71ULL));
    IdmModel model = make_model(world_cfg, cfg.encoder_hidden, cfg.head_hidden, rng);

    const long n = long(dataset.size());
    const long batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const long total_steps = std::max<long>(1, batches_per_epoch * cfg.epochs);
    nnet::LrSchedule sched;
    sched.base_lr = cfg.base_lr;
    sched.total_steps = int(total_steps);
    sched.warmup_steps =
        cfg.warmup_steps >= 0 ? cfg.warmup_steps : int(total_steps / 10);

    nnet::OptimState enc_opt = nnet::make_optim_state(model.encoder, cfg.optim);
    nnet::OptimState act_opt = nnet::make_optim_state(model.action_head, cfg.optim);
    nnet::OptimState gate_opt = nnet::make_optim_state(model.gate_head, cfg.optim);

    std::vector<long> order(n);
    for (long i = 0; i < n; ++i) order[i] = i;

    TrainResult result;
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates on our own stream.
        for (long i = n - 1; i > 0; --i) {
            const long j = long(rng.next_u64() % std::uint64_t(i + 1));
            std::swap(order[i], order[j]);
        }
        for (long b = 0; b < batches_per_epoch; ++b) {
            const long lo = b * cfg.batch_size;
            const long hi = std::min(n, lo + cfg.batch_size);
            std::vector<FramePairSample> batch;
            batch.reserve(hi - lo);
            for (long i = lo; i < hi; ++i) batch.push_back(dataset[order[i]]);

            const LossResult loss = total_loss(model, batch, cfg.loss);
            if (!std::isfinite(loss.total)) {
                throw TrainingDivergedError("non-finite training loss");
            }
            const double lr = nnet::lr_at(sched, step);
            nnet::adam_step(model.encoder, loss.grads.encoder, enc_opt,
                            lr * cfg.encoder_lr_mult);
            nnet::adam_step(model.action_head, loss.grads.action_head, act_opt,
                            lr * cfg.action_lr_mult);
            nnet::adam_step(model.gate_head, loss.grads.gate_head, gate_opt,
                            lr * cfg.gate_lr_mult);
            result.curve.push_back(
                {step, loss.total, loss.action_loss, loss.gate_loss, lr});
            ++step;
        }
    }
    result.model = std::move(model);
    return result;
}

Observation augment_observation(const Observation& obs, const ObservationLayout& layout,
                                double sigma, Rng& rng) {
    Observation out = obs;
    if (sigma <= 0.0) return out;
    for (int idx : layout.perturbable_indices(obs)) {
        out[idx] += sigma * rng.normal();
    }
    return out;
}

}  // namespace veoact::idm
