#include "veoact/nnet.hpp"

#include <cmath>

#include "veoact/error.hpp"
#include "veoact/kernels.hpp"

namespace veoact::nnet {

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

Mlp make_mlp(const std::vector<int>& sizes, Rng& rng) {
    if (sizes.size() < 2) throw DimensionError("mlp needs at least input and output");
    Mlp m;
    m.sizes = sizes;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        Layer l;
        l.in = sizes[i];
        l.out = sizes[i + 1];
        if (l.in <= 0 || l.out <= 0) throw DimensionError("non-positive layer size");
        l.weights.resize(std::size_t(l.in) * l.out);
        l.bias.assign(l.out, 0.0);
        const double scale = std::sqrt(2.0 / double(l.in));
        for (auto& w : l.weights) w = rng.normal() * scale;
        m.layers.push_back(std::move(l));
    }
    return m;
}

MlpGradients zero_gradients(const Mlp& m) {
    MlpGradients g;
    g.layers.reserve(m.layers.size());
    for (const auto& l : m.layers) {
        Layer zl;
        zl.in = l.in;
        zl.out = l.out;
        zl.weights.assign(l.weights.size(), 0.0);
        zl.bias.assign(l.bias.size(), 0.0);
        g.layers.push_back(std::move(zl));
    }
    g.input.assign(m.input_dim(), 0.0);
    return g;
}

void MlpGradients::add_scaled(const MlpGradients& other, double scale) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        kernels::active().axpy(scale, other.layers[i].weights.data(),
                               layers[i].weights.data(), layers[i].weights.size());
        kernels::active().axpy(scale, other.layers[i].bias.data(),
                               layers[i].bias.data(), layers[i].bias.size());
    }
    kernels::active().axpy(scale, other.input.data(), input.data(), input.size());
}

void MlpGradients::scale(double s) {
    for (auto& l : layers) {
        for (auto& w : l.weights) w *= s;
        for (auto& b : l.bias) b *= s;
    }
    for (auto& v : input) v *= s;
}

std::vector<double> forward(const Mlp& m, const std::vector<double>& x, Tape* tape) {
    if (int(x.size()) != m.input_dim()) {
        throw DimensionError("forward: input width mismatch");
    }
    const auto& k = kernels::active();
    std::vector<double> cur = x;
    if (tape) {
        tape->inputs.clear();
        tape->pre.clear();
    }
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const Layer& l = m.layers[i];
        std::vector<double> z(l.out);
        k.gemv(l.weights.data(), cur.data(), l.bias.data(), z.data(), l.out, l.in);
        if (tape) {
            tape->inputs.push_back(std::move(cur));
            tape->pre.push_back(z);
        }
        const bool last = i + 1 == m.layers.size();
        if (!last) k.relu(z.data(), z.data(), z.size());
        cur = std::move(z);
    }
    return cur;
}

void backward(const Mlp& m, const Tape& tape, const std::vector<double>& dl_dy,
              MlpGradients& grads) {
    if (tape.inputs.size() != m.layers.size()) {
        throw DimensionError("backward: tape does not match network");
    }
    if (int(dl_dy.size()) != m.output_dim()) {
        throw DimensionError("backward: output gradient width mismatch");
    }
    const auto& k = kernels::active();
    std::vector<double> delta = dl_dy;
    for (int i = int(m.layers.size()) - 1; i >= 0; --i) {
        const Layer& l = m.layers[i];
        const bool last = i == int(m.layers.size()) - 1;
        if (!last) {
            k.relu_backward(tape.pre[i].data(), delta.data(), delta.size());
        }
        k.ger(delta.data(), tape.inputs[i].data(), grads.layers[i].weights.data(),
              l.out, l.in);
        k.axpy(1.0, delta.data(), grads.layers[i].bias.data(), l.out);
        std::vector<double> prev(l.in);
        k.gemv_t(l.weights.data(), delta.data(), prev.data(), l.out, l.in);
        delta = std::move(prev);
    }
    k.axpy(1.0, delta.data(), grads.input.data(), grads.input.size());
}

OptimState make_optim_state(const Mlp& m, const OptimConfig& cfg) {
    OptimState s;
    s.cfg = cfg;
    for (const auto& l : m.layers) {
        Layer z;
        z.in = l.in;
        z.out = l.out;
        z.weights.assign(l.weights.size(), 0.0);
        z.bias.assign(l.bias.size(), 0.0);
        s.m.push_back(z);
        s.v.push_back(std::move(z));
    }
    return s;
}

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

void adam_step(Mlp& m, const MlpGradients& grads, OptimState& opt, double lr) {
    if (m.layers.size() != grads.layers.size() || m.layers.size() != opt.m.size()) {
        throw DimensionError("adam_step: shape mismatch");
    }
    for (const auto& gl : grads.layers) {
        if (!all_finite(gl.weights) || !all_finite(gl.bias)) {
            throw TrainingDivergedError("non-finite gradient");
        }
    }
    opt.step_count += 1;
    kernels::AdamScalars s;
    s.lr = lr;
    s.beta1 = opt.cfg.beta1;
    s.beta2 = opt.cfg.beta2;
    s.eps = opt.cfg.eps;
    s.weight_decay = opt.cfg.weight_decay;
    s.inv_bias1 = 1.0 / (1.0 - std::pow(opt.cfg.beta1, double(opt.step_count)));
    s.inv_bias2 = 1.0 / (1.0 - std::pow(opt.cfg.beta2, double(opt.step_count)));
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        k.adamw(m.layers[i].weights.data(), grads.layers[i].weights.data(),
                opt.m[i].weights.data(), opt.v[i].weights.data(),
                m.layers[i].weights.size(), s);
        k.adamw(m.layers[i].bias.data(), grads.layers[i].bias.data(),
                opt.m[i].bias.data(), opt.v[i].bias.data(), m.layers[i].bias.size(), s);
    }
}

double lr_at(const LrSchedule& s, long step) {
    if (s.warmup_steps > 0 && step < s.warmup_steps) {
        return s.base_lr * double(step) / double(s.warmup_steps);
    }
    const double span = double(s.total_steps - s.warmup_steps);
    if (span <= 0.0) return s.base_lr;
    double t = (double(step) - s.warmup_steps) / span;
    t = std::min(std::max(t, 0.0), 1.0);
    return s.base_lr * 0.5 * (1.0 + std::cos(3.14159265358979323846 * t));
}

}  // namespace veoact::nnet
