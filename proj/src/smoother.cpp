#include "veoact/smoother.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "veoact/error.hpp"

namespace veoact::smoother {

SmootherConfig SmootherConfig::neutral() {
    SmootherConfig cfg;
    cfg.rounds = 0;
    cfg.window = 1;
    cfg.hold = 0;
    cfg.skip_prefix = 0;
    cfg.clamp_min = -std::numeric_limits<double>::infinity();
    return cfg;
}

namespace {

double dim_value(const Action& a, int d) { return a.flat()[std::size_t(d)]; }

// One tracked dimension: K = {0, T-1}, then for each round insert the argmax
// and argmin of every current segment of length >= min_segment, first
// occurrence wins ties, already-selected indices excluded.
std::set<int> keypoints_for_dim(const std::vector<Action>& traj, int d,
                                const SmootherConfig& cfg) {
    const int t_len = int(traj.size());
    std::set<int> keys = {0, t_len - 1};
    for (int round = 0; round < cfg.rounds; ++round) {
        std::vector<int> sorted(keys.begin(), keys.end());
        std::vector<int> inserts;
        for (std::size_t s = 0; s + 1 < sorted.size(); ++s) {
            const int u = sorted[s];
            const int v = sorted[s + 1];
            if (v - u + 1 < cfg.min_segment) continue;
            int arg_max = u;
            int arg_min = u;
            for (int t = u + 1; t <= v; ++t) {
                if (dim_value(traj[t], d) > dim_value(traj[arg_max], d)) arg_max = t;
                if (dim_value(traj[t], d) < dim_value(traj[arg_min], d)) arg_min = t;
            }
            if (!keys.count(arg_max)) inserts.push_back(arg_max);
            if (!keys.count(arg_min) && arg_min != arg_max) inserts.push_back(arg_min);
        }
        keys.insert(inserts.begin(), inserts.end());
    }
    return keys;
}

}  // namespace

KeypointSet select_keypoints(const std::vector<Action>& traj, const SmootherConfig& cfg) {
    if (traj.empty()) throw Error("select_keypoints: empty trajectory");
    if (traj.size() == 1) return {0};
    std::set<int> merged;
    for (int d : cfg.union_dims) {
        if (d < 0 || d >= kActDim) throw DimensionError("union dim out of range");
        auto keys = keypoints_for_dim(traj, d, cfg);
        merged.insert(keys.begin(), keys.end());
    }
    if (cfg.union_dims.empty()) {
        merged = {0, int(traj.size()) - 1};
    }
    return KeypointSet(merged.begin(), merged.end());
}

std::vector<Action> segment_moving_average(const std::vector<Action>& traj,
                                           const KeypointSet& keypoints, int window) {
    if (window < 1 || window % 2 == 0) throw Error("window must be odd and >= 1");
    const int h = window / 2;
    std::vector<Action> out = traj;
    for (std::size_t s = 0; s + 1 < keypoints.size(); ++s) {
        const int lo = keypoints[s];
        const int hi = keypoints[s + 1];
        for (int t = lo + 1; t <= hi - 1; ++t) {
            const int a = std::max(lo, t - h);
            const int b = std::min(hi, t + h);
            std::array<double, 4> acc{};
            for (int j = a; j <= b; ++j) {
                const auto f = traj[j].flat();
                for (int d = 0; d < kActDim; ++d) acc[d] += f[d];
            }
            const double inv = 1.0 / double(b - a + 1);
            for (int d = 0; d < kActDim; ++d) acc[d] *= inv;
            out[t] = Action::from_flat(acc);
        }
    }
    return out;
}

std::vector<Action> hold_extend(const std::vector<Action>& traj,
                                const KeypointSet& keypoints, int hold,
                                int skip_prefix) {
    std::vector<Action> out;
    out.reserve(traj.size());
    std::size_t ki = 0;
    for (int t = 0; t < int(traj.size()); ++t) {
        out.push_back(traj[t]);
        while (ki < keypoints.size() && keypoints[ki] < t) ++ki;
        const bool is_key = ki < keypoints.size() && keypoints[ki] == t;
        if (is_key && t >= skip_prefix) {
            for (int r = 0; r < hold; ++r) out.push_back(traj[t]);
        }
    }
    return out;
}

std::vector<Action> clamp_dim(const std::vector<Action>& traj, int dim, double min_value) {
    if (dim < 0 || dim >= kActDim) throw DimensionError("clamp dim out of range");
    std::vector<Action> out = traj;
    for (auto& a : out) {
        auto f = a.flat();
        f[dim] = std::max(f[dim], min_value);
        a = Action::from_flat(f);
    }
    return out;
}

std::vector<Action> smooth(const std::vector<Action>& traj, const SmootherConfig& cfg) {
    return smooth_indexed(traj, cfg).actions;
}

SmoothedChunk smooth_indexed(const std::vector<Action>& traj, const SmootherConfig& cfg) {
    const KeypointSet keys = select_keypoints(traj, cfg);
    const std::vector<Action> averaged = segment_moving_average(traj, keys, cfg.window);

    SmoothedChunk out;
    std::size_t ki = 0;
    for (int t = 0; t < int(averaged.size()); ++t) {
        out.actions.push_back(averaged[t]);
        out.source_index.push_back(t);
        while (ki < keys.size() && keys[ki] < t) ++ki;
        const bool is_key = ki < keys.size() && keys[ki] == t;
        if (is_key && t >= cfg.skip_prefix) {
            for (int r = 0; r < cfg.hold; ++r) {
                out.actions.push_back(averaged[t]);
                out.source_index.push_back(t);
            }
        }
    }
    out.actions = clamp_dim(out.actions, cfg.clamp_dim, cfg.clamp_min);
    return out;
}

}  // namespace veoact::smoother
