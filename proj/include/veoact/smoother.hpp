#pragma once

#include <vector>

#include "veoact/types.hpp"

// Action-chunk post-processing: recursive-extrema keypoint selection,
// segment-wise centered moving average that preserves keypoints, keypoint
// hold extension, and a per-dimension minimum clamp.
namespace veoact::smoother {

struct SmootherConfig {
    int rounds{2};                        // R
    int min_segment{5};                   // L_min, >= 2
    std::vector<int> union_dims{0, 1, 2}; // D_u, action dims tracked for extrema
    int window{5};                        // w, odd
    int hold{3};                          // H
    int skip_prefix{5};                   // S
    int clamp_dim{2};                     // d_c
    double clamp_min{0.13};               // m

    static SmootherConfig neutral();
};

// Sorted, unique, always contains 0 and T-1.
using KeypointSet = std::vector<int>;

KeypointSet select_keypoints(const std::vector<Action>& traj, const SmootherConfig& cfg);

// Centered moving average of the raw values inside each consecutive keypoint
// interval; keypoints and endpoints pass through bit-unchanged.
std::vector<Action> segment_moving_average(const std::vector<Action>& traj,
                                           const KeypointSet& keypoints, int window);

// Repeats each keypoint action (index >= skip_prefix) `hold` extra times.
// Output length = T + hold * |{k in K : k >= skip_prefix}|.
std::vector<Action> hold_extend(const std::vector<Action>& traj,
                                const KeypointSet& keypoints, int hold,
                                int skip_prefix);

std::vector<Action> clamp_dim(const std::vector<Action>& traj, int dim, double min_value);

// Full pipeline: select_keypoints -> segment_moving_average -> hold_extend ->
// clamp_dim.
std::vector<Action> smooth(const std::vector<Action>& traj, const SmootherConfig& cfg);

// As smooth(), but also reports, per output index, the input index the value
// came from (holds repeat their keypoint's index). Executors use this to keep
// per-step side channels aligned with the stretched chunk.
struct SmoothedChunk {
    std::vector<Action> actions;
    std::vector<int> source_index;  // non-decreasing, in [0, T)
};

SmoothedChunk smooth_indexed(const std::vector<Action>& traj, const SmootherConfig& cfg);

}  // namespace veoact::smoother
