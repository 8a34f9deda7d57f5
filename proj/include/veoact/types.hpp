#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace veoact {

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const = default;

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Absolute end-effector target plus commanded gripper aperture.
struct Action {
    Vec3 pose;
    double aperture{1.0};

    std::array<double, 4> flat() const { return {pose.x, pose.y, pose.z, aperture}; }
    static Action from_flat(const std::array<double, 4>& v) {
        return {{v[0], v[1], v[2]}, v[3]};
    }
    bool operator==(const Action& o) const = default;
};

inline constexpr int kActDim = 4;

// Proprioceptive slice of an observation: ee pose, aperture, held flag.
struct RobotState {
    Vec3 ee;
    double aperture{1.0};
    bool held{false};

    std::array<double, 5> flat() const {
        return {ee.x, ee.y, ee.z, aperture, held ? 1.0 : 0.0};
    }
    bool operator==(const RobotState& o) const = default;
};

inline constexpr int kRobotStateDim = 5;

// Global-view observation vector. Fixed layout for a given configuration:
//
//   [0..2]  ee xyz
//   [3]     aperture
//   [4]     held flag
//   then max_objects slots of  (kind code, x, y, z, present flag)
//   then max_containers slots of  (x, y, z, present flag)
//
// Absent slots are zero-filled with present flag 0.
using Observation = std::vector<double>;

struct ObservationLayout {
    int max_objects{6};
    int max_containers{2};

    int width() const { return 5 + 5 * max_objects + 4 * max_containers; }
    int object_base(int i) const { return 5 + 5 * i; }
    int container_base(int j) const { return 5 + 5 * max_objects + 4 * j; }

    bool object_present(const Observation& o, int i) const {
        return o[object_base(i) + 4] > 0.5;
    }
    bool container_present(const Observation& o, int j) const {
        return o[container_base(j) + 3] > 0.5;
    }
    Vec3 object_pos(const Observation& o, int i) const {
        const int b = object_base(i);
        return {o[b + 1], o[b + 2], o[b + 3]};
    }
    int object_kind(const Observation& o, int i) const {
        return int(o[object_base(i)]);
    }
    Vec3 container_pos(const Observation& o, int j) const {
        const int b = container_base(j);
        return {o[b], o[b + 1], o[b + 2]};
    }

    RobotState proprio(const Observation& o) const {
        return RobotState{{o[0], o[1], o[2]}, o[3], o[4] > 0.5};
    }

    // Indices of continuous (pose-bearing) entries: ee xyz, aperture, and the
    // xyz of present slots. Kind codes, the held flag and present flags are
    // categorical and never perturbed by noise.
    std::vector<int> perturbable_indices(const Observation& o) const {
        std::vector<int> idx = {0, 1, 2, 3};
        for (int i = 0; i < max_objects; ++i) {
            if (!object_present(o, i)) continue;
            const int b = object_base(i);
            idx.push_back(b + 1);
            idx.push_back(b + 2);
            idx.push_back(b + 3);
        }
        for (int j = 0; j < max_containers; ++j) {
            if (!container_present(o, j)) continue;
            const int b = container_base(j);
            idx.push_back(b);
            idx.push_back(b + 1);
            idx.push_back(b + 2);
        }
        return idx;
    }

    bool operator==(const ObservationLayout& o) const = default;
};

}  // namespace veoact
