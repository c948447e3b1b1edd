// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paf/error.hpp"
#include "paf/geometry.hpp"
#include "paf/topology.hpp"

namespace paf {

// One annotated keypoint. Positions may be sub-pixel. A keypoint outside the
// grid must be flagged out_of_frame explicitly; loaders set the flag when the
// coordinates say so.
struct Keypoint {
    Vec2 pos;
    bool out_of_frame = false;
};

// One person: an optional keypoint per part, indexed like topology.parts.
struct PersonAnnotation {
    std::vector<std::optional<Keypoint>> parts;

    int annotated_count() const {
        int n = 0;
        for (const auto& p : parts) n += p.has_value();
        return n;
    }
};

// Ground truth for one image: known skeletons on a pixel grid.
struct Scene {
    int width = 0;
    int height = 0;
    std::vector<PersonAnnotation> people;
};

inline bool in_bounds(Vec2 p, int width, int height) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height;
}

// Checks per-person part counts against the topology and that every present
// position is inside the grid unless flagged out-of-frame.
inline void validate_scene(const Scene& scene, const SkeletonTopology& topo) {
    for (size_t i = 0; i < scene.people.size(); ++i) {
        const auto& person = scene.people[i];
        if (int(person.parts.size()) != topo.part_count())
            throw error(errc::dim_mismatch, "person " + std::to_string(i) + " has " +
                                                std::to_string(person.parts.size()) + " part slots, topology has " +
                                                std::to_string(topo.part_count()));
        for (int j = 0; j < topo.part_count(); ++j) {
            const auto& kp = person.parts[j];
            if (kp && !kp->out_of_frame && !in_bounds(kp->pos, scene.width, scene.height))
                throw error(errc::dim_mismatch, "person " + std::to_string(i) + " part '" + topo.parts[j] +
                                                    "' lies outside the grid and is not flagged out-of-frame");
        }
    }
}

}  // namespace paf
