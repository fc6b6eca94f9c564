#include "mvtrack/association.hpp"

#include <algorithm>
#include <numeric>

#include "mvtrack/errors.hpp"

namespace mvtrack {

std::vector<double> pairwise_set_distance(const Tracklet2D& a, const Tracklet2D& b,
                                          const CameraRig& rig, bool pose_mode) {
    std::vector<double> set;
    if (a.camera_id == b.camera_id) {
        throw Error("pairwise_set_distance requires distinct cameras");
    }
    for (const auto& [frame, obs_a] : a.obs) {
        const Observation2D* obs_b = b.at(frame);
        if (!obs_b) continue;
        set.push_back(rig.pair_distance(obs_a, *obs_b, pose_mode));
    }
    return set;
}

TrackletDistance tracklet_distance(const Tracklet2D& a, const Tracklet2D& b,
                                   const CameraRig& rig, bool pose_mode) {
    bool overlap = false;
    for (const auto& [frame, obs] : a.obs) {
        if (b.obs.count(frame)) {
            overlap = true;
            break;
        }
    }
    if (!overlap) return TrackletDistance::incalculable();
    if (a.camera_id == b.camera_id) return TrackletDistance::forbidden();

    const std::vector<double> set = pairwise_set_distance(a, b, rig, pose_mode);
    if (set.empty()) {
        // Overlapping frames but no measurable pair (e.g. no common joints
        // anywhere): nothing to average, treat as incalculable.
        return TrackletDistance::incalculable();
    }
    const double mean = std::accumulate(set.begin(), set.end(), 0.0) /
                        static_cast<double>(set.size());
    return TrackletDistance::finite(mean);
}

std::vector<std::vector<TrackletDistance>> distance_matrix(
    const std::vector<Tracklet2D>& tracklets, const CameraRig& rig, bool pose_mode) {
    const std::size_t n = tracklets.size();
    std::vector<std::vector<TrackletDistance>> d(
        n, std::vector<TrackletDistance>(n, TrackletDistance::incalculable()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = tracklet_distance(tracklets[i], tracklets[j], rig, pose_mode);
        }
    }
    return d;
}

TrackletDistance pdnc_combine(const TrackletDistance& a, const TrackletDistance& b) {
    if (a.is_incalculable() && b.is_incalculable()) return TrackletDistance::incalculable();
    if (a.is_incalculable()) return b;
    if (b.is_incalculable()) return a;
    // Both calculable: complete-linkage max, with forbidden dominating.
    if (a.is_forbidden() || b.is_forbidden()) return TrackletDistance::forbidden();
    return TrackletDistance::finite(std::max(a.value, b.value));
}

ClusterSet pdnc(const std::vector<std::vector<TrackletDistance>>& distances,
                double lambda) {
    const int n = static_cast<int>(distances.size());
    for (const auto& row : distances) {
        if (static_cast<int>(row.size()) != n) throw Error("distance matrix not square");
    }

    // Clusters live in the slot of their smallest member index.
    std::vector<std::vector<int>> members(n);
    std::vector<char> active(n, 1);
    std::vector<std::vector<TrackletDistance>> d = distances;
    for (int i = 0; i < n; ++i) members[i] = {i};

    ClusterSet out;
    while (true) {
        int best_i = -1, best_j = -1;
        double best = lambda;
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (d[i][j].is_finite() && d[i][j].value < best) {
                    best = d[i][j].value;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) break;

        out.audit.push_back({best_i, best_j, d[best_i][best_j].value});
        for (int q = 0; q < n; ++q) {
            if (!active[q] || q == best_i || q == best_j) continue;
            d[best_i][q] = d[q][best_i] = pdnc_combine(d[best_i][q], d[best_j][q]);
        }
        auto& dst = members[best_i];
        dst.insert(dst.end(), members[best_j].begin(), members[best_j].end());
        std::sort(dst.begin(), dst.end());
        members[best_j].clear();
        active[best_j] = 0;
    }

    std::vector<int> live;
    for (int i = 0; i < n; ++i) {
        if (active[i]) live.push_back(i);
    }
    out.clusters.reserve(live.size());
    for (int i : live) out.clusters.push_back(members[i]);
    out.distances.assign(live.size(), std::vector<TrackletDistance>(
                                          live.size(), TrackletDistance::incalculable()));
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = 0; b < live.size(); ++b) {
            if (a != b) out.distances[a][b] = d[live[a]][live[b]];
        }
    }
    return out;
}

}  // namespace mvtrack
