#include "mvtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mvtrack/assignment.hpp"
#include "mvtrack/errors.hpp"

namespace mvtrack {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::set<int> all_frames(const TrajectorySet& a, const TrajectorySet& b) {
    std::set<int> frames;
    for (const auto* set : {&a, &b}) {
        for (const auto& [id, traj] : set->points) {
            for (const auto& [f, p] : traj) frames.insert(f);
        }
        for (const auto& [id, traj] : set->poses) {
            for (const auto& [f, p] : traj) frames.insert(f);
        }
    }
    return frames;
}

// Position distance at one frame; pose sets compare mean over valid joints.
double position_distance(const TrajectorySet& gt, int gt_id, const TrajectorySet& pred,
                         int pred_id, int frame) {
    if (gt.pose_mode() && pred.pose_mode()) {
        const auto& ga = gt.poses.at(gt_id).at(frame);
        const auto& pa = pred.poses.at(pred_id).at(frame);
        const std::size_t joints = std::min(ga.joints.size(), pa.joints.size());
        double sum = 0.0;
        int n = 0;
        for (std::size_t j = 0; j < joints; ++j) {
            if (!ga.valid[j] || !pa.valid[j]) continue;
            sum += (ga.joints[j] - pa.joints[j]).norm();
            ++n;
        }
        return n > 0 ? sum / n : kNan;
    }
    return (gt.points.at(gt_id).at(frame) - pred.points.at(pred_id).at(frame)).norm();
}

}  // namespace

FrameMatch clear_match(const std::map<int, Point3D>& gt,
                       const std::map<int, Point3D>& pred, double threshold,
                       const std::map<int, int>& prev) {
    if (!(threshold > 0.0)) throw Error("matching threshold must be positive");

    FrameMatch out;
    std::set<int> gt_left, pred_left;
    for (const auto& [id, p] : gt) gt_left.insert(id);
    for (const auto& [id, p] : pred) pred_left.insert(id);

    // Keep still-valid previous pairs first (CLEAR continuity rule).
    for (const auto& [gid, pid] : prev) {
        auto g = gt.find(gid);
        auto p = pred.find(pid);
        if (g == gt.end() || p == pred.end()) continue;
        if ((g->second - p->second).norm() > threshold) continue;
        out.matches.emplace_back(gid, pid);
        gt_left.erase(gid);
        pred_left.erase(pid);
    }

    const std::vector<int> gt_ids(gt_left.begin(), gt_left.end());
    const std::vector<int> pred_ids(pred_left.begin(), pred_left.end());
    std::vector<std::vector<double>> cost(gt_ids.size(),
                                          std::vector<double>(pred_ids.size()));
    for (std::size_t i = 0; i < gt_ids.size(); ++i) {
        for (std::size_t j = 0; j < pred_ids.size(); ++j) {
            cost[i][j] = (gt.at(gt_ids[i]) - pred.at(pred_ids[j])).norm();
        }
    }
    const MatchResult rest = solve_assignment(cost, threshold);
    for (const auto& [i, j] : rest.matches) {
        out.matches.emplace_back(gt_ids[i], pred_ids[j]);
    }
    for (int i : rest.unmatched_rows) out.missed_gt.push_back(gt_ids[i]);
    for (int j : rest.unmatched_cols) out.false_pred.push_back(pred_ids[j]);
    std::sort(out.matches.begin(), out.matches.end());
    return out;
}

MotReport evaluate_tracking(const TrajectorySet& gt, const TrajectorySet& pred,
                            double threshold) {
    MotReport report;
    std::map<int, int> last_match;          // gt id -> last matched pred id
    std::map<int, int> prev_frame_match;    // carry-over candidates
    std::map<int, long long> gt_frames, gt_covered;
    double error_sum = 0.0;
    long long error_n = 0;

    for (int frame : all_frames(gt, pred)) {
        std::map<int, Point3D> gt_now, pred_now;
        for (const auto& [id, traj] : gt.points) {
            auto it = traj.find(frame);
            if (it != traj.end()) gt_now.emplace(id, it->second);
        }
        for (const auto& [id, traj] : pred.points) {
            auto it = traj.find(frame);
            if (it != traj.end()) pred_now.emplace(id, it->second);
        }
        report.gt_total += static_cast<long long>(gt_now.size());
        for (const auto& [id, p] : gt_now) gt_frames[id] += 1;

        const FrameMatch fm = clear_match(gt_now, pred_now, threshold, prev_frame_match);
        prev_frame_match.clear();
        for (const auto& [gid, pid] : fm.matches) {
            auto last = last_match.find(gid);
            if (last != last_match.end() && last->second != pid) {
                report.ids += 1;
            }
            last_match[gid] = pid;
            prev_frame_match[gid] = pid;
            gt_covered[gid] += 1;
            error_sum += position_distance(gt, gid, pred, pid, frame);
            error_n += 1;
        }
        report.fn += static_cast<long long>(fm.missed_gt.size());
        report.fp += static_cast<long long>(fm.false_pred.size());
    }

    report.mota = report.gt_total > 0
                      ? 1.0 - static_cast<double>(report.fp + report.fn + report.ids) /
                                  static_cast<double>(report.gt_total)
                      : 1.0;
    report.mean_position_error = error_n > 0 ? error_sum / error_n : 0.0;

    int mt = 0, ml = 0, n_traj = 0;
    for (const auto& [id, total] : gt_frames) {
        if (total == 0) continue;
        ++n_traj;
        const double ratio = static_cast<double>(gt_covered[id]) / total;
        if (ratio > 0.8) ++mt;
        if (ratio < 0.2) ++ml;
    }
    report.mt = n_traj > 0 ? static_cast<double>(mt) / n_traj : 0.0;
    report.ml = n_traj > 0 ? static_cast<double>(ml) / n_traj : 0.0;
    report.idf1 = idf1(gt, pred, threshold);
    return report;
}

double idf1(const TrajectorySet& gt, const TrajectorySet& pred, double threshold) {
    std::vector<int> gt_ids, pred_ids;
    long long gt_total = 0, pred_total = 0;
    for (const auto& [id, traj] : gt.points) {
        gt_ids.push_back(id);
        gt_total += static_cast<long long>(traj.size());
    }
    for (const auto& [id, traj] : pred.points) {
        pred_ids.push_back(id);
        pred_total += static_cast<long long>(traj.size());
    }
    if (gt_total + pred_total == 0) return 1.0;
    if (gt_ids.empty() || pred_ids.empty()) return 0.0;

    // Overlap = frames where both exist and lie within the gate; the global
    // bijection maximizes total overlap.
    std::vector<std::vector<double>> cost(gt_ids.size(),
                                          std::vector<double>(pred_ids.size(), 0.0));
    for (std::size_t i = 0; i < gt_ids.size(); ++i) {
        const auto& gtraj = gt.points.at(gt_ids[i]);
        for (std::size_t j = 0; j < pred_ids.size(); ++j) {
            const auto& ptraj = pred.points.at(pred_ids[j]);
            long long overlap = 0;
            for (const auto& [f, p] : gtraj) {
                auto it = ptraj.find(f);
                if (it != ptraj.end() && (p - it->second).norm() <= threshold) ++overlap;
            }
            cost[i][j] = -static_cast<double>(overlap);
        }
    }
    const MatchResult match = solve_assignment(cost);
    long long idtp = 0;
    for (const auto& [i, j] : match.matches) {
        idtp += static_cast<long long>(-cost[i][j]);
    }
    const long long idfp = pred_total - idtp;
    const long long idfn = gt_total - idtp;
    return 2.0 * static_cast<double>(idtp) /
           static_cast<double>(2 * idtp + idfp + idfn);
}

PcpReport pcp(const TrajectorySet& gt, const TrajectorySet& pred,
              const std::vector<std::pair<int, int>>& limbs, double alpha) {
    PcpReport report;
    std::map<int, long long> evaluated, correct;

    for (int frame : all_frames(gt, pred)) {
        std::vector<int> gt_ids, pred_ids;
        for (const auto& [id, traj] : gt.poses) {
            if (traj.count(frame)) gt_ids.push_back(id);
        }
        for (const auto& [id, traj] : pred.poses) {
            if (traj.count(frame)) pred_ids.push_back(id);
        }
        if (gt_ids.empty()) continue;

        std::vector<std::vector<double>> cost(gt_ids.size(),
                                              std::vector<double>(pred_ids.size()));
        for (std::size_t i = 0; i < gt_ids.size(); ++i) {
            for (std::size_t j = 0; j < pred_ids.size(); ++j) {
                const double d =
                    position_distance(gt, gt_ids[i], pred, pred_ids[j], frame);
                cost[i][j] = std::isnan(d) ? kNan : d;
            }
        }
        const MatchResult match = solve_assignment(cost);
        std::map<int, int> gt_to_pred;
        for (const auto& [i, j] : match.matches) gt_to_pred[gt_ids[i]] = pred_ids[j];

        for (int gid : gt_ids) {
            const Pose3D& gpose = gt.poses.at(gid).at(frame);
            const Pose3D* ppose = nullptr;
            auto it = gt_to_pred.find(gid);
            if (it != gt_to_pred.end()) ppose = &pred.poses.at(it->second).at(frame);

            for (const auto& [a, b] : limbs) {
                const auto ja = static_cast<std::size_t>(a);
                const auto jb = static_cast<std::size_t>(b);
                if (ja >= gpose.joints.size() || jb >= gpose.joints.size()) continue;
                if (!gpose.valid[ja] || !gpose.valid[jb]) continue;
                evaluated[gid] += 1;
                if (!ppose || ja >= ppose->joints.size() || jb >= ppose->joints.size() ||
                    !ppose->valid[ja] || !ppose->valid[jb]) {
                    continue;  // missed part counts as incorrect
                }
                const double limb_len = (gpose.joints[ja] - gpose.joints[jb]).norm();
                const double tol = alpha * limb_len;
                if ((gpose.joints[ja] - ppose->joints[ja]).norm() <= tol &&
                    (gpose.joints[jb] - ppose->joints[jb]).norm() <= tol) {
                    correct[gid] += 1;
                }
            }
        }
    }

    double sum = 0.0;
    int n = 0;
    for (const auto& [gid, total] : evaluated) {
        const double ratio =
            total > 0 ? static_cast<double>(correct[gid]) / static_cast<double>(total) : 0.0;
        report.per_actor[gid] = ratio;
        sum += ratio;
        ++n;
    }
    report.average = n > 0 ? sum / n : 0.0;
    return report;
}

const std::vector<std::pair<int, int>>& default_limbs() {
    // 15-joint skeleton: 0 head, 1 neck, 2/3 shoulders, 4/5 elbows,
    // 6/7 wrists, 8 pelvis, 9/10 hips, 11/12 knees, 13/14 ankles.
    static const std::vector<std::pair<int, int>> limbs = {
        {0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6}, {5, 7},
        {1, 8}, {8, 9}, {8, 10}, {9, 11}, {10, 12}, {11, 13}, {12, 14}};
    return limbs;
}

}  // namespace mvtrack
