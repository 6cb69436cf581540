#pragma once

#include "voxfract/vec.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace voxfract
{

struct Aabb
{
    Vec3 lo;
    Vec3 hi;

    bool overlaps(const Aabb& o) const
    {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y && lo.z <= o.hi.z &&
               o.lo.z <= hi.z;
    }
};

/// Bounding volume hierarchy over equal-radius spheres centered on points.
///
/// Built top-down by median split along the widest axis. `close_pairs` runs a
/// simultaneous self-traversal of the tree, so the work is proportional to
/// the number of overlapping node pairs rather than n^2.
class SphereBvh
{
  public:
    SphereBvh(std::span<const Vec3> centers, double radius);

    /// All index pairs (i < j) with |c_i - c_j| < 2 * radius, sorted.
    std::vector<std::pair<int, int>> close_pairs() const;

    /// Node visits made by the last close_pairs() call.
    std::size_t visited_nodes() const { return visited_; }

    std::size_t node_count() const { return nodes_.size(); }

  private:
    struct Node
    {
        Aabb box;
        int left = -1;  // child node indices, -1 for a leaf
        int right = -1;
        int first = 0;  // leaf range into order_
        int count = 0;
    };

    int build(int first, int count);
    void self_pairs(int node, std::vector<std::pair<int, int>>& out) const;
    void cross_pairs(int a, int b, std::vector<std::pair<int, int>>& out) const;
    void emit(int i, int j, std::vector<std::pair<int, int>>& out) const;

    std::vector<Vec3> centers_;
    double radius_;
    double cutoff_squared_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    mutable std::size_t visited_ = 0;
};

/// Pairs of points strictly closer than `cutoff`, via the BVH.
std::vector<std::pair<int, int>> find_close_pairs(std::span<const Vec3> points, double cutoff,
                                                  std::size_t* visited_nodes = nullptr);

} // namespace voxfract
