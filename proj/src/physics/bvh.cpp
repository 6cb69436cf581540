#include "voxfract/physics/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace voxfract
{

namespace
{

constexpr int kLeafSize = 4;

} // namespace

SphereBvh::SphereBvh(std::span<const Vec3> centers, double radius)
    : centers_(centers.begin(), centers.end()), radius_(radius), cutoff_squared_(4.0 * radius * radius)
{
    order_.resize(centers_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!centers_.empty())
    {
        nodes_.reserve(2 * centers_.size() / kLeafSize + 2);
        build(0, static_cast<int>(centers_.size()));
    }
}

int SphereBvh::build(int first, int count)
{
    Aabb box{centers_[static_cast<std::size_t>(order_[static_cast<std::size_t>(first)])],
             centers_[static_cast<std::size_t>(order_[static_cast<std::size_t>(first)])]};
    for (int k = first; k < first + count; ++k)
    {
        const Vec3& c = centers_[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])];
        box.lo = {std::min(box.lo.x, c.x), std::min(box.lo.y, c.y), std::min(box.lo.z, c.z)};
        box.hi = {std::max(box.hi.x, c.x), std::max(box.hi.y, c.y), std::max(box.hi.z, c.z)};
    }
    const Vec3 extent = box.hi - box.lo;
    box.lo -= Vec3{radius_, radius_, radius_};
    box.hi += Vec3{radius_, radius_, radius_};

    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back({box, -1, -1, first, count});
    if (count <= kLeafSize)
        return index;

    const int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
    const int half = count / 2;
    auto begin = order_.begin() + first;
    std::nth_element(begin, begin + half, begin + count, [&](int a, int b) {
        const double ka = centers_[static_cast<std::size_t>(a)][axis];
        const double kb = centers_[static_cast<std::size_t>(b)][axis];
        return ka < kb || (ka == kb && a < b);
    });
    const int left = build(first, half);
    const int right = build(first + half, count - half);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

void SphereBvh::emit(int i, int j, std::vector<std::pair<int, int>>& out) const
{
    const Vec3 d = centers_[static_cast<std::size_t>(i)] - centers_[static_cast<std::size_t>(j)];
    if (norm_squared(d) < cutoff_squared_)
        out.emplace_back(std::min(i, j), std::max(i, j));
}

void SphereBvh::self_pairs(int node, std::vector<std::pair<int, int>>& out) const
{
    ++visited_;
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.left < 0)
    {
        for (int a = n.first; a < n.first + n.count; ++a)
            for (int b = a + 1; b < n.first + n.count; ++b)
                emit(order_[static_cast<std::size_t>(a)], order_[static_cast<std::size_t>(b)], out);
        return;
    }
    self_pairs(n.left, out);
    self_pairs(n.right, out);
    cross_pairs(n.left, n.right, out);
}

void SphereBvh::cross_pairs(int a, int b, std::vector<std::pair<int, int>>& out) const
{
    ++visited_;
    const Node& na = nodes_[static_cast<std::size_t>(a)];
    const Node& nb = nodes_[static_cast<std::size_t>(b)];
    if (!na.box.overlaps(nb.box))
        return;
    const bool leaf_a = na.left < 0;
    const bool leaf_b = nb.left < 0;
    if (leaf_a && leaf_b)
    {
        for (int p = na.first; p < na.first + na.count; ++p)
            for (int q = nb.first; q < nb.first + nb.count; ++q)
                emit(order_[static_cast<std::size_t>(p)], order_[static_cast<std::size_t>(q)], out);
        return;
    }
    if (leaf_b || (!leaf_a && na.count >= nb.count))
    {
        cross_pairs(na.left, b, out);
        cross_pairs(na.right, b, out);
    }
    else
    {
        cross_pairs(a, nb.left, out);
        cross_pairs(a, nb.right, out);
    }
}

std::vector<std::pair<int, int>> SphereBvh::close_pairs() const
{
    visited_ = 0;
    std::vector<std::pair<int, int>> out;
    if (!nodes_.empty())
        self_pairs(0, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, int>> find_close_pairs(std::span<const Vec3> points, double cutoff,
                                                  std::size_t* visited_nodes)
{
    SphereBvh bvh(points, 0.5 * cutoff);
    auto pairs = bvh.close_pairs();
    if (visited_nodes)
        *visited_nodes = bvh.visited_nodes();
    return pairs;
}

} // namespace voxfract
