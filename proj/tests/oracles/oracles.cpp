#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace oracle
{

std::vector<Voxel> flood_fill_lcc(const OccupancyGrid& grid)
{
    const int m = grid.extent();
    std::set<Coord> seen;
    std::vector<Coord> best;
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
            {
                const Coord start{x, y, z};
                if (!grid.occupied(start) || seen.count(start))
                    continue;
                std::vector<Coord> comp;
                std::deque<Coord> queue{start};
                seen.insert(start);
                while (!queue.empty())
                {
                    const Coord c = queue.front();
                    queue.pop_front();
                    comp.push_back(c);
                    const Coord next[6] = {{c.x + 1, c.y, c.z}, {c.x - 1, c.y, c.z}, {c.x, c.y + 1, c.z},
                                           {c.x, c.y - 1, c.z}, {c.x, c.y, c.z + 1}, {c.x, c.y, c.z - 1}};
                    for (const Coord& n : next)
                        if (grid.contains(n) && grid.occupied(n) && !seen.count(n))
                        {
                            seen.insert(n);
                            queue.push_back(n);
                        }
                }
                std::sort(comp.begin(), comp.end());
                // Cells are scanned in lexicographic order, so the first
                // component of a given size has the smallest minimum cell.
                if (comp.size() > best.size())
                    best = comp;
            }
    std::vector<Voxel> out;
    for (const Coord& c : best)
        out.push_back({c, grid.material(c)});
    return out;
}

std::vector<Voxel> fractal_by_digits(const voxfract::Polycube& basal, int level)
{
    const int m = basal.extent();
    int side = 1;
    for (int k = 0; k <= level; ++k)
        side *= m;
    std::vector<Voxel> out;
    for (int x = 0; x < side; ++x)
        for (int y = 0; y < side; ++y)
            for (int z = 0; z < side; ++z)
            {
                bool inside = true;
                int px = x, py = y, pz = z;
                for (int k = 0; k <= level && inside; ++k)
                {
                    inside = basal.contains({px % m, py % m, pz % m});
                    px /= m;
                    py /= m;
                    pz /= m;
                }
                if (inside)
                    out.push_back({{x, y, z}, basal.material_at({x % m, y % m, z % m})});
            }
    return out;
}

std::vector<Voxel> control_by_digits(const voxfract::Polycube& basal, const voxfract::Polycube& middle,
                                     const voxfract::Polycube* top)
{
    const int m = basal.extent();
    const int side = top ? m * m * m : m * m;
    std::vector<Voxel> out;
    for (int x = 0; x < side; ++x)
        for (int y = 0; y < side; ++y)
            for (int z = 0; z < side; ++z)
            {
                const Coord low{x % m, y % m, z % m};
                const Coord mid{(x / m) % m, (y / m) % m, (z / m) % m};
                const Coord high{x / (m * m), y / (m * m), z / (m * m)};
                if (basal.contains(low) && middle.contains(mid) && (!top || top->contains(high)))
                    out.push_back({{x, y, z}, basal.material_at(low)});
            }
    return out;
}

namespace
{

double activate(voxfract::Activation a, double s)
{
    using voxfract::Activation;
    switch (a)
    {
    case Activation::Sine:
        return std::sin(s);
    case Activation::Abs:
        return std::fabs(s);
    case Activation::Square:
        return s * s;
    case Activation::Sqrt:
        return std::sqrt(std::fabs(s));
    case Activation::Step:
        return s >= 0.0 ? 1.0 : -1.0;
    }
    return 0.0;
}

} // namespace

voxfract::CppnOutput interpret_cppn(const voxfract::CppnGenome& g, double x, double y, double z)
{
    std::map<int, double> memo;
    std::function<double(int)> value = [&](int id) -> double {
        if (id < voxfract::CppnGenome::kInputCount)
            return std::array<double, 4>{x, y, z, 1.0}[static_cast<std::size_t>(id)];
        if (auto it = memo.find(id); it != memo.end())
            return it->second;
        const voxfract::CppnNode* node = nullptr;
        for (const auto& n : g.nodes)
            if (n.id == id)
                node = &n;
        double s = node->bias;
        for (const auto& e : g.edges)
            if (e.target == id)
                s += e.weight * value(e.source);
        const double v = node->kind == voxfract::NodeKind::Output ? std::sin(s) : activate(node->activation, s);
        memo[id] = v;
        return v;
    };
    return {value(voxfract::CppnGenome::kPresenceOutput), value(voxfract::CppnGenome::kMaterialOutput)};
}

std::vector<std::pair<int, int>> close_pairs(std::span<const voxfract::Vec3> points, double cutoff)
{
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
        {
            const double dx = points[i].x - points[j].x;
            const double dy = points[i].y - points[j].y;
            const double dz = points[i].z - points[j].z;
            if (std::sqrt(dx * dx + dy * dy + dz * dz) < cutoff)
                out.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return out;
}

double rank_sum_p_by_enumeration(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size(), na = a.size();
    // Twice the Mann-Whitney U of a split (pairs won count 2, ties 1).
    auto twice_u = [&](const std::vector<bool>& in_a) {
        long u = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (in_a[i] && !in_a[j])
                    u += pooled[i] > pooled[j] ? 2 : (pooled[i] == pooled[j] ? 1 : 0);
        return u;
    };
    const long center = static_cast<long>(na * b.size());
    std::vector<bool> observed(n, false);
    std::fill(observed.begin(), observed.begin() + static_cast<long>(na), true);
    const long dev = std::labs(twice_u(observed) - center);

    std::vector<bool> in_a(n, false);
    std::fill(in_a.end() - static_cast<long>(na), in_a.end(), true);
    long total = 0, extreme = 0;
    do
    {
        ++total;
        if (std::labs(twice_u(in_a) - center) >= dev)
            ++extreme;
    } while (std::next_permutation(in_a.begin(), in_a.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

std::size_t adjacent_pairs(std::span<const Voxel> voxels)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < voxels.size(); ++i)
        for (std::size_t j = i + 1; j < voxels.size(); ++j)
        {
            const Coord a = voxels[i].at, b = voxels[j].at;
            const int d = std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
            if (d == 1)
                ++count;
        }
    return count;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace oracle
