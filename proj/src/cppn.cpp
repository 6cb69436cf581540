#include "voxfract/cppn.hpp"

#include "voxfract/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>

namespace voxfract
{

double apply_activation(Activation a, double x)
{
    switch (a)
    {
    case Activation::Sine:
        return std::sin(x);
    case Activation::Abs:
        return std::abs(x);
    case Activation::Square:
        return x * x;
    case Activation::Sqrt:
        return std::sqrt(std::abs(x));
    case Activation::Step:
        return x < 0.0 ? -1.0 : 1.0;
    }
    return 0.0;
}

std::string_view to_string(Activation a)
{
    switch (a)
    {
    case Activation::Sine:
        return "sine";
    case Activation::Abs:
        return "abs";
    case Activation::Square:
        return "square";
    case Activation::Sqrt:
        return "sqrt";
    case Activation::Step:
        return "step";
    }
    return "?";
}

std::optional<Activation> parse_activation(std::string_view s)
{
    for (Activation a : kActivations)
        if (to_string(a) == s)
            return a;
    return std::nullopt;
}

std::string_view to_string(MutationKind k)
{
    switch (k)
    {
    case MutationKind::AddNode:
        return "add_node";
    case MutationKind::RemoveNode:
        return "remove_node";
    case MutationKind::AddEdge:
        return "add_edge";
    case MutationKind::RemoveEdge:
        return "remove_edge";
    case MutationKind::Perturb:
        return "perturb";
    }
    return "?";
}

namespace
{

std::string_view kind_name(NodeKind k)
{
    switch (k)
    {
    case NodeKind::Input:
        return "input";
    case NodeKind::Hidden:
        return "hidden";
    case NodeKind::Output:
        return "output";
    }
    return "?";
}

NodeKind parse_kind(const std::string& s)
{
    if (s == "input")
        return NodeKind::Input;
    if (s == "hidden")
        return NodeKind::Hidden;
    if (s == "output")
        return NodeKind::Output;
    throw InvalidGenome("unknown node kind '" + s + "'");
}

bool has_edge(const CppnGenome& g, int source, int target)
{
    return std::any_of(g.edges.begin(), g.edges.end(),
                       [&](const CppnEdge& e) { return e.source == source && e.target == target; });
}

// Nodes reachable from `start` following edges forward.
std::set<int> reachable_from(const CppnGenome& g, const std::vector<int>& start)
{
    std::set<int> seen(start.begin(), start.end());
    std::vector<int> stack = start;
    while (!stack.empty())
    {
        const int n = stack.back();
        stack.pop_back();
        for (const auto& e : g.edges)
            if (e.source == n && seen.insert(e.target).second)
                stack.push_back(e.target);
    }
    return seen;
}

Activation random_activation(Rng& rng) { return kActivations[rng.index(kActivations.size())]; }

std::optional<CppnGenome> add_node(const CppnGenome& parent, Rng& rng)
{
    if (parent.edges.empty())
        return std::nullopt;
    CppnGenome g = parent;
    const std::size_t which = rng.index(g.edges.size());
    const CppnEdge split = g.edges[which];
    g.edges.erase(g.edges.begin() + static_cast<long>(which));
    const int id = g.next_id++;
    g.nodes.push_back({id, NodeKind::Hidden, random_activation(rng), 0.0});
    g.edges.push_back({split.source, id, 1.0});
    g.edges.push_back({id, split.target, split.weight});
    return g;
}

std::optional<CppnGenome> remove_node(const CppnGenome& parent, Rng& rng)
{
    std::vector<int> hidden;
    for (const auto& n : parent.nodes)
        if (n.kind == NodeKind::Hidden)
            hidden.push_back(n.id);
    if (hidden.empty())
        return std::nullopt;
    const int victim = hidden[rng.index(hidden.size())];

    CppnGenome g = parent;
    std::vector<CppnEdge> incoming;
    std::vector<CppnEdge> outgoing;
    for (const auto& e : g.edges)
    {
        if (e.target == victim)
            incoming.push_back(e);
        if (e.source == victim)
            outgoing.push_back(e);
    }
    std::erase_if(g.edges, [&](const CppnEdge& e) { return e.source == victim || e.target == victim; });
    std::erase_if(g.nodes, [&](const CppnNode& n) { return n.id == victim; });
    // Bridge every path that ran through the removed node.
    for (const auto& in : incoming)
        for (const auto& out : outgoing)
            if (!has_edge(g, in.source, out.target))
                g.edges.push_back({in.source, out.target, in.weight * out.weight});
    return g;
}

std::optional<CppnGenome> add_edge(const CppnGenome& parent, Rng& rng)
{
    std::vector<std::pair<int, int>> candidates;
    for (const auto& u : parent.nodes)
    {
        if (u.kind == NodeKind::Output)
            continue;
        for (const auto& v : parent.nodes)
        {
            if (v.kind == NodeKind::Input || v.id == u.id || has_edge(parent, u.id, v.id))
                continue;
            // u -> v closes a cycle iff v already reaches u.
            if (reachable_from(parent, {v.id}).count(u.id))
                continue;
            candidates.emplace_back(u.id, v.id);
        }
    }
    if (candidates.empty())
        return std::nullopt;
    const auto [s, t] = candidates[rng.index(candidates.size())];
    CppnGenome g = parent;
    g.edges.push_back({s, t, rng.uniform(-1.0, 1.0)});
    return g;
}

std::optional<CppnGenome> remove_edge(const CppnGenome& parent, Rng& rng)
{
    if (parent.edges.empty())
        return std::nullopt;
    CppnGenome g = parent;
    g.edges.erase(g.edges.begin() + static_cast<long>(rng.index(g.edges.size())));
    return g;
}

CppnGenome perturb(const CppnGenome& parent, Rng& rng, double sigma)
{
    CppnGenome g = parent;
    std::vector<double*> params;
    for (auto& e : g.edges)
        params.push_back(&e.weight);
    for (auto& n : g.nodes)
        if (n.kind != NodeKind::Input)
            params.push_back(&n.bias);
    double* target = params[rng.index(params.size())];
    *target += sigma * rng.normal();
    return g;
}

} // namespace

CppnGenome CppnGenome::minimal()
{
    CppnGenome g;
    for (int i = 0; i < kInputCount; ++i)
        g.nodes.push_back({i, NodeKind::Input, Activation::Sine, 0.0});
    g.nodes.push_back({kPresenceOutput, NodeKind::Output, Activation::Sine, 0.0});
    g.nodes.push_back({kMaterialOutput, NodeKind::Output, Activation::Sine, 0.0});
    return g;
}

const CppnNode* CppnGenome::find_node(int id) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [id](const CppnNode& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

std::size_t CppnGenome::hidden_count() const
{
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const CppnNode& n) { return n.kind == NodeKind::Hidden; }));
}

std::vector<int> CppnGenome::topological_order() const
{
    std::unordered_map<int, int> indegree;
    for (const auto& n : nodes)
        indegree[n.id] = 0;
    for (const auto& e : edges)
        ++indegree[e.target];

    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (const auto& n : nodes)
        if (indegree[n.id] == 0)
            ready.push(n.id);

    std::vector<int> order;
    order.reserve(nodes.size());
    while (!ready.empty())
    {
        const int id = ready.top();
        ready.pop();
        order.push_back(id);
        for (const auto& e : edges)
            if (e.source == id && --indegree[e.target] == 0)
                ready.push(e.target);
    }
    if (order.size() != nodes.size())
        throw InvalidGenome("CPPN graph contains a cycle");
    return order;
}

void CppnGenome::validate() const
{
    int inputs = 0;
    int outputs = 0;
    std::set<int> ids;
    for (const auto& n : nodes)
    {
        if (!ids.insert(n.id).second)
            throw InvalidGenome("duplicate node id " + std::to_string(n.id));
        if (!std::isfinite(n.bias))
            throw InvalidGenome("non-finite bias");
        if (n.kind == NodeKind::Input)
        {
            if (n.id < 0 || n.id >= kInputCount)
                throw InvalidGenome("input node with unexpected id");
            ++inputs;
        }
        else if (n.kind == NodeKind::Output)
        {
            if (n.id != kPresenceOutput && n.id != kMaterialOutput)
                throw InvalidGenome("output node with unexpected id");
            ++outputs;
        }
        else if (n.id < kFirstHiddenId || n.id >= next_id)
            throw InvalidGenome("hidden node id out of range");
    }
    if (inputs != kInputCount || outputs != kOutputCount)
        throw InvalidGenome("genome must have 4 inputs and 2 outputs");

    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges)
    {
        const CppnNode* s = find_node(e.source);
        const CppnNode* t = find_node(e.target);
        if (!s || !t)
            throw InvalidGenome("edge references a missing node");
        if (t->kind == NodeKind::Input)
            throw InvalidGenome("edge into an input node");
        if (s->kind == NodeKind::Output)
            throw InvalidGenome("edge out of an output node");
        if (e.source == e.target)
            throw InvalidGenome("self loop");
        if (!std::isfinite(e.weight))
            throw InvalidGenome("non-finite weight");
        if (!seen.insert({e.source, e.target}).second)
            throw InvalidGenome("duplicate edge");
    }
    (void)topological_order();
}

bool CppnGenome::outputs_connected() const
{
    std::vector<int> inputs;
    for (int i = 0; i < kInputCount; ++i)
        inputs.push_back(i);
    const auto reach = reachable_from(*this, inputs);
    return reach.count(kPresenceOutput) && reach.count(kMaterialOutput);
}

CppnEvaluator::CppnEvaluator(const CppnGenome& genome)
{
    const auto order = genome.topological_order();
    std::unordered_map<int, std::size_t> slot;
    for (std::size_t i = 0; i < order.size(); ++i)
        slot[order[i]] = i;
    slot_count_ = order.size();
    presence_slot_ = slot.at(CppnGenome::kPresenceOutput);
    material_slot_ = slot.at(CppnGenome::kMaterialOutput);

    for (int id : order)
    {
        const CppnNode& n = *genome.find_node(id);
        Step st{slot[id], n.kind, n.activation, n.bias, n.kind == NodeKind::Input ? id : -1, inputs_.size(), 0};
        for (const auto& e : genome.edges)
            if (e.target == id)
            {
                inputs_.push_back({slot[e.source], e.weight});
                ++st.input_count;
            }
        steps_.push_back(st);
    }
}

CppnOutput CppnEvaluator::operator()(double x, double y, double z) const
{
    const double in[CppnGenome::kInputCount] = {x, y, z, 1.0};
    std::vector<double> value(slot_count_, 0.0);
    for (const Step& st : steps_)
    {
        if (st.kind == NodeKind::Input)
        {
            value[st.slot] = in[st.input_index];
            continue;
        }
        double sum = st.bias;
        for (std::size_t k = 0; k < st.input_count; ++k)
        {
            const Input& inp = inputs_[st.first_input + k];
            sum += inp.weight * value[inp.slot];
        }
        value[st.slot] = st.kind == NodeKind::Output ? std::sin(sum) : apply_activation(st.activation, sum);
    }
    return {value[presence_slot_], value[material_slot_]};
}

CppnOutput evaluate(const CppnGenome& genome, double x, double y, double z)
{
    return CppnEvaluator(genome)(x, y, z);
}

double normalized_coordinate(int i, int m)
{
    if (m <= 1)
        return 0.0;
    return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m - 1);
}

OccupancyGrid paint(const CppnGenome& genome, int m)
{
    if (m < 1)
        throw std::invalid_argument("workspace extent must be >= 1");
    const CppnEvaluator eval(genome);
    OccupancyGrid grid(m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
            {
                const auto out = eval(normalized_coordinate(x, m), normalized_coordinate(y, m),
                                      normalized_coordinate(z, m));
                if (out.presence > 0.0)
                    grid.set({x, y, z}, out.material > 0.0 ? Material::PhaseA : Material::PhaseB);
            }
    return grid;
}

Polycube decode(const CppnGenome& genome, int m, double voxel_size)
{
    return largest_connected_component(paint(genome, m), voxel_size);
}

CppnGenome random_genome(Rng& rng, const CppnParams& params)
{
    CppnGenome g = CppnGenome::minimal();
    for (auto& n : g.nodes)
        if (n.kind == NodeKind::Output)
            n.bias = rng.uniform(-1.0, 1.0);
    for (int out : {CppnGenome::kPresenceOutput, CppnGenome::kMaterialOutput})
        for (int in = 0; in < CppnGenome::kInputCount; ++in)
            g.edges.push_back({in, out, rng.uniform(-1.0, 1.0)});

    const int span = std::max(0, params.max_hidden - params.min_hidden);
    const int hidden = params.min_hidden + static_cast<int>(rng.below(static_cast<std::uint64_t>(span) + 1));
    for (int h = 0; h < hidden; ++h)
    {
        // Split a random edge; the new node gets fresh random parameters.
        const std::size_t which = rng.index(g.edges.size());
        const CppnEdge split = g.edges[which];
        g.edges.erase(g.edges.begin() + static_cast<long>(which));
        const int id = g.next_id++;
        g.nodes.push_back({id, NodeKind::Hidden, random_activation(rng), rng.uniform(-1.0, 1.0)});
        g.edges.push_back({split.source, id, rng.uniform(-1.0, 1.0)});
        g.edges.push_back({id, split.target, rng.uniform(-1.0, 1.0)});
    }
    g.age = 0;
    return g;
}

std::optional<CppnGenome> try_mutation(const CppnGenome& parent, MutationKind kind, Rng& rng,
                                       const CppnParams& params)
{
    std::optional<CppnGenome> child;
    switch (kind)
    {
    case MutationKind::AddNode:
        child = add_node(parent, rng);
        break;
    case MutationKind::RemoveNode:
        child = remove_node(parent, rng);
        break;
    case MutationKind::AddEdge:
        child = add_edge(parent, rng);
        break;
    case MutationKind::RemoveEdge:
        child = remove_edge(parent, rng);
        break;
    case MutationKind::Perturb:
        child = perturb(parent, rng, params.perturb_sigma);
        break;
    }
    if (child && !child->outputs_connected())
        return std::nullopt;
    return child;
}

Mutation mutate(const CppnGenome& parent, Rng& rng, const CppnParams& params)
{
    for (int attempt = 0; attempt < params.max_mutation_attempts; ++attempt)
    {
        const MutationKind kind = kMutationKinds[rng.index(kMutationKinds.size())];
        if (auto child = try_mutation(parent, kind, rng, params))
            return {std::move(*child), kind};
    }
    return {perturb(parent, rng, params.perturb_sigma), MutationKind::Perturb};
}

std::string genome_to_text(const CppnGenome& genome)
{
    nlohmann::ordered_json j;
    j["format"] = "voxfract-cppn";
    j["version"] = 1;
    j["age"] = genome.age;
    j["next_id"] = genome.next_id;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : genome.nodes)
    {
        nlohmann::ordered_json node;
        node["id"] = n.id;
        node["kind"] = kind_name(n.kind);
        node["activation"] = to_string(n.activation);
        node["bias"] = n.bias;
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : genome.edges)
        edges.push_back({e.source, e.target, e.weight});
    j["edges"] = std::move(edges);
    return j.dump(1) + "\n";
}

CppnGenome genome_from_text(const std::string& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw InvalidGenome(std::string("genome is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "voxfract-cppn" || j.value("version", 0) != 1)
        throw InvalidGenome("not a voxfract CPPN genome");
    CppnGenome g;
    g.age = j.at("age").get<int>();
    g.next_id = j.at("next_id").get<int>();
    for (const auto& node : j.at("nodes"))
    {
        const auto act = parse_activation(node.at("activation").get<std::string>());
        if (!act)
            throw InvalidGenome("unknown activation");
        g.nodes.push_back({node.at("id").get<int>(), parse_kind(node.at("kind").get<std::string>()), *act,
                           node.at("bias").get<double>()});
    }
    for (const auto& e : j.at("edges"))
        g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    g.validate();
    return g;
}

std::uint64_t genome_fingerprint(const CppnGenome& genome)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : genome_to_text(genome))
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace voxfract
