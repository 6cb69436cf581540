#pragma once

#include "voxfract/polycube.hpp"
#include "voxfract/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace voxfract
{

enum class Activation : std::uint8_t
{
    Sine,
    Abs,
    Square,
    Sqrt, // of |x|
    Step, // -1 for x < 0, +1 otherwise
};

inline constexpr std::array<Activation, 5> kActivations = {Activation::Sine, Activation::Abs, Activation::Square,
                                                           Activation::Sqrt, Activation::Step};

double apply_activation(Activation a, double x);
std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view s);

enum class NodeKind : std::uint8_t
{
    Input,
    Hidden,
    Output,
};

struct CppnNode
{
    int id = 0;
    NodeKind kind = NodeKind::Hidden;
    Activation activation = Activation::Sine; // outputs always squash with sine; inputs ignore it
    double bias = 0.0;

    friend bool operator==(const CppnNode&, const CppnNode&) = default;
};

struct CppnEdge
{
    int source = 0;
    int target = 0;
    double weight = 0.0;

    friend bool operator==(const CppnEdge&, const CppnEdge&) = default;
};

/// Feed-forward CPPN genotype.
///
/// Node ids 0..3 are the inputs (x, y, z, constant 1) and ids 4, 5 the
/// outputs (presence, material). Hidden nodes get ids from `next_id`.
struct CppnGenome
{
    static constexpr int kInputCount = 4;
    static constexpr int kOutputCount = 2;
    static constexpr int kPresenceOutput = 4;
    static constexpr int kMaterialOutput = 5;
    static constexpr int kFirstHiddenId = 6;

    std::vector<CppnNode> nodes;
    std::vector<CppnEdge> edges;
    int next_id = kFirstHiddenId;
    int age = 0;

    /// Inputs and outputs only, no edges, zero biases.
    static CppnGenome minimal();

    const CppnNode* find_node(int id) const;
    std::size_t hidden_count() const;

    /// Node ids in a deterministic topological order. Throws InvalidGenome on a cycle.
    std::vector<int> topological_order() const;

    /// Throws InvalidGenome on any broken structural invariant.
    void validate() const;

    /// Every output is reachable from at least one input.
    bool outputs_connected() const;

    friend bool operator==(const CppnGenome&, const CppnGenome&) = default;
};

struct CppnOutput
{
    double presence = 0.0;
    double material = 0.0;
};

/// Precomputed evaluation order for repeated queries of one genome.
class CppnEvaluator
{
  public:
    explicit CppnEvaluator(const CppnGenome& genome);
    CppnOutput operator()(double x, double y, double z) const;

  private:
    struct Step
    {
        std::size_t slot;
        NodeKind kind;
        Activation activation;
        double bias;
        int input_index; // -1 unless kind == Input
        std::size_t first_input; // range into inputs_
        std::size_t input_count;
    };
    struct Input
    {
        std::size_t slot;
        double weight;
    };
    std::vector<Step> steps_;
    std::vector<Input> inputs_;
    std::size_t slot_count_ = 0;
    std::size_t presence_slot_ = 0;
    std::size_t material_slot_ = 0;
};

CppnOutput evaluate(const CppnGenome& genome, double x, double y, double z);

/// Cell-center coordinate of index i along an axis of m cells, in [-1, 1].
double normalized_coordinate(int i, int m);

/// Thresholds presence (> 0 is material) and material (> 0 is PhaseA, else
/// PhaseB) over the m^3 workspace and keeps the largest connected component.
/// Throws EmptyPhenotype when no cell is occupied.
Polycube decode(const CppnGenome& genome, int m, double voxel_size = Polycube::kDefaultVoxelSize);

/// The thresholded grid before component extraction.
OccupancyGrid paint(const CppnGenome& genome, int m);

struct CppnParams
{
    int min_hidden = 0;
    int max_hidden = 4;
    double perturb_sigma = 0.5;
    int max_mutation_attempts = 10;

    friend bool operator==(const CppnParams&, const CppnParams&) = default;
};

CppnGenome random_genome(Rng& rng, const CppnParams& params = {});

enum class MutationKind : std::uint8_t
{
    AddNode,
    RemoveNode,
    AddEdge,
    RemoveEdge,
    Perturb,
};

inline constexpr std::array<MutationKind, 5> kMutationKinds = {MutationKind::AddNode, MutationKind::RemoveNode,
                                                               MutationKind::AddEdge, MutationKind::RemoveEdge,
                                                               MutationKind::Perturb};

std::string_view to_string(MutationKind k);

/// Applies one specific operator; nullopt when it does not apply to `parent`
/// or would leave an output unreachable from the inputs.
std::optional<CppnGenome> try_mutation(const CppnGenome& parent, MutationKind kind, Rng& rng,
                                       const CppnParams& params = {});

struct Mutation
{
    CppnGenome child;
    MutationKind kind;
};

/// One operator chosen uniformly, retried up to params.max_mutation_attempts
/// times, falling back to a weight/bias perturbation. The child keeps the
/// parent's age.
Mutation mutate(const CppnGenome& parent, Rng& rng, const CppnParams& params = {});

std::string genome_to_text(const CppnGenome& genome);
CppnGenome genome_from_text(const std::string& text);

/// FNV-1a hash of the canonical text form.
std::uint64_t genome_fingerprint(const CppnGenome& genome);

} // namespace voxfract
