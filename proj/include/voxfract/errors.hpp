#pragma once

#include <stdexcept>
#include <string>

namespace voxfract
{

/// A material grid with no occupied cell; the genome produced nothing.
struct EmptyPhenotype : std::runtime_error
{
    EmptyPhenotype() : std::runtime_error("phenotype is empty") {}
};

struct BudgetExceeded : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Composition of connected units that did not produce a single face-connected body.
struct DisconnectedComposition : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct InvalidPolycube : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct InvalidGenome : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct SimulationDiverged : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace voxfract
