#pragma once

#include "ltc/ground.hpp"
#include "ltc/structure.hpp"
#include "ltc/syntax.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace ltc
{

struct SolveOptions
{
    std::size_t nbmodels = 1; // 0 enumerates all models
    const std::atomic< bool >* stop = nullptr;
    std::uint64_t max_nodes = 0; // search nodes before Error(Budget); 0 is unlimited
};

struct SolveStats
{
    std::uint64_t nodes = 0;
    std::uint64_t conflicts = 0;
    std::size_t atoms = 0;
    std::size_t constraints = 0;
};

// Model expansion over a fixed grounding. The theory is grounded once over
// `context`; each call to expand() takes the values of non-defined atoms
// from its argument, which must share the context's domains and agree with
// it on every symbol not listed in `parameters`.
//
// Models come in a fixed order: the atoms that occur in the grounding first,
// then the rest, each ordered by symbol declaration and tuple index, with
// false before true and lower output elements first.
class ModelExpander
{
public:
    ModelExpander( const Theory& theory, const Structure& context, const std::set< std::string >& parameters = {} );
    ~ModelExpander();
    ModelExpander( ModelExpander&& ) noexcept;
    ModelExpander& operator=( ModelExpander&& ) noexcept;

    // Calls fn on each model until it returns false or nbmodels is reached.
    // Returns the number of models produced.
    std::size_t for_each_model( const Structure& partial, const SolveOptions& options,
                                const std::function< bool( const Structure& ) >& fn );
    std::vector< Structure > expand( const Structure& partial, const SolveOptions& options = {} );
    bool satisfiable( const Structure& partial, const SolveOptions& options = {} );

    void add_constraint( const FormulaPtr& sentence );
    void add_cost_constraint( const TermPtr& cost, long bound, bool equal );

    const GroundTheory& ground_theory() const;
    const SolveStats& stats() const;

private:
    struct Impl;
    std::unique_ptr< Impl > _impl;
};

std::vector< Structure > model_expand( const Theory& theory, const Structure& partial, const SolveOptions& options = {} );

struct MinimizeResult
{
    bool satisfiable = false;
    long optimum = 0;
    std::vector< Structure > models; // optimal models, up to nbmodels
};

// Minimizes an integer-valued closed term over the models of the theory
// expanding `partial`.
MinimizeResult minimize( const Theory& theory, const Structure& partial, const TermPtr& cost,
                         const SolveOptions& options = {} );

} // namespace ltc
