#pragma once

#include "ltc/classify.hpp"
#include "ltc/semantics.hpp"
#include "ltc/solve.hpp"
#include "ltc/transform.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ltc
{

// Successors of a state that agree on the exogenous symbols.
struct SuccessorGroup
{
    std::string label; // sorted true exogenous literals, or "(none)"
    std::vector< Structure > states;
};

std::string exogenous_label( const Structure& state );
std::vector< SuccessorGroup > group_successors( const std::vector< Structure >& states );

// --- simulation

enum class StopReason
{
    EndConditionMet,
    Deadlock,
    MaxSteps,
    ChoicesExhausted,
    NoInitialState,
    HookFailure,
};

std::string_view to_string( StopReason r ) noexcept;

struct ChoiceRequest
{
    std::size_t step;                          // 0 picks the initial state
    const Structure* current;                  // null for the initial state
    const std::vector< SuccessorGroup >* groups;
    // Set when a group was picked whose states differ only in endogenous
    // symbols; the answer then indexes that group's states.
    const SuccessorGroup* outcome = nullptr;
};

// A scripted choice: an index, or a group label.
using ScriptChoice = std::variant< std::size_t, std::string >;

struct SimulationPolicy
{
    enum class Mode
    {
        Random,
        Interactive,
        Scripted,
    };
    Mode mode = Mode::Random;
    std::uint64_t seed = 0;
    std::function< std::size_t( const ChoiceRequest& ) > choose; // Interactive
    std::vector< ScriptChoice > script;                          // Scripted
    std::function< void( const Structure& state, std::size_t step ) > show;
    std::function< bool( const Structure& state ) > endcheck;
    std::optional< std::size_t > max_steps;
    std::size_t successor_cap = 0; // 0: all successors
};

struct SimulationResult
{
    Chain chain;
    StopReason reason = StopReason::MaxSteps;
    std::uint64_t seed = 0;
    std::string message; // hook failure text
};

// --- invariants

struct InvariantVerdict
{
    enum class Status
    {
        ProvenByInduction,
        BaseCounterexample,
        StepCounterexample,
        NotApplicable,
    };
    Status status = Status::NotApplicable;
    SentenceKind kind = SentenceKind::Other;
    std::optional< Structure > witness; // V_ss (base) or V_bs (step) model
    std::string reason;

    bool proven() const { return status == Status::ProvenByInduction; }
    std::string summary() const;
};

struct TptpDocument
{
    std::string name; // "base" or "step"
    std::string text;
};

struct TptpExport
{
    std::vector< TptpDocument > documents;
    std::vector< Issue > warnings;
};

// --- planning

struct PlanResult
{
    bool found = false;
    Chain chain;
    Structure model; // over the linear-time vocabulary, Time = 0..horizon
};

struct OptimalPlanResult
{
    bool found = false;
    long optimum = 0;
    Chain chain;
    Structure model;
};

// The inferences on one LTC theory. The constructor expands the fluent
// macro, checks the theory and derives T0 and Tt; it throws ltc::Error with
// the checker's issues on rejection.
class Engine
{
public:
    explicit Engine( const Theory& theory );
    ~Engine();
    Engine( Engine&& ) noexcept;
    Engine& operator=( Engine&& ) noexcept;

    const LtcTheory& ltc() const;
    const Theory& theory() const { return ltc().theory; }
    const DerivedTheories& derived() const;
    const DerivedVocabularies& vocabularies() const { return derived().vocabularies; }

    // The state-level part of J: its 0-projection when J has a Time domain,
    // J itself when it is a state, otherwise J's domains and statics.
    Structure initial_slice( const Structure& J ) const;

    std::vector< Structure > initialise( const Structure& J, const SolveOptions& options = {} );
    std::vector< Structure > progress( const Structure& state, const SolveOptions& options = {} );
    // Streams successors; fn returns false to stop. Returns the number visited.
    std::size_t for_each_successor( const Structure& state, const SolveOptions& options,
                                    const std::function< bool( const Structure& ) >& fn );
    bool detect_deadlock( const Structure& state );

    // T0 on the first state and Tt on every adjacent pair.
    bool is_weakly_compatible( const Chain& chain ) const;
    // Kleene value of the theory on the chain read as a partial structure.
    TruthValue kleene_compatibility( const Chain& chain, int lookahead = 1 ) const;

    // Weak successors S' of the last state from which `lookahead` further
    // weak progression steps are possible. lookahead 0 is progress.
    std::vector< Structure > strong_successors_bounded( const Chain& chain, int lookahead,
                                                        std::uint64_t max_nodes = 100000 );

    SimulationResult simulate( const Structure& J, const SimulationPolicy& policy );

    // phi is a sentence over the linear-time vocabulary; I fixes the
    // domains and optionally static symbols.
    InvariantVerdict check_invariant( const FormulaPtr& phi, const Structure& I, const SolveOptions& options = {} );
    TptpExport export_induction_obligations( const FormulaPtr& phi ) const;

    // Goal sentences are over the linear-time vocabulary.
    PlanResult plan( const Theory& goal, const Structure& J, int horizon, const SolveOptions& options = {} );
    // Without a cost term the cost is the least time point at which the
    // goal holds; each goal sentence must then have the form ? t[Time]: psi.
    OptimalPlanResult plan_optimal( const Theory& goal, const Structure& J, int horizon,
                                    const std::optional< TermPtr >& cost = std::nullopt,
                                    const SolveOptions& options = {} );

private:
    struct Impl;
    std::unique_ptr< Impl > _impl;
};

// Name of the constant that plan_optimal adds for the goal time.
inline constexpr std::string_view goal_time_name = "goal_time";

} // namespace ltc
