#pragma once

#include "iots/model.hpp"

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iots {

enum class StateClass : std::uint8_t { Sink, StableInput, QuasiStableInput, Output };

std::string to_string(StateClass c);

/// Classification ignores δ self-loops, so a state keeps its class after
/// closure.
StateClass classify(const Iots& m, StateIndex s);
StateClass classify(const Iots& m, std::string_view state);

enum class Property : std::uint8_t { Deterministic, InputComplete, Progressive, InitiallyConnected, DeltaClosed };

std::string to_string(Property p);

class PropertySet {
public:
    constexpr PropertySet() = default;
    constexpr PropertySet(std::initializer_list<Property> props)
    {
        for (auto p : props) {
            bits_ |= bit(p);
        }
    }

    constexpr bool contains(Property p) const { return (bits_ & bit(p)) != 0; }
    constexpr PropertySet with(Property p) const
    {
        PropertySet s = *this;
        s.bits_ |= bit(p);
        return s;
    }

private:
    static constexpr unsigned bit(Property p) { return 1u << static_cast<unsigned>(p); }
    unsigned bits_ = 0;
};

/// Membership in IOTS(I,O): deterministic, input-complete, progressive and
/// initially connected.
inline constexpr PropertySet kMembership{Property::Deterministic, Property::InputComplete, Property::Progressive,
                                         Property::InitiallyConnected};

struct Finding {
    bool holds = true;
    /// Offending state (missing input, sink, unreachable state, missing δ loop).
    std::optional<StateId> state;
    /// Output-only cycle for progressiveness failures.
    std::vector<Transition> cycle;
    std::string detail;
};

struct ValidationReport {
    PropertySet required;
    std::map<Property, Finding> findings;

    bool holds(Property p) const { return findings.at(p).holds; }
    /// True iff every required property holds.
    bool ok() const;
    /// Required properties that do not hold.
    std::vector<Property> failed() const;
};

ValidationReport validate(const Iots& m, PropertySet require = kMembership);

/// Adds a δ self-loop to every stable input state and δ to the outputs.
/// Throws PreconditionError if the machine is already closed.
Iots delta_closure(const Iots& m);

bool is_delta_closed(const Iots& m);

std::optional<StateIndex> after(const Iots& m, StateIndex s, const Trace& trace);
std::optional<StateId> after(const Iots& m, std::string_view s, const Trace& trace);

/// States reachable from `from`, sorted.
std::vector<StateIndex> reachable(const Iots& m, StateIndex from);

struct ProductIots {
    Iots product;
    /// Indexed by product state: (left state, right state).
    std::vector<std::pair<StateIndex, StateIndex>> origin;

    std::optional<StateIndex> find(StateIndex left, StateIndex right) const;
};

/// Reachable synchronous product. Throws PreconditionError on alphabet mismatch.
ProductIots intersection(const Iots& a, const Iots& b);

/// The machine with initial state `s`, restricted to states reachable from it.
Iots rebase(const Iots& m, std::string_view s);
Iots rebase(const Iots& m, StateIndex s);

/// Submachine on `keep` with the transitions between kept states; `initial`
/// must be kept.
Iots restrict_to(const Iots& m, const std::vector<StateIndex>& keep, StateIndex initial);

struct ChainResult {
    Iots machine;
    /// Ids of the appended machine's states in the result.
    std::map<StateId, StateId> renamed;
};

/// Identifies the initial state of `b` with the sink `sink` of `a`. States of
/// `b` keep their ids unless they clash, in which case a fresh suffix is
/// appended.
ChainResult chain_mapped(const Iots& a, std::string_view sink, const Iots& b);
Iots chain(const Iots& a, std::string_view sink, const Iots& b);

/// Shorter traces first, equal lengths compared label by label.
bool shortlex_less(const Trace& a, const Trace& b);

/// Shortlex-least access trace of every state from the initial state, in
/// discovery order; unreachable states are absent.
std::vector<std::pair<StateIndex, Trace>> access_traces(const Iots& m);

/// Default enumeration depth: |states| × (|O| + 1) + 1.
std::size_t default_trace_bound(const Iots& m);

/// Minimal traces from input state `s` to an input state, δ excluded.
std::vector<Trace> bridge_traces(const Iots& m, StateIndex s, std::optional<std::size_t> bound = std::nullopt);
std::vector<Trace> bridge_traces(const Iots& m, std::string_view s);

/// Every trace from `s` of length ≤ depth, in shortlex order.
std::vector<Trace> enumerate_traces(const Iots& m, StateIndex s, std::size_t depth);

/// Traces from the initial state ending in a sink; the machine must be
/// acyclic within the bound.
std::vector<Trace> completed_traces(const Iots& m, std::optional<std::size_t> bound = std::nullopt);

bool is_acyclic(const Iots& m);
/// Every input state enables exactly one input.
bool is_single_input(const Iots& m);

struct SubmachineCheck {
    bool holds = true;
    std::optional<std::pair<StateId, Label>> witness;
};

/// Every non-sink state of `sub` keeps all of `m`'s output transitions. δ is
/// not required at states where `sub` sends an input. Throws
/// PreconditionError if `sub` is not a submachine of `m`.
SubmachineCheck is_output_preserving_submachine(const Iots& sub, const Iots& m);

bool is_submachine(const Iots& sub, const Iots& m);

} // namespace iots
