#pragma once

#include "iots/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iots {

/// Raised when some input states have no preamble.
class NotCReachableError : public PreconditionError {
public:
    explicit NotCReachableError(std::vector<StateId> states);
    const std::vector<StateId>& states() const { return states_; }

private:
    std::vector<StateId> states_;
};

/// Single-input acyclic output-preserving submachine of the specification
/// whose only sink is `target`.
struct Preamble {
    Iots machine;
    StateId target;
};

/// Builds a preamble by solving the reachability game in which the tester
/// picks one input at stable states and the implementation picks any output
/// elsewhere. Among inputs the one with the smallest guaranteed distance to
/// the target wins, ties broken by label order. Returns nullopt when the
/// target is not c-reachable.
std::optional<Preamble> build_preamble(const Iots& spec, std::string_view target);

/// One preamble per input state, ordered by state id. Throws
/// NotCReachableError naming every input state without a preamble.
std::vector<Preamble> state_cover(const Iots& spec);

/// A node of a cover machine at which the reached specification state is
/// to be identified.
struct IdentificationPoint {
    StateId node;
    StateId spec_state;
    /// Trace from the root of the (s, x)-cover to the node.
    Trace trace;
};

/// The input x applied at s followed by every output continuation up to
/// quiescence, unfolded as a tree. Every input state visited after x becomes
/// an identification point.
struct SxCover {
    Iots tree;
    StateId source;
    Label input;
    std::vector<IdentificationPoint> points;
    /// Specification state of every tree node.
    std::map<StateId, StateId> spec_state;
};

SxCover sx_cover(const Iots& spec, std::string_view s, const Label& x);

/// An element of the state cover (a preamble) or of the transition cover (a
/// preamble chained with an (s, x)-cover).
struct CoverElement {
    Iots machine;
    StateId state;
    std::optional<Label> input;
    std::vector<IdentificationPoint> points;

    std::string label() const;
};

CoverElement state_cover_element(const Preamble& preamble);
std::vector<CoverElement> transition_cover(const Iots& spec, const std::vector<Preamble>& cover);

/// Single-input acyclic machine whose sinks tell which of two states the
/// implementation was in.
struct Separator {
    Iots machine;
    StateId first;
    StateId second;
    StateId first_sink;
    StateId second_sink;
};

/// Throws PreconditionError when the states are compatible or no
/// single-input acyclic separator exists.
Separator build_separator(const Iots& spec, std::string_view s1, std::string_view s2);

struct Distinguisher {
    Iots machine;
    StateId sink;
    StateId state;
    /// The state it distinguishes from; empty for a quiescence distinguisher.
    std::optional<StateId> from;

    std::string label() const;
};

/// Keeps `keep_sink` and drops the other sink with its incoming transitions.
Distinguisher make_distinguisher(const Separator& sep, std::string_view keep_sink);
std::pair<Distinguisher, Distinguisher> distinguishers(const Separator& sep);
/// The one-transition machine observing δ at a stable state.
Distinguisher quiescence_distinguisher(const Iots& spec, std::string_view s);

using IdentifierFamily = std::map<StateId, std::vector<Distinguisher>>;

/// Shares one separator per pair of input states, so the family is
/// harmonized by construction. Stable states also receive their
/// quiescence distinguisher.
IdentifierFamily harmonized_identifiers(const Iots& spec);

struct TestCase {
    Iots machine;
    StateId fail;

    /// Traces ending in the fail state, shortlex ordered.
    std::vector<Trace> fail_traces() const;
    /// Every other trace, including the empty one.
    std::vector<Trace> pass_traces() const;
    std::size_t depth() const;
};

/// Adds the fail sink and, at every state expecting outputs, a transition to
/// it for each unexpected output including δ. Input-sending states get none.
TestCase complete_test_case(const Iots& u);

struct Provenance {
    std::string cover;
    StateId point;
    StateId spec_state;
    std::string identifier;
};

struct TestSuite {
    std::vector<TestCase> cases;
    std::vector<Provenance> provenance;
};

struct SuiteStatistics {
    std::size_t cases = 0;
    std::size_t candidates = 0;
    std::size_t max_depth = 0;
    std::map<StateId, std::size_t> identifier_sizes;
};

/// Chains every identifier of every identification point of the state and
/// transition covers, completes each result with fail and removes cases with
/// equal pass and fail trace sets.
TestSuite generate_suite(const Iots& spec, SuiteStatistics* stats = nullptr);

/// Checks the preconditions of generate_suite; throws PreconditionError
/// naming the offending item.
void check_generation_preconditions(const Iots& spec);

} // namespace iots
