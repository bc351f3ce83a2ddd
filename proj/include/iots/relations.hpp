#pragma once

#include "iots/model.hpp"

#include <map>
#include <optional>
#include <utility>

namespace iots {

struct Counterexample {
    /// Specification trace after which the implementation misbehaves.
    Trace trace;
    /// Output enabled in the implementation but not in the specification.
    Label output;
};

struct Verdict {
    bool conforms = true;
    std::optional<Counterexample> counterexample;
};

/// Decides impl ioco spec for deterministic δ-closed machines and reports
/// the shortlex-least violating trace together with the least offending
/// output.
Verdict ioco_check(const Iots& impl, const Iots& spec);

struct ReductionResult {
    bool holds = true;
    /// Product state (s, s') with out((s, s')) != out(s).
    std::optional<std::pair<StateId, StateId>> witness;
};

/// Whether state `s1` is a reduction of `s2` in `spec`.
ReductionResult is_reduction(const Iots& spec, std::string_view s1, std::string_view s2);

struct SinkWitness {
    StateId left;
    StateId right;
    Trace access;
};

struct CompatibilityResult {
    bool compatible = true;
    std::optional<SinkWitness> sink_witness;
};

/// Two states are compatible iff the intersection of the machines rebased at
/// them has no reachable sink.
CompatibilityResult compatible(const Iots& spec, std::string_view s1, std::string_view s2);

struct MinimalityResult {
    bool minimal = true;
    std::optional<std::pair<StateId, StateId>> offending;
};

MinimalityResult is_input_state_minimal(const Iots& spec);

inline constexpr std::size_t kMaxHomeomorphismStates = 8;

/// Searches for a bijection φ from the input states of `impl` to those of
/// `spec` that commutes with every bridge trace of `impl` and maps the
/// initial state to the initial state. Exhaustive; at most
/// kMaxHomeomorphismStates input states.
std::optional<std::map<StateId, StateId>> check_input_state_homeomorphic(const Iots& impl, const Iots& spec);

} // namespace iots
