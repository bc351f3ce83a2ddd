#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iots {

/// Raised when a machine is structurally malformed: dangling state ids,
/// labels outside the alphabet, overlapping alphabets or two successors for
/// one (state, label) pair.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation is called outside its domain, e.g. closing an
/// already closed machine or intersecting machines over different alphabets.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kDeltaName = "delta";

enum class LabelKind : std::uint8_t { Input, Output, Quiescence };

/// An action: an input, a concrete output or quiescence.
///
/// Labels order inputs before outputs before quiescence and then by name;
/// every "least" choice in the library uses this order.
struct Label {
    LabelKind kind = LabelKind::Input;
    std::string name;

    static Label input(std::string name) { return {LabelKind::Input, std::move(name)}; }
    static Label output(std::string name) { return {LabelKind::Output, std::move(name)}; }
    static Label quiescence() { return {LabelKind::Quiescence, std::string(kDeltaName)}; }

    bool is_input() const { return kind == LabelKind::Input; }
    /// True for concrete outputs and for quiescence (δ belongs to O once closed).
    bool is_output() const { return kind != LabelKind::Input; }
    bool is_quiescence() const { return kind == LabelKind::Quiescence; }
    bool is_real_output() const { return kind == LabelKind::Output; }

    auto operator<=>(const Label&) const = default;
    bool operator==(const Label&) const = default;
};

using Trace = std::vector<Label>;

/// Renders a trace as dot-separated label names, "-" for the empty trace.
std::string format_trace(const Trace& trace);

/// True for nonempty tokens over [A-Za-z0-9_].
bool is_token(std::string_view text);

/// Input and output alphabets. Outputs never list δ; `quiescent` records
/// whether δ has been added by closure.
class Alphabet {
public:
    Alphabet() = default;
    Alphabet(std::vector<std::string> inputs, std::vector<std::string> outputs, bool quiescent = false);

    const std::vector<std::string>& inputs() const { return inputs_; }
    const std::vector<std::string>& outputs() const { return outputs_; }
    bool quiescent() const { return quiescent_; }

    Alphabet with_quiescence() const;

    bool contains(const Label& label) const;
    /// Inputs, then outputs, then δ when quiescent.
    std::vector<Label> labels() const;
    std::vector<Label> input_labels() const;
    /// Concrete outputs followed by δ when quiescent.
    std::vector<Label> output_labels() const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    bool quiescent_ = false;
};

using StateId = std::string;
using StateIndex = std::size_t;

struct Transition {
    StateId source;
    Label label;
    StateId target;

    auto operator<=>(const Transition&) const = default;
    bool operator==(const Transition&) const = default;
};

struct Edge {
    Label label;
    StateIndex target;
};

/// Deterministic input/output transition system.
///
/// States are kept sorted by id; indices refer to that order and are stable
/// for the lifetime of the value. Outgoing edges of a state are sorted by
/// label. The value is immutable after construction.
class Iots {
public:
    Iots() = default;
    Iots(Alphabet alphabet, std::vector<StateId> states, StateId initial,
         std::vector<Transition> transitions, std::string name = {});

    const std::string& name() const { return name_; }
    Iots renamed(std::string name) const;

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<StateId>& states() const { return states_; }
    const StateId& id(StateIndex s) const { return states_.at(s); }
    StateIndex initial() const { return initial_; }
    const StateId& initial_id() const { return states_[initial_]; }

    std::optional<StateIndex> find(std::string_view id) const;
    /// Throws ModelError for unknown ids.
    StateIndex index_of(std::string_view id) const;

    const std::vector<Edge>& edges(StateIndex s) const { return edges_.at(s); }
    std::optional<StateIndex> successor(StateIndex s, const Label& label) const;

    bool enables(StateIndex s, const Label& label) const { return successor(s, label).has_value(); }
    bool has_inputs(StateIndex s) const;
    /// Concrete outputs only; δ does not count.
    bool has_real_outputs(StateIndex s) const;
    bool is_sink(StateIndex s) const { return edges_[s].empty(); }
    bool is_input_state(StateIndex s) const { return has_inputs(s); }

    std::vector<Label> inputs_at(StateIndex s) const;
    /// Enabled outputs including δ.
    std::vector<Label> outputs_at(StateIndex s) const;

    std::vector<StateIndex> input_states() const;
    std::vector<StateIndex> sinks() const;

    /// All transitions in canonical order (source, label, target).
    std::vector<Transition> transitions() const;
    std::size_t transition_count() const;

    bool operator==(const Iots& other) const;

private:
    std::string name_;
    Alphabet alphabet_;
    std::vector<StateId> states_;
    StateIndex initial_ = 0;
    std::vector<std::vector<Edge>> edges_;
};

/// Accumulates states and transitions and produces an Iots. States are
/// registered implicitly by `add`.
class IotsBuilder {
public:
    explicit IotsBuilder(Alphabet alphabet, std::string name = {})
        : alphabet_(std::move(alphabet)), name_(std::move(name)) {}

    IotsBuilder& state(StateId id);
    IotsBuilder& initial(StateId id);
    IotsBuilder& add(StateId source, Label label, StateId target);
    IotsBuilder& add(const Transition& t) { return add(t.source, t.label, t.target); }

    bool has_state(const StateId& id) const;

    Iots build() const;

private:
    Alphabet alphabet_;
    std::string name_;
    std::vector<StateId> states_;
    std::set<StateId> known_;
    std::optional<StateId> initial_;
    std::vector<Transition> transitions_;
};

} // namespace iots
