#include "iots/model.hpp"

#include <algorithm>

namespace iots {

std::string format_trace(const Trace& trace)
{
    if (trace.empty()) {
        return "-";
    }
    std::string out;
    for (const auto& label : trace) {
        if (!out.empty()) {
            out += '.';
        }
        out += label.name;
    }
    return out;
}

bool is_token(std::string_view text)
{
    if (text.empty()) {
        return false;
    }
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> names, const char* what)
{
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw ModelError(std::string("duplicate ") + what + " symbol");
    }
    for (const auto& n : names) {
        if (!is_token(n)) {
            throw ModelError(std::string("invalid ") + what + " symbol '" + n + "'");
        }
    }
    return names;
}

} // namespace

Alphabet::Alphabet(std::vector<std::string> inputs, std::vector<std::string> outputs, bool quiescent)
    : inputs_(sorted_unique(std::move(inputs), "input"))
    , outputs_(sorted_unique(std::move(outputs), "output"))
    , quiescent_(quiescent)
{
    if (std::binary_search(outputs_.begin(), outputs_.end(), std::string(kDeltaName))) {
        throw ModelError("'delta' is reserved for quiescence and cannot be declared as an output");
    }
    if (std::binary_search(inputs_.begin(), inputs_.end(), std::string(kDeltaName))) {
        throw ModelError("'delta' is reserved for quiescence and cannot be declared as an input");
    }
    for (const auto& in : inputs_) {
        if (std::binary_search(outputs_.begin(), outputs_.end(), in)) {
            throw ModelError("symbol '" + in + "' is both an input and an output");
        }
    }
}

Alphabet Alphabet::with_quiescence() const
{
    Alphabet copy = *this;
    copy.quiescent_ = true;
    return copy;
}

bool Alphabet::contains(const Label& label) const
{
    switch (label.kind) {
    case LabelKind::Input:
        return std::binary_search(inputs_.begin(), inputs_.end(), label.name);
    case LabelKind::Output:
        return std::binary_search(outputs_.begin(), outputs_.end(), label.name);
    case LabelKind::Quiescence:
        return quiescent_ && label.name == kDeltaName;
    }
    return false;
}

std::vector<Label> Alphabet::labels() const
{
    auto all = input_labels();
    auto outs = output_labels();
    all.insert(all.end(), outs.begin(), outs.end());
    return all;
}

std::vector<Label> Alphabet::input_labels() const
{
    std::vector<Label> out;
    out.reserve(inputs_.size());
    for (const auto& n : inputs_) {
        out.push_back(Label::input(n));
    }
    return out;
}

std::vector<Label> Alphabet::output_labels() const
{
    std::vector<Label> out;
    out.reserve(outputs_.size() + 1);
    for (const auto& n : outputs_) {
        out.push_back(Label::output(n));
    }
    if (quiescent_) {
        out.push_back(Label::quiescence());
    }
    return out;
}

Iots::Iots(Alphabet alphabet, std::vector<StateId> states, StateId initial,
           std::vector<Transition> transitions, std::string name)
    : name_(std::move(name))
    , alphabet_(std::move(alphabet))
    , states_(std::move(states))
{
    std::sort(states_.begin(), states_.end());
    if (auto dup = std::adjacent_find(states_.begin(), states_.end()); dup != states_.end()) {
        throw ModelError("duplicate state '" + *dup + "'");
    }
    for (const auto& s : states_) {
        if (!is_token(s)) {
            throw ModelError("invalid state id '" + s + "'");
        }
    }
    auto init = find(initial);
    if (!init) {
        throw ModelError("initial state '" + initial + "' is not a state");
    }
    initial_ = *init;

    edges_.assign(states_.size(), {});
    for (const auto& t : transitions) {
        auto src = find(t.source);
        auto dst = find(t.target);
        if (!src) {
            throw ModelError("transition source '" + t.source + "' is not a state");
        }
        if (!dst) {
            throw ModelError("transition target '" + t.target + "' is not a state");
        }
        if (!alphabet_.contains(t.label)) {
            throw ModelError("label '" + t.label.name + "' is not in the alphabet");
        }
        edges_[*src].push_back({t.label, *dst});
    }
    for (StateIndex s = 0; s < edges_.size(); ++s) {
        auto& out = edges_[s];
        std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
            return a.label < b.label || (a.label == b.label && a.target < b.target);
        });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const Edge& a, const Edge& b) { return a.label == b.label && a.target == b.target; }),
                  out.end());
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (out[i].label == out[i - 1].label) {
                throw ModelError("nondeterministic transitions from '" + states_[s] + "' on '" + out[i].label.name +
                                 "' to '" + states_[out[i - 1].target] + "' and '" + states_[out[i].target] + "'");
            }
        }
    }
}

Iots Iots::renamed(std::string name) const
{
    Iots copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

std::optional<StateIndex> Iots::find(std::string_view id) const
{
    auto it = std::lower_bound(states_.begin(), states_.end(), id,
                               [](const StateId& a, std::string_view b) { return std::string_view(a) < b; });
    if (it == states_.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<StateIndex>(it - states_.begin());
}

StateIndex Iots::index_of(std::string_view id) const
{
    auto idx = find(id);
    if (!idx) {
        throw ModelError("unknown state '" + std::string(id) + "'");
    }
    return *idx;
}

std::optional<StateIndex> Iots::successor(StateIndex s, const Label& label) const
{
    for (const auto& e : edges_.at(s)) {
        if (e.label == label) {
            return e.target;
        }
    }
    return std::nullopt;
}

bool Iots::has_inputs(StateIndex s) const
{
    const auto& out = edges_.at(s);
    return !out.empty() && out.front().label.is_input();
}

bool Iots::has_real_outputs(StateIndex s) const
{
    return std::any_of(edges_.at(s).begin(), edges_.at(s).end(),
                       [](const Edge& e) { return e.label.is_real_output(); });
}

std::vector<Label> Iots::inputs_at(StateIndex s) const
{
    std::vector<Label> out;
    for (const auto& e : edges_.at(s)) {
        if (e.label.is_input()) {
            out.push_back(e.label);
        }
    }
    return out;
}

std::vector<Label> Iots::outputs_at(StateIndex s) const
{
    std::vector<Label> out;
    for (const auto& e : edges_.at(s)) {
        if (e.label.is_output()) {
            out.push_back(e.label);
        }
    }
    return out;
}

std::vector<StateIndex> Iots::input_states() const
{
    std::vector<StateIndex> out;
    for (StateIndex s = 0; s < size(); ++s) {
        if (has_inputs(s)) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<StateIndex> Iots::sinks() const
{
    std::vector<StateIndex> out;
    for (StateIndex s = 0; s < size(); ++s) {
        if (is_sink(s)) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<Transition> Iots::transitions() const
{
    std::vector<Transition> out;
    for (StateIndex s = 0; s < size(); ++s) {
        for (const auto& e : edges_[s]) {
            out.push_back({states_[s], e.label, states_[e.target]});
        }
    }
    return out;
}

std::size_t Iots::transition_count() const
{
    std::size_t n = 0;
    for (const auto& out : edges_) {
        n += out.size();
    }
    return n;
}

bool Iots::operator==(const Iots& other) const
{
    if (alphabet_ != other.alphabet_ || states_ != other.states_ || initial_ != other.initial_) {
        return false;
    }
    for (StateIndex s = 0; s < size(); ++s) {
        const auto& a = edges_[s];
        const auto& b = other.edges_[s];
        if (a.size() != b.size()) {
            return false;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].label != b[i].label || a[i].target != b[i].target) {
                return false;
            }
        }
    }
    return true;
}

IotsBuilder& IotsBuilder::state(StateId id)
{
    if (known_.insert(id).second) {
        states_.push_back(std::move(id));
    }
    return *this;
}

IotsBuilder& IotsBuilder::initial(StateId id)
{
    state(id);
    initial_ = std::move(id);
    return *this;
}

IotsBuilder& IotsBuilder::add(StateId source, Label label, StateId target)
{
    state(source);
    state(target);
    transitions_.push_back({std::move(source), std::move(label), std::move(target)});
    return *this;
}

bool IotsBuilder::has_state(const StateId& id) const
{
    return known_.count(id) > 0;
}

Iots IotsBuilder::build() const
{
    if (!initial_) {
        throw ModelError("machine has no initial state");
    }
    return Iots(alphabet_, states_, *initial_, transitions_, name_);
}

} // namespace iots
