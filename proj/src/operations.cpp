#include "iots/operations.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace iots {

std::string to_string(StateClass c)
{
    switch (c) {
    case StateClass::Sink:
        return "sink";
    case StateClass::StableInput:
        return "stable";
    case StateClass::QuasiStableInput:
        return "quasi-stable";
    case StateClass::Output:
        return "output";
    }
    return "?";
}

std::string to_string(Property p)
{
    switch (p) {
    case Property::Deterministic:
        return "deterministic";
    case Property::InputComplete:
        return "input-complete";
    case Property::Progressive:
        return "progressive";
    case Property::InitiallyConnected:
        return "initially-connected";
    case Property::DeltaClosed:
        return "delta-closed";
    }
    return "?";
}

StateClass classify(const Iots& m, StateIndex s)
{
    bool inputs = false;
    bool outputs = false;
    bool delta = false;
    for (const auto& e : m.edges(s)) {
        inputs |= e.label.is_input();
        outputs |= e.label.is_real_output();
        delta |= e.label.is_quiescence();
    }
    if (inputs) {
        return outputs ? StateClass::QuasiStableInput : StateClass::StableInput;
    }
    if (outputs || delta) {
        return StateClass::Output;
    }
    return StateClass::Sink;
}

StateClass classify(const Iots& m, std::string_view state)
{
    return classify(m, m.index_of(state));
}

bool ValidationReport::ok() const
{
    for (const auto& [p, f] : findings) {
        if (required.contains(p) && !f.holds) {
            return false;
        }
    }
    return true;
}

std::vector<Property> ValidationReport::failed() const
{
    std::vector<Property> out;
    for (const auto& [p, f] : findings) {
        if (required.contains(p) && !f.holds) {
            out.push_back(p);
        }
    }
    return out;
}

namespace {

// Output-only cycle over concrete outputs; δ loops are quiescence, not divergence.
std::vector<Transition> find_output_cycle(const Iots& m)
{
    enum class Color : std::uint8_t { White, Gray, Black };
    std::vector<Color> color(m.size(), Color::White);
    std::vector<std::pair<StateIndex, const Edge*>> parent(m.size(), {0, nullptr});

    for (StateIndex root = 0; root < m.size(); ++root) {
        if (color[root] != Color::White) {
            continue;
        }
        // Explicit stack of (state, next edge position).
        std::vector<std::pair<StateIndex, std::size_t>> stack{{root, 0}};
        color[root] = Color::Gray;
        while (!stack.empty()) {
            auto& [s, pos] = stack.back();
            const auto& out = m.edges(s);
            if (pos == out.size()) {
                color[s] = Color::Black;
                stack.pop_back();
                continue;
            }
            const Edge& e = out[pos++];
            if (!e.label.is_real_output()) {
                continue;
            }
            if (color[e.target] == Color::Gray) {
                std::vector<Transition> cycle;
                cycle.push_back({m.id(s), e.label, m.id(e.target)});
                StateIndex cur = s;
                while (cur != e.target) {
                    auto [prev, edge] = parent[cur];
                    cycle.push_back({m.id(prev), edge->label, m.id(cur)});
                    cur = prev;
                }
                std::reverse(cycle.begin(), cycle.end());
                return cycle;
            }
            if (color[e.target] == Color::White) {
                color[e.target] = Color::Gray;
                parent[e.target] = {s, &e};
                stack.emplace_back(e.target, 0);
            }
        }
    }
    return {};
}

} // namespace

ValidationReport validate(const Iots& m, PropertySet require)
{
    ValidationReport report;
    report.required = require;

    // Construction rejects nondeterminism, so a constructed value always has it.
    report.findings[Property::Deterministic] = Finding{};

    Finding complete;
    const auto all_inputs = m.alphabet().input_labels();
    for (StateIndex s = 0; s < m.size() && complete.holds; ++s) {
        if (!m.has_inputs(s)) {
            continue;
        }
        for (const auto& x : all_inputs) {
            if (!m.enables(s, x)) {
                complete.holds = false;
                complete.state = m.id(s);
                complete.detail = "input '" + x.name + "' not enabled at input state '" + m.id(s) + "'";
                break;
            }
        }
    }
    report.findings[Property::InputComplete] = complete;

    Finding progressive;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (m.is_sink(s)) {
            progressive.holds = false;
            progressive.state = m.id(s);
            progressive.detail = "sink state '" + m.id(s) + "'";
            break;
        }
    }
    if (auto cycle = find_output_cycle(m); !cycle.empty()) {
        progressive.holds = false;
        progressive.cycle = std::move(cycle);
        if (!progressive.detail.empty()) {
            progressive.detail += "; ";
        }
        progressive.detail += "output-only cycle through '" + progressive.cycle.front().source + "'";
    }
    report.findings[Property::Progressive] = progressive;

    Finding connected;
    auto reach = reachable(m, m.initial());
    if (reach.size() != m.size()) {
        for (StateIndex s = 0; s < m.size(); ++s) {
            if (!std::binary_search(reach.begin(), reach.end(), s)) {
                connected.holds = false;
                connected.state = m.id(s);
                connected.detail = "state '" + m.id(s) + "' is unreachable";
                break;
            }
        }
    }
    report.findings[Property::InitiallyConnected] = connected;

    Finding closed;
    if (!m.alphabet().quiescent()) {
        closed.holds = false;
        closed.detail = "alphabet has no quiescence";
    } else {
        const Label delta = Label::quiescence();
        for (StateIndex s = 0; s < m.size(); ++s) {
            auto next = m.successor(s, delta);
            bool stable = classify(m, s) == StateClass::StableInput;
            if (stable && next != s) {
                closed.holds = false;
                closed.state = m.id(s);
                closed.detail = "stable state '" + m.id(s) + "' lacks a delta self-loop";
                break;
            }
            if (!stable && next) {
                closed.holds = false;
                closed.state = m.id(s);
                closed.detail = "delta enabled at non-stable state '" + m.id(s) + "'";
                break;
            }
        }
    }
    report.findings[Property::DeltaClosed] = closed;

    return report;
}

Iots delta_closure(const Iots& m)
{
    if (m.alphabet().quiescent()) {
        throw PreconditionError("machine '" + m.name() + "' is already delta-closed");
    }
    auto transitions = m.transitions();
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (classify(m, s) == StateClass::StableInput) {
            transitions.push_back({m.id(s), Label::quiescence(), m.id(s)});
        }
    }
    return Iots(m.alphabet().with_quiescence(), m.states(), m.initial_id(), std::move(transitions), m.name());
}

bool is_delta_closed(const Iots& m)
{
    return validate(m, {Property::DeltaClosed}).ok();
}

std::optional<StateIndex> after(const Iots& m, StateIndex s, const Trace& trace)
{
    std::optional<StateIndex> cur = s;
    for (const auto& label : trace) {
        cur = m.successor(*cur, label);
        if (!cur) {
            return std::nullopt;
        }
    }
    return cur;
}

std::optional<StateId> after(const Iots& m, std::string_view s, const Trace& trace)
{
    auto r = after(m, m.index_of(s), trace);
    if (!r) {
        return std::nullopt;
    }
    return m.id(*r);
}

std::vector<StateIndex> reachable(const Iots& m, StateIndex from)
{
    std::vector<bool> seen(m.size(), false);
    std::vector<StateIndex> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        auto s = stack.back();
        stack.pop_back();
        for (const auto& e : m.edges(s)) {
            if (!seen[e.target]) {
                seen[e.target] = true;
                stack.push_back(e.target);
            }
        }
    }
    std::vector<StateIndex> out;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (seen[s]) {
            out.push_back(s);
        }
    }
    return out;
}

std::optional<StateIndex> ProductIots::find(StateIndex left, StateIndex right) const
{
    for (StateIndex q = 0; q < origin.size(); ++q) {
        if (origin[q] == std::pair{left, right}) {
            return q;
        }
    }
    return std::nullopt;
}

namespace {

std::string fresh_name(const std::string& base, std::set<std::string>& used)
{
    if (used.insert(base).second) {
        return base;
    }
    for (std::size_t n = 1;; ++n) {
        std::string candidate = base + "_" + std::to_string(n);
        if (used.insert(candidate).second) {
            return candidate;
        }
    }
}

} // namespace

ProductIots intersection(const Iots& a, const Iots& b)
{
    if (a.alphabet() != b.alphabet()) {
        throw PreconditionError("intersection of machines over different alphabets");
    }
    std::map<std::pair<StateIndex, StateIndex>, std::string> names;
    std::vector<std::pair<StateIndex, StateIndex>> order;
    std::set<std::string> used;
    std::vector<Transition> transitions;

    auto visit = [&](StateIndex l, StateIndex r) -> const std::string& {
        auto key = std::pair{l, r};
        auto it = names.find(key);
        if (it == names.end()) {
            it = names.emplace(key, fresh_name(a.id(l) + "_" + b.id(r), used)).first;
            order.push_back(key);
        }
        return it->second;
    };

    visit(a.initial(), b.initial());
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto [l, r] = order[i];
        std::string source = names.at(order[i]);
        // Both edge lists are sorted by label: merge them.
        const auto& le = a.edges(l);
        const auto& re = b.edges(r);
        std::size_t x = 0;
        std::size_t y = 0;
        while (x < le.size() && y < re.size()) {
            if (le[x].label < re[y].label) {
                ++x;
            } else if (re[y].label < le[x].label) {
                ++y;
            } else {
                const std::string& target = visit(le[x].target, re[y].target);
                transitions.push_back({source, le[x].label, target});
                ++x;
                ++y;
            }
        }
    }

    std::vector<StateId> states;
    states.reserve(order.size());
    for (const auto& key : order) {
        states.push_back(names.at(key));
    }
    Iots product(a.alphabet(), states, names.at(order.front()), std::move(transitions));
    std::vector<std::pair<StateIndex, StateIndex>> origin(product.size());
    for (const auto& [key, name] : names) {
        origin[product.index_of(name)] = key;
    }
    return {std::move(product), std::move(origin)};
}

Iots restrict_to(const Iots& m, const std::vector<StateIndex>& keep, StateIndex initial)
{
    std::vector<bool> kept(m.size(), false);
    for (auto s : keep) {
        kept[s] = true;
    }
    if (!kept.at(initial)) {
        throw PreconditionError("restriction drops the initial state");
    }
    std::vector<StateId> states;
    std::vector<Transition> transitions;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (!kept[s]) {
            continue;
        }
        states.push_back(m.id(s));
        for (const auto& e : m.edges(s)) {
            if (kept[e.target]) {
                transitions.push_back({m.id(s), e.label, m.id(e.target)});
            }
        }
    }
    return Iots(m.alphabet(), std::move(states), m.id(initial), std::move(transitions), m.name());
}

Iots rebase(const Iots& m, StateIndex s)
{
    return restrict_to(m, reachable(m, s), s);
}

Iots rebase(const Iots& m, std::string_view s)
{
    return rebase(m, m.index_of(s));
}

ChainResult chain_mapped(const Iots& a, std::string_view sink, const Iots& b)
{
    if (a.alphabet() != b.alphabet()) {
        throw PreconditionError("chaining machines over different alphabets");
    }
    auto at = a.find(sink);
    if (!at) {
        throw PreconditionError("chaining state '" + std::string(sink) + "' is not a state");
    }
    if (!a.is_sink(*at)) {
        throw PreconditionError("chaining state '" + std::string(sink) + "' is not a sink");
    }

    std::set<std::string> used(a.states().begin(), a.states().end());
    ChainResult result;
    result.renamed[b.initial_id()] = std::string(sink);
    // Names of b that survive untouched are reserved first so renamed states
    // never take them.
    for (StateIndex s = 0; s < b.size(); ++s) {
        if (s != b.initial() && !a.find(b.id(s))) {
            used.insert(b.id(s));
            result.renamed[b.id(s)] = b.id(s);
        }
    }
    for (StateIndex s = 0; s < b.size(); ++s) {
        if (s != b.initial() && a.find(b.id(s))) {
            result.renamed[b.id(s)] = fresh_name(b.id(s), used);
        }
    }

    std::vector<StateId> states = a.states();
    for (StateIndex s = 0; s < b.size(); ++s) {
        if (s != b.initial()) {
            states.push_back(result.renamed.at(b.id(s)));
        }
    }
    auto transitions = a.transitions();
    for (const auto& t : b.transitions()) {
        transitions.push_back({result.renamed.at(t.source), t.label, result.renamed.at(t.target)});
    }
    result.machine = Iots(a.alphabet(), std::move(states), a.initial_id(), std::move(transitions), a.name());
    return result;
}

Iots chain(const Iots& a, std::string_view sink, const Iots& b)
{
    return chain_mapped(a, sink, b).machine;
}

bool shortlex_less(const Trace& a, const Trace& b)
{
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

std::vector<std::pair<StateIndex, Trace>> access_traces(const Iots& m)
{
    std::vector<std::pair<StateIndex, Trace>> order{{m.initial(), {}}};
    std::vector<bool> seen(m.size(), false);
    seen[m.initial()] = true;
    for (std::size_t i = 0; i < order.size(); ++i) {
        StateIndex s = order[i].first;
        for (const auto& e : m.edges(s)) {
            if (!seen[e.target]) {
                seen[e.target] = true;
                Trace t = order[i].second;
                t.push_back(e.label);
                order.emplace_back(e.target, std::move(t));
            }
        }
    }
    return order;
}

std::size_t default_trace_bound(const Iots& m)
{
    return m.size() * (m.alphabet().output_labels().size() + 1) + 1;
}

std::vector<Trace> bridge_traces(const Iots& m, StateIndex s, std::optional<std::size_t> bound)
{
    if (!m.has_inputs(s)) {
        throw PreconditionError("bridge traces requested from non-input state '" + m.id(s) + "'");
    }
    const std::size_t limit = bound.value_or(default_trace_bound(m));
    std::vector<Trace> out;
    std::deque<std::pair<StateIndex, Trace>> queue{{s, {}}};
    while (!queue.empty()) {
        auto [cur, trace] = std::move(queue.front());
        queue.pop_front();
        if (trace.size() >= limit) {
            continue;
        }
        for (const auto& e : m.edges(cur)) {
            if (e.label.is_quiescence()) {
                continue;
            }
            Trace next = trace;
            next.push_back(e.label);
            if (m.has_inputs(e.target)) {
                out.push_back(std::move(next));
            } else {
                queue.emplace_back(e.target, std::move(next));
            }
        }
    }
    std::sort(out.begin(), out.end(), shortlex_less);
    return out;
}

std::vector<Trace> bridge_traces(const Iots& m, std::string_view s)
{
    return bridge_traces(m, m.index_of(s));
}

std::vector<Trace> enumerate_traces(const Iots& m, StateIndex s, std::size_t depth)
{
    std::vector<Trace> out{{}};
    std::vector<std::pair<StateIndex, std::size_t>> layer{{s, 0}};
    for (std::size_t d = 0; d < depth && !layer.empty(); ++d) {
        std::vector<std::pair<StateIndex, std::size_t>> next;
        for (auto [cur, idx] : layer) {
            for (const auto& e : m.edges(cur)) {
                Trace t = out[idx];
                t.push_back(e.label);
                out.push_back(std::move(t));
                next.emplace_back(e.target, out.size() - 1);
            }
        }
        layer = std::move(next);
    }
    return out;
}

std::vector<Trace> completed_traces(const Iots& m, std::optional<std::size_t> bound)
{
    const std::size_t limit = bound.value_or(m.size() + 1);
    std::vector<Trace> out;
    std::vector<std::pair<StateIndex, Trace>> stack{{m.initial(), {}}};
    while (!stack.empty()) {
        auto [cur, trace] = std::move(stack.back());
        stack.pop_back();
        if (m.is_sink(cur)) {
            out.push_back(std::move(trace));
            continue;
        }
        if (trace.size() >= limit) {
            continue;
        }
        for (const auto& e : m.edges(cur)) {
            Trace next = trace;
            next.push_back(e.label);
            stack.emplace_back(e.target, std::move(next));
        }
    }
    std::sort(out.begin(), out.end(), shortlex_less);
    return out;
}

bool is_acyclic(const Iots& m)
{
    // Kahn's algorithm over all edges.
    std::vector<std::size_t> indegree(m.size(), 0);
    for (StateIndex s = 0; s < m.size(); ++s) {
        for (const auto& e : m.edges(s)) {
            ++indegree[e.target];
        }
    }
    std::vector<StateIndex> ready;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (indegree[s] == 0) {
            ready.push_back(s);
        }
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
        auto s = ready.back();
        ready.pop_back();
        ++removed;
        for (const auto& e : m.edges(s)) {
            if (--indegree[e.target] == 0) {
                ready.push_back(e.target);
            }
        }
    }
    return removed == m.size();
}

bool is_single_input(const Iots& m)
{
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (m.has_inputs(s) && m.inputs_at(s).size() != 1) {
            return false;
        }
    }
    return true;
}

bool is_submachine(const Iots& sub, const Iots& m)
{
    if (sub.alphabet() != m.alphabet()) {
        return false;
    }
    for (StateIndex s = 0; s < sub.size(); ++s) {
        auto ms = m.find(sub.id(s));
        if (!ms) {
            return false;
        }
        for (const auto& e : sub.edges(s)) {
            auto target = m.successor(*ms, e.label);
            if (!target || m.id(*target) != sub.id(e.target)) {
                return false;
            }
        }
    }
    return true;
}

SubmachineCheck is_output_preserving_submachine(const Iots& sub, const Iots& m)
{
    if (!is_submachine(sub, m)) {
        throw PreconditionError("'" + sub.name() + "' is not a submachine of '" + m.name() + "'");
    }
    for (StateIndex s = 0; s < sub.size(); ++s) {
        if (sub.is_sink(s)) {
            continue;
        }
        const bool sends_input = sub.has_inputs(s);
        StateIndex ms = m.index_of(sub.id(s));
        for (const auto& e : m.edges(ms)) {
            if (!e.label.is_output() || (e.label.is_quiescence() && sends_input)) {
                continue;
            }
            if (!sub.enables(s, e.label)) {
                return {false, std::pair{sub.id(s), e.label}};
            }
        }
    }
    return {};
}

} // namespace iots
