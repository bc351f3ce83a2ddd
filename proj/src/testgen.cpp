#include "iots/testgen.hpp"

#include "iots/operations.hpp"
#include "iots/relations.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>

namespace iots {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::string join(const std::vector<StateId>& ids)
{
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) {
            out += ", ";
        }
        out += id;
    }
    return out;
}

// Drops the outgoing transitions of `node` and everything no longer reachable.
Iots cut_at(const Iots& m, const StateId& node)
{
    std::vector<Transition> kept;
    for (auto& t : m.transitions()) {
        if (t.source != node) {
            kept.push_back(std::move(t));
        }
    }
    Iots trimmed(m.alphabet(), m.states(), m.initial_id(), std::move(kept), m.name());
    return rebase(trimmed, trimmed.initial());
}

// Renames states in breadth-first order from the initial state as
// `prefix0`, `prefix1`, ...; `keep` maps states whose ids must survive.
Iots canonical_names(const Iots& m, const std::string& prefix, const std::map<StateId, StateId>& keep,
                     std::map<StateId, StateId>* mapping = nullptr)
{
    std::map<StateIndex, StateId> names;
    std::size_t counter = 0;
    for (const auto& [s, trace] : access_traces(m)) {
        auto it = keep.find(m.id(s));
        names[s] = it != keep.end() ? it->second : prefix + std::to_string(counter++);
    }
    std::vector<StateId> states;
    std::vector<Transition> transitions;
    for (const auto& [s, name] : names) {
        states.push_back(name);
        for (const auto& e : m.edges(s)) {
            transitions.push_back({name, e.label, names.at(e.target)});
        }
    }
    if (mapping) {
        for (const auto& [s, name] : names) {
            (*mapping)[m.id(s)] = name;
        }
    }
    return Iots(m.alphabet(), std::move(states), names.at(m.initial()), std::move(transitions), m.name());
}

} // namespace

NotCReachableError::NotCReachableError(std::vector<StateId> states)
    : PreconditionError("input states not c-reachable: " + join(states))
    , states_(std::move(states))
{
}

std::optional<Preamble> build_preamble(const Iots& spec, std::string_view target)
{
    const StateIndex goal = spec.index_of(target);
    if (!spec.has_inputs(goal)) {
        throw PreconditionError("preamble target '" + std::string(target) + "' is not an input state");
    }

    // Guaranteed distance to the goal: the tester picks the input at stable
    // states, the implementation picks outputs everywhere else. Quasi-stable
    // states keep all their outputs, so no input is ever sent there.
    std::vector<std::size_t> rank(spec.size(), kUnreached);
    rank[goal] = 0;
    auto evaluate = [&](StateIndex s) {
        std::size_t best = kUnreached;
        if (classify(spec, s) == StateClass::StableInput) {
            for (const auto& e : spec.edges(s)) {
                if (e.label.is_input() && rank[e.target] != kUnreached) {
                    best = std::min(best, rank[e.target] + 1);
                }
            }
            return best;
        }
        std::size_t worst = 0;
        bool any = false;
        for (const auto& e : spec.edges(s)) {
            if (!e.label.is_real_output()) {
                continue;
            }
            if (rank[e.target] == kUnreached) {
                return kUnreached;
            }
            any = true;
            worst = std::max(worst, rank[e.target]);
        }
        return any ? worst + 1 : kUnreached;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (StateIndex s = 0; s < spec.size(); ++s) {
            if (s == goal) {
                continue;
            }
            if (auto r = evaluate(s); r < rank[s]) {
                rank[s] = r;
                changed = true;
            }
        }
    }
    if (rank[spec.initial()] == kUnreached) {
        return std::nullopt;
    }

    IotsBuilder builder(spec.alphabet(), "preamble_" + std::string(target));
    builder.initial(spec.initial_id());
    std::vector<bool> seen(spec.size(), false);
    std::deque<StateIndex> queue{spec.initial()};
    seen[spec.initial()] = true;
    while (!queue.empty()) {
        StateIndex s = queue.front();
        queue.pop_front();
        if (s == goal) {
            continue;
        }
        std::vector<const Edge*> chosen;
        if (classify(spec, s) == StateClass::StableInput) {
            for (const auto& e : spec.edges(s)) {
                if (e.label.is_input() && rank[e.target] != kUnreached && rank[e.target] + 1 == rank[s]) {
                    chosen.push_back(&e);
                    break;
                }
            }
        } else {
            for (const auto& e : spec.edges(s)) {
                if (e.label.is_real_output()) {
                    chosen.push_back(&e);
                }
            }
        }
        for (const Edge* e : chosen) {
            builder.add(spec.id(s), e->label, spec.id(e->target));
            if (!seen[e->target]) {
                seen[e->target] = true;
                queue.push_back(e->target);
            }
        }
    }
    return Preamble{builder.build(), std::string(target)};
}

std::vector<Preamble> state_cover(const Iots& spec)
{
    std::vector<Preamble> cover;
    std::vector<StateId> missing;
    for (StateIndex s : spec.input_states()) {
        if (auto p = build_preamble(spec, spec.id(s))) {
            cover.push_back(std::move(*p));
        } else {
            missing.push_back(spec.id(s));
        }
    }
    if (!missing.empty()) {
        throw NotCReachableError(std::move(missing));
    }
    return cover;
}

SxCover sx_cover(const Iots& spec, std::string_view s, const Label& x)
{
    const StateIndex source = spec.index_of(s);
    if (!x.is_input() || !spec.enables(source, x)) {
        throw PreconditionError("input '" + x.name + "' is not enabled at '" + std::string(s) + "'");
    }
    if (!spec.alphabet().quiescent()) {
        throw PreconditionError("(s, x)-cover requires a delta-closed specification");
    }

    SxCover cover;
    cover.source = std::string(s);
    cover.input = x;
    IotsBuilder builder(spec.alphabet(), "cov_" + std::string(s) + "_" + x.name);
    std::size_t counter = 0;
    auto node = [&](StateIndex st) {
        std::string name = "c" + std::to_string(counter++);
        cover.spec_state[name] = spec.id(st);
        builder.state(name);
        return name;
    };
    const std::size_t bound = default_trace_bound(spec);

    struct Pending {
        std::string name;
        StateIndex state;
        Trace trace;
    };
    std::string root = node(source);
    builder.initial(root);
    StateIndex first = *spec.successor(source, x);
    Pending start{node(first), first, {x}};
    builder.add(root, x, start.name);
    std::deque<Pending> queue{start};
    while (!queue.empty()) {
        Pending cur = std::move(queue.front());
        queue.pop_front();
        if (cur.trace.size() > bound) {
            throw PreconditionError("output divergence below '" + std::string(s) + "': specification not progressive");
        }
        const StateClass cls = classify(spec, cur.state);
        if (cls == StateClass::StableInput || cls == StateClass::QuasiStableInput) {
            cover.points.push_back({cur.name, spec.id(cur.state), cur.trace});
        }
        if (cls == StateClass::StableInput) {
            Trace trace = cur.trace;
            trace.push_back(Label::quiescence());
            builder.add(cur.name, Label::quiescence(), node(cur.state));
            continue;
        }
        for (const auto& e : spec.edges(cur.state)) {
            if (!e.label.is_real_output()) {
                continue;
            }
            Pending next{node(e.target), e.target, cur.trace};
            next.trace.push_back(e.label);
            builder.add(cur.name, e.label, next.name);
            queue.push_back(std::move(next));
        }
    }
    cover.tree = builder.build();
    return cover;
}

std::string CoverElement::label() const
{
    if (input) {
        return "V:" + state + ":" + input->name;
    }
    return "Z:" + state;
}

CoverElement state_cover_element(const Preamble& preamble)
{
    return {preamble.machine, preamble.target, std::nullopt, {{preamble.target, preamble.target, {}}}};
}

std::vector<CoverElement> transition_cover(const Iots& spec, const std::vector<Preamble>& cover)
{
    std::vector<CoverElement> out;
    for (const auto& preamble : cover) {
        for (const auto& x : spec.alphabet().input_labels()) {
            auto cov = sx_cover(spec, preamble.target, x);
            auto chained = chain_mapped(preamble.machine, preamble.target, cov.tree);
            CoverElement element;
            element.machine = chained.machine.renamed("V_" + preamble.target + "_" + x.name);
            element.state = preamble.target;
            element.input = x;
            for (const auto& p : cov.points) {
                element.points.push_back({chained.renamed.at(p.node), p.spec_state, p.trace});
            }
            out.push_back(std::move(element));
        }
    }
    return out;
}

Separator build_separator(const Iots& spec, std::string_view s1, std::string_view s2)
{
    if (s1 == s2) {
        throw PreconditionError("separator of a state with itself");
    }
    if (compatible(spec, s1, s2).compatible) {
        throw PreconditionError("states '" + std::string(s1) + "' and '" + std::string(s2) +
                                "' are compatible and cannot be separated");
    }
    const Iots left = rebase(spec, s1);
    const Iots right = rebase(spec, s2);
    const auto product = intersection(left, right);
    const Iots& pm = product.product;
    const std::size_t n = pm.size();

    enum class Outcome : std::uint8_t { First, Second, Common };
    struct Observation {
        Label label;
        Outcome outcome;
        std::size_t node; // game node for Common
    };
    // Game node 2q observes at q; 2q+1 may observe or send an input.
    auto observe_node = [](StateIndex q) { return 2 * q; };
    auto choose_node = [](StateIndex q) { return 2 * q + 1; };

    std::vector<std::vector<Observation>> observations(n);
    std::vector<bool> both_stable(n);
    std::vector<bool> both_input(n);
    for (StateIndex q = 0; q < n; ++q) {
        auto [l, r] = product.origin[q];
        both_stable[q] = classify(left, l) == StateClass::StableInput && classify(right, r) == StateClass::StableInput;
        both_input[q] = left.has_inputs(l) && right.has_inputs(r);
        auto lo = left.outputs_at(l);
        auto ro = right.outputs_at(r);
        std::vector<Label> all;
        std::set_union(lo.begin(), lo.end(), ro.begin(), ro.end(), std::back_inserter(all));
        for (const auto& o : all) {
            bool in_l = std::binary_search(lo.begin(), lo.end(), o);
            bool in_r = std::binary_search(ro.begin(), ro.end(), o);
            if (in_l && in_r) {
                // A common δ only occurs when both are stable: it stays in q.
                StateIndex next = o.is_quiescence() ? q : *pm.successor(q, o);
                observations[q].push_back({o, Outcome::Common, choose_node(next)});
            } else {
                observations[q].push_back({o, in_l ? Outcome::First : Outcome::Second, 0});
            }
        }
    }

    std::vector<std::size_t> rank(2 * n, kUnreached);
    auto observe_rank = [&](StateIndex q) {
        std::size_t worst = 0;
        for (const auto& ob : observations[q]) {
            if (ob.outcome == Outcome::Common) {
                if (rank[ob.node] == kUnreached) {
                    return kUnreached;
                }
                worst = std::max(worst, rank[ob.node]);
            }
        }
        return worst + 1;
    };
    auto input_rank = [&](const Edge& e) {
        std::size_t r = rank[observe_node(e.target)];
        return r == kUnreached ? kUnreached : r + 1;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (StateIndex q = 0; q < n; ++q) {
            std::size_t obs = observe_rank(q);
            if (obs < rank[observe_node(q)]) {
                rank[observe_node(q)] = obs;
                changed = true;
            }
            std::size_t best = both_stable[q] ? kUnreached : obs;
            if (both_input[q]) {
                for (const auto& e : pm.edges(q)) {
                    if (e.label.is_input()) {
                        best = std::min(best, input_rank(e));
                    }
                }
            }
            if (best < rank[choose_node(q)]) {
                rank[choose_node(q)] = best;
                changed = true;
            }
        }
    }
    const StateIndex root = pm.initial();
    if (rank[choose_node(root)] == kUnreached) {
        throw PreconditionError("no single-input acyclic separator exists for '" + std::string(s1) + "' and '" +
                                std::string(s2) + "'");
    }

    Separator sep;
    sep.first = std::string(s1);
    sep.second = std::string(s2);
    sep.first_sink = "bot_" + sep.first;
    sep.second_sink = "bot_" + sep.second;

    IotsBuilder builder(spec.alphabet(), "sep_" + sep.first + "_" + sep.second);
    std::map<std::size_t, std::string> names;
    std::deque<std::size_t> queue;
    auto name_of = [&](std::size_t g) -> const std::string& {
        auto it = names.find(g);
        if (it == names.end()) {
            it = names.emplace(g, "r" + std::to_string(names.size())).first;
            builder.state(it->second);
            queue.push_back(g);
        }
        return it->second;
    };
    builder.initial(name_of(choose_node(root)));
    while (!queue.empty()) {
        std::size_t g = queue.front();
        queue.pop_front();
        const StateIndex q = g / 2;
        const bool may_choose = g == choose_node(q);
        const std::string source = names.at(g);

        bool observe = !may_choose || (!both_stable[q] && observe_rank(q) == rank[g]);
        if (!observe) {
            for (const auto& e : pm.edges(q)) {
                if (e.label.is_input() && input_rank(e) == rank[g]) {
                    builder.add(source, e.label, name_of(observe_node(e.target)));
                    break;
                }
            }
            continue;
        }
        for (const auto& ob : observations[q]) {
            switch (ob.outcome) {
            case Outcome::First:
                builder.add(source, ob.label, sep.first_sink);
                break;
            case Outcome::Second:
                builder.add(source, ob.label, sep.second_sink);
                break;
            case Outcome::Common:
                builder.add(source, ob.label, name_of(ob.node));
                break;
            }
        }
    }
    sep.machine = builder.build();
    return sep;
}

std::string Distinguisher::label() const
{
    if (from) {
        return "W:" + state + ":" + *from;
    }
    return "Wdelta:" + state;
}

Distinguisher make_distinguisher(const Separator& sep, std::string_view keep_sink)
{
    if (keep_sink != sep.first_sink && keep_sink != sep.second_sink) {
        throw PreconditionError("a distinguisher keeps exactly one separator sink; '" + std::string(keep_sink) +
                                "' is not one");
    }
    const bool keep_first = keep_sink == sep.first_sink;
    const StateId& dropped = keep_first ? sep.second_sink : sep.first_sink;
    const Iots& m = sep.machine;
    std::vector<StateIndex> keep;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (m.id(s) != dropped) {
            keep.push_back(s);
        }
    }
    Iots pruned = restrict_to(m, keep, m.initial());
    Iots machine = rebase(pruned, pruned.initial());
    Distinguisher d;
    d.machine = machine.renamed(keep_first ? "W_" + sep.first + "_" + sep.second : "W_" + sep.second + "_" + sep.first);
    d.sink = std::string(keep_sink);
    d.state = keep_first ? sep.first : sep.second;
    d.from = keep_first ? sep.second : sep.first;
    return d;
}

std::pair<Distinguisher, Distinguisher> distinguishers(const Separator& sep)
{
    return {make_distinguisher(sep, sep.first_sink), make_distinguisher(sep, sep.second_sink)};
}

Distinguisher quiescence_distinguisher(const Iots& spec, std::string_view s)
{
    if (classify(spec, s) != StateClass::StableInput) {
        throw PreconditionError("quiescence distinguisher of non-stable state '" + std::string(s) + "'");
    }
    if (!spec.alphabet().quiescent()) {
        throw PreconditionError("quiescence distinguisher requires a delta-closed specification");
    }
    Distinguisher d;
    d.sink = "bot_" + std::string(s);
    d.state = std::string(s);
    d.machine = IotsBuilder(spec.alphabet(), "Wdelta_" + std::string(s))
                    .initial("r0")
                    .add("r0", Label::quiescence(), d.sink)
                    .build();
    return d;
}

IdentifierFamily harmonized_identifiers(const Iots& spec)
{
    if (auto minimal = is_input_state_minimal(spec); !minimal.minimal) {
        throw PreconditionError("specification is not input-state-minimal: '" + minimal.offending->first + "' and '" +
                                minimal.offending->second + "' are compatible");
    }
    IdentifierFamily family;
    const auto inputs = spec.input_states();
    for (StateIndex s : inputs) {
        family[spec.id(s)];
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
            auto sep = build_separator(spec, spec.id(inputs[i]), spec.id(inputs[j]));
            auto [w1, w2] = distinguishers(sep);
            family[w1.state].push_back(std::move(w1));
            family[w2.state].push_back(std::move(w2));
        }
    }
    for (StateIndex s : inputs) {
        if (classify(spec, s) != StateClass::StableInput) {
            continue;
        }
        auto wd = quiescence_distinguisher(spec, spec.id(s));
        auto& id = family[spec.id(s)];
        bool present = std::any_of(id.begin(), id.end(), [&](const Distinguisher& d) { return d.machine == wd.machine; });
        if (!present) {
            id.push_back(std::move(wd));
        }
    }
    return family;
}

namespace {

// Every trace of an acyclic machine paired with its end state.
std::vector<std::pair<Trace, StateIndex>> all_traces(const Iots& m)
{
    std::vector<std::pair<Trace, StateIndex>> out{{{}, m.initial()}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        StateIndex s = out[i].second;
        for (const auto& e : m.edges(s)) {
            Trace t = out[i].first;
            t.push_back(e.label);
            out.emplace_back(std::move(t), e.target);
        }
    }
    return out;
}

} // namespace

std::vector<Trace> TestCase::fail_traces() const
{
    const StateIndex f = machine.index_of(fail);
    std::vector<Trace> out;
    for (auto& [t, s] : all_traces(machine)) {
        if (s == f) {
            out.push_back(std::move(t));
        }
    }
    std::sort(out.begin(), out.end(), shortlex_less);
    return out;
}

std::vector<Trace> TestCase::pass_traces() const
{
    const StateIndex f = machine.index_of(fail);
    std::vector<Trace> out;
    for (auto& [t, s] : all_traces(machine)) {
        if (s != f) {
            out.push_back(std::move(t));
        }
    }
    std::sort(out.begin(), out.end(), shortlex_less);
    return out;
}

std::size_t TestCase::depth() const
{
    std::vector<std::size_t> memo(machine.size(), kUnreached);
    std::function<std::size_t(StateIndex)> longest = [&](StateIndex s) -> std::size_t {
        if (memo[s] != kUnreached) {
            return memo[s];
        }
        std::size_t best = 0;
        for (const auto& e : machine.edges(s)) {
            best = std::max(best, longest(e.target) + 1);
        }
        return memo[s] = best;
    };
    return longest(machine.initial());
}

TestCase complete_test_case(const Iots& u)
{
    if (!u.alphabet().quiescent()) {
        throw PreconditionError("test cases need an alphabet with quiescence");
    }
    if (!is_acyclic(u)) {
        throw PreconditionError("'" + u.name() + "' is cyclic");
    }
    if (!is_single_input(u)) {
        throw PreconditionError("'" + u.name() + "' is not single-input");
    }
    for (StateIndex s = 0; s < u.size(); ++s) {
        if (u.has_inputs(s) && !u.outputs_at(s).empty()) {
            throw PreconditionError("state '" + u.id(s) + "' of '" + u.name() +
                                    "' enables both an input and outputs; the test would be uncontrollable");
        }
    }
    std::set<std::string> used(u.states().begin(), u.states().end());
    StateId fail = "fail";
    for (std::size_t n = 1; used.count(fail); ++n) {
        fail = "fail_" + std::to_string(n);
    }
    auto states = u.states();
    states.push_back(fail);
    auto transitions = u.transitions();
    const auto outputs = u.alphabet().output_labels();
    for (StateIndex s = 0; s < u.size(); ++s) {
        if (u.outputs_at(s).empty()) {
            continue;
        }
        for (const auto& o : outputs) {
            if (!u.enables(s, o)) {
                transitions.push_back({u.id(s), o, fail});
            }
        }
    }
    return {Iots(u.alphabet(), std::move(states), u.initial_id(), std::move(transitions), u.name()), fail};
}

void check_generation_preconditions(const Iots& spec)
{
    auto report = validate(spec, kMembership.with(Property::DeltaClosed));
    if (!report.ok()) {
        for (auto p : report.failed()) {
            throw PreconditionError("specification is not " + to_string(p) + ": " + report.findings.at(p).detail);
        }
    }
    if (classify(spec, spec.initial()) != StateClass::StableInput) {
        throw PreconditionError("initial state '" + spec.initial_id() + "' is not stable");
    }
    if (auto minimal = is_input_state_minimal(spec); !minimal.minimal) {
        throw PreconditionError("specification is not input-state-minimal: '" + minimal.offending->first + "' and '" +
                                minimal.offending->second + "' are compatible");
    }
}

TestSuite generate_suite(const Iots& spec, SuiteStatistics* stats)
{
    check_generation_preconditions(spec);
    const auto z = state_cover(spec);
    std::vector<CoverElement> elements;
    for (const auto& p : z) {
        elements.push_back(state_cover_element(p));
    }
    for (auto& v : transition_cover(spec, z)) {
        elements.push_back(std::move(v));
    }
    const auto identifiers = harmonized_identifiers(spec);

    TestSuite suite;
    std::set<std::pair<std::vector<Trace>, std::vector<Trace>>> seen;
    std::size_t candidates = 0;
    auto emit = [&](const Iots& u, Provenance provenance) {
        ++candidates;
        TestCase raw = complete_test_case(u);
        TestCase tc{canonical_names(raw.machine, "t", {{raw.fail, "fail"}}), "fail"};
        if (!seen.emplace(tc.fail_traces(), tc.pass_traces()).second) {
            return;
        }
        tc.machine = tc.machine.renamed("tc" + std::to_string(suite.cases.size()));
        suite.cases.push_back(std::move(tc));
        suite.provenance.push_back(std::move(provenance));
    };

    for (const auto& element : elements) {
        for (const auto& point : element.points) {
            const auto& ids = identifiers.at(point.spec_state);
            Iots base = cut_at(element.machine, point.node);
            if (ids.empty()) {
                emit(base, {element.label(), format_trace(point.trace), point.spec_state, "-"});
                continue;
            }
            for (const auto& w : ids) {
                emit(chain(base, point.node, w.machine),
                     {element.label(), format_trace(point.trace), point.spec_state, w.label()});
            }
        }
    }

    if (stats) {
        stats->cases = suite.cases.size();
        stats->candidates = candidates;
        stats->max_depth = 0;
        for (const auto& tc : suite.cases) {
            stats->max_depth = std::max(stats->max_depth, tc.depth());
        }
        stats->identifier_sizes.clear();
        for (const auto& [s, ids] : identifiers) {
            stats->identifier_sizes[s] = ids.size();
        }
    }
    return suite;
}

} // namespace iots
