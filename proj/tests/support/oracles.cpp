#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace oracle {

using namespace iots;

bool shortlex(const Trace& a, const Trace& b)
{
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

std::vector<Label> outs(const Iots& m, StateIndex s)
{
    std::vector<Label> o;
    for (const auto& e : m.edges(s)) {
        if (e.label.kind != LabelKind::Input) {
            o.push_back(e.label);
        }
    }
    std::sort(o.begin(), o.end());
    return o;
}

static std::vector<Label> inputs(const Iots& m, StateIndex s)
{
    std::vector<Label> o;
    for (const auto& e : m.edges(s)) {
        if (e.label.kind == LabelKind::Input) {
            o.push_back(e.label);
        }
    }
    return o;
}

std::optional<StateIndex> run(const Iots& m, StateIndex s, const Trace& t)
{
    for (const auto& l : t) {
        bool found = false;
        for (const auto& e : m.edges(s)) {
            if (e.label == l) {
                s = e.target;
                found = true;
                break;
            }
        }
        if (!found) {
            return std::nullopt;
        }
    }
    return s;
}

std::vector<std::pair<Trace, StateIndex>> traces(const Iots& m, StateIndex s, std::size_t depth)
{
    std::vector<std::pair<Trace, StateIndex>> all{{{}, s}};
    std::size_t level_start = 0;
    for (std::size_t d = 0; d < depth; ++d) {
        std::size_t level_end = all.size();
        for (std::size_t i = level_start; i < level_end; ++i) {
            for (const auto& l : m.alphabet().labels()) {
                Trace t = all[i].first;
                t.push_back(l);
                if (auto r = run(m, s, t)) {
                    all.emplace_back(std::move(t), *r);
                }
            }
        }
        level_start = level_end;
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return shortlex(a.first, b.first); });
    return all;
}

std::optional<Counterexample> ioco(const Iots& impl, const Iots& spec, std::size_t depth)
{
    // Spec traces the implementation cannot follow contribute no outputs, so
    // only joint traces are extended. Levels are checked in shortlex order.
    struct Node {
        Trace trace;
        StateIndex s;
        StateIndex p;
    };
    std::vector<Node> level{{{}, spec.initial(), impl.initial()}};
    for (std::size_t d = 0; d <= depth && !level.empty(); ++d) {
        std::stable_sort(level.begin(), level.end(),
                         [](const Node& a, const Node& b) { return shortlex(a.trace, b.trace); });
        for (const auto& n : level) {
            auto allowed = outs(spec, n.s);
            for (const auto& o : outs(impl, n.p)) {
                if (std::find(allowed.begin(), allowed.end(), o) == allowed.end()) {
                    return Counterexample{n.trace, o};
                }
            }
        }
        std::vector<Node> next;
        for (const auto& n : level) {
            for (const auto& l : spec.alphabet().labels()) {
                auto s = run(spec, n.s, {l});
                auto p = s ? run(impl, n.p, {l}) : std::nullopt;
                if (p) {
                    Trace t = n.trace;
                    t.push_back(l);
                    next.push_back({std::move(t), *s, *p});
                }
            }
        }
        level = std::move(next);
    }
    return std::nullopt;
}

bool c_reachable(const Iots& spec, const std::string& target)
{
    std::set<StateIndex> win{spec.index_of(target)};
    for (bool grew = true; grew;) {
        grew = false;
        for (StateIndex s = 0; s < spec.size(); ++s) {
            if (win.count(s)) {
                continue;
            }
            auto ins = inputs(spec, s);
            std::vector<Label> real;
            for (const auto& o : outs(spec, s)) {
                if (o.kind == LabelKind::Output) {
                    real.push_back(o);
                }
            }
            bool wins = false;
            if (!ins.empty() && real.empty()) {
                wins = std::any_of(ins.begin(), ins.end(),
                                   [&](const Label& x) { return win.count(*run(spec, s, {x})) > 0; });
            } else if (!real.empty()) {
                wins = std::all_of(real.begin(), real.end(),
                                   [&](const Label& o) { return win.count(*run(spec, s, {o})) > 0; });
            }
            if (wins) {
                win.insert(s);
                grew = true;
            }
        }
    }
    return win.count(spec.initial()) > 0;
}

namespace {

bool acyclic(const Iots& m)
{
    std::vector<int> colour(m.size(), 0);
    bool ok = true;
    std::function<void(StateIndex)> dfs = [&](StateIndex s) {
        colour[s] = 1;
        for (const auto& e : m.edges(s)) {
            if (colour[e.target] == 1) {
                ok = false;
            } else if (colour[e.target] == 0) {
                dfs(e.target);
            }
        }
        colour[s] = 2;
    };
    dfs(m.initial());
    return ok;
}

bool single_input(const Iots& m)
{
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (inputs(m, s).size() > 1) {
            return false;
        }
    }
    return true;
}

std::vector<std::pair<Trace, StateIndex>> all_paths(const Iots& m)
{
    return traces(m, m.initial(), m.size());
}

} // namespace

std::string check_preamble(const Iots& spec, const Preamble& p)
{
    const Iots& m = p.machine;
    if (m.initial_id() != spec.initial_id()) {
        return "initial state differs";
    }
    for (const auto& t : m.transitions()) {
        auto s = spec.find(t.source);
        auto r = s ? run(spec, *s, {t.label}) : std::nullopt;
        if (!r || spec.id(*r) != t.target) {
            return "transition " + t.source + " " + t.label.name + " " + t.target + " not in the specification";
        }
    }
    if (!acyclic(m)) {
        return "cyclic";
    }
    if (!single_input(m)) {
        return "not single-input";
    }
    std::vector<StateId> sinks;
    for (StateIndex s = 0; s < m.size(); ++s) {
        if (m.edges(s).empty()) {
            sinks.push_back(m.id(s));
            continue;
        }
        if (!inputs(m, s).empty()) {
            // Sending an input is only allowed where no output could occur.
            for (const auto& o : outs(spec, spec.index_of(m.id(s)))) {
                if (o.kind == LabelKind::Output) {
                    return "input sent at '" + m.id(s) + "' which may output " + o.name;
                }
            }
            continue;
        }
        std::vector<Label> expected;
        for (const auto& o : outs(spec, spec.index_of(m.id(s)))) {
            if (o.kind == LabelKind::Output) {
                expected.push_back(o);
            }
        }
        if (outs(m, s) != expected || expected.empty()) {
            return "outputs not preserved at '" + m.id(s) + "'";
        }
    }
    if (sinks != std::vector<StateId>{p.target}) {
        return "sink set is not {" + p.target + "}";
    }
    return {};
}

std::string check_separator(const Iots& spec, const Separator& sep)
{
    const Iots& m = sep.machine;
    if (!acyclic(m)) {
        return "cyclic";
    }
    if (!single_input(m)) {
        return "not single-input";
    }
    const StateIndex s1 = spec.index_of(sep.first);
    const StateIndex s2 = spec.index_of(sep.second);
    for (const auto& [t, r] : all_paths(m)) {
        const auto& id = m.id(r);
        auto a1 = run(spec, s1, t);
        auto a2 = run(spec, s2, t);
        if (m.edges(r).empty()) {
            if (id == sep.first_sink) {
                if (!a1 || a2) {
                    return "trace " + format_trace(t) + " to the first sink is not in Tr(s1)\\Tr(s2)";
                }
            } else if (id == sep.second_sink) {
                if (!a2 || a1) {
                    return "trace " + format_trace(t) + " to the second sink is not in Tr(s2)\\Tr(s1)";
                }
            } else {
                return "maximal trace " + format_trace(t) + " ends outside the sinks";
            }
            continue;
        }
        for (const auto& x : inputs(m, r)) {
            Trace tx = t;
            tx.push_back(x);
            auto r2 = *run(m, r, {x});
            auto have = outs(m, r2);
            for (auto st : {run(spec, s1, tx), run(spec, s2, tx)}) {
                if (!st) {
                    continue;
                }
                for (const auto& o : outs(spec, *st)) {
                    if (std::find(have.begin(), have.end(), o) == have.end()) {
                        return "after " + format_trace(tx) + " output " + o.name + " is not observed";
                    }
                }
            }
        }
    }
    return {};
}

std::string check_test_case(const TestCase& tc)
{
    const Iots& m = tc.machine;
    auto f = m.find(tc.fail);
    if (!f) {
        return "no fail state";
    }
    if (!m.edges(*f).empty()) {
        return "fail is not a sink";
    }
    if (!acyclic(m)) {
        return "cyclic";
    }
    if (!single_input(m)) {
        return "not single-input";
    }
    const std::size_t all_outputs = m.alphabet().output_labels().size();
    for (StateIndex s = 0; s < m.size(); ++s) {
        auto o = outs(m, s);
        bool sends = !inputs(m, s).empty();
        if (sends && !o.empty()) {
            return "state '" + m.id(s) + "' is not controllable";
        }
        if (!o.empty() && o.size() != all_outputs) {
            return "state '" + m.id(s) + "' is not output-complete";
        }
    }
    return {};
}

std::vector<Trace> cover_traces(const Iots& spec, const std::string& s, const Label& x)
{
    std::vector<Trace> out;
    std::function<void(StateIndex, Trace)> walk = [&](StateIndex st, Trace t) {
        auto o = outs(spec, st);
        for (const auto& l : o) {
            Trace next = t;
            next.push_back(l);
            if (l.kind == LabelKind::Quiescence) {
                out.push_back(next);
            } else {
                walk(*run(spec, st, {l}), next);
            }
        }
    };
    walk(*run(spec, spec.index_of(s), {x}), {x});
    std::sort(out.begin(), out.end(), shortlex);
    return out;
}

std::vector<std::pair<Trace, std::string>> cover_points(const Iots& spec, const std::string& s, const Label& x)
{
    std::set<std::pair<Trace, std::string>> points;
    const StateIndex from = spec.index_of(s);
    for (const auto& t : cover_traces(spec, s, x)) {
        for (std::size_t len = 1; len < t.size(); ++len) {
            Trace prefix(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(len));
            StateIndex st = *run(spec, from, prefix);
            if (!inputs(spec, st).empty()) {
                points.emplace(prefix, spec.id(st));
            }
        }
    }
    std::vector<std::pair<Trace, std::string>> out(points.begin(), points.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return shortlex(a.first, b.first) || (a.first == b.first && a.second < b.second);
    });
    return out;
}

std::vector<Trace> bridges(const Iots& m, StateIndex s)
{
    std::vector<Trace> out;
    std::function<void(StateIndex, Trace)> walk = [&](StateIndex st, Trace t) {
        for (const auto& e : m.edges(st)) {
            if (e.label.kind == LabelKind::Quiescence) {
                continue;
            }
            Trace next = t;
            next.push_back(e.label);
            if (!inputs(m, e.target).empty()) {
                out.push_back(next);
            } else {
                walk(e.target, next);
            }
        }
    };
    walk(s, {});
    std::sort(out.begin(), out.end(), shortlex);
    return out;
}

bool homeomorphic(const Iots& impl, const Iots& spec)
{
    std::vector<StateIndex> pi;
    std::vector<StateIndex> si;
    for (StateIndex s = 0; s < impl.size(); ++s) {
        if (!inputs(impl, s).empty()) {
            pi.push_back(s);
        }
    }
    for (StateIndex s = 0; s < spec.size(); ++s) {
        if (!inputs(spec, s).empty()) {
            si.push_back(s);
        }
    }
    if (pi.size() != si.size()) {
        return false;
    }
    std::vector<std::size_t> perm(si.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::map<StateIndex, StateIndex> phi;
        for (std::size_t i = 0; i < pi.size(); ++i) {
            phi[pi[i]] = si[perm[i]];
        }
        if (phi.count(impl.initial()) && phi[impl.initial()] != spec.initial()) {
            continue;
        }
        bool ok = true;
        for (auto p : pi) {
            for (const auto& g : bridges(impl, p)) {
                auto target = run(impl, p, g);
                auto image = run(spec, phi[p], g);
                if (!image || *image != phi[*target]) {
                    ok = false;
                }
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

bool passes(const Iots& impl, const TestCase& tc)
{
    const StateIndex f = tc.machine.index_of(tc.fail);
    for (const auto& [t, s] : all_paths(tc.machine)) {
        if (s == f && run(impl, impl.initial(), t)) {
            return false;
        }
    }
    return true;
}

bool is_infix(const Trace& needle, const Trace& hay)
{
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<Trace> completed(const Iots& m)
{
    std::vector<Trace> out;
    for (const auto& [t, s] : all_paths(m)) {
        if (m.edges(s).empty()) {
            out.push_back(t);
        }
    }
    return out;
}

} // namespace oracle
