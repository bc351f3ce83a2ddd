#include "iots/execution.hpp"

#include "iots/operations.hpp"

#include <functional>
#include <set>
#include <tuple>

namespace iots {

namespace {

void require_runnable(const Iots& impl, const TestCase& tc)
{
    if (impl.alphabet() != tc.machine.alphabet()) {
        throw PreconditionError("implementation and test case alphabets differ");
    }
    if (!is_delta_closed(impl)) {
        throw PreconditionError("implementation '" + impl.name() + "' is not delta-closed");
    }
}

} // namespace

RunOutcome run_verdict(const Iots& impl, const TestCase& tc)
{
    require_runnable(impl, tc);
    const StateIndex fail = tc.machine.index_of(tc.fail);
    auto product = intersection(impl, tc.machine);
    for (auto& [q, trace] : access_traces(product.product)) {
        if (product.origin[q].second == fail) {
            return {false, std::move(trace)};
        }
    }
    return {};
}

SuiteOutcome run_suite(const Iots& impl, const TestSuite& suite)
{
    SuiteOutcome out;
    for (std::size_t i = 0; i < suite.cases.size(); ++i) {
        out.outcomes.push_back(run_verdict(impl, suite.cases[i]));
        if (!out.outcomes.back().pass) {
            out.pass = false;
            out.failing.push_back(i);
        }
    }
    return out;
}

bool covers_pass_traces(const Iots& impl, const TestCase& tc)
{
    require_runnable(impl, tc);
    for (const auto& t : tc.pass_traces()) {
        if (!after(impl, impl.initial(), t)) {
            return false;
        }
    }
    return true;
}

EagerRun simulate_input_eager(const Iots& impl, const TestCase& tc)
{
    require_runnable(impl, tc);
    const Iots& test = tc.machine;
    const StateIndex fail = test.index_of(tc.fail);
    if (!is_acyclic(test) || !is_single_input(test)) {
        throw PreconditionError("test case '" + test.name() + "' is not acyclic and single-input");
    }

    using Config = std::tuple<StateIndex, StateIndex, std::optional<Label>>;
    std::set<Config> passing;
    EagerRun run;
    std::vector<EagerStep> schedule;

    // Returns true when some branch from the configuration reaches fail.
    std::function<bool(StateIndex, StateIndex, std::optional<Label>)> explore =
        [&](StateIndex p, StateIndex t, std::optional<Label> queue) -> bool {
        if (t == fail) {
            return true;
        }
        Config key{p, t, queue};
        if (passing.count(key)) {
            return false;
        }
        ++run.configurations;
        bool leaf = true;
        auto step = [&](Label fired, bool enqueue, StateIndex np, StateIndex nt, std::optional<Label> nq) {
            leaf = false;
            schedule.push_back({queue, impl.id(p), test.id(t), std::move(fired), enqueue});
            if (explore(np, nt, std::move(nq))) {
                return true;
            }
            schedule.pop_back();
            return false;
        };

        if (queue) {
            // The queued input goes first whenever the implementation accepts
            // it, even at a quasi-stable state. An output state cannot take it
            // and the run ends there, as in the synchronous product.
            if (auto np = impl.successor(p, *queue)) {
                if (step(*queue, false, *np, t, std::nullopt)) {
                    return true;
                }
            }
        } else if (auto inputs = test.inputs_at(t); !inputs.empty()) {
            if (inputs.size() != 1) {
                throw PreconditionError("test sends more than one input at '" + test.id(t) + "'");
            }
            const Label& x = inputs.front();
            if (step(x, true, p, *test.successor(t, x), x)) {
                return true;
            }
        } else {
            for (const auto& o : impl.outputs_at(p)) {
                auto nt = test.successor(t, o);
                if (!nt) {
                    continue;
                }
                if (step(o, false, *impl.successor(p, o), *nt, std::nullopt)) {
                    return true;
                }
            }
        }
        if (leaf) {
            run.schedule = schedule;
        }
        passing.insert(key);
        return false;
    };

    if (explore(impl.initial(), test.initial(), std::nullopt)) {
        run.pass = false;
        run.schedule = schedule;
    }
    for (const auto& s : run.schedule) {
        if (!s.enqueue) {
            run.trace.push_back(s.fired);
        }
    }
    return run;
}

} // namespace iots
