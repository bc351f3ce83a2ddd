#pragma once

#include "iots/model.hpp"
#include "iots/testgen.hpp"

#include <optional>
#include <vector>

namespace iots {

struct RunOutcome {
    bool pass = true;
    /// Shortlex-least trace leading the test into fail.
    std::optional<Trace> witness;
};

/// Fail iff the intersection of implementation and test reaches a state
/// whose test component is fail.
RunOutcome run_verdict(const Iots& impl, const TestCase& tc);

struct SuiteOutcome {
    bool pass = true;
    /// Indices of failing cases in suite order.
    std::vector<std::size_t> failing;
    std::vector<RunOutcome> outcomes;
};

SuiteOutcome run_suite(const Iots& impl, const TestSuite& suite);

/// Whether every pass trace of the test is a trace of the implementation.
/// Reported next to the verdict, never folded into it.
bool covers_pass_traces(const Iots& impl, const TestCase& tc);

struct EagerStep {
    /// Queue contents before the action fired.
    std::optional<Label> queue;
    StateId impl_state;
    StateId test_state;
    /// Input enqueued by the test, input consumed by the implementation or
    /// output emitted by it.
    Label fired;
    bool enqueue = false;
};

struct EagerRun {
    bool pass = true;
    /// Schedule of the first failing branch, or of the last branch explored
    /// when every branch passes.
    std::vector<EagerStep> schedule;
    /// Observable trace of `schedule`.
    Trace trace;
    std::size_t configurations = 0;
};

/// Explores every output choice of the implementation under input-eager
/// scheduling with a one-place input queue.
EagerRun simulate_input_eager(const Iots& impl, const TestCase& tc);

} // namespace iots
