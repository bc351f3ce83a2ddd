#include "iots/execution.hpp"
#include "iots/fault_domain.hpp"
#include "iots/operations.hpp"
#include "iots/relations.hpp"
#include "iots/testgen.hpp"
#include "support/machines.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace iots;
using fixtures::delta;
using fixtures::in;
using fixtures::out;

namespace {

std::size_t find_case(const TestSuite& suite, const std::string& cover, const std::string& identifier)
{
    for (std::size_t i = 0; i < suite.cases.size(); ++i) {
        if (suite.provenance[i].cover == cover && suite.provenance[i].identifier == identifier) {
            return i;
        }
    }
    FAIL("no case " << cover << " / " << identifier);
    return 0;
}

Iots without(const Iots& m, const Transition& t)
{
    auto ts = m.transitions();
    ts.erase(std::find(ts.begin(), ts.end(), t));
    return Iots(m.alphabet(), m.states(), m.initial_id(), ts, m.name());
}

} // namespace

TEST_CASE("the specification passes its own suite")
{
    const Iots spec = fixtures::spec_a();
    auto suite = generate_suite(spec);
    auto r = run_suite(spec, suite);
    CHECK(r.pass);
    CHECK(r.failing.empty());
    CHECK(r.outcomes.size() == suite.cases.size());
    for (const auto& tc : suite.cases) {
        CHECK(covers_pass_traces(spec, tc));
        CHECK(simulate_input_eager(spec, tc).pass);
    }
}

TEST_CASE("the q2 retarget mutant fails the quiescence check after b")
{
    const Iots spec = fixtures::spec_a();
    const Iots mutant = fixtures::q2_retarget();
    auto suite = generate_suite(spec);
    auto i = find_case(suite, "V:s2:b", "W:s1:s2");
    auto v = run_verdict(mutant, suite.cases[i]);
    CHECK_FALSE(v.pass);
    REQUIRE(v.witness);
    CHECK(v.witness->back() == out("1"));
    CHECK_FALSE(oracle::passes(mutant, suite.cases[i]));

    auto e = simulate_input_eager(mutant, suite.cases[i]);
    CHECK_FALSE(e.pass);
    CHECK(e.trace.back() == out("1"));

    auto r = run_suite(mutant, suite);
    CHECK_FALSE(r.pass);
    CHECK(std::find(r.failing.begin(), r.failing.end(), i) != r.failing.end());
    for (std::size_t j = 0; j < suite.cases.size(); ++j) {
        CHECK(r.outcomes[j].pass == (std::find(r.failing.begin(), r.failing.end(), j) == r.failing.end()));
    }
}

TEST_CASE("an absent optional output never fails a case")
{
    const Iots spec = fixtures::spec_a();
    const Iots sub = without(spec, {"q1", out("1"), "s2"});
    auto suite = generate_suite(spec);
    auto r = run_suite(sub, suite);
    CHECK(r.pass);
    std::size_t uncovered = 0;
    for (const auto& tc : suite.cases) {
        uncovered += !covers_pass_traces(sub, tc);
    }
    CHECK(uncovered > 0);
}

TEST_CASE("empty suite passes")
{
    auto r = run_suite(fixtures::q2_retarget(), TestSuite{});
    CHECK(r.pass);
    CHECK(r.outcomes.empty());
}

TEST_CASE("alphabet mismatch is rejected")
{
    auto suite = generate_suite(fixtures::spec_a());
    Iots other = delta_closure(Iots(Alphabet({"a"}, {"0"}), {"s", "q"}, "s", {{"s", in("a"), "q"}, {"q", out("0"), "s"}}));
    CHECK_THROWS_AS(run_verdict(other, suite.cases[0]), PreconditionError);
    CHECK_THROWS_AS(simulate_input_eager(other, suite.cases[0]), PreconditionError);
}

TEST_CASE("a queued input is consumed before outputs")
{
    const Iots spec = fixtures::spec_a();
    const Iots at_s2 = rebase(spec, "s2");
    Iots u(spec.alphabet(), {"t0", "t1", "t2"}, "t0", {{"t0", in("b"), "t1"}, {"t1", out("0"), "t2"}});
    auto tc = complete_test_case(u);
    auto run = simulate_input_eager(at_s2, tc);
    CHECK(run.pass);
    REQUIRE(run.schedule.size() == 3);
    CHECK(run.schedule[0].enqueue);
    CHECK(run.schedule[1].queue == in("b"));
    CHECK(run.schedule[1].impl_state == "s2");
    CHECK(run.schedule[1].fired == in("b"));
    CHECK_FALSE(run.schedule[1].enqueue);
    CHECK(run.trace == fixtures::trace(spec, "b.0"));
    CHECK(run_verdict(at_s2, tc).pass);
}

TEST_CASE("quiescence fires at a stable state with an empty queue")
{
    const Iots spec = fixtures::spec_a();
    Iots u(spec.alphabet(), {"t0", "t1"}, "t0", {{"t0", delta(), "t1"}});
    auto run = simulate_input_eager(spec, complete_test_case(u));
    CHECK(run.pass);
    REQUIRE(run.schedule.size() == 1);
    CHECK(run.schedule[0].fired == delta());
    CHECK(run.schedule[0].impl_state == "s1");

    auto at_s2 = simulate_input_eager(rebase(spec, "s2"), complete_test_case(u));
    CHECK_FALSE(at_s2.pass);
    CHECK(at_s2.trace == fixtures::trace(spec, "1"));
}

TEST_CASE("verdicts match fail-trace enumeration and the eager engine")
{
    std::mt19937_64 rng(314);
    int fails = 0;
    for (int i = 0; i < 25; ++i) {
        Iots spec = fixtures::random_generatable(rng);
        auto suite = generate_suite(spec);
        for (int j = 0; j < 6; ++j) {
            Iots impl = fixtures::random_valid_where(rng, [&](const Iots& m) {
                return m.alphabet() == spec.alphabet();
            });
            for (const auto& tc : suite.cases) {
                auto v = run_verdict(impl, tc);
                CHECK(v.pass == oracle::passes(impl, tc));
                CHECK(simulate_input_eager(impl, tc).pass == v.pass);
                if (!v.pass) {
                    ++fails;
                    REQUIRE(v.witness);
                    auto fail_traces = tc.fail_traces();
                    CHECK(std::find(fail_traces.begin(), fail_traces.end(), *v.witness) != fail_traces.end());
                }
            }
        }
    }
    CHECK(fails > 50);
}

TEST_CASE("fault domain with no operators is the base")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, 4};
    fd.operators.clear();
    auto d = enumerate_fault_domain(fd);
    REQUIRE(d.mutants.size() == 1);
    CHECK(d.mutants[0] == canonical_form(spec));
    CHECK_FALSE(d.partial);
    CHECK_FALSE(d.sampled);

    fd.operators = kAllOperators;
    fd.max_edits = 0;
    CHECK(enumerate_fault_domain(fd).mutants.size() == 1);
}

TEST_CASE("canonical form ignores state names")
{
    const Iots spec = fixtures::spec_a();
    std::string text = fixtures::kSpecAText;
    for (auto [from, to] : {std::pair{"s1", "z7"}, std::pair{"q2", "k0"}}) {
        for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from)) {
            text.replace(pos, 2, to);
        }
    }
    const Iots renamed = delta_closure(fixtures::parse(text));
    CHECK(canonical_form(renamed) == canonical_form(spec));
    CHECK(canonical_hash(renamed) == canonical_hash(spec));
    CHECK(canonical_hash(fixtures::q2_retarget()) != canonical_hash(spec));
    CHECK(canonical_form(spec).initial_id() == "m0");
}

TEST_CASE("single retargets of the running example")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, spec.size()};
    fd.operators = {MutationOperator::Retarget};
    auto d = enumerate_fault_domain(fd);
    CHECK(d.mutants.size() > 3);
    CHECK(d.candidates >= d.mutants.size());

    std::set<std::uint64_t> hashes;
    for (const auto& m : d.mutants) {
        CHECK(validate(m).ok());
        CHECK(is_delta_closed(m));
        CHECK(m.input_states().size() <= 2);
        CHECK(m.size() <= spec.size());
        CHECK(is_input_state_minimal(m).minimal);
        CHECK(canonical_form(m) == m);
        CHECK(hashes.insert(canonical_hash(m)).second);
    }
    CHECK(hashes.count(canonical_hash(fixtures::q2_retarget())) == 1);
    CHECK(hashes.count(canonical_hash(spec)) == 1);
}

TEST_CASE("mutants stay inside the fault domain")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, 6, 2};
    auto d = enumerate_fault_domain(fd);
    CHECK(d.mutants.size() >= 100);
    CHECK(d.members == d.mutants.size());
    for (const auto& m : d.mutants) {
        CHECK(validate(m).ok());
        CHECK(m.input_states().size() <= 2);
        CHECK(m.size() <= 6);
        CHECK(is_input_state_minimal(m).minimal);
    }
    auto again = enumerate_fault_domain(fd);
    CHECK(again.mutants == d.mutants);
}

TEST_CASE("sampling keeps the budget and is seeded")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, 6, 2};
    fd.budget = 50;
    fd.seed = 9;
    auto a = enumerate_fault_domain(fd);
    CHECK(a.sampled);
    CHECK(a.mutants.size() == 50);
    CHECK(a.members > 50);
    CHECK(enumerate_fault_domain(fd).mutants == a.mutants);
    fd.seed = 10;
    CHECK(enumerate_fault_domain(fd).mutants != a.mutants);

    fd.candidate_guard = 20;
    fd.budget = 100000;
    auto g = enumerate_fault_domain(fd);
    CHECK(g.partial);
    CHECK(g.candidates == 20);
}

TEST_CASE("single-edit experiment on the running example")
{
    const Iots spec = fixtures::spec_a();
    auto suite = generate_suite(spec);
    FaultDomainSpec fd{spec, 2, 6, 1};
    auto report = completeness_experiment(spec, suite, fd, 2);
    CHECK(report.conforming_fail == 0);
    CHECK(report.nonconforming_pass == 0);
    CHECK(report.disagreements == 0);
    CHECK(report.nonconforming_fail > 0);
    CHECK(report.total() ==
          report.conforming_pass + report.conforming_fail + report.nonconforming_fail + report.nonconforming_pass);

    auto domain = enumerate_fault_domain(fd);
    REQUIRE(domain.mutants.size() == report.total());
    for (const auto& r : report.records) {
        const Iots& m = domain.mutants[r.id];
        auto brute = oracle::ioco(m, spec, 2 * std::max(m.size(), spec.size()));
        CHECK(r.conforms == !brute.has_value());
        CHECK(r.hash == canonical_hash(m));
    }
    CHECK(format_report(report) == format_report(completeness_experiment(spec, suite, fd, 1)));
}

TEST_CASE("output deletions are conforming and pass")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, 4, 2};
    fd.operators = {MutationOperator::DeleteOutput};
    auto report = completeness_experiment(spec, generate_suite(spec), fd);
    CHECK(report.total() >= 3);
    CHECK(report.conforming_pass == report.total());
}

TEST_CASE("empty mutant stream")
{
    const Iots spec = fixtures::spec_a();
    FaultDomainSpec fd{spec, 2, 6, 2};
    fd.budget = 0;
    auto report = completeness_experiment(spec, generate_suite(spec), fd);
    CHECK(report.total() == 0);
    CHECK(report.conforming_pass + report.conforming_fail + report.nonconforming_fail + report.nonconforming_pass == 0);
    auto text = format_report(report);
    CHECK(text.rfind("summary mutants=0 ", 0) == 0);
}
