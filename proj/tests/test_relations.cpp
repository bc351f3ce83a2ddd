#include "iots/operations.hpp"
#include "iots/relations.hpp"
#include "support/machines.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace iots;
using fixtures::in;
using fixtures::out;

namespace {

// Retargets one or two transitions of `spec`; returns nullopt when the
// result leaves the model class.
std::optional<Iots> variant(const Iots& spec, std::mt19937_64& rng)
{
    std::vector<Transition> ts;
    for (const auto& t : spec.transitions()) {
        if (!t.label.is_quiescence()) {
            ts.push_back(t);
        }
    }
    const std::size_t edits = 1 + rng() % 2;
    for (std::size_t i = 0; i < edits; ++i) {
        ts[rng() % ts.size()].target = spec.id(rng() % spec.size());
    }
    const auto& a = spec.alphabet();
    Iots m(Alphabet(a.inputs(), a.outputs()), spec.states(), spec.initial_id(), ts, "variant");
    m = rebase(m, m.initial());
    if (!validate(m).ok()) {
        return std::nullopt;
    }
    return delta_closure(m);
}

// Drops output transitions at states that keep another concrete output.
Iots random_submachine(const Iots& spec, std::mt19937_64& rng)
{
    auto ts = spec.transitions();
    std::vector<Transition> kept;
    for (const auto& t : ts) {
        if (t.label.is_real_output() && rng() % 2 == 0) {
            auto left = std::count_if(kept.begin(), kept.end(), [&](const Transition& k) {
                return k.source == t.source && k.label.is_real_output();
            });
            auto later = std::count_if(ts.begin(), ts.end(), [&](const Transition& k) {
                return k.source == t.source && k.label.is_real_output() && t.label < k.label;
            });
            if (left + later > 0) {
                continue;
            }
        }
        kept.push_back(t);
    }
    Iots m(spec.alphabet(), spec.states(), spec.initial_id(), kept, "sub");
    return rebase(m, m.initial());
}

Iots duplicate_s1(const Iots& open)
{
    auto ts = open.transitions();
    auto states = open.states();
    states.push_back("s1c");
    ts.push_back({"s1c", in("a"), "q1"});
    ts.push_back({"s1c", in("b"), "s1c"});
    for (auto& t : ts) {
        if (t.source == "s2" && t.label == in("a")) {
            t.target = "s1c";
        }
    }
    return delta_closure(Iots(open.alphabet(), states, open.initial_id(), ts, "dup"));
}

} // namespace

TEST_CASE("ioco on the running example")
{
    const Iots spec = fixtures::spec_a();
    CHECK(ioco_check(spec, spec).conforms);

    auto v = ioco_check(fixtures::q2_retarget(), spec);
    CHECK_FALSE(v.conforms);
    REQUIRE(v.counterexample);
    CHECK(format_trace(v.counterexample->trace) == "a.0.b.0");
    CHECK(v.counterexample->output == out("1"));
    auto brute = oracle::ioco(fixtures::q2_retarget(), spec, 8);
    REQUIRE(brute);
    CHECK(brute->trace == v.counterexample->trace);
    CHECK(brute->output == v.counterexample->output);

    auto ts = spec.transitions();
    ts.erase(std::find(ts.begin(), ts.end(), Transition{"q1", out("1"), "s2"}));
    Iots sub(spec.alphabet(), spec.states(), "s1", ts);
    CHECK(ioco_check(sub, spec).conforms);
    CHECK_FALSE(oracle::ioco(sub, spec, 8));
}

TEST_CASE("ioco preconditions")
{
    const Iots spec = fixtures::spec_a();
    CHECK_THROWS_AS(ioco_check(fixtures::spec_a_open(), spec), PreconditionError);
    auto ts = spec.transitions();
    ts.erase(std::find(ts.begin(), ts.end(), Transition{"s2", in("a"), "s1"}));
    Iots partial(spec.alphabet(), spec.states(), "s1", ts);
    CHECK_THROWS_AS(ioco_check(spec, partial), PreconditionError);
}

TEST_CASE("ioco agrees with trace enumeration on random pairs")
{
    std::mt19937_64 rng(2024);
    int checked = 0;
    int violations = 0;
    while (checked < 200) {
        Iots spec = fixtures::random_valid(rng);
        Iots impl = spec;
        if (rng() % 3 == 0) {
            impl = fixtures::random_valid(rng);
        } else if (auto v = variant(spec, rng)) {
            impl = *v;
        }
        auto fast = ioco_check(impl, spec);
        auto slow = oracle::ioco(impl, spec, 2 * std::max(impl.size(), spec.size()));
        CHECK(fast.conforms == !slow.has_value());
        if (!fast.conforms && slow) {
            CHECK(fast.counterexample->trace == slow->trace);
            CHECK(fast.counterexample->output == slow->output);
            ++violations;
        }
        ++checked;
    }
    CHECK(violations > 20);
}

TEST_CASE("submachines conform")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Iots spec = fixtures::random_valid(rng);
        Iots sub = random_submachine(spec, rng);
        CHECK(ioco_check(sub, spec).conforms);
    }
}

TEST_CASE("reduction")
{
    const Iots spec = fixtures::spec_a();
    CHECK(is_reduction(spec, "s1", "s1").holds);
    auto r12 = is_reduction(spec, "s1", "s2");
    CHECK_FALSE(r12.holds);
    CHECK(r12.witness == std::pair<StateId, StateId>{"s1", "s2"});
    CHECK_FALSE(is_reduction(spec, "s2", "s1").holds);
    CHECK_THROWS_AS(is_reduction(spec, "s1", "zz"), ModelError);
}

TEST_CASE("compatibility")
{
    const Iots spec = fixtures::spec_a();
    CHECK(compatible(spec, "s1", "s1").compatible);
    auto c = compatible(spec, "s1", "s2");
    CHECK_FALSE(c.compatible);
    REQUIRE(c.sink_witness);
    CHECK(c.sink_witness->left == "q1");
    CHECK(c.sink_witness->right == "s1");
    CHECK(format_trace(c.sink_witness->access) == "a");

    auto dup = duplicate_s1(fixtures::spec_a_open());
    CHECK(compatible(dup, "s1", "s1c").compatible);
}

TEST_CASE("compatibility matches validation of the intersection")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 60; ++i) {
        Iots spec = fixtures::random_valid(rng);
        auto inputs = spec.input_states();
        for (auto s : inputs) {
            for (auto t : inputs) {
                auto p = intersection(rebase(spec, s), rebase(spec, t));
                bool valid = validate(p.product, {Property::InputComplete, Property::Progressive}).ok();
                CHECK(compatible(spec, spec.id(s), spec.id(t)).compatible == valid);
                if (is_reduction(spec, spec.id(s), spec.id(t)).holds) {
                    CHECK(compatible(spec, spec.id(s), spec.id(t)).compatible);
                }
            }
        }
    }
}

TEST_CASE("input-state minimality")
{
    CHECK(is_input_state_minimal(fixtures::spec_a()).minimal);
    auto dup = is_input_state_minimal(duplicate_s1(fixtures::spec_a_open()));
    CHECK_FALSE(dup.minimal);
    CHECK(dup.offending == std::pair<StateId, StateId>{"s1", "s1c"});

    Alphabet a({"a"}, {"0"});
    Iots one = delta_closure(Iots(a, {"s", "q"}, "s", {{"s", in("a"), "q"}, {"q", out("0"), "s"}}));
    CHECK(is_input_state_minimal(one).minimal);
}

TEST_CASE("input-state homeomorphism")
{
    const Iots spec = fixtures::spec_a();
    auto id = check_input_state_homeomorphic(spec, spec);
    REQUIRE(id);
    CHECK(*id == std::map<StateId, StateId>{{"s1", "s1"}, {"s2", "s2"}});

    std::string text = fixtures::kSpecAText;
    for (auto [from, to] : {std::pair{"s1", "u9"}, std::pair{"s2", "u3"}}) {
        for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from)) {
            text.replace(pos, 2, to);
        }
    }
    auto renamed = delta_closure(fixtures::parse(text));
    auto phi = check_input_state_homeomorphic(renamed, spec);
    REQUIRE(phi);
    CHECK(*phi == std::map<StateId, StateId>{{"u9", "s1"}, {"u3", "s2"}});

    CHECK_FALSE(check_input_state_homeomorphic(fixtures::q2_retarget(), spec));
    CHECK_FALSE(oracle::homeomorphic(fixtures::q2_retarget(), spec));
}

TEST_CASE("homeomorphism search agrees with the brute-force oracle")
{
    std::mt19937_64 rng(17);
    const Iots spec = fixtures::spec_a();
    int found = 0;
    for (int i = 0; i < 300; ++i) {
        auto v = variant(spec, rng);
        if (!v) {
            continue;
        }
        bool fast = check_input_state_homeomorphic(*v, spec).has_value();
        CHECK(fast == oracle::homeomorphic(*v, spec));
        found += fast;
    }
    CHECK(found > 0);
}
