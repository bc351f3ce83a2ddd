#include "iots/fault_domain.hpp"

#include "iots/format.hpp"
#include "iots/operations.hpp"
#include "iots/relations.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace iots {

std::string to_string(MutationOperator op)
{
    switch (op) {
    case MutationOperator::Retarget:
        return "retarget";
    case MutationOperator::SwapOutput:
        return "swap-output";
    case MutationOperator::DeleteOutput:
        return "delete-output";
    case MutationOperator::AddOutput:
        return "add-output";
    case MutationOperator::InsertOutput:
        return "insert-output";
    }
    return "unknown";
}

Iots canonical_form(const Iots& m)
{
    std::map<StateIndex, StateId> names;
    for (const auto& [s, trace] : access_traces(m)) {
        names[s] = "m" + std::to_string(names.size());
    }
    std::vector<StateId> states;
    std::vector<Transition> transitions;
    for (const auto& [s, name] : names) {
        states.push_back(name);
        for (const auto& e : m.edges(s)) {
            transitions.push_back({name, e.label, names.at(e.target)});
        }
    }
    return Iots(m.alphabet(), std::move(states), names.at(m.initial()), std::move(transitions), m.name());
}

std::uint64_t canonical_hash(const Iots& m)
{
    const std::string text = serialize_iots(canonical_form(m).renamed(""));
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

using Edit = std::vector<Transition>;

Iots without_quiescence(const Iots& m)
{
    std::vector<Transition> kept;
    for (auto& t : m.transitions()) {
        if (!t.label.is_quiescence()) {
            kept.push_back(std::move(t));
        }
    }
    const auto& a = m.alphabet();
    return Iots(Alphabet(a.inputs(), a.outputs(), false), m.states(), m.initial_id(), std::move(kept), m.name());
}

bool enables(const Edit& ts, const StateId& s, const Label& l)
{
    return std::any_of(ts.begin(), ts.end(), [&](const Transition& t) { return t.source == s && t.label == l; });
}

std::size_t real_outputs(const Edit& ts, const StateId& s)
{
    return std::count_if(ts.begin(), ts.end(),
                         [&](const Transition& t) { return t.source == s && t.label.is_real_output(); });
}

// Every transition set one operator application away from `ts`.
std::vector<Edit> neighbours(const Edit& ts, const std::vector<StateId>& base_states, const Alphabet& alphabet,
                             const std::vector<MutationOperator>& ops, std::size_t max_states)
{
    std::set<StateId> known(base_states.begin(), base_states.end());
    for (const auto& t : ts) {
        known.insert(t.source);
        known.insert(t.target);
    }
    const std::vector<StateId> states(known.begin(), known.end());
    StateId fresh;
    for (std::size_t n = 0; fresh.empty() || known.count(fresh); ++n) {
        fresh = "n" + std::to_string(n);
    }

    std::vector<Edit> out;
    auto emit = [&](Edit e) {
        std::sort(e.begin(), e.end());
        out.push_back(std::move(e));
    };
    auto has = [&](MutationOperator op) { return std::find(ops.begin(), ops.end(), op) != ops.end(); };
    const auto outputs = [&] {
        std::vector<Label> o;
        for (const auto& name : alphabet.outputs()) {
            o.push_back(Label::output(name));
        }
        return o;
    }();

    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Transition& t = ts[i];
        if (has(MutationOperator::Retarget)) {
            for (const auto& s : states) {
                if (s != t.target) {
                    Edit e = ts;
                    e[i].target = s;
                    emit(std::move(e));
                }
            }
        }
        if (has(MutationOperator::InsertOutput) && states.size() < max_states) {
            for (const auto& o : outputs) {
                Edit e = ts;
                e[i].target = fresh;
                e.push_back({fresh, o, t.target});
                emit(std::move(e));
            }
        }
        if (!t.label.is_real_output()) {
            continue;
        }
        if (has(MutationOperator::SwapOutput)) {
            for (const auto& o : outputs) {
                if (o != t.label && !enables(ts, t.source, o)) {
                    Edit e = ts;
                    e[i].label = o;
                    emit(std::move(e));
                }
            }
        }
        if (has(MutationOperator::DeleteOutput) && real_outputs(ts, t.source) > 1) {
            Edit e = ts;
            e.erase(e.begin() + static_cast<std::ptrdiff_t>(i));
            emit(std::move(e));
        }
    }
    if (has(MutationOperator::AddOutput)) {
        for (const auto& s : states) {
            for (const auto& o : outputs) {
                if (enables(ts, s, o)) {
                    continue;
                }
                for (const auto& target : states) {
                    Edit e = ts;
                    e.push_back({s, o, target});
                    emit(std::move(e));
                }
            }
        }
    }
    return out;
}

} // namespace

FaultDomain enumerate_fault_domain(const FaultDomainSpec& fd)
{
    FaultDomain domain;
    if (fd.budget == 0) {
        return domain;
    }
    const Iots base = is_delta_closed(fd.base) ? without_quiescence(fd.base) : fd.base;
    const auto& states = base.states();

    std::set<Edit> seen{base.transitions()};
    std::vector<Edit> all{base.transitions()};
    std::vector<Edit> frontier = all;
    domain.candidates = 1;
    for (std::size_t edit = 0; edit < fd.max_edits && !domain.partial; ++edit) {
        std::vector<Edit> next;
        for (const auto& ts : frontier) {
            for (auto& e : neighbours(ts, states, base.alphabet(), fd.operators, fd.max_states)) {
                if (!seen.insert(e).second) {
                    continue;
                }
                if (domain.candidates == fd.candidate_guard) {
                    domain.partial = true;
                    break;
                }
                ++domain.candidates;
                next.push_back(e);
                all.push_back(std::move(e));
            }
            if (domain.partial) {
                break;
            }
        }
        frontier = std::move(next);
    }

    std::map<std::string, Iots> members;
    for (auto& ts : all) {
        std::set<StateId> used(states.begin(), states.end());
        for (const auto& t : ts) {
            used.insert(t.source);
            used.insert(t.target);
        }
        Iots raw(base.alphabet(), {used.begin(), used.end()}, base.initial_id(), std::move(ts), base.name());
        Iots closed = delta_closure(rebase(raw, raw.initial()));
        if (closed.size() > fd.max_states || closed.input_states().size() > fd.k) {
            continue;
        }
        if (!validate(closed, kMembership).ok() || !is_input_state_minimal(closed).minimal) {
            continue;
        }
        Iots canonical = canonical_form(closed).renamed("");
        std::string key = serialize_iots(canonical);
        members.emplace(std::move(key), std::move(canonical));
    }
    domain.members = members.size();

    std::vector<Iots> ordered;
    ordered.reserve(members.size());
    for (auto& [key, m] : members) {
        ordered.push_back(std::move(m));
    }
    if (ordered.size() > fd.budget) {
        // Partial Fisher-Yates on indices, then back to canonical order.
        std::mt19937_64 rng(fd.seed);
        std::vector<std::size_t> idx(ordered.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = i;
        }
        for (std::size_t i = 0; i < fd.budget; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(fd.budget);
        std::sort(idx.begin(), idx.end());
        std::vector<Iots> sample;
        for (auto i : idx) {
            sample.push_back(std::move(ordered[i]));
        }
        ordered = std::move(sample);
        domain.sampled = true;
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        ordered[i] = ordered[i].renamed("mutant" + std::to_string(i));
    }
    domain.mutants = std::move(ordered);
    return domain;
}

namespace {

MutantRecord evaluate(const Iots& spec, const TestSuite& suite, const Iots& mutant, std::size_t id)
{
    MutantRecord rec;
    rec.id = id;
    rec.hash = canonical_hash(mutant);
    auto verdict = ioco_check(mutant, spec);
    rec.conforms = verdict.conforms;
    rec.counterexample = verdict.counterexample;
    for (std::size_t i = 0; i < suite.cases.size(); ++i) {
        const auto& tc = suite.cases[i];
        auto outcome = run_verdict(mutant, tc);
        auto eager = simulate_input_eager(mutant, tc);
        if (eager.pass != outcome.pass) {
            ++rec.disagreements;
        }
        if (!covers_pass_traces(mutant, tc)) {
            ++rec.uncovered;
        }
        if (!outcome.pass && rec.suite_pass) {
            rec.suite_pass = false;
            rec.first_failing = i;
            rec.failing_case = tc.machine.name();
            rec.witness = outcome.witness;
        }
    }
    if (rec.conforms != rec.suite_pass) {
        rec.model = serialize_iots(mutant);
    }
    if (!rec.conforms && rec.suite_pass) {
        try {
            rec.homeomorphic = check_input_state_homeomorphic(mutant, spec).has_value();
        } catch (const PreconditionError&) {
            rec.homeomorphic.reset();
        }
    }
    return rec;
}

} // namespace

ExperimentReport completeness_experiment(const Iots& spec, const TestSuite& suite, const FaultDomain& domain,
                                         unsigned threads)
{
    ExperimentReport report;
    report.candidates = domain.candidates;
    report.partial = domain.partial;
    report.sampled = domain.sampled;
    const auto& mutants = domain.mutants;
    report.records.resize(mutants.size());

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(mutants.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < mutants.size(); i = next++) {
            try {
                report.records[i] = evaluate(spec, suite, mutants[i], i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (const auto& r : report.records) {
        report.disagreements += r.disagreements;
        if (r.conforms) {
            (r.suite_pass ? report.conforming_pass : report.conforming_fail)++;
        } else {
            (r.suite_pass ? report.nonconforming_pass : report.nonconforming_fail)++;
        }
    }
    return report;
}

ExperimentReport completeness_experiment(const Iots& spec, const TestSuite& suite, const FaultDomainSpec& fd,
                                         unsigned threads)
{
    return completeness_experiment(spec, suite, enumerate_fault_domain(fd), threads);
}

std::string format_report(const ExperimentReport& report)
{
    std::ostringstream out;
    for (const auto& r : report.records) {
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.hash));
        out << "mutant=" << r.id << " hash=" << hash << " ioco=" << (r.conforms ? "pass" : "fail");
        if (r.counterexample) {
            out << " counterexample=" << format_trace(r.counterexample->trace) << "/" << r.counterexample->output.name;
        }
        out << " suite=" << (r.suite_pass ? "pass" : "fail");
        out << " case=" << (r.failing_case.empty() ? "-" : r.failing_case);
        out << " witness=" << (r.witness ? format_trace(*r.witness) : "-");
        out << " disagreements=" << r.disagreements << " uncovered=" << r.uncovered;
        if (!r.conforms && r.suite_pass) {
            out << " homeomorphic=" << (!r.homeomorphic ? "unknown" : *r.homeomorphic ? "yes" : "no");
        }
        out << "\n";
        if (!r.model.empty()) {
            std::istringstream lines(r.model);
            for (std::string line; std::getline(lines, line);) {
                out << "#   " << line << "\n";
            }
        }
    }
    out << "summary mutants=" << report.total() << " candidates=" << report.candidates
        << " conforming_pass=" << report.conforming_pass << " conforming_fail=" << report.conforming_fail
        << " nonconforming_fail=" << report.nonconforming_fail << " nonconforming_pass=" << report.nonconforming_pass
        << " disagreements=" << report.disagreements << " sampled=" << (report.sampled ? "yes" : "no")
        << " partial=" << (report.partial ? "yes" : "no") << "\n";
    return out.str();
}

} // namespace iots
