#pragma once

#include "iots/execution.hpp"
#include "iots/model.hpp"
#include "iots/relations.hpp"
#include "iots/testgen.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iots {

/// InsertOutput splits a transition (s, l, t) into (s, l, n) and (n, o, t)
/// through a fresh output state n.
enum class MutationOperator : std::uint8_t { Retarget, SwapOutput, DeleteOutput, AddOutput, InsertOutput };

std::string to_string(MutationOperator op);

inline const std::vector<MutationOperator> kAllOperators{MutationOperator::Retarget, MutationOperator::SwapOutput,
                                                         MutationOperator::DeleteOutput, MutationOperator::AddOutput,
                                                         MutationOperator::InsertOutput};

inline constexpr std::size_t kCandidateGuard = 10'000'000;

struct FaultDomainSpec {
    /// The specification; mutations act on its δ-free part.
    Iots base;
    /// Maximum number of input states of a mutant.
    std::size_t k = 0;
    std::size_t max_states = 0;
    /// Number of operator applications composed (0 yields the base only).
    std::size_t max_edits = 1;
    std::vector<MutationOperator> operators = kAllOperators;
    /// Maximum number of mutants kept; larger domains are sampled.
    std::size_t budget = 100'000;
    std::uint64_t seed = 0;
    std::size_t candidate_guard = kCandidateGuard;
};

struct FaultDomain {
    /// δ-closed mutants in canonical form and canonical order.
    std::vector<Iots> mutants;
    std::size_t candidates = 0;
    /// Canonical members before sampling.
    std::size_t members = 0;
    /// The candidate guard stopped the enumeration.
    bool partial = false;
    bool sampled = false;
};

/// States renamed m0, m1, ... in breadth-first order from the initial
/// state, following edges in label order. Unreachable states are dropped.
Iots canonical_form(const Iots& m);
/// FNV-1a over the serialized canonical form.
std::uint64_t canonical_hash(const Iots& m);

FaultDomain enumerate_fault_domain(const FaultDomainSpec& fd);

struct MutantRecord {
    std::size_t id = 0;
    std::uint64_t hash = 0;
    bool conforms = true;
    std::optional<Counterexample> counterexample;
    bool suite_pass = true;
    std::optional<std::size_t> first_failing;
    std::string failing_case;
    std::optional<Trace> witness;
    /// Cases whose input-eager verdict differs from run_verdict.
    std::size_t disagreements = 0;
    /// Cases whose pass traces are not all traces of the mutant.
    std::size_t uncovered = 0;
    /// Homeomorphism diagnostic, filled for escapes only.
    std::optional<bool> homeomorphic;
    /// Serialized mutant, filled for escapes and soundness violations.
    std::string model;
};

struct ExperimentReport {
    std::size_t conforming_pass = 0;
    std::size_t conforming_fail = 0;
    std::size_t nonconforming_fail = 0;
    std::size_t nonconforming_pass = 0;
    std::size_t disagreements = 0;
    std::size_t candidates = 0;
    bool partial = false;
    bool sampled = false;
    std::vector<MutantRecord> records;

    std::size_t total() const { return records.size(); }
};

/// Classifies every mutant by ioco and by the suite. `threads` = 0 uses the
/// hardware concurrency.
ExperimentReport completeness_experiment(const Iots& spec, const TestSuite& suite, const FaultDomainSpec& fd,
                                         unsigned threads = 0);
ExperimentReport completeness_experiment(const Iots& spec, const TestSuite& suite, const FaultDomain& domain,
                                         unsigned threads = 0);

/// One line per mutant followed by a summary line.
std::string format_report(const ExperimentReport& report);

} // namespace iots
