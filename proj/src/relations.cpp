#include "iots/relations.hpp"

#include "iots/operations.hpp"

#include <algorithm>
#include <numeric>

namespace iots {

namespace {

void require_closed(const Iots& m, const char* role)
{
    if (!is_delta_closed(m)) {
        throw PreconditionError(std::string(role) + " '" + m.name() + "' is not delta-closed");
    }
}

} // namespace

Verdict ioco_check(const Iots& impl, const Iots& spec)
{
    if (impl.alphabet() != spec.alphabet()) {
        throw PreconditionError("implementation and specification alphabets differ");
    }
    require_closed(impl, "implementation");
    require_closed(spec, "specification");
    if (auto r = validate(spec, {Property::InputComplete}); !r.ok()) {
        throw PreconditionError("specification is not input-complete: " +
                                r.findings.at(Property::InputComplete).detail);
    }

    // Pairs are dequeued in shortlex order of their access traces, so the
    // first violating pair carries the least violating trace.
    auto product = intersection(impl, spec);
    for (const auto& [q, trace] : access_traces(product.product)) {
        auto [p, s] = product.origin[q];
        for (const auto& x : impl.outputs_at(p)) {
            if (!spec.enables(s, x)) {
                return {false, Counterexample{trace, x}};
            }
        }
    }
    return {};
}

ReductionResult is_reduction(const Iots& spec, std::string_view s1, std::string_view s2)
{
    const Iots left = rebase(spec, s1);
    const Iots right = rebase(spec, s2);
    auto product = intersection(left, right);
    for (const auto& [q, trace] : access_traces(product.product)) {
        auto [s, t] = product.origin[q];
        if (product.product.outputs_at(q) != left.outputs_at(s)) {
            return {false, std::pair{left.id(s), right.id(t)}};
        }
    }
    return {};
}

CompatibilityResult compatible(const Iots& spec, std::string_view s1, std::string_view s2)
{
    const Iots left = rebase(spec, s1);
    const Iots right = rebase(spec, s2);
    auto product = intersection(left, right);
    for (const auto& [q, trace] : access_traces(product.product)) {
        if (product.product.is_sink(q)) {
            auto [s, t] = product.origin[q];
            return {false, SinkWitness{left.id(s), right.id(t), trace}};
        }
    }
    return {};
}

MinimalityResult is_input_state_minimal(const Iots& spec)
{
    auto inputs = spec.input_states();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
            if (compatible(spec, spec.id(inputs[i]), spec.id(inputs[j])).compatible) {
                return {false, std::pair{spec.id(inputs[i]), spec.id(inputs[j])}};
            }
        }
    }
    return {};
}

std::optional<std::map<StateId, StateId>> check_input_state_homeomorphic(const Iots& impl, const Iots& spec)
{
    require_closed(impl, "implementation");
    require_closed(spec, "specification");
    const auto impl_inputs = impl.input_states();
    auto spec_inputs = spec.input_states();
    if (impl_inputs.size() != spec_inputs.size()) {
        return std::nullopt;
    }
    if (impl_inputs.size() > kMaxHomeomorphismStates) {
        throw PreconditionError("homeomorphism search limited to " + std::to_string(kMaxHomeomorphismStates) +
                                " input states");
    }

    // Bridge traces of every implementation input state with the input state
    // they lead to, as positions into impl_inputs.
    std::vector<std::vector<std::pair<Trace, std::size_t>>> bridges(impl_inputs.size());
    auto position = [&](StateIndex p) {
        return static_cast<std::size_t>(std::find(impl_inputs.begin(), impl_inputs.end(), p) - impl_inputs.begin());
    };
    for (std::size_t i = 0; i < impl_inputs.size(); ++i) {
        for (auto& gamma : bridge_traces(impl, impl_inputs[i])) {
            auto target = after(impl, impl_inputs[i], gamma);
            bridges[i].emplace_back(std::move(gamma), position(*target));
        }
    }

    std::vector<std::size_t> perm(spec_inputs.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (std::size_t i = 0; i < impl_inputs.size() && ok; ++i) {
            StateIndex image = spec_inputs[perm[i]];
            if (impl_inputs[i] == impl.initial() && image != spec.initial()) {
                ok = false;
                break;
            }
            for (const auto& [gamma, target] : bridges[i]) {
                auto reached = after(spec, image, gamma);
                if (!reached || *reached != spec_inputs[perm[target]]) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            std::map<StateId, StateId> phi;
            for (std::size_t i = 0; i < impl_inputs.size(); ++i) {
                phi[impl.id(impl_inputs[i])] = spec.id(spec_inputs[perm[i]]);
            }
            return phi;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

} // namespace iots
