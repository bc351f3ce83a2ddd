#include "iots/cli.hpp"

#include "iots/execution.hpp"
#include "iots/fault_domain.hpp"
#include "iots/format.hpp"
#include "iots/operations.hpp"
#include "iots/relations.hpp"
#include "iots/testgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace iots {

namespace {

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliError{kExitUsage, "cannot read '" + path + "'"};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw CliError{kExitUsage, "cannot write '" + path + "'"};
    }
}

Iots load_model(const std::string& path)
{
    auto parsed = parse_iots(read_file(path));
    if (!parsed.ok()) {
        std::string message = path + ": parse error";
        for (const auto& e : parsed.errors) {
            message += "\n  " + e.to_string();
        }
        throw CliError{kExitUsage, message};
    }
    return std::move(*parsed.machine);
}

// Specifications and implementations are used δ-closed.
Iots closed(const Iots& m)
{
    return is_delta_closed(m) ? m : delta_closure(m);
}

SuiteBundle load_suite(const std::string& path)
{
    try {
        return read_suite(read_file(path));
    } catch (const ParseFailure& e) {
        throw CliError{kExitUsage, path + ": " + e.what()};
    }
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out)
{
    if (out_path.empty()) {
        out << text;
    } else {
        write_file(out_path, text);
    }
}

int cmd_validate(const std::string& path, std::ostream& out)
{
    Iots m = load_model(path);
    PropertySet required = kMembership;
    if (m.alphabet().quiescent()) {
        required = required.with(Property::DeltaClosed);
    }
    auto report = validate(m, required);
    for (const auto& [p, f] : report.findings) {
        if (!required.contains(p)) {
            continue;
        }
        out << to_string(p) << ": " << (f.holds ? "ok" : "FAIL");
        if (!f.holds) {
            out << " (" << f.detail << ")";
        }
        out << "\n";
    }
    out << (report.ok() ? "valid" : "invalid") << "\n";
    return report.ok() ? kExitOk : kExitNegative;
}

int cmd_generate(const std::string& path, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const Iots spec = closed(load_model(path));
    SuiteStatistics stats;
    TestSuite suite;
    try {
        suite = generate_suite(spec, &stats);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    SuiteBundle bundle;
    bundle.spec_name = spec.name();
    bundle.params["candidates"] = std::to_string(stats.candidates);
    bundle.params["input_states"] = std::to_string(spec.input_states().size());
    bundle.suite = std::move(suite);

    std::ostringstream line;
    line << "cases=" << stats.cases << " candidates=" << stats.candidates << " max_depth=" << stats.max_depth
         << " identifiers=";
    bool first = true;
    for (const auto& [s, n] : stats.identifier_sizes) {
        line << (first ? "" : ",") << s << ":" << n;
        first = false;
    }
    line << "\n";
    if (out_path.empty()) {
        err << line.str();
        out << write_suite(bundle);
    } else {
        write_file(out_path, write_suite(bundle));
        out << line.str();
    }
    return kExitOk;
}

int cmd_check_ioco(const std::string& impl_path, const std::string& spec_path, std::ostream& out)
{
    const Iots impl = closed(load_model(impl_path));
    const Iots spec = closed(load_model(spec_path));
    if (impl.alphabet() != spec.alphabet()) {
        throw CliError{kExitUsage, "implementation and specification alphabets differ"};
    }
    Verdict v;
    try {
        v = ioco_check(impl, spec);
    } catch (const PreconditionError& e) {
        throw CliError{kExitUsage, e.what()};
    }
    if (v.conforms) {
        out << "conforms\n";
        return kExitOk;
    }
    out << "nonconforming trace=" << format_trace(v.counterexample->trace)
        << " output=" << v.counterexample->output.name << "\n";
    return kExitNegative;
}

int cmd_run(const std::string& impl_path, const std::string& suite_path, std::ostream& out)
{
    const Iots impl = closed(load_model(impl_path));
    const SuiteBundle bundle = load_suite(suite_path);
    for (const auto& tc : bundle.suite.cases) {
        if (tc.machine.alphabet() != impl.alphabet()) {
            throw CliError{kExitUsage, "alphabet of case " + tc.machine.name() + " differs from the implementation"};
        }
    }
    auto outcome = run_suite(impl, bundle.suite);
    for (std::size_t i = 0; i < bundle.suite.cases.size(); ++i) {
        const auto& r = outcome.outcomes[i];
        out << bundle.suite.cases[i].machine.name() << ' ' << (r.pass ? "pass" : "fail");
        if (r.witness) {
            out << " witness=" << format_trace(*r.witness);
        }
        out << "\n";
    }
    out << "suite " << (outcome.pass ? "pass" : "fail") << " failing=" << outcome.failing.size() << "\n";
    return outcome.pass ? kExitOk : kExitNegative;
}

struct ExperimentFlags {
    std::size_t budget = 100'000;
    std::optional<std::size_t> max_states;
    std::optional<std::size_t> k;
    std::size_t edits = 2;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int cmd_experiment(const std::string& path, const ExperimentFlags& flags, const std::string& out_path,
                   std::ostream& out, std::ostream& err)
{
    const Iots spec = closed(load_model(path));
    TestSuite suite;
    try {
        suite = generate_suite(spec);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    FaultDomainSpec fd;
    fd.base = spec;
    fd.k = flags.k.value_or(spec.input_states().size());
    fd.max_states = flags.max_states.value_or(std::max<std::size_t>(6, spec.size()));
    fd.max_edits = flags.edits;
    fd.budget = flags.budget;
    fd.seed = flags.seed;
    auto report = completeness_experiment(spec, suite, fd, flags.threads);
    std::string text = format_report(report);
    emit(text, out_path, out);
    if (!out_path.empty()) {
        out << text.substr(text.rfind("summary"));
    }
    return report.conforming_fail == 0 && report.nonconforming_pass == 0 ? kExitOk : kExitNegative;
}

int cmd_export_dot(const std::string& path, const std::string& case_id, const std::string& out_path,
                   std::ostream& out)
{
    const std::string text = read_file(path);
    if (text.rfind("iotsuite", 0) == 0) {
        const SuiteBundle bundle = load_suite(path);
        for (const auto& tc : bundle.suite.cases) {
            if (case_id.empty() || tc.machine.name() == case_id) {
                emit(export_dot(tc), out_path, out);
                return kExitOk;
            }
        }
        throw CliError{kExitUsage, case_id.empty() ? "suite has no cases" : "no case '" + case_id + "'"};
    }
    emit(export_dot(load_model(path)), out_path, out);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Complete ioco test suites for deterministic IOTS", "iotsgen"};
    app.require_subcommand(1);

    std::string model;
    std::string second;
    std::string out_path;
    std::string case_id;
    ExperimentFlags flags;

    auto* validate_cmd = app.add_subcommand("validate", "Check membership in the model class");
    validate_cmd->add_option("model", model, "Model file")->required();

    auto* generate_cmd = app.add_subcommand("generate", "Generate a complete test suite");
    generate_cmd->add_option("spec", model, "Specification file")->required();
    generate_cmd->add_option("--out", out_path, "Suite bundle output");

    auto* ioco_cmd = app.add_subcommand("check-ioco", "Decide impl ioco spec");
    ioco_cmd->add_option("impl", model, "Implementation file")->required();
    ioco_cmd->add_option("spec", second, "Specification file")->required();

    auto* run_cmd = app.add_subcommand("run", "Run a suite against an implementation");
    run_cmd->add_option("impl", model, "Implementation file")->required();
    run_cmd->add_option("suite", second, "Suite bundle")->required();

    auto* exp_cmd = app.add_subcommand("experiment", "Check the suite against a mutant fault domain");
    exp_cmd->add_option("spec", model, "Specification file")->required();
    exp_cmd->add_option("--budget", flags.budget, "Maximum number of mutants; larger domains are sampled");
    exp_cmd->add_option("--max-states", flags.max_states, "Maximum number of mutant states");
    exp_cmd->add_option("--k", flags.k, "Maximum number of mutant input states");
    exp_cmd->add_option("--edits", flags.edits, "Number of composed mutations");
    exp_cmd->add_option("--seed", flags.seed, "Sampling seed");
    exp_cmd->add_option("--threads", flags.threads, "Worker threads (0: hardware)");
    exp_cmd->add_option("--out", out_path, "Report output");

    auto* dot_cmd = app.add_subcommand("export-dot", "Render a model or a suite case as DOT");
    dot_cmd->add_option("path", model, "Model or suite file")->required();
    dot_cmd->add_option("--case", case_id, "Case id when exporting from a suite");
    dot_cmd->add_option("--out", out_path, "DOT output");

    std::vector<const char*> argv{"iotsgen"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(model, out);
        }
        if (generate_cmd->parsed()) {
            return cmd_generate(model, out_path, out, err);
        }
        if (ioco_cmd->parsed()) {
            return cmd_check_ioco(model, second, out);
        }
        if (run_cmd->parsed()) {
            return cmd_run(model, second, out);
        }
        if (exp_cmd->parsed()) {
            return cmd_experiment(model, flags, out_path, out, err);
        }
        if (dot_cmd->parsed()) {
            return cmd_export_dot(model, case_id, out_path, out);
        }
    } catch (const CliError& e) {
        err << "error: " << e.message << "\n";
        return e.code;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    return kExitUsage;
}

} // namespace iots
