#include "iots/format.hpp"

#include "iots/operations.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace iots {

std::string ParseError::to_string() const
{
    if (line == 0) {
        return message;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

namespace {

std::string summarize(const std::vector<ParseError>& errors)
{
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) {
            out += "\n";
        }
        out += e.to_string();
    }
    return out;
}

struct Token {
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line)
{
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), start + 1});
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

struct PendingTransition {
    Token source;
    Token label;
    Token target;
    std::size_t line;
};

} // namespace

ParseFailure::ParseFailure(std::vector<ParseError> errors)
    : std::runtime_error(summarize(errors))
    , errors_(std::move(errors))
{
}

ParseResult parse_iots(std::string_view text)
{
    ParseResult result;
    auto error = [&](std::size_t line, std::size_t column, std::string message) {
        result.errors.push_back({line, column, std::move(message)});
    };

    std::optional<std::string> name;
    std::optional<std::vector<std::string>> inputs;
    std::optional<std::vector<std::string>> outputs;
    bool quiescent = false;
    std::vector<Token> extra_states;
    std::optional<Token> initial;
    std::vector<PendingTransition> pending;

    auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        auto tokens = tokenize(lines[n]);
        if (tokens.empty()) {
            continue;
        }
        bool tokens_ok = true;
        for (const auto& t : tokens) {
            if (!is_token(t.text)) {
                error(line_no, t.column, "invalid token '" + t.text + "'");
                tokens_ok = false;
            }
        }
        if (!tokens_ok) {
            continue;
        }
        const std::string& keyword = tokens[0].text;
        auto args = std::vector<Token>(tokens.begin() + 1, tokens.end());
        auto expect_args = [&](std::size_t count) {
            if (args.size() != count) {
                error(line_no, tokens[0].column,
                      "'" + keyword + "' expects " + std::to_string(count) + " argument(s), got " +
                          std::to_string(args.size()));
                return false;
            }
            return true;
        };
        auto once = [&](bool seen) {
            if (seen) {
                error(line_no, tokens[0].column, "duplicate '" + keyword + "' line");
                return false;
            }
            return true;
        };

        if (keyword == "iots") {
            if (once(name.has_value()) && expect_args(1)) {
                name = args[0].text;
            }
        } else if (keyword == "inputs" || keyword == "outputs") {
            auto& slot = keyword == "inputs" ? inputs : outputs;
            if (!once(slot.has_value())) {
                continue;
            }
            std::vector<std::string> names;
            std::set<std::string> seen;
            for (const auto& a : args) {
                if (a.text == kDeltaName) {
                    error(line_no, a.column, "'delta' is reserved for quiescence and cannot be declared");
                } else if (!seen.insert(a.text).second) {
                    error(line_no, a.column, "duplicate symbol '" + a.text + "'");
                } else {
                    names.push_back(a.text);
                }
            }
            slot = std::move(names);
        } else if (keyword == "quiescent") {
            if (once(quiescent) && expect_args(0)) {
                quiescent = true;
            }
        } else if (keyword == "states") {
            extra_states.insert(extra_states.end(), args.begin(), args.end());
        } else if (keyword == "initial") {
            if (once(initial.has_value()) && expect_args(1)) {
                initial = args[0];
            }
        } else if (keyword == "trans") {
            if (expect_args(3)) {
                pending.push_back({args[0], args[1], args[2], line_no});
            }
        } else {
            error(line_no, tokens[0].column, "unknown keyword '" + keyword + "'");
        }
    }

    const std::size_t end_line = lines.size() + 1;
    if (!name) {
        error(end_line, 1, "missing 'iots' line");
    }
    if (!inputs) {
        error(end_line, 1, "missing 'inputs' line");
    }
    if (!outputs) {
        error(end_line, 1, "missing 'outputs' line");
    }
    if (!initial) {
        error(end_line, 1, "missing 'initial' line");
    }
    if (inputs && outputs) {
        for (const auto& i : *inputs) {
            if (std::find(outputs->begin(), outputs->end(), i) != outputs->end()) {
                error(end_line, 1, "symbol '" + i + "' is both an input and an output");
            }
        }
    }
    if (!result.errors.empty()) {
        return result;
    }

    std::vector<Transition> transitions;
    std::map<std::pair<std::string, Label>, const PendingTransition*> first_use;
    for (const auto& p : pending) {
        Label label;
        const std::string& l = p.label.text;
        if (l == kDeltaName) {
            label = Label::quiescence();
            quiescent = true;
        } else if (std::find(inputs->begin(), inputs->end(), l) != inputs->end()) {
            label = Label::input(l);
        } else if (std::find(outputs->begin(), outputs->end(), l) != outputs->end()) {
            label = Label::output(l);
        } else {
            error(p.line, p.label.column, "label '" + l + "' is not in the alphabet");
            continue;
        }
        auto [it, fresh] = first_use.emplace(std::pair{p.source.text, label}, &p);
        if (!fresh) {
            if (it->second->target.text != p.target.text) {
                error(p.line, p.source.column,
                      "nondeterministic: (" + p.source.text + ", " + l + ") leads to '" + it->second->target.text +
                          "' at line " + std::to_string(it->second->line) + " and to '" + p.target.text +
                          "' at line " + std::to_string(p.line));
            }
            continue;
        }
        transitions.push_back({p.source.text, label, p.target.text});
    }
    if (!result.errors.empty()) {
        return result;
    }

    std::vector<StateId> states;
    std::set<StateId> known;
    auto add_state = [&](const StateId& s) {
        if (known.insert(s).second) {
            states.push_back(s);
        }
    };
    add_state(initial->text);
    for (const auto& s : extra_states) {
        add_state(s.text);
    }
    for (const auto& t : transitions) {
        add_state(t.source);
        add_state(t.target);
    }
    try {
        result.machine = Iots(Alphabet(*inputs, *outputs, quiescent), std::move(states), initial->text,
                              std::move(transitions), *name);
    } catch (const ModelError& e) {
        error(end_line, 1, e.what());
    }
    return result;
}

Iots parse_iots_or_throw(std::string_view text)
{
    auto r = parse_iots(text);
    if (!r.ok()) {
        throw ParseFailure(std::move(r.errors));
    }
    return std::move(*r.machine);
}

std::string serialize_iots(const Iots& m)
{
    std::ostringstream out;
    out << "iots " << (is_token(m.name()) ? m.name() : std::string("unnamed")) << "\n";
    out << "inputs";
    for (const auto& i : m.alphabet().inputs()) {
        out << ' ' << i;
    }
    out << "\noutputs";
    for (const auto& o : m.alphabet().outputs()) {
        out << ' ' << o;
    }
    out << "\n";
    if (m.alphabet().quiescent()) {
        out << "quiescent\n";
    }
    const auto transitions = m.transitions();
    std::set<StateId> mentioned{m.initial_id()};
    for (const auto& t : transitions) {
        mentioned.insert(t.source);
        mentioned.insert(t.target);
    }
    std::vector<StateId> isolated;
    for (const auto& s : m.states()) {
        if (!mentioned.count(s)) {
            isolated.push_back(s);
        }
    }
    if (!isolated.empty()) {
        out << "states";
        for (const auto& s : isolated) {
            out << ' ' << s;
        }
        out << "\n";
    }
    out << "initial " << m.initial_id() << "\n";
    for (const auto& t : transitions) {
        out << "trans " << t.source << ' ' << t.label.name << ' ' << t.target << "\n";
    }
    return out.str();
}

namespace {

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

const char* shape_of(StateClass c)
{
    switch (c) {
    case StateClass::StableInput:
        return "circle";
    case StateClass::QuasiStableInput:
        return "diamond";
    case StateClass::Output:
        return "ellipse";
    case StateClass::Sink:
        return "box";
    }
    return "ellipse";
}

} // namespace

std::string export_dot(const Iots& m, const HighlightMap& highlight)
{
    std::ostringstream out;
    out << "digraph " << quote(m.name().empty() ? "iots" : m.name()) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  __start [shape=point];\n";
    out << "  __start -> " << quote(m.initial_id()) << ";\n";
    for (StateIndex s = 0; s < m.size(); ++s) {
        std::string attrs = std::string("shape=") + shape_of(classify(m, s));
        auto role = highlight.find(m.id(s));
        if (role != highlight.end()) {
            if (role->second == "fail") {
                attrs = "shape=doublecircle, color=red";
            } else if (role->second == "sink" || role->second == "target") {
                attrs += ", style=bold";
            }
        }
        out << "  " << quote(m.id(s)) << " [" << attrs << "];\n";
    }
    for (const auto& t : m.transitions()) {
        out << "  " << quote(t.source) << " -> " << quote(t.target) << " [label=";
        if (t.label.is_quiescence()) {
            out << quote(t.label.name) << ", style=dashed";
        } else {
            out << quote(t.label.name + (t.label.is_input() ? "?" : "!"));
        }
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const TestCase& tc)
{
    return export_dot(tc.machine, {{tc.fail, "fail"}});
}

std::string write_suite(const SuiteBundle& bundle)
{
    std::ostringstream out;
    out << "iotsuite 1\n";
    out << "spec " << (is_token(bundle.spec_name) ? bundle.spec_name : std::string("unnamed")) << "\n";
    out << "generator " << bundle.generator << "\n";
    for (const auto& [k, v] : bundle.params) {
        out << "param " << k << ' ' << v << "\n";
    }
    const auto& suite = bundle.suite;
    for (std::size_t i = 0; i < suite.cases.size(); ++i) {
        const auto& tc = suite.cases[i];
        out << "\ncase " << (is_token(tc.machine.name()) ? tc.machine.name() : "tc" + std::to_string(i));
        if (i < suite.provenance.size()) {
            const auto& p = suite.provenance[i];
            out << " cover=" << p.cover << " point=" << p.point << " state=" << p.spec_state
                << " identifier=" << p.identifier;
        }
        out << "\n" << serialize_iots(tc.machine);
        out << "fail " << tc.fail << "\nend\n";
    }
    return out.str();
}

SuiteBundle read_suite(std::string_view text)
{
    SuiteBundle bundle;
    std::vector<ParseError> errors;
    auto lines = split_lines(text);
    bool header = false;
    bool spec = false;

    struct OpenCase {
        std::size_t line;
        std::string id;
        Provenance provenance;
        std::string body;
        std::size_t body_start;
        std::optional<Token> fail;
        std::size_t fail_line = 0;
    };
    std::optional<OpenCase> open;

    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        auto tokens = tokenize(lines[n]);
        if (open && !open->fail) {
            if (!tokens.empty() && tokens[0].text == "fail") {
                if (tokens.size() != 2) {
                    errors.push_back({line_no, tokens[0].column, "'fail' expects 1 argument"});
                    open.reset();
                    continue;
                }
                open->fail = tokens[1];
                open->fail_line = line_no;
            } else {
                open->body += std::string(lines[n]) + "\n";
            }
            continue;
        }
        if (tokens.empty()) {
            continue;
        }
        const std::string& keyword = tokens[0].text;
        if (open) {
            if (keyword != "end" || tokens.size() != 1) {
                errors.push_back({line_no, tokens[0].column, "expected 'end' after 'fail'"});
                open.reset();
                continue;
            }
            auto parsed = parse_iots(open->body);
            if (!parsed.ok()) {
                for (auto e : parsed.errors) {
                    e.line = std::min(e.line + open->body_start - 1, open->fail_line);
                    e.message = "case " + open->id + ": " + e.message;
                    errors.push_back(std::move(e));
                }
            } else if (!parsed.machine->find(open->fail->text)) {
                errors.push_back({open->fail_line, open->fail->column,
                                  "case " + open->id + ": unknown fail state '" + open->fail->text + "'"});
            } else {
                bundle.suite.cases.push_back({parsed.machine->renamed(open->id), open->fail->text});
                bundle.suite.provenance.push_back(std::move(open->provenance));
            }
            open.reset();
            continue;
        }
        if (!header) {
            if (keyword != "iotsuite" || tokens.size() != 2 || tokens[1].text != "1") {
                errors.push_back({line_no, tokens[0].column, "expected header 'iotsuite 1'"});
                break;
            }
            header = true;
        } else if (keyword == "spec" && tokens.size() == 2 && !spec) {
            bundle.spec_name = tokens[1].text;
            spec = true;
        } else if (keyword == "generator" && tokens.size() >= 2) {
            auto rest = lines[n].substr(lines[n].find("generator") + 9);
            auto first = rest.find_first_not_of(" \t");
            auto last = rest.find_last_not_of(" \t");
            bundle.generator = std::string(rest.substr(first, last - first + 1));
        } else if (keyword == "param" && tokens.size() == 3) {
            bundle.params[tokens[1].text] = tokens[2].text;
        } else if (keyword == "case" && tokens.size() >= 2) {
            OpenCase c;
            c.line = line_no;
            c.id = tokens[1].text;
            c.body_start = line_no + 1;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const auto& t = tokens[i].text;
                auto eq = t.find('=');
                std::string key = t.substr(0, eq);
                std::string value = eq == std::string::npos ? "" : t.substr(eq + 1);
                if (key == "cover") {
                    c.provenance.cover = value;
                } else if (key == "point") {
                    c.provenance.point = value;
                } else if (key == "state") {
                    c.provenance.spec_state = value;
                } else if (key == "identifier") {
                    c.provenance.identifier = value;
                } else {
                    errors.push_back({line_no, tokens[i].column, "unknown case attribute '" + key + "'"});
                }
            }
            open = std::move(c);
        } else {
            errors.push_back({line_no, tokens[0].column, "unexpected '" + keyword + "' line"});
        }
    }
    if (open) {
        errors.push_back({open->line, 1, "case " + open->id + " is not terminated"});
    }
    if (!header && errors.empty()) {
        errors.push_back({1, 1, "expected header 'iotsuite 1'"});
    }
    if (!errors.empty()) {
        throw ParseFailure(std::move(errors));
    }
    return bundle;
}

} // namespace iots
