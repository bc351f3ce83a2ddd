#pragma once

#include "iots/model.hpp"
#include "iots/testgen.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iots {

struct ParseError {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;

    std::string to_string() const;
};

class ParseFailure : public std::runtime_error {
public:
    explicit ParseFailure(std::vector<ParseError> errors);
    const std::vector<ParseError>& errors() const { return errors_; }

private:
    std::vector<ParseError> errors_;
};

struct ParseResult {
    std::optional<Iots> machine;
    std::vector<ParseError> errors;

    bool ok() const { return machine.has_value(); }
};

/// Line format:
///
///     iots NAME
///     inputs a b
///     outputs 0 1
///     quiescent            (optional: δ-closed alphabet)
///     states s1 s2         (optional: states without transitions)
///     initial s1
///     trans s1 a q1
///
/// `#` starts a comment. A `trans` line labelled `delta` makes the alphabet
/// quiescent as well.
ParseResult parse_iots(std::string_view text);
/// Throws ParseFailure with every error.
Iots parse_iots_or_throw(std::string_view text);

std::string serialize_iots(const Iots& m);

/// Extra node roles: "fail", "sink", "target". Unknown roles are ignored.
using HighlightMap = std::map<StateId, std::string>;

std::string export_dot(const Iots& m, const HighlightMap& highlight = {});
std::string export_dot(const TestCase& tc);

struct SuiteBundle {
    std::string spec_name;
    std::string generator = "iotsgen 1.0";
    std::map<std::string, std::string> params;
    TestSuite suite;
};

std::string write_suite(const SuiteBundle& bundle);
SuiteBundle read_suite(std::string_view text);

} // namespace iots
