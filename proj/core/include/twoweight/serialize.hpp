#pragma once

// JSON and CSV forms of scenarios, constants and check results. Doubles are
// written with 17 significant digits and keys in a fixed order, so equal
// inputs give equal bytes. Non-finite doubles are written as the strings
// "inf", "-inf" and "nan".

#include <string>
#include <vector>

#include "twoweight/constants.hpp"
#include "twoweight/scenario.hpp"
#include "twoweight/verify.hpp"

namespace tw {

inline constexpr int kSchemaVersion = 1;

/// "%.17g", with ".0" appended to integral values.
std::string format_double(double v);

std::string scenario_to_json(const Scenario& s);
/// Accepts the object written by scenario_to_json; unknown keys are rejected.
Scenario scenario_from_json(const std::string& text);

/// "g<grid>:L<level>[c1,c2]" per cube, then " ell=<k>" and the partition.
std::string witness_to_string(const Witness& w);

/// One report per scenario, in order.
std::string constants_to_json(const std::vector<ConstantsReport>& reports);
std::string constants_to_csv(const std::vector<ConstantsReport>& reports);
/// Inverse of constants_to_json (witnesses included).
std::vector<ConstantsReport> constants_from_json(const std::string& text);

std::string checks_to_csv(const std::vector<CheckResult>& checks);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace tw
