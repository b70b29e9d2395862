#pragma once

// Private JSON plumbing shared by serialize.cpp and runner.cpp.

#include <cstdint>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "twoweight/constants.hpp"
#include "twoweight/runner.hpp"
#include "twoweight/scenario.hpp"
#include "twoweight/verify.hpp"

namespace tw::json_io {

using Json = nlohmann::ordered_json;

/// Two-space indented, doubles as "%.17g", arrays of scalars on one line.
std::string dump(const Json& j);
Json parse(const std::string& text, const std::string& what);

Json real(double v);
double as_real(const Json& j, const std::string& ctx);

/// Throws ValidationError naming the first key of `obj` not in `allowed`.
void require_object(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& ctx);

void read(const Json& obj, const char* key, double& out, const std::string& ctx);
void read(const Json& obj, const char* key, int& out, const std::string& ctx);
void read(const Json& obj, const char* key, std::uint64_t& out, const std::string& ctx);
void read(const Json& obj, const char* key, bool& out, const std::string& ctx);
void read(const Json& obj, const char* key, std::string& out, const std::string& ctx);
Point read_point(const Json& j, const std::string& ctx);

Json to_json(const GoodnessParams& p);
GoodnessParams goodness_from(const Json& j, GoodnessParams base, const std::string& ctx);
Json to_json(const PartitionStrategy& p);
PartitionStrategy partitions_from(const Json& j, const std::string& ctx);
Json to_json(const Scenario& s);
Scenario scenario_from(const Json& j, const std::string& ctx);
Json to_json(const GeneratorConfig& g);
GeneratorConfig generator_from(const Json& j, const std::string& ctx);
Json to_json(const SuiteConfig& c);
SuiteConfig suite_from(const Json& j, const std::string& ctx);

Json to_json(const Witness& w);
Witness witness_from(const Json& j, const std::string& ctx);
Json to_json(const ConstantsReport& r, std::size_t index);
Json to_json(const CheckResult& c);
CheckResult check_from(const Json& j, const std::string& ctx);

}  // namespace tw::json_io
