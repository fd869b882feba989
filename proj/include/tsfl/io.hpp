#pragma once

#include <string>

#include "tsfl/envy.hpp"
#include "tsfl/instance.hpp"
#include "tsfl/integral.hpp"

namespace tsfl {

inline constexpr const char* kInstanceFormat = "tsfl-instance/1";
inline constexpr const char* kSolutionFormat = "tsfl-solution/1";
inline constexpr const char* kPolicyFormat = "tsfl-policy/1";

// Parsers throw InputError naming the offending field as a JSON pointer, or
// the line and column for syntax errors. Instances are validated with
// regularity not enforced; callers that need it run Instance::validate().
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& instance);

// Requires the "envy" block.
EnvyInstance parse_envy_instance(const std::string& text);
std::string serialize_envy_instance(const EnvyInstance& instance);
bool has_envy_block(const std::string& text);

IntegralSolution parse_solution(const std::string& text);
std::string serialize_solution(const IntegralSolution& sol);

// Includes, per routed node and sub-type, the explicit CDF breakpoints of the
// conditional price and wage lotteries next to the raw masses.
LotteryPolicy parse_policy(const std::string& text);
std::string serialize_policy(const EnvyInstance& instance, const LotteryPolicy& policy);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace tsfl
