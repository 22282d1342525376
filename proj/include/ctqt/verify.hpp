#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace ctqt {

// Built-in invariant suites: "field", "sharing", "sim", "protocol", "all".
// Prints one line per check; failures include a replay seed. Returns the
// number of failed checks. Throws ParseError for an unknown suite name.
int verify_suite(const std::string& suite, std::ostream& out, std::uint64_t seed = 20260823);

}  // namespace ctqt
