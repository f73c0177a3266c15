#pragma once

#include <stdexcept>
#include <string>

namespace detkit {

// Malformed or inconsistent caller input (bad pmf, unknown symbol, shape
// mismatch, unparsable file).  CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// An exact enumeration would exceed its documented cap.  CLI maps this to
// exit code 3.  Callers that have a sampling fallback catch it.
struct resource_cap_error : std::runtime_error {
    explicit resource_cap_error(const std::string& what) : std::runtime_error(what) {}
};

// A conditional quantity was requested at an action tuple that has zero mass
// under both hypotheses; no conditional law exists there.
struct unreachable_tuple_error : std::domain_error {
    explicit unreachable_tuple_error(const std::string& what) : std::domain_error(what) {}
};

}  // namespace detkit
