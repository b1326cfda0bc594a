// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace relaydmt {

/// Bad user configuration (unknown key, malformed value, violated precondition
/// on a user-supplied parameter). Maps to CLI exit code 2.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of a formula (r >= 1/2, |a1| >= 1/2, ...).
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure failed to deliver (quadrature, eigensolver, root finding).
/// Maps to CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace relaydmt
