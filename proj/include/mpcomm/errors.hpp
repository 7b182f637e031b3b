#pragma once

#include <stdexcept>
#include <string>

namespace mpcomm {

/// No sampling sequence reaches the end of the horizon.
class NoFeasiblePlan : public std::runtime_error {
public:
    explicit NoFeasiblePlan(const std::string& what) : std::runtime_error(what) {}
};

/// No frontier point fits the requested budget.
class BudgetInfeasible : public std::runtime_error {
public:
    explicit BudgetInfeasible(const std::string& what) : std::runtime_error(what) {}
};

/// An oracle was asked for an instance larger than its budget allows.
class OracleBudgetExceeded : public std::invalid_argument {
public:
    explicit OracleBudgetExceeded(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mpcomm
