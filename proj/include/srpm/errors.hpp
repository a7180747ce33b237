#pragma once

#include <stdexcept>
#include <string>

namespace srpm {

/// Base of every error raised by the library. `kind()` is a stable name used by
/// the CLI and the Python bindings.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SRPM_DEFINE_ERROR(Name)                                                \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

// world model
SRPM_DEFINE_ERROR(ZeroConditioningEvent);
SRPM_DEFINE_ERROR(InvalidSpace);
SRPM_DEFINE_ERROR(InfeasibleConstraints);

// market
SRPM_DEFINE_ERROR(TargetOutOfRange);
SRPM_DEFINE_ERROR(InsufficientFunds);
SRPM_DEFINE_ERROR(CollateralExceeded);
SRPM_DEFINE_ERROR(MarketStillOpen);
SRPM_DEFINE_ERROR(AllBalancesZero);
SRPM_DEFINE_ERROR(UnknownAgent);

// disclosure
SRPM_DEFINE_ERROR(NotVerified);
SRPM_DEFINE_ERROR(UnitsInconsistent);

// agents / protocol
SRPM_DEFINE_ERROR(CrowdBudgetExhausted);

// revision lab
SRPM_DEFINE_ERROR(DegenerateDenominator);
SRPM_DEFINE_ERROR(DegenerateInterval);
SRPM_DEFINE_ERROR(InvalidRevisionScenario);

// harness
SRPM_DEFINE_ERROR(ParseError);
SRPM_DEFINE_ERROR(ValidationError);
SRPM_DEFINE_ERROR(BadExperimentShape);

#undef SRPM_DEFINE_ERROR

}  // namespace srpm
