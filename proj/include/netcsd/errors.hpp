#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace netcsd {

// Exit-status classes used by the CLI: 2 validation, 3 numeric, 4 io.
enum class ErrorClass { Validation = 2, Numeric = 3, Io = 4 };

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, ErrorClass cls)
        : std::runtime_error(message), kind_(std::move(kind)), class_(cls) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return class_; }
    int exit_code() const noexcept { return static_cast<int>(class_); }

private:
    std::string kind_;
    ErrorClass class_;
};

#define NETCSD_DEFINE_ERROR(Name, Class)                                \
    class Name final : public Error {                                   \
    public:                                                             \
        explicit Name(const std::string& message)                       \
            : Error(#Name, message, ErrorClass::Class) {}               \
    }

NETCSD_DEFINE_ERROR(ValidationError, Validation);
NETCSD_DEFINE_ERROR(ParseError, Validation);
NETCSD_DEFINE_ERROR(IoError, Io);

NETCSD_DEFINE_ERROR(DisconnectedGraph, Numeric);
NETCSD_DEFINE_ERROR(NoConvergence, Numeric);
NETCSD_DEFINE_ERROR(DegenerateFiedler, Numeric);
NETCSD_DEFINE_ERROR(EmptyCut, Numeric);
NETCSD_DEFINE_ERROR(NonpositiveWeight, Numeric);
NETCSD_DEFINE_ERROR(CyclicGraph, Numeric);
NETCSD_DEFINE_ERROR(NoEquilibrium, Numeric);
NETCSD_DEFINE_ERROR(NoBracket, Numeric);
NETCSD_DEFINE_ERROR(NotAnEquilibrium, Numeric);
NETCSD_DEFINE_ERROR(NonFiniteState, Numeric);
NETCSD_DEFINE_ERROR(InsufficientHorizon, Numeric);
NETCSD_DEFINE_ERROR(WindowTooLarge, Validation);
NETCSD_DEFINE_ERROR(DegenerateSeries, Numeric);

#undef NETCSD_DEFINE_ERROR

}  // namespace netcsd
