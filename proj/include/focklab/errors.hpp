#pragma once

#include <stdexcept>
#include <string>

namespace focklab {

// Two failure families, mirrored by the CLI exit codes: validation errors
// (bad arguments, violated preconditions) exit with 2, runtime errors
// (numerical failures detected mid-computation) exit with 1.
enum class ErrorKind { validation, runtime };

class Error : public std::runtime_error {
public:
    Error(const std::string& what, ErrorKind kind)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define FOCKLAB_ERROR_TYPE(Name, Kind)                     \
    class Name : public Error {                            \
    public:                                                \
        explicit Name(const std::string& what)             \
            : Error(std::string(#Name ": ") + what,        \
                    ErrorKind::Kind) {}                    \
    }

FOCKLAB_ERROR_TYPE(BadParams, validation);
FOCKLAB_ERROR_TYPE(InsufficientSamples, validation);
FOCKLAB_ERROR_TYPE(GridTooCoarse, validation);
FOCKLAB_ERROR_TYPE(Overflow, validation);
FOCKLAB_ERROR_TYPE(UnsupportedSymbol, validation);
FOCKLAB_ERROR_TYPE(InsufficientColumns, validation);

FOCKLAB_ERROR_TYPE(DegenerateFit, runtime);
FOCKLAB_ERROR_TYPE(NonFiniteValue, runtime);
FOCKLAB_ERROR_TYPE(QuadratureUnderresolved, runtime);
FOCKLAB_ERROR_TYPE(TailNotNegligible, runtime);
FOCKLAB_ERROR_TYPE(NoAnnihilator, runtime);
FOCKLAB_ERROR_TYPE(DidNotTerminate, runtime);

#undef FOCKLAB_ERROR_TYPE

} // namespace focklab
