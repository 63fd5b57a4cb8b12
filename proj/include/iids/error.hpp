#ifndef IIDS_ERROR_HPP
#define IIDS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace iids {

// CLI exit codes. Library errors map onto these by exception type.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitDataError = 3,
    kExitStageError = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad experiment configuration, CLI flags, or config file contents.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input data: CSV cells, hierarchy files, contract violations.
class DataError : public Error {
public:
    using Error::Error;
};

// Model file cannot be read back: corrupt, truncated, or wrong version.
class ModelIoError : public Error {
public:
    using Error::Error;
};

// Failure inside one pipeline stage, tagged with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace iids

#endif  // IIDS_ERROR_HPP
