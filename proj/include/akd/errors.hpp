#pragma once

#include <stdexcept>
#include <string>

namespace akd {

// Error taxonomy shared across the library. All inherit std::runtime_error
// so callers can catch broadly or by category.

struct InvalidInputError : std::runtime_error {
    explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IngestError : std::runtime_error {
    explicit IngestError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violation of a pool/loop protocol (annotating an already-labeled id, etc).
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// Query budget exceeds what the unlabeled pool can supply.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LookupError : std::runtime_error {
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite loss during training; carries the offending epoch.
struct TrainingError : std::runtime_error {
    TrainingError(const std::string& msg, int epoch_index)
        : std::runtime_error(msg), epoch(epoch_index) {}
    int epoch;
};

struct RunError : std::runtime_error {
    explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExportError : std::runtime_error {
    explicit ExportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace akd
