#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace starkzz {

// Base class for every error raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Out-of-domain parameters (bad truncation, negative coupling, ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// A precondition on a numeric argument was violated (e.g. non-Hermitian input).
struct ContractViolation : Error {
    using Error::Error;
};

struct LabelingFailure : Error {
    LabelingFailure(const std::string& what, std::vector<std::pair<int, int>> labels)
        : Error(what), ambiguous_labels(std::move(labels)) {}
    std::vector<std::pair<int, int>> ambiguous_labels;
};

// A closed-form denominator is (nearly) zero.
struct StraddledResonance : Error {
    StraddledResonance(const std::string& what, std::string factor_name)
        : Error(what), factor(std::move(factor_name)) {}
    std::string factor;
};

struct ResonantDrive : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

// Optimizer gave up; carries the best parameter vector seen.
struct FitFailure : Error {
    FitFailure(const std::string& what, Eigen::VectorXd best_params)
        : Error(what), best(std::move(best_params)) {}
    Eigen::VectorXd best;
};

struct ModelMismatch : Error {
    using Error::Error;
};

struct StepTooCoarse : Error {
    using Error::Error;
};

struct AliasingError : Error {
    using Error::Error;
};

struct LowContrast : Error {
    using Error::Error;
};

struct CalibrationFailure : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// CSV/JSON input that does not match its schema. row/column are 1-based; 0 means "not applicable".
struct IngestionError : Error {
    IngestionError(const std::string& what, int row_, int column_)
        : Error(what), row(row_), column(column_) {}
    int row;
    int column;
};

}  // namespace starkzz
