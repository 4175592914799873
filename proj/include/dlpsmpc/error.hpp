#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dlp {

/// Input data could not be parsed or violates a data invariant.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
        : std::runtime_error(row ? "row " + std::to_string(*row) + ": " + what : what), row_(row) {}

    /// 1-based data row (header excluded) the error refers to, if any.
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    std::optional<std::size_t> row_;
};

/// The optimizer met a non-finite value or an inner solve failed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal numerical consistency check failed.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace dlp
