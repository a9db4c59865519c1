#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swiim {

enum class ErrorCode {
    OutOfBounds,
    InvalidAngle,
    ParamOutOfRange,
    SyntaxError,
    SchemaError,
    SequenceError,
    InvariantViolation,
    DuplicateImport,
    SourceMismatch,
    IndexOutOfRange,
    NothingToUndo,
    NothingToRedo,
    UnsupportedFormat,
    CorruptFile,
    FormatMismatch,
    EncodeError,
    AssetMissing,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this one exception type.
/// Parser errors carry a line (and usually a column); errors raised while
/// executing a journal entry carry that entry's seq.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    std::optional<std::uint64_t> seq() const noexcept { return seq_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> column() const noexcept { return column_; }

    Error& with_seq(std::uint64_t seq);
    Error& at(std::size_t line, std::optional<std::size_t> column = {});

    const char* what() const noexcept override { return what_.c_str(); }

private:
    void rebuild_what();

    ErrorCode code_;
    std::string detail_;
    std::string what_;
    std::optional<std::uint64_t> seq_;
    std::optional<std::size_t> line_;
    std::optional<std::size_t> column_;
};

} // namespace swiim
