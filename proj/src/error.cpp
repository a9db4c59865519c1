#include "swiim/error.hpp"

namespace swiim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SequenceError: return "SequenceError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicateImport: return "DuplicateImport";
    case ErrorCode::SourceMismatch: return "SourceMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::NothingToRedo: return "NothingToRedo";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::FormatMismatch: return "FormatMismatch";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::AssetMissing: return "AssetMissing";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(std::string(to_string(code))),
      code_(code),
      detail_(std::move(message)) {
    rebuild_what();
}

Error& Error::with_seq(std::uint64_t seq) {
    seq_ = seq;
    rebuild_what();
    return *this;
}

Error& Error::at(std::size_t line, std::optional<std::size_t> column) {
    line_ = line;
    column_ = column;
    rebuild_what();
    return *this;
}

void Error::rebuild_what() {
    what_ = std::string(to_string(code_));
    if (line_) {
        what_ += " at line " + std::to_string(*line_);
        if (column_) what_ += ", column " + std::to_string(*column_);
    }
    if (seq_) what_ += " (seq " + std::to_string(*seq_) + ")";
    what_ += ": " + detail_;
}

} // namespace swiim
