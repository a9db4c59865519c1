#pragma once

#include "swiim/error.hpp"
#include "swiim/journal.hpp"
#include "swiim/replay.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>

namespace swiim {

// JSON shapes shared by the HTTP service and `swiim --json`.

nlohmann::json to_json(const ReplayReport& report);
nlohmann::json to_json(const DiffReport& diff);
nlohmann::json to_json(const VerifyResult& result);
/// {seq, op, params: {...}, hash}
nlohmann::json to_json(const JournalEntry& entry);
/// {code, message, seq?, line?, column?}
nlohmann::json to_json(const Error& error);

/// Reads {"op": "CROP", "params": {...}}. Integers must be JSON integers;
/// decimals may be numbers or canonical decimal strings and are rounded to
/// six places. SchemaError on anything malformed.
Action action_from_json(const nlohmann::json& request);

std::string base64_encode(std::span<const std::uint8_t> bytes);

} // namespace swiim
