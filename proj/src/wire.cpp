#include "swiim/wire.hpp"

#include <openssl/evp.h>

namespace swiim {

using nlohmann::json;

namespace {

[[noreturn]] void bad_request(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

json field_json(const FieldValue& value) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return v;
            else if constexpr (std::is_same_v<T, Fixed6>) return v.value();
            else if constexpr (std::is_same_v<T, std::string>) return v;
            else return v.hex();
        },
        value);
}

FieldValue field_from_json(OpKind op, const FieldSpec& spec, const json& v) {
    const std::string where = std::string(op_name(op)) + " param \"" + std::string(spec.key) + "\"";
    switch (spec.kind) {
    case ValueKind::Integer:
        if (!v.is_number_integer()) bad_request(where + " must be an integer");
        if (v.is_number_unsigned()) {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(INT64_MAX)) bad_request(where + " is too large");
            return static_cast<std::int64_t>(u);
        }
        return v.get<std::int64_t>();
    case ValueKind::Decimal:
        if (v.is_number()) return Fixed6::from_double(v.get<double>());
        if (v.is_string()) {
            if (auto f = Fixed6::parse(v.get<std::string>())) return *f;
        }
        bad_request(where + " must be a decimal number");
    case ValueKind::String:
        if (!v.is_string()) bad_request(where + " must be a string");
        return v.get<std::string>();
    case ValueKind::Hash:
        if (v.is_string()) {
            if (auto h = ContentHash::from_hex(v.get<std::string>())) return *h;
        }
        bad_request(where + " must be a 64-digit lowercase hex hash");
    }
    bad_request(where + " has an unknown kind");
}

} // namespace

json to_json(const ReplayReport& report) {
    json entries = json::array();
    for (const auto& r : report.records) {
        entries.push_back({{"seq", r.seq},
                           {"op", op_name(r.op)},
                           {"computed", r.computed.hex()},
                           {"recorded", r.recorded.hex()},
                           {"match", r.match},
                           {"elapsed_us", r.elapsed.count()}});
    }
    const auto first = report.first_mismatch();
    return {{"passed", report.passed()},
            {"first_mismatch", first ? json(*first) : json(nullptr)},
            {"entries", std::move(entries)},
            {"text", render(report)}};
}

json to_json(const DiffReport& d) {
    return {{"identical", d.identical},
            {"dims_match", d.dims_match},
            {"differing_pixel_count", d.differing_pixel_count},
            {"max_channel_delta", d.max_channel_delta},
            {"text", render(d)}};
}

json to_json(const VerifyResult& result) {
    const auto first = result.report.first_mismatch();
    return {{"verdict", to_string(result.verdict)},
            {"first_mismatch", first ? json(*first) : json(nullptr)},
            {"replayed_hash", result.replayed_hash.hex()},
            {"claimed_hash", result.claimed_hash.hex()},
            {"report", to_json(result.report)},
            {"diff", to_json(result.diff)}};
}

json to_json(const JournalEntry& entry) {
    json params = json::object();
    for (const auto& [key, value] : fields_of(entry.action)) params[std::string(key)] = field_json(value);
    return {{"seq", entry.seq}, {"op", op_name(entry.op())}, {"params", std::move(params)},
            {"hash", entry.post_hash.hex()}};
}

json to_json(const Error& error) {
    json out = {{"code", to_string(error.code())}, {"message", error.detail()}};
    if (error.seq()) out["seq"] = *error.seq();
    if (error.line()) out["line"] = *error.line();
    if (error.column()) out["column"] = *error.column();
    return out;
}

Action action_from_json(const json& request) {
    if (!request.is_object()) bad_request("request body must be a JSON object");
    const auto op_it = request.find("op");
    if (op_it == request.end() || !op_it->is_string()) bad_request("missing \"op\"");
    const auto op = op_from_name(op_it->get<std::string>());
    if (!op) bad_request("unknown op \"" + op_it->get<std::string>() + "\"");

    json params = json::object();
    if (const auto p = request.find("params"); p != request.end() && !p->is_null()) {
        if (!p->is_object()) bad_request("\"params\" must be an object");
        params = *p;
    }
    FieldMap fields;
    for (const auto& spec : schema(*op)) {
        const auto it = params.find(std::string(spec.key));
        if (it == params.end()) continue; // build_action names the missing key
        fields.emplace(std::string(spec.key), field_from_json(*op, spec, *it));
    }
    for (const auto& [key, value] : params.items()) {
        if (!fields.contains(key)) {
            bad_request(std::string(op_name(*op)) + ": unexpected param \"" + key + "\"");
        }
    }
    return build_action(*op, fields);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

} // namespace swiim
