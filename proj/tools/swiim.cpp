#include "swiim/codecs.hpp"
#include "swiim/error.hpp"
#include "swiim/journal.hpp"
#include "swiim/replay.hpp"
#include "swiim/service.hpp"
#include "swiim/wire.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace swiim;
using nlohmann::json;

namespace {

enum Exit : int {
    kOk = 0,
    kDiffer = 1,
    kParse = 2,
    kSource = 3,
    kReplay = 4,
    kIo = 5,
    kUsage = 64,
};

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::SchemaError:
    case ErrorCode::SequenceError:
    case ErrorCode::DuplicateImport:
    case ErrorCode::InvariantViolation:
        return kParse;
    case ErrorCode::SourceMismatch:
        return kSource;
    case ErrorCode::IoError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptFile:
    case ErrorCode::FormatMismatch:
    case ErrorCode::EncodeError:
        return kIo;
    default:
        return kReplay;
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    bool json = false;
    std::string assets_dir;
};

Journal load_journal(const std::string& path) {
    const auto bytes = read_file(path);
    return parse_journal(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Raster load_image(const std::string& path) {
    return import_image(read_file(path), format_from_extension(path)).raster;
}

// MELD inserts are looked up next to the journal unless --assets says otherwise.
AssetStore load_assets(const Journal& journal, const std::string& journal_path, const Options& opt) {
    const fs::path base = opt.assets_dir.empty() ? fs::path(journal_path).parent_path() : fs::path(opt.assets_dir);
    AssetStore assets;
    for (const auto& entry : journal.entries()) {
        const auto* meld = std::get_if<MeldAction>(&entry.action);
        if (!meld || assets.find(meld->insert_hash)) continue;
        const fs::path file = fs::path(meld->file).is_absolute() ? fs::path(meld->file) : base / meld->file;
        // Absent files surface as AssetMissing at the entry that needs them.
        if (!fs::exists(file)) continue;
        assets.add(import_image(read_file(file.string())).raster);
    }
    return assets;
}

ImageFormat output_format(const std::string& path, const std::string& requested) {
    if (!requested.empty()) {
        if (auto f = format_from_user_text(requested)) return *f;
        throw UsageError("unknown format \"" + requested + "\"");
    }
    if (auto f = format_from_extension(path)) return *f;
    throw UsageError("cannot tell the output format from \"" + path + "\"; pass --format");
}

void write_image(const Raster& raster, const std::string& path, const std::string& format, int quality) {
    const auto bytes = export_image(raster, output_format(path, format), quality);
    write_file(path, bytes);
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

void report_mismatch(const ReplayReport& report) {
    if (auto seq = report.first_mismatch()) std::cerr << "swiim: hash mismatch, first at seq " << *seq << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"swiim: journaled image editing, replay and verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "swiim 1.0.0");

    Options opt;
    app.add_flag("--json", opt.json, "Machine-readable output on stdout");
    app.add_option("--assets", opt.assets_dir, "Directory holding MELD insert images (default: the journal's)");

    std::string journal_path, source_path, claimed_path, out_path, format, a_path, b_path;
    int quality = kDefaultJpegQuality;
    std::size_t steps = 0;

    auto* apply_cmd = app.add_subcommand("apply", "Replay a journal on its source and write the final image");
    apply_cmd->add_option("journal", journal_path)->required();
    apply_cmd->add_option("source", source_path)->required();
    apply_cmd->add_option("-o,--output", out_path)->required();
    apply_cmd->add_option("--format", format, "png, jpg, bmp or tiff (default: from the extension)");
    apply_cmd->add_option("--quality", quality, "JPEG quality")->check(CLI::Range(1, 100));

    auto* verify_cmd = app.add_subcommand("verify", "Check that a journal turns source into claimed");
    verify_cmd->add_option("journal", journal_path)->required();
    verify_cmd->add_option("source", source_path)->required();
    verify_cmd->add_option("claimed", claimed_path)->required();

    auto* step_cmd = app.add_subcommand("step", "Write the state after the first K entries");
    step_cmd->add_option("journal", journal_path)->required();
    step_cmd->add_option("source", source_path)->required();
    step_cmd->add_option("-n", steps, "Number of entries to execute")->required();
    step_cmd->add_option("-o,--output", out_path)->required();
    step_cmd->add_option("--format", format);
    step_cmd->add_option("--quality", quality)->check(CLI::Range(1, 100));

    auto* diff_cmd = app.add_subcommand("diff", "Compare the decoded pixels of two images");
    diff_cmd->add_option("a", a_path)->required();
    diff_cmd->add_option("b", b_path)->required();

    auto* normalize_cmd = app.add_subcommand("normalize", "Rewrite a journal without UNDO/REDO");
    normalize_cmd->add_option("journal", journal_path)->required();
    normalize_cmd->add_option("source", source_path)->required();
    normalize_cmd->add_option("-o,--output", out_path)->required();

    auto* log_cmd = app.add_subcommand("log", "Pretty-print journal entries");
    log_cmd->add_option("journal", journal_path)->required();

    std::string bind;
    std::size_t max_upload = 0;
    long long ttl = -1;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session API");
    serve_cmd->add_option("--bind", bind, "host:port (env SWIIM_BIND, default 127.0.0.1:8080)");
    serve_cmd->add_option("--max-upload", max_upload, "Request size cap in bytes (env SWIIM_MAX_UPLOAD)");
    serve_cmd->add_option("--ttl", ttl, "Idle session lifetime in seconds (env SWIIM_TTL)")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*apply_cmd) {
            const Journal journal = load_journal(journal_path);
            const Raster source = load_image(source_path);
            const ReplayResult run = replay(journal, source, load_assets(journal, journal_path, opt));
            if (opt.json) print_json({{"report", to_json(run.report)}, {"output", out_path}});
            if (!run.report.passed()) {
                if (!opt.json) std::cerr << render(run.report);
                report_mismatch(run.report);
                return kReplay;
            }
            write_image(run.raster, out_path, format, quality);
            return kOk;
        }
        if (*verify_cmd) {
            const Journal journal = load_journal(journal_path);
            const Raster source = load_image(source_path);
            const Raster claimed = load_image(claimed_path);
            const VerifyResult result = verify(journal, source, claimed, load_assets(journal, journal_path, opt));
            if (opt.json) {
                print_json(to_json(result));
            } else {
                std::cout << to_string(result.verdict) << '\n' << render(result.report);
                if (!result.diff.identical) std::cout << "diff: " << render(result.diff) << '\n';
            }
            if (result.verdict == Verdict::Fail) {
                report_mismatch(result.report);
                if (result.report.passed()) std::cerr << "swiim: replayed image differs from the claimed image\n";
                return kReplay;
            }
            return kOk;
        }
        if (*step_cmd) {
            const Journal journal = load_journal(journal_path);
            if (steps > journal.size()) {
                throw UsageError("-n " + std::to_string(steps) + " exceeds the " + std::to_string(journal.size()) +
                                 " journal entries");
            }
            const Raster source = load_image(source_path);
            const Raster state = step(journal, source, steps, load_assets(journal, journal_path, opt));
            write_image(state, out_path, format, quality);
            if (opt.json) print_json({{"n", steps}, {"hash", content_hash(state).hex()}, {"output", out_path}});
            return kOk;
        }
        if (*diff_cmd) {
            const DiffReport d = diff(load_image(a_path), load_image(b_path));
            if (opt.json) print_json(to_json(d));
            else std::cout << render(d) << '\n';
            return d.identical ? kOk : kDiffer;
        }
        if (*normalize_cmd) {
            const Journal journal = load_journal(journal_path);
            const Raster source = load_image(source_path);
            const Journal out = normalize(journal, source, load_assets(journal, journal_path, opt));
            const std::string text = serialize(out);
            write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
            if (opt.json) print_json({{"entries", out.size()}, {"removed", journal.size() - out.size()}});
            return kOk;
        }
        if (*log_cmd) {
            const Journal journal = load_journal(journal_path);
            if (opt.json) {
                json entries = json::array();
                for (const auto& e : journal.entries()) entries.push_back(to_json(e));
                print_json({{"source", journal.source().name},
                            {"source_hash", journal.source().hash.hex()},
                            {"entries", std::move(entries)}});
                return kOk;
            }
            std::cout << "source " << journal.source().name << "  " << journal.source().hash.hex() << '\n';
            for (const auto& e : journal.entries()) {
                std::cout << std::setw(4) << e.seq << "  " << std::left << std::setw(20) << op_name(e.op())
                          << std::right;
                for (const auto& [key, value] : fields_of(e.action)) {
                    std::cout << ' ' << key << '=';
                    std::visit(
                        [](const auto& v) {
                            using T = std::decay_t<decltype(v)>;
                            if constexpr (std::is_same_v<T, std::int64_t>) std::cout << v;
                            else if constexpr (std::is_same_v<T, Fixed6>) std::cout << v.text();
                            else if constexpr (std::is_same_v<T, std::string>) std::cout << quote(v);
                            else std::cout << v.short_hex();
                        },
                        value);
                }
                std::cout << "  -> " << e.post_hash.short_hex() << '\n';
            }
            return kOk;
        }
        if (*serve_cmd) {
            ServiceConfig config;
            try {
                if (!bind.empty()) setenv("SWIIM_BIND", bind.c_str(), 1);
                config = config_from_env();
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            if (max_upload > 0) config.max_upload = max_upload;
            if (ttl >= 0) config.ttl = std::chrono::seconds(ttl);
            Service service(config);
            const int port = service.bind();
            if (port < 0) {
                std::cerr << "swiim: cannot bind " << config.host << ':' << config.port << '\n';
                return kIo;
            }
            std::cerr << "swiim: listening on http://" << config.host << ':' << port << '\n';
            return service.listen() ? kOk : kIo;
        }
    } catch (const UsageError& e) {
        std::cerr << "swiim: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "swiim: " << e.what() << '\n';
        if (opt.json) print_json({{"error", to_json(e)}});
        return exit_code(e.code());
    }
    return kUsage;
}
