#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evorank/digest.hpp"
#include "evorank/errors.hpp"
#include "evorank/serialization.hpp"

namespace evorank {

inline constexpr int checkpoint_schema_version = 1;

// Self-describing single-document checkpoint: schema version plus a content
// digest over the serialized state. Load verifies the digest, so truncated
// or hand-edited files are rejected instead of silently resuming wrong.
inline void checkpoint_save(const RunState& state, const std::filesystem::path& path) {
    const nlohmann::json state_json = state;
    const std::string payload = state_json.dump();
    nlohmann::json doc = {
        {"schema_version", checkpoint_schema_version},
        {"digest", digest_hex(payload)},
        {"state", state_json},
    };
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open checkpoint file " + tmp.string() + " for writing");
        out << doc.dump(2) << '\n';
        if (!out) throw io_error("failed writing checkpoint " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move checkpoint into place: " + ec.message());
}

inline RunState checkpoint_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open checkpoint file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw corrupt_checkpoint_error("checkpoint " + path.string() + " is not valid JSON (" +
                                       e.what() + ")");
    }
    try {
        if (doc.at("schema_version").get<int>() != checkpoint_schema_version) {
            throw corrupt_checkpoint_error("checkpoint " + path.string() +
                                           " has an unsupported schema version");
        }
        const nlohmann::json& state_json = doc.at("state");
        if (doc.at("digest").get<std::string>() != digest_hex(state_json.dump())) {
            throw corrupt_checkpoint_error("checkpoint " + path.string() +
                                           " failed its digest check");
        }
        return state_json.get<RunState>();
    } catch (const nlohmann::json::exception& e) {
        throw corrupt_checkpoint_error("checkpoint " + path.string() + " is malformed (" +
                                       e.what() + ")");
    }
}

} // namespace evorank
