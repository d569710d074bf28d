#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "loglab/error.hpp"

namespace loglab {

// Shortest round-trippable rendering of a double. Reports are compared
// byte-for-byte across reruns, so every number that reaches a file goes
// through this one function.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_num(long long v) { return std::to_string(v); }
inline std::string fmt_num(int v) { return std::to_string(v); }

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::Io, "sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

// CSV with LF line endings and no quoting; cell content is the caller's
// responsibility (nothing written here ever contains a comma or newline).
class CsvBuilder {
public:
    explicit CsvBuilder(std::string header) : out_(std::move(header)) {
        out_.push_back('\n');
    }

    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out_.push_back(',');
            out_ += c;
            first = false;
        }
        out_.push_back('\n');
    }

    const std::string& str() const { return out_; }

private:
    std::string out_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) fail(ErrorCode::Io, "short write to " + path.string());
}

// Ordered key=value lines followed by one "sha256 <hex> <filename>" line per
// output file. Rendered and written only after every payload file is on
// disk, so a manifest on disk always describes complete outputs.
class Manifest {
public:
    void set(std::string key, std::string value) {
        entries_.emplace_back(std::move(key), std::move(value));
    }

    void add_file(std::string filename, std::string_view content) {
        files_.emplace_back(std::move(filename), sha256_hex(content));
    }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += k;
            out.push_back('=');
            out += v;
            out.push_back('\n');
        }
        for (const auto& [name, sha] : files_) {
            out += "sha256 ";
            out += sha;
            out.push_back(' ');
            out += name;
            out.push_back('\n');
        }
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }
    const std::vector<std::pair<std::string, std::string>>& files() const {
        return files_;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::pair<std::string, std::string>> files_;  // (name, sha)
};

}  // namespace loglab
