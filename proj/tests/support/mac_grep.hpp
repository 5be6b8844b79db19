// Searches persisted files for raw MAC addresses in any common spelling.
#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixture {

/// `aa:bb:cc:dd:ee:ff` in colon, dash, bare and dotted-quad forms, both cases.
inline std::vector<std::string> mac_spellings(const std::string& canonical) {
    std::string hex;
    for (char c : canonical) {
        if (std::isxdigit(static_cast<unsigned char>(c))) hex += static_cast<char>(std::tolower(c));
    }
    std::vector<std::string> out;
    for (bool upper : {false, true}) {
        std::string h = hex;
        if (upper) {
            for (char& c : h) c = static_cast<char>(std::toupper(c));
        }
        for (const char* sep : {":", "-", ""}) {
            std::string s;
            for (int i = 0; i < 6; ++i) {
                if (i) s += sep;
                s += h.substr(i * 2, 2);
            }
            out.push_back(s);
        }
        out.push_back(h.substr(0, 4) + "." + h.substr(4, 4) + "." + h.substr(8, 4));
    }
    return out;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Files under `root` that contain any spelling of any MAC.
inline std::vector<std::string> files_leaking(const std::filesystem::path& root,
                                              const std::vector<std::string>& macs) {
    std::vector<std::string> hits;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string body = slurp(entry.path());
        for (const auto& mac : macs) {
            for (const auto& s : mac_spellings(mac)) {
                if (body.find(s) != std::string::npos) {
                    hits.push_back(entry.path().string() + " contains " + s);
                }
            }
        }
    }
    return hits;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("safemob-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
