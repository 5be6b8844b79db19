#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "safemob/network.hpp"
#include "safemob/privacy.hpp"

namespace safemob {

constexpr UnixTime kMaxClockSkew = 60;

/// Unvalidated detector record; `mac` is raw text as uploaded.
struct RawDetection {
    std::string detector_id;
    std::string mac;
    UnixTime timestamp = 0;
};

struct DetectionEvent {
    std::string detector_id;
    MacPseudonym pseudonym;
    UnixTime timestamp = 0;

    bool operator==(const DetectionEvent&) const = default;
};

/// Append-only detection log. Backed by a versioned newline-delimited file
/// (one `timestamp,detector_id,pseudonym` record per line) or memory only.
/// Appends are serialized; reads share a lock.
class EventLog {
public:
    static constexpr const char* kHeader = "# safemob detection log v1";

    static EventLog in_memory();
    /// Opens or creates the log file, loading any existing records.
    static EventLog open(const std::filesystem::path& path);

    EventLog(EventLog&& other) noexcept;
    EventLog& operator=(EventLog&&) = delete;

    void append(const DetectionEvent& event);
    void append(std::span<const DetectionEvent> events);
    void flush();

    std::size_t size() const;
    /// All events in ingest order.
    std::vector<DetectionEvent> events() const;
    std::vector<MacPseudonym> pseudonyms() const;

    /// Events of `pseudonym` with from <= t <= to, ascending by (timestamp,
    /// detector id). Throws when from > to.
    std::vector<DetectionEvent> query(const MacPseudonym& pseudonym,
                                      UnixTime from = std::numeric_limits<UnixTime>::min(),
                                      UnixTime to = std::numeric_limits<UnixTime>::max()) const;

private:
    EventLog() = default;
    void index_last();

    std::filesystem::path path_;
    std::ofstream out_;
    mutable std::shared_mutex mutex_;
    std::vector<DetectionEvent> events_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_pseudonym_;
};

/// Validates `raw`, replaces the MAC with its pseudonym and appends the event.
DetectionEvent ingest_detection(const RawDetection& raw, const DetectorNetwork& net,
                                UnixTime clock, std::span<const std::uint8_t> salt,
                                EventLog& log);

struct ReplayStats {
    std::size_t ingested = 0;
    std::size_t rejected = 0;
    /// One line per rejected row: `line N: reason`.
    std::vector<std::string> diagnostics;
};

/// Bulk ingest of `detector_id,mac,timestamp` CSV rows. A header row is
/// skipped if present. Bad rows are rejected individually.
ReplayStats replay_csv(std::istream& in, const DetectorNetwork& net, UnixTime clock,
                       std::span<const std::uint8_t> salt, EventLog& log);

}  // namespace safemob
