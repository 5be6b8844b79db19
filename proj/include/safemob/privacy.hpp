#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safemob/calendar.hpp"
#include "safemob/common.hpp"

namespace safemob {

using Bytes = std::vector<std::uint8_t>;

/// Initializes libsodium once; safe to call from any thread.
void ensure_crypto();

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

class MacAddress {
public:
    /// Accepts `:` or `-` separators (or none, 12 hex digits) in any case.
    static MacAddress parse(std::string_view text);
    static std::optional<MacAddress> try_parse(std::string_view text);
    explicit MacAddress(const std::array<std::uint8_t, 6>& octets) : octets_(octets) {}

    /// Lowercase `aa:bb:cc:dd:ee:ff`.
    std::string canonical() const;
    const std::array<std::uint8_t, 6>& octets() const noexcept { return octets_; }

    auto operator<=>(const MacAddress&) const = default;

private:
    std::array<std::uint8_t, 6> octets_{};
};

/// 64 lowercase hex digits of HMAC-SHA256(salt, canonical MAC).
class MacPseudonym {
public:
    explicit MacPseudonym(std::string hex);

    const std::string& str() const noexcept { return hex_; }

    auto operator<=>(const MacPseudonym&) const = default;

private:
    std::string hex_;
};

constexpr std::size_t kMinSaltBytes = 16;

MacPseudonym pseudonymize_mac(const MacAddress& mac, std::span<const std::uint8_t> salt);

struct UserProfile {
    std::string name;
    std::string surname;
    std::string fathers_name;
    Date date_of_birth;
    std::string profession;
    std::string family_status;
    std::string contact_number;
    std::string address;
    bool driving_license = false;
    bool car_owner = false;

    bool operator==(const UserProfile&) const = default;
};

/// Authenticated symmetric encryption (XChaCha20-Poly1305) of profiles with
/// a single static 32-byte deployment key.
class ProfileCipher {
public:
    explicit ProfileCipher(std::span<const std::uint8_t> key);

    /// Hex of nonce || ciphertext.
    std::string seal(const UserProfile& profile) const;
    UserProfile open(std::string_view sealed) const;

private:
    Bytes key_;
};

struct PasswordCost {
    unsigned long long ops;
    std::size_t mem_bytes;

    static PasswordCost interactive();
    /// Minimum Argon2id parameters; for tests only.
    static PasswordCost minimal();
};

struct Account {
    std::string user_id;
    std::string email;
    std::string password_digest;
    std::string sealed_profile;
    std::vector<MacPseudonym> pseudonyms;
};

struct PrivacySecrets {
    Bytes salt;
    Bytes profile_key;
};

/// Persistent account store. Writes are serialized and rewrite the store file
/// atomically; the file holds only pseudonyms and sealed profiles.
class AccountStore {
public:
    using Clock = std::function<UnixTime()>;

    /// Empty path keeps the store in memory.
    AccountStore(std::filesystem::path path, PrivacySecrets secrets,
                 PasswordCost cost = PasswordCost::interactive(), Clock clock = {});

    std::string register_user(const UserProfile& profile, std::span<const std::string> macs,
                              const std::string& email, const std::string& password);

    /// Same empty result for unknown email and wrong password.
    std::optional<std::string> authenticate(const std::string& email,
                                            const std::string& password) const;

    std::optional<Account> find(const std::string& user_id) const;
    UserProfile profile(const std::string& user_id) const;
    std::vector<MacPseudonym> pseudonyms(const std::string& user_id) const;
    std::size_t size() const;

    std::span<const std::uint8_t> salt() const noexcept { return secrets_.salt; }

private:
    void load();
    void persist() const;

    std::filesystem::path path_;
    PrivacySecrets secrets_;
    ProfileCipher cipher_;
    PasswordCost cost_;
    Clock clock_;
    std::string dummy_digest_;

    mutable std::shared_mutex mutex_;
    std::map<std::string, Account> accounts_;
    std::map<std::string, std::string> by_email_;
};

struct Session {
    std::string token;
    std::string user_id;
    UnixTime expires_at = 0;
};

/// Bearer tokens with a fixed lifetime (24 h by default).
class SessionManager {
public:
    explicit SessionManager(UnixTime lifetime_s = 24 * 3600) : lifetime_(lifetime_s) {}

    Session issue(const std::string& user_id, UnixTime now);
    std::optional<std::string> resolve(const std::string& token, UnixTime now) const;

private:
    UnixTime lifetime_;
    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
};

}  // namespace safemob
