#include "safemob/privacy.hpp"

#include <sodium.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>

#include <json.hpp>

namespace safemob {

namespace {

UnixTime system_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

nlohmann::json profile_to_json(const UserProfile& p) {
    return {{"name", p.name},
            {"surname", p.surname},
            {"fathers_name", p.fathers_name},
            {"date_of_birth", format_iso_date(p.date_of_birth)},
            {"profession", p.profession},
            {"family_status", p.family_status},
            {"contact_number", p.contact_number},
            {"address", p.address},
            {"driving_license", p.driving_license},
            {"car_owner", p.car_owner}};
}

UserProfile profile_from_json(const nlohmann::json& j) {
    UserProfile p;
    p.name = j.at("name").get<std::string>();
    p.surname = j.at("surname").get<std::string>();
    p.fathers_name = j.at("fathers_name").get<std::string>();
    p.date_of_birth = parse_iso_date(j.at("date_of_birth").get<std::string>());
    p.profession = j.at("profession").get<std::string>();
    p.family_status = j.at("family_status").get<std::string>();
    p.contact_number = j.at("contact_number").get<std::string>();
    p.address = j.at("address").get<std::string>();
    p.driving_license = j.at("driving_license").get<bool>();
    p.car_owner = j.at("car_owner").get<bool>();
    return p;
}

std::string random_hex(std::size_t bytes) {
    Bytes buf(bytes);
    randombytes_buf(buf.data(), buf.size());
    return to_hex(buf);
}

}  // namespace

void ensure_crypto() {
    static const int status = sodium_init();
    if (status < 0) fail(ErrorKind::Io, "libsodium initialization failed");
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) fail(ErrorKind::Parse, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) fail(ErrorKind::Parse, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::optional<MacAddress> MacAddress::try_parse(std::string_view text) {
    std::array<std::uint8_t, 6> octets{};
    std::string digits;
    if (text.size() == 17) {
        const char sep = text[2];
        if (sep != ':' && sep != '-') return std::nullopt;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (i % 3 == 2) {
                if (text[i] != sep) return std::nullopt;
            } else {
                digits.push_back(text[i]);
            }
        }
    } else if (text.size() == 12) {
        digits.assign(text);
    } else {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < 6; ++i) {
        const int hi = hex_value(digits[2 * i]);
        const int lo = hex_value(digits[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return MacAddress(octets);
}

MacAddress MacAddress::parse(std::string_view text) {
    auto mac = try_parse(text);
    if (!mac) fail(ErrorKind::InvalidArgument, "malformed MAC");
    return *mac;
}

std::string MacAddress::canonical() const {
    std::string out;
    for (std::size_t i = 0; i < octets_.size(); ++i) {
        if (i) out.push_back(':');
        out += to_hex(std::span<const std::uint8_t>(&octets_[i], 1));
    }
    return out;
}

MacPseudonym::MacPseudonym(std::string hex) : hex_(std::move(hex)) {
    const bool ok = hex_.size() == 2 * crypto_auth_hmacsha256_BYTES &&
                    std::all_of(hex_.begin(), hex_.end(), [](char c) {
                        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                    });
    if (!ok) fail(ErrorKind::Parse, "pseudonym must be 64 lowercase hex digits");
}

MacPseudonym pseudonymize_mac(const MacAddress& mac, std::span<const std::uint8_t> salt) {
    ensure_crypto();
    if (salt.size() < kMinSaltBytes) {
        fail(ErrorKind::InvalidArgument,
             "salt too short: need at least " + std::to_string(kMinSaltBytes) + " bytes");
    }
    const std::string canonical = mac.canonical();
    crypto_auth_hmacsha256_state state;
    crypto_auth_hmacsha256_init(&state, salt.data(), salt.size());
    crypto_auth_hmacsha256_update(&state, reinterpret_cast<const unsigned char*>(canonical.data()),
                                  canonical.size());
    std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> digest{};
    crypto_auth_hmacsha256_final(&state, digest.data());
    return MacPseudonym(to_hex(digest));
}

ProfileCipher::ProfileCipher(std::span<const std::uint8_t> key) : key_(key.begin(), key.end()) {
    ensure_crypto();
    if (key_.size() != crypto_aead_xchacha20poly1305_ietf_KEYBYTES) {
        fail(ErrorKind::InvalidArgument, "profile key must be 32 bytes");
    }
}

std::string ProfileCipher::seal(const UserProfile& profile) const {
    const std::string plain = profile_to_json(profile).dump();
    Bytes out(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + plain.size() +
              crypto_aead_xchacha20poly1305_ietf_ABYTES);
    randombytes_buf(out.data(), crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
    unsigned long long written = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(
        out.data() + crypto_aead_xchacha20poly1305_ietf_NPUBBYTES, &written,
        reinterpret_cast<const unsigned char*>(plain.data()), plain.size(), nullptr, 0, nullptr,
        out.data(), key_.data());
    out.resize(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + written);
    return to_hex(out);
}

UserProfile ProfileCipher::open(std::string_view sealed) const {
    const Bytes in = from_hex(sealed);
    constexpr std::size_t overhead =
        crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + crypto_aead_xchacha20poly1305_ietf_ABYTES;
    if (in.size() < overhead) fail(ErrorKind::Parse, "sealed profile truncated");
    std::string plain(in.size() - overhead, '\0');
    unsigned long long written = 0;
    const int rc = crypto_aead_xchacha20poly1305_ietf_decrypt(
        reinterpret_cast<unsigned char*>(plain.data()), &written, nullptr,
        in.data() + crypto_aead_xchacha20poly1305_ietf_NPUBBYTES,
        in.size() - crypto_aead_xchacha20poly1305_ietf_NPUBBYTES, nullptr, 0, in.data(),
        key_.data());
    if (rc != 0) fail(ErrorKind::Unauthorized, "sealed profile failed authentication");
    plain.resize(written);
    return profile_from_json(nlohmann::json::parse(plain));
}

PasswordCost PasswordCost::interactive() {
    return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

PasswordCost PasswordCost::minimal() {
    return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
}

namespace {

std::string hash_password(const std::string& password, const PasswordCost& cost) {
    char out[crypto_pwhash_STRBYTES];
    if (crypto_pwhash_str(out, password.data(), password.size(), cost.ops, cost.mem_bytes) != 0) {
        fail(ErrorKind::Io, "password hashing ran out of memory");
    }
    return out;
}

bool verify_password(const std::string& digest, const std::string& password) {
    return crypto_pwhash_str_verify(digest.c_str(), password.data(), password.size()) == 0;
}

}  // namespace

AccountStore::AccountStore(std::filesystem::path path, PrivacySecrets secrets, PasswordCost cost,
                           Clock clock)
    : path_(std::move(path)),
      secrets_(std::move(secrets)),
      cipher_(secrets_.profile_key),
      cost_(cost),
      clock_(clock ? std::move(clock) : Clock(system_now)) {
    ensure_crypto();
    if (secrets_.salt.size() < kMinSaltBytes) {
        fail(ErrorKind::InvalidArgument, "salt too short");
    }
    dummy_digest_ = hash_password(random_hex(16), cost_);
    if (!path_.empty() && std::filesystem::exists(path_)) load();
}

std::string AccountStore::register_user(const UserProfile& profile,
                                        std::span<const std::string> macs,
                                        const std::string& email, const std::string& password) {
    if (profile.name.empty() || profile.surname.empty()) {
        fail(ErrorKind::InvalidArgument, "name and surname are required");
    }
    if (!(profile.date_of_birth < date_of(clock_()))) {
        fail(ErrorKind::InvalidArgument, "date of birth must be in the past");
    }
    if (macs.empty()) fail(ErrorKind::InvalidArgument, "at least one MAC required");
    if (email.find('@') == std::string::npos) {
        fail(ErrorKind::InvalidArgument, "email must contain '@'");
    }
    if (password.size() < 8) fail(ErrorKind::InvalidArgument, "weak password: need 8+ characters");

    std::vector<MacPseudonym> pseudonyms;
    for (const auto& text : macs) {
        auto p = pseudonymize_mac(MacAddress::parse(text), secrets_.salt);
        if (std::find(pseudonyms.begin(), pseudonyms.end(), p) == pseudonyms.end()) {
            pseudonyms.push_back(std::move(p));
        }
    }

    Account account{"u_" + random_hex(12), email, hash_password(password, cost_),
                    cipher_.seal(profile), std::move(pseudonyms)};

    std::unique_lock lock(mutex_);
    if (by_email_.count(email)) fail(ErrorKind::Conflict, "duplicate email");
    by_email_[email] = account.user_id;
    const std::string id = account.user_id;
    accounts_.emplace(id, std::move(account));
    try {
        persist();
    } catch (...) {
        accounts_.erase(id);
        by_email_.erase(email);
        throw;
    }
    return id;
}

std::optional<std::string> AccountStore::authenticate(const std::string& email,
                                                      const std::string& password) const {
    std::string digest;
    std::string user_id;
    {
        std::shared_lock lock(mutex_);
        auto it = by_email_.find(email);
        if (it != by_email_.end()) {
            user_id = it->second;
            digest = accounts_.at(user_id).password_digest;
        }
    }
    // Unknown emails still pay for a full verify.
    const bool ok = verify_password(digest.empty() ? dummy_digest_ : digest, password);
    if (!ok || user_id.empty()) return std::nullopt;
    return user_id;
}

std::optional<Account> AccountStore::find(const std::string& user_id) const {
    std::shared_lock lock(mutex_);
    auto it = accounts_.find(user_id);
    if (it == accounts_.end()) return std::nullopt;
    return it->second;
}

UserProfile AccountStore::profile(const std::string& user_id) const {
    auto account = find(user_id);
    if (!account) fail(ErrorKind::NotFound, "unknown user");
    return cipher_.open(account->sealed_profile);
}

std::vector<MacPseudonym> AccountStore::pseudonyms(const std::string& user_id) const {
    auto account = find(user_id);
    if (!account) fail(ErrorKind::NotFound, "unknown user");
    return account->pseudonyms;
}

std::size_t AccountStore::size() const {
    std::shared_lock lock(mutex_);
    return accounts_.size();
}

void AccountStore::load() {
    std::ifstream in(path_);
    if (!in) fail(ErrorKind::Io, "cannot open account store " + path_.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        if (doc.at("version").get<int>() != 1) {
            fail(ErrorKind::Parse, "unsupported account store version");
        }
        for (const auto& a : doc.at("accounts")) {
            Account account;
            account.user_id = a.at("user_id").get<std::string>();
            account.email = a.at("email").get<std::string>();
            account.password_digest = a.at("password_digest").get<std::string>();
            account.sealed_profile = a.at("profile").get<std::string>();
            for (const auto& p : a.at("pseudonyms")) {
                account.pseudonyms.emplace_back(p.get<std::string>());
            }
            by_email_[account.email] = account.user_id;
            accounts_.emplace(account.user_id, std::move(account));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, path_.string() + ": " + e.what());
    }
}

void AccountStore::persist() const {
    if (path_.empty()) return;
    nlohmann::json doc;
    doc["version"] = 1;
    doc["accounts"] = nlohmann::json::array();
    for (const auto& [id, a] : accounts_) {
        nlohmann::json pseudonyms = nlohmann::json::array();
        for (const auto& p : a.pseudonyms) pseudonyms.push_back(p.str());
        doc["accounts"].push_back({{"user_id", a.user_id},
                                   {"email", a.email},
                                   {"password_digest", a.password_digest},
                                   {"profile", a.sealed_profile},
                                   {"pseudonyms", pseudonyms}});
    }
    auto tmp = path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot write account store " + tmp.string());
        out << doc.dump(2) << '\n';
        out.flush();
        if (!out) fail(ErrorKind::Io, "failed writing account store " + tmp.string());
    }
    std::filesystem::rename(tmp, path_);
}

Session SessionManager::issue(const std::string& user_id, UnixTime now) {
    ensure_crypto();
    Session s{random_hex(32), user_id, now + lifetime_};
    std::lock_guard lock(mutex_);
    sessions_[s.token] = s;
    return s;
}

std::optional<std::string> SessionManager::resolve(const std::string& token, UnixTime now) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(token);
    if (it == sessions_.end() || now >= it->second.expires_at) return std::nullopt;
    return it->second.user_id;
}

}  // namespace safemob
