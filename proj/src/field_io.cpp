#include "wigneton/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "wigneton/errors.hpp"

namespace wigneton {

namespace fs = std::filesystem;

nlohmann::json field_header(const WignerField& field, const std::string& payload_name) {
    const auto& g = field.grid;
    nlohmann::json j;
    j["q0"] = g.q0;
    j["q1"] = g.q1;
    j["p0"] = g.p0;
    j["p1"] = g.p1;
    j["Nq"] = g.nq;
    j["Np"] = g.np;
    j["hbar"] = field.hbar;
    j["time"] = field.time;
    j["data"] = payload_name;
    return j;
}

std::string encode_f64(const std::vector<double>& values) {
    std::string out(values.size() * 8, '\0');
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto bits = std::bit_cast<std::uint64_t>(values[k]);
        for (int b = 0; b < 8; ++b) {
            out[k * 8 + static_cast<std::size_t>(b)] = static_cast<char>(bits & 0xff);
            bits >>= 8;
        }
    }
    return out;
}

std::vector<double> decode_f64(std::string_view bytes, std::size_t expected) {
    if (bytes.size() != expected * 8)
        throw IoError("f64 payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected * 8));
    std::vector<double> out(expected);
    for (std::size_t k = 0; k < expected; ++k) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[k * 8 + static_cast<std::size_t>(b)]);
        out[k] = std::bit_cast<double>(bits);
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string field_csv(const WignerField& field) {
    const auto& g = field.grid;
    std::string out = "q,p,W\n";
    for (std::size_t i = 0; i < g.nq; ++i)
        for (std::size_t j = 0; j < g.np; ++j) {
            out += format_double(g.q(i));
            out += ',';
            out += format_double(g.p(j));
            out += ',';
            out += format_double(field.at(i, j));
            out += '\n';
        }
    return out;
}

std::string plot_blocks(const WignerField& field) {
    const auto& g = field.grid;
    std::string out;
    for (std::size_t i = 0; i < g.nq; ++i) {
        if (i > 0) out += '\n';
        for (std::size_t j = 0; j < g.np; ++j) {
            out += format_double(g.q(i));
            out += ' ';
            out += format_double(g.p(j));
            out += ' ';
            out += format_double(field.at(i, j));
            out += '\n';
        }
    }
    return out;
}

std::string plot_blocks(const PatternReport& report) {
    std::string out;
    for (std::size_t l = 0; l < report.level_energies.size(); ++l) {
        out += std::to_string(l);
        out += ' ';
        out += format_double(report.level_energies[l]);
        out += ' ';
        out += format_double(l < report.level_shares.size() ? report.level_shares[l] : 0.0);
        out += '\n';
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return ss.str();
}

WignerField load_field(const fs::path& header_path) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(read_file(header_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("field", header_path.string() + ": " + e.what());
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!h.is_object() || !h.contains(key)) throw ConfigError(key, header_path.string() + ": missing '" + key + "'");
        return h.at(key);
    };
    WignerField w;
    try {
        w.grid.q0 = need("q0").get<double>();
        w.grid.q1 = need("q1").get<double>();
        w.grid.p0 = need("p0").get<double>();
        w.grid.p1 = need("p1").get<double>();
        w.grid.nq = need("Nq").get<std::size_t>();
        w.grid.np = need("Np").get<std::size_t>();
        w.hbar = need("hbar").get<double>();
        w.time = need("time").get<double>();
        const auto payload = header_path.parent_path() / need("data").get<std::string>();
        w.values = decode_f64(read_file(payload), w.grid.size());
    } catch (const nlohmann::json::type_error& e) {
        throw ConfigError("field", header_path.string() + ": " + e.what());
    }
    return w;
}

void write_atomic(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xf];
    }
    return out;
}

}  // namespace wigneton
