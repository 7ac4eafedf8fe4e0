#include "trajmatch/cli.hpp"
#include "trajmatch/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace trajmatch::manifest {

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + path.string() + "' for hashing");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 initialisation failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::filesystem::path write(const std::filesystem::path& primary_output, const std::string& command,
                            const nlohmann::json& config, const std::vector<std::filesystem::path>& inputs,
                            const std::vector<std::filesystem::path>& outputs)
{
    auto digests = [](const std::vector<std::filesystem::path>& paths) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& p : paths)
            list.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
        return list;
    };

    nlohmann::json doc;
    doc["tool"] = "trajmatch";
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["config"] = config;
    doc["inputs"] = digests(inputs);
    doc["outputs"] = digests(outputs);

    std::filesystem::path path = primary_output;
    path += ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write manifest '" + path.string() + "'");
    out << doc.dump(2) << '\n';
    return path;
}

} // namespace trajmatch::manifest
