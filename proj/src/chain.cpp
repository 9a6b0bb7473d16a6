#include "imgchain/chain.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "imgchain/error.hpp"
#include "imgchain/hex.hpp"
#include "imgchain/kernels.hpp"

namespace imgchain {

namespace {

constexpr std::string_view kHeaderMagic = "imgchain v1";

std::string preimage_prefix(const Block& block)
{
    std::string s = byte_to_hex(block.prev_hash);
    s += ':';
    s += byte_to_hex(block.content_digest);
    s += ':';
    bool first = true;
    for (const auto& [algo, serialized] : block.perceptual_hashes) {
        if (!first) s += ',';
        s += serialized;
        first = false;
    }
    s += ':';
    return s;
}

Digest hash_with_nonce(const std::string& prefix, std::uint64_t nonce)
{
    std::string text = prefix;
    text += std::to_string(nonce);
    return sha256(text);
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view what)
{
    Int v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw DataError("chain file: bad " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

Digest parse_digest(std::string_view hex)
{
    const auto bytes = hex_to_byte(hex);
    if (bytes.size() != 32) throw DataError("chain file: digest must be 64 hex characters");
    Digest d;
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> bytes)
{
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw std::runtime_error("SHA-256 computation failed");
    return out;
}

Digest sha256(std::string_view text)
{
    return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string block_preimage(const Block& block) { return preimage_prefix(block) + std::to_string(block.nonce); }

Digest calculate_hash(const Block& block) { return sha256(block_preimage(block)); }

bool meets_difficulty(const Digest& hash, int difficulty)
{
    if (difficulty > 64) return false;
    for (int i = 0; i < difficulty; ++i) {
        const std::uint8_t nibble = i % 2 == 0 ? hash[i / 2] >> 4 : hash[i / 2] & 0xf;
        if (nibble != 0) return false;
    }
    return true;
}

Block mine_block(Block block, int difficulty)
{
    if (difficulty < 0) throw DataError("difficulty must be non-negative");
    const std::string prefix = preimage_prefix(block);
    const auto nonce = kernels::find_first(0, UINT64_MAX, [&](std::uint64_t n) {
        return meets_difficulty(hash_with_nonce(prefix, n), difficulty);
    });
    if (!nonce) throw IntegrityError("nonce space exhausted");
    block.nonce = *nonce;
    block.hash = hash_with_nonce(prefix, *nonce);
    return block;
}

Block mine_block_serial(Block block, int difficulty)
{
    if (difficulty < 0) throw DataError("difficulty must be non-negative");
    const std::string prefix = preimage_prefix(block);
    const auto nonce = kernels::reference::find_first(0, UINT64_MAX, [&](std::uint64_t n) {
        return meets_difficulty(hash_with_nonce(prefix, n), difficulty);
    });
    if (!nonce) throw IntegrityError("nonce space exhausted");
    block.nonce = *nonce;
    block.hash = hash_with_nonce(prefix, *nonce);
    return block;
}

Block make_genesis(int difficulty) { return mine_block(Block{}, difficulty); }

Chain make_chain(int difficulty, std::vector<AlgorithmId> algorithms)
{
    Chain chain;
    chain.difficulty = difficulty;
    chain.algorithms = std::move(algorithms);
    chain.blocks.push_back(make_genesis(difficulty));
    return chain;
}

void append_image(Chain& chain, std::string image_ref, std::span<const std::uint8_t> image_bytes,
                  const std::map<AlgorithmId, std::string>& hashes)
{
    for (AlgorithmId algo : chain.algorithms)
        if (!hashes.contains(algo))
            throw DataError("missing " + std::string(algorithm_name(algo)) + " hash for " + image_ref);
    if (const auto verdict = verify_chain(chain); !verdict.valid())
        throw IntegrityError("cannot append to invalid chain: block " + std::to_string(verdict.block) + " " +
                             std::string(fault_name(verdict.fault)));

    Block block;
    block.index = chain.blocks.size();
    block.prev_hash = chain.blocks.back().hash;
    block.image_ref = std::move(image_ref);
    block.content_digest = sha256(image_bytes);
    for (AlgorithmId algo : chain.algorithms) block.perceptual_hashes[algo] = hashes.at(algo);
    chain.blocks.push_back(mine_block(std::move(block), chain.difficulty));
}

std::string_view fault_name(ChainFault fault)
{
    switch (fault) {
    case ChainFault::None: return "ok";
    case ChainFault::HashMismatch: return "hash-mismatch";
    case ChainFault::BrokenLink: return "broken-link";
    case ChainFault::Difficulty: return "difficulty";
    case ChainFault::BadIndex: return "bad-index";
    case ChainFault::HashSet: return "hash-set";
    case ChainFault::Empty: return "empty";
    }
    return "unknown";
}

ChainVerdict verify_chain(const Chain& chain)
{
    if (chain.blocks.empty()) return {ChainFault::Empty, 0};
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& b = chain.blocks[i];
        if (calculate_hash(b) != b.hash) return {ChainFault::HashMismatch, i};
        const Digest expected_prev = i == 0 ? Digest{} : chain.blocks[i - 1].hash;
        if (b.prev_hash != expected_prev) return {ChainFault::BrokenLink, i};
        if (!meets_difficulty(b.hash, chain.difficulty)) return {ChainFault::Difficulty, i};
        if (b.index != i) return {ChainFault::BadIndex, i};
        const std::size_t expected_hashes = i == 0 ? 0 : chain.algorithms.size();
        bool complete = b.perceptual_hashes.size() == expected_hashes;
        for (const auto& [algo, serialized] : b.perceptual_hashes) {
            const auto colon = serialized.find(':');
            complete = complete && serialized.substr(0, colon) == algorithm_name(algo);
        }
        if (!complete) return {ChainFault::HashSet, i};
    }
    return {};
}

std::string serialize_chain(const Chain& chain)
{
    std::string out(kHeaderMagic);
    out += " difficulty=" + std::to_string(chain.difficulty) + " algos=";
    for (std::size_t i = 0; i < chain.algorithms.size(); ++i) {
        if (i) out += ',';
        out += algorithm_name(chain.algorithms[i]);
    }
    out += '\n';
    for (const Block& b : chain.blocks) {
        if (b.image_ref.find_first_of("|\n") != std::string::npos)
            throw DataError("image reference contains '|' or a newline: " + b.image_ref);
        out += std::to_string(b.index) + '|' + byte_to_hex(b.prev_hash) + '|' + b.image_ref + '|' +
               byte_to_hex(b.content_digest) + '|';
        bool first = true;
        for (const auto& [algo, serialized] : b.perceptual_hashes) {
            if (!first) out += ',';
            out += serialized;
            first = false;
        }
        out += '|' + std::to_string(b.nonce) + '|' + byte_to_hex(b.hash) + '\n';
    }
    return out;
}

Chain parse_chain(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(kHeaderMagic))
        throw DataError("chain file: missing 'imgchain v1' header");

    Chain chain;
    chain.algorithms.clear();
    std::istringstream header(line.substr(kHeaderMagic.size()));
    std::string field;
    bool have_difficulty = false;
    bool have_algos = false;
    while (header >> field) {
        if (field.starts_with("difficulty=")) {
            chain.difficulty = parse_int<int>(std::string_view(field).substr(11), "difficulty");
            have_difficulty = true;
        } else if (field.starts_with("algos=")) {
            for (auto name : split(std::string_view(field).substr(6), ',')) {
                const auto algo = algorithm_from_name(name);
                if (!algo) throw DataError("chain file: unknown algorithm '" + std::string(name) + "'");
                chain.algorithms.push_back(*algo);
            }
            have_algos = true;
        } else {
            throw DataError("chain file: unexpected header field '" + field + "'");
        }
    }
    if (!have_difficulty || !have_algos) throw DataError("chain file: header needs difficulty= and algos=");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split(line, '|');
        if (fields.size() != 7)
            throw DataError("chain file: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, expected 7");
        Block b;
        b.index = parse_int<std::size_t>(fields[0], "index");
        b.prev_hash = parse_digest(fields[1]);
        b.image_ref = std::string(fields[2]);
        b.content_digest = parse_digest(fields[3]);
        if (!fields[4].empty())
            for (auto serialized : split(fields[4], ',')) {
                const auto algo = algorithm_from_name(serialized.substr(0, serialized.find(':')));
                if (!algo) throw DataError("chain file: line " + std::to_string(line_no) + " has an unknown hash");
                b.perceptual_hashes[*algo] = std::string(serialized);
            }
        b.nonce = parse_int<std::uint64_t>(fields[5], "nonce");
        b.hash = parse_digest(fields[6]);
        chain.blocks.push_back(std::move(b));
    }
    return chain;
}

void save_chain(const std::filesystem::path& path, const Chain& chain)
{
    const std::string text = serialize_chain(chain);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw DataError("cannot write " + path.string());
}

Chain load_chain(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_chain(buf.str());
}

}  // namespace imgchain
