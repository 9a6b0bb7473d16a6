#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imgchain/phash.hpp"

namespace imgchain {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);

struct Block {
    std::size_t index = 0;
    Digest prev_hash{};
    std::string image_ref;   // empty for genesis
    Digest content_digest{}; // SHA-256 of the image file bytes; zero for genesis
    std::map<AlgorithmId, std::string> perceptual_hashes;  // serialized, keyed in precedence order
    std::uint64_t nonce = 0;
    Digest hash{};

    friend bool operator==(const Block&, const Block&) = default;
};

// hex(prev) ":" hex(content) ":" hashes joined by "," ":" decimal(nonce)
std::string block_preimage(const Block& block);
Digest calculate_hash(const Block& block);

// True when hex(hash) starts with `difficulty` '0' characters.
bool meets_difficulty(const Digest& hash, int difficulty);

// Sets the smallest qualifying nonce >= 0 and the matching hash. The search
// fans out across OpenMP threads; the result does not depend on thread count.
Block mine_block(Block block, int difficulty);
// Plain linear nonce scan, kept as the reference for mine_block.
Block mine_block_serial(Block block, int difficulty);

Block make_genesis(int difficulty);

struct Chain {
    int difficulty = 4;
    std::vector<AlgorithmId> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::vector<Block> blocks;

    friend bool operator==(const Chain&, const Chain&) = default;
};

// A chain holding only the mined genesis block.
Chain make_chain(int difficulty = 4, std::vector<AlgorithmId> algorithms = {kAllAlgorithms.begin(),
                                                                             kAllAlgorithms.end()});

// Mines and links a block for the image. Throws DataError when `hashes`
// misses an algorithm of the chain and IntegrityError when the chain is
// already invalid.
void append_image(Chain& chain, std::string image_ref, std::span<const std::uint8_t> image_bytes,
                  const std::map<AlgorithmId, std::string>& hashes);

enum class ChainFault { None, HashMismatch, BrokenLink, Difficulty, BadIndex, HashSet, Empty };
std::string_view fault_name(ChainFault fault);

struct ChainVerdict {
    ChainFault fault = ChainFault::None;
    std::size_t block = 0;

    bool valid() const { return fault == ChainFault::None; }
    friend bool operator==(const ChainVerdict&, const ChainVerdict&) = default;
};

// Per block, in order: stored hash recomputes, previous-hash link,
// difficulty prefix, index, hash set. Reports the first failure.
ChainVerdict verify_chain(const Chain& chain);

// Line-oriented text form: header then one record per block.
std::string serialize_chain(const Chain& chain);
Chain parse_chain(std::string_view text);
void save_chain(const std::filesystem::path& path, const Chain& chain);
Chain load_chain(const std::filesystem::path& path);

}  // namespace imgchain
