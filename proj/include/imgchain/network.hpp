#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imgchain/chain.hpp"
#include "imgchain/image.hpp"
#include "imgchain/phash.hpp"

namespace imgchain {

// Shared: every device points at one immutable chain snapshot.
// Deep: each device owns its own copy (used to inject divergence).
enum class ReplicaMode { Shared, Deep };

struct Device {
    int id = 0;
    AlgorithmId algo = AlgorithmId::Average;
    std::shared_ptr<const Chain> replica;
};

struct DeviceResult {
    AlgorithmId algo = AlgorithmId::Average;
    std::size_t found_block = 0;
    double score = 0.0;

    friend bool operator==(const DeviceResult&, const DeviceResult&) = default;
};

struct QueryReport {
    std::vector<DeviceResult> per_device;  // precedence order
    DeviceResult winner;
    std::string winner_ref;                // image_ref of the winning block
    std::optional<bool> correct;           // set when the ground truth is known

    friend bool operator==(const QueryReport&, const QueryReport&) = default;
};

// Dataset files in lexicographic filename order, each decoded, hashed by
// every algorithm, mined and appended. image_ref is "<dir>/<filename>".
Chain build_chain(const std::filesystem::path& dataset_dir, int difficulty,
                  const std::vector<AlgorithmId>& algorithms = {kAllAlgorithms.begin(), kAllAlgorithms.end()});

// One device per entry of `assignment`, which must cover all five algorithms.
std::vector<Device> make_network(Chain chain, const std::vector<AlgorithmId>& assignment,
                                 ReplicaMode mode = ReplicaMode::Shared);

std::vector<Device> build_network(const std::filesystem::path& dataset_dir, int difficulty,
                                  const std::vector<AlgorithmId>& assignment = {kAllAlgorithms.begin(),
                                                                                kAllAlgorithms.end()},
                                  ReplicaMode mode = ReplicaMode::Shared);

// Lowest score over the non-genesis blocks using their stored hashes; the
// first minimum wins. Throws IntegrityError for an invalid replica.
DeviceResult device_scan(const Device& device, const Image& img);
DeviceResult device_scan(const Device& device, const PerceptualHash& query_hash);

// Scans every device concurrently and picks the lowest score, ties going to
// algorithm precedence. Throws IntegrityError naming a divergent device.
QueryReport query(const std::vector<Device>& devices, const Image& img);

struct ReplicaVerdict {
    bool valid = true;
    int device = -1;        // offending device id
    std::size_t block = 0;  // first differing or failing block
    ChainVerdict chain;     // per-chain verdict when the replicas agree but fail

    friend bool operator==(const ReplicaVerdict&, const ReplicaVerdict&) = default;
};

ReplicaVerdict verify_replicas(const std::vector<Device>& devices);

}  // namespace imgchain
