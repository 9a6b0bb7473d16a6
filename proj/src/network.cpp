#include "imgchain/network.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>

#include "imgchain/codec.hpp"
#include "imgchain/error.hpp"

namespace imgchain {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> dataset_files(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && !entry.path().filename().string().starts_with("."))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (files.empty()) throw DataError("dataset directory is empty: " + dir.string());
    return files;
}

void require_valid(const Device& device)
{
    if (!device.replica) throw IntegrityError("device " + std::to_string(device.id) + " has no replica");
    const ChainVerdict v = verify_chain(*device.replica);
    if (!v.valid())
        throw IntegrityError("device " + std::to_string(device.id) + " replica invalid at block " +
                             std::to_string(v.block) + " (" + std::string(fault_name(v.fault)) + ")");
}

}  // namespace

Chain build_chain(const fs::path& dataset_dir, int difficulty, const std::vector<AlgorithmId>& algorithms)
{
    const auto files = dataset_files(dataset_dir);
    Chain chain = make_chain(difficulty, algorithms);
    for (const fs::path& file : files) {
        const auto bytes = read_file(file);
        Image img;
        try {
            img = decode_image(bytes);
        } catch (const DataError& e) {
            throw DataError("cannot decode " + file.string() + ": " + e.what());
        }
        std::map<AlgorithmId, std::string> hashes;
        for (AlgorithmId algo : algorithms) hashes[algo] = serialize(compute_hash(algo, img));
        append_image(chain, dataset_dir.string() + "/" + file.filename().string(), bytes, hashes);
    }
    return chain;
}

std::vector<Device> make_network(Chain chain, const std::vector<AlgorithmId>& assignment, ReplicaMode mode)
{
    const std::set<AlgorithmId> covered(assignment.begin(), assignment.end());
    for (AlgorithmId algo : kAllAlgorithms)
        if (!covered.contains(algo))
            throw DataError("device assignment does not cover " + std::string(algorithm_name(algo)));

    auto shared = std::make_shared<const Chain>(std::move(chain));
    std::vector<Device> devices;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        Device d;
        d.id = static_cast<int>(i);
        d.algo = assignment[i];
        d.replica = mode == ReplicaMode::Shared ? shared : std::make_shared<const Chain>(*shared);
        devices.push_back(std::move(d));
    }
    return devices;
}

std::vector<Device> build_network(const fs::path& dataset_dir, int difficulty,
                                  const std::vector<AlgorithmId>& assignment, ReplicaMode mode)
{
    return make_network(build_chain(dataset_dir, difficulty), assignment, mode);
}

DeviceResult device_scan(const Device& device, const PerceptualHash& query_hash)
{
    require_valid(device);
    const Chain& chain = *device.replica;
    if (chain.blocks.size() < 2)
        throw DataError("device " + std::to_string(device.id) + " replica holds no image blocks");

    std::optional<DeviceResult> best;
    for (std::size_t i = 1; i < chain.blocks.size(); ++i) {
        const auto it = chain.blocks[i].perceptual_hashes.find(device.algo);
        if (it == chain.blocks[i].perceptual_hashes.end())
            throw IntegrityError("block " + std::to_string(i) + " lacks " + std::string(algorithm_name(device.algo)));
        const double score = compare(device.algo, query_hash, parse_hash(it->second));
        if (!best || score < best->score) best = DeviceResult{device.algo, i, score};
    }
    return *best;
}

DeviceResult device_scan(const Device& device, const Image& img)
{
    return device_scan(device, compute_hash(device.algo, img));
}

QueryReport query(const std::vector<Device>& devices, const Image& img)
{
    if (devices.empty()) throw DataError("query needs at least one device");
    if (devices.size() >= 2) {
        const ReplicaVerdict rv = verify_replicas(devices);
        if (!rv.valid)
            throw IntegrityError("replica check failed at device " + std::to_string(rv.device) + ", block " +
                                 std::to_string(rv.block));
    }

    const int n = static_cast<int>(devices.size());
    std::vector<DeviceResult> results(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            results[i] = device_scan(devices[i], img);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::stable_sort(results.begin(), results.end(),
                     [](const DeviceResult& a, const DeviceResult& b) { return precedence(a.algo) < precedence(b.algo); });
    QueryReport report;
    report.per_device = results;
    report.winner = results.front();
    for (const DeviceResult& r : results)
        if (r.score < report.winner.score) report.winner = r;
    report.winner_ref = devices.front().replica->blocks[report.winner.found_block].image_ref;
    return report;
}

ReplicaVerdict verify_replicas(const std::vector<Device>& devices)
{
    ReplicaVerdict verdict;
    if (devices.empty()) return verdict;
    for (const Device& d : devices)
        if (!d.replica) return {false, d.id, 0, {ChainFault::Empty, 0}};

    // The most common serialization is the reference; ties go to the earliest device.
    std::map<const Chain*, std::string> cache;
    std::vector<std::string> texts;
    std::map<std::string, int> votes;
    for (const Device& d : devices) {
        auto [it, inserted] = cache.try_emplace(d.replica.get());
        if (inserted) it->second = serialize_chain(*d.replica);
        texts.push_back(it->second);
        ++votes[texts.back()];
    }
    std::size_t ref = 0;
    for (std::size_t i = 1; i < texts.size(); ++i)
        if (votes[texts[i]] > votes[texts[ref]]) ref = i;

    const Chain& reference = *devices[ref].replica;
    for (std::size_t i = 0; i < devices.size(); ++i) {
        if (texts[i] == texts[ref]) continue;
        const Chain& other = *devices[i].replica;
        std::size_t block = 0;
        const std::size_t common = std::min(other.blocks.size(), reference.blocks.size());
        while (block < common && other.blocks[block] == reference.blocks[block]) ++block;
        return {false, devices[i].id, block, verify_chain(other)};
    }

    const ChainVerdict cv = verify_chain(reference);
    if (!cv.valid()) return {false, devices[ref].id, cv.block, cv};
    return verdict;
}

}  // namespace imgchain
