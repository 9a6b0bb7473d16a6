#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "imgchain/chain.hpp"
#include "imgchain/codec.hpp"
#include "imgchain/config.hpp"
#include "imgchain/dataset.hpp"
#include "imgchain/error.hpp"
#include "imgchain/harness.hpp"
#include "imgchain/network.hpp"

namespace fs = std::filesystem;
using namespace imgchain;

namespace {

enum Exit { Ok = 0, Usage = 1, Data = 2, Integrity = 3 };

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spill(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write " + path.string());
}

fs::path truth_path_for(const fs::path& chain_path)
{
    fs::path p = chain_path;
    return p.replace_extension(".truth");
}

// Loads a chain and refuses to go on if it does not verify.
std::vector<Device> network_from(const fs::path& chain_path, const Config& cfg)
{
    Chain chain = load_chain(chain_path);
    if (const ChainVerdict v = verify_chain(chain); !v.valid())
        throw IntegrityError(chain_path.string() + ": " + std::string(fault_name(v.fault)) + " at block " +
                             std::to_string(v.block));
    return make_network(std::move(chain), {kAllAlgorithms.begin(), kAllAlgorithms.end()}, cfg.replicas);
}

AttackOptions attack_options(const Config& cfg) { return {cfg.crop_anchor, cfg.rotate_expand}; }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Perceptual-hash image chain: enrol, attack, query and benchmark"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("gen-dataset", "write the built-in synthetic 12-image dataset");
    std::string gen_dir;
    int gen_side = 256;
    gen->add_option("dir", gen_dir)->required();
    gen->add_option("--size", gen_side, "side length in pixels")->check(CLI::PositiveNumber);

    auto* build = app.add_subcommand("build", "enrol every image of a directory into a new chain");
    std::string build_dir, build_out;
    std::optional<int> build_difficulty;
    build->add_option("dataset-dir", build_dir)->required();
    build->add_option("-o,--output", build_out, "chain file")->required();
    build->add_option("--difficulty", build_difficulty)->check(CLI::NonNegativeNumber);

    auto* verify = app.add_subcommand("verify", "check a chain file");
    std::string verify_path;
    verify->add_option("chain", verify_path)->required();

    auto* attack = app.add_subcommand("attack", "write an attack suite for one image");
    std::string attack_image, attack_kind, attack_out, attack_stem;
    attack->add_option("image", attack_image)->required();
    attack->add_option("--kind", attack_kind)->required()->check(CLI::IsMember({"blur", "rotate", "crop", "flip"}));
    attack->add_option("-o,--output", attack_out, "output directory")->required();
    attack->add_option("--stem", attack_stem, "name prefix (default: image file stem)");

    auto* query_cmd = app.add_subcommand("query", "find the closest enrolled image");
    std::string query_chain, query_image;
    bool query_json = false;
    query_cmd->add_option("chain", query_chain)->required();
    query_cmd->add_option("image", query_image)->required();
    query_cmd->add_flag("--json", query_json);

    auto* bench = app.add_subcommand("bench", "query every attacked image and write logs and CSVs");
    std::string bench_chain, bench_dir, bench_truth, bench_out;
    bench->add_option("chain", bench_chain)->required();
    bench->add_option("suite-dir", bench_dir)->required();
    bench->add_option("--truth", bench_truth, "stem=block map (default: next to the chain)");
    bench->add_option("-o,--output", bench_out, "results directory")->required();

    auto* classify = app.add_subcommand("classify", "label the attack behind a suite CSV");
    std::string classify_csv;
    classify->add_option("csv", classify_csv)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        const Config cfg = config_path.empty() ? Config{} : load_config(config_path);

        if (*gen) {
            for (const fs::path& p : write_synthetic_dataset(gen_dir, gen_side)) std::cout << p.string() << '\n';
        } else if (*build) {
            const Chain chain = build_chain(build_dir, build_difficulty.value_or(cfg.difficulty));
            save_chain(build_out, chain);
            spill(truth_path_for(build_out), serialize_truth(truth_from_chain(chain)));
            std::cout << "chain " << build_out << ": " << chain.blocks.size() << " blocks, difficulty "
                      << chain.difficulty << "\ntruth " << truth_path_for(build_out).string() << '\n';
        } else if (*verify) {
            const Chain chain = load_chain(verify_path);
            const ChainVerdict v = verify_chain(chain);
            if (!v.valid()) {
                std::cout << "invalid: " << fault_name(v.fault) << " at block " << v.block << '\n';
                return Integrity;
            }
            std::cout << "valid: " << chain.blocks.size() << " blocks\n";
        } else if (*attack) {
            const fs::path image = attack_image;
            const std::string stem = attack_stem.empty() ? image.stem().string() : attack_stem;
            const SuiteKind kind = *suite_from_name(attack_kind);
            for (const fs::path& p : write_attack_suite(load_image(image), stem, kind, attack_out, attack_options(cfg)))
                std::cout << p.string() << '\n';
        } else if (*query_cmd) {
            const auto devices = network_from(query_chain, cfg);
            const QueryReport r = query(devices, load_image(query_image));
            if (query_json) {
                nlohmann::ordered_json j;
                j["block"] = r.winner.found_block;
                j["image"] = r.winner_ref;
                j["score"] = r.winner.score;
                j["algorithm"] = algorithm_name(r.winner.algo);
                for (const DeviceResult& d : r.per_device)
                    j["devices"].push_back({{"algorithm", algorithm_name(d.algo)},
                                            {"block", d.found_block},
                                            {"score", d.score}});
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "Best Score: " << format_score(r.winner.score) << " using "
                          << algorithm_name(r.winner.algo) << '\n'
                          << "Image Found: " << r.winner_ref << " (" << r.winner.found_block << ")\n";
                for (const DeviceResult& d : r.per_device)
                    std::cout << algorithm_name(d.algo) << ": (" << d.found_block << ") " << format_score(d.score)
                              << '\n';
            }
        } else if (*bench) {
            const auto devices = network_from(bench_chain, cfg);
            const fs::path truth_file = bench_truth.empty() ? truth_path_for(bench_chain) : fs::path(bench_truth);
            const TruthMap truth = parse_truth(slurp(truth_file));
            fs::create_directories(bench_out);
            for (const SuiteResult& suite : run_bench(devices, bench_dir, truth)) {
                const std::string base = suite.stem + "_" + std::string(suite_name(suite.kind));
                spill(fs::path(bench_out) / (base + ".log"), log_text(suite));
                spill(fs::path(bench_out) / (base + ".csv"), csv_text(suite));
                int correct = 0;
                for (const TestRecord& r : suite.records) correct += r.correct();
                std::cout << base << ": " << correct << "/" << suite.records.size() << " correct, "
                          << signature_name(classify_attack(suite, cfg.classifier).label) << '\n';
            }
        } else if (*classify) {
            std::vector<SuiteSample> samples;
            for (const CsvRow& row : parse_csv(slurp(classify_csv))) samples.push_back({row.winner_score, row.correct});
            const AttackSignature s = classify_attack(samples, cfg.classifier);
            std::cout << signature_name(s.label) << " (range " << format_score(s.range) << ", slope "
                      << format_score(s.slope) << ", error rate " << format_score(s.error_rate) << ")\n";
        }
    } catch (const IntegrityError& e) {
        std::cerr << "integrity: " << e.what() << '\n';
        return Integrity;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Data;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Data;
    }
    return Ok;
}
