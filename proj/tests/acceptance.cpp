// End-to-end acceptance run: synthetic dataset at 256x256, difficulty-4
// chain, every attack suite for the five test images, then one PASS/FAIL
// line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "imgchain/chain.hpp"
#include "imgchain/codec.hpp"
#include "imgchain/config.hpp"
#include "imgchain/dataset.hpp"
#include "imgchain/harness.hpp"
#include "imgchain/network.hpp"
#include "imgchain/transform.hpp"

namespace fs = std::filesystem;
using namespace imgchain;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kDifficulty = 4;
constexpr int kSide = 256;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spill(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct Run {
    std::vector<Device> devices;
    TruthMap truth;
    std::map<std::pair<std::string, SuiteKind>, SuiteResult> suites;
    std::map<std::string, std::string> artifacts;  // relative path -> bytes
    double build_seconds = 0.0;
};

// build -> attack -> bench, all inside `root`.
Run run_pipeline(const fs::path& root, const std::vector<std::string>& tests)
{
    fs::remove_all(root);
    Run run;
    const fs::path data = root / "data";
    write_synthetic_dataset(data, kSide);

    const auto t0 = Clock::now();
    Chain chain = build_chain(data, kDifficulty);
    run.build_seconds = seconds_since(t0);
    save_chain(root / "chain.dat", chain);
    run.truth = truth_from_chain(chain);
    spill(root / "chain.truth", serialize_truth(run.truth));
    run.devices = make_network(std::move(chain), {kAllAlgorithms.begin(), kAllAlgorithms.end()});

    for (const std::string& stem : tests) {
        const Image img = load_image(data / (stem + ".png"));
        for (SuiteKind kind : {SuiteKind::Blur, SuiteKind::Rotate, SuiteKind::Crop, SuiteKind::Flip})
            write_attack_suite(img, stem, kind, root / "suites" / (stem + "_" + std::string(suite_name(kind))));
    }
    fs::create_directories(root / "results");
    for (SuiteResult& suite : run_bench(run.devices, root / "suites", run.truth)) {
        const std::string base = suite.stem + "_" + std::string(suite_name(suite.kind));
        spill(root / "results" / (base + ".log"), log_text(suite));
        spill(root / "results" / (base + ".csv"), csv_text(suite));
        run.suites[{suite.stem, suite.kind}] = std::move(suite);
    }

    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            run.artifacts[fs::relative(entry.path(), root).generic_string()] = slurp(entry.path());
    return run;
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail)
{
    std::printf("%s %2d %-22s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const DeviceResult& device(const TestRecord& r, AlgorithmId algo) { return r.report.per_device[precedence(algo)]; }

}  // namespace

int main(int argc, char** argv)
{
    const auto start = Clock::now();
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "imgchain_acceptance";
    const Config cfg;
    const std::vector<std::string>& tests = cfg.testset;

    Run run = run_pipeline(root, tests);
    const Chain& chain = *run.devices.front().replica;
    auto suite = [&](const std::string& stem, SuiteKind kind) -> const SuiteResult& {
        return run.suites.at({stem, kind});
    };

    // 1. Self-retrieval of every enrolled image.
    {
        int ok = 0;
        for (std::size_t b = 1; b < chain.blocks.size(); ++b) {
            const QueryReport r = query(run.devices, load_image(chain.blocks[b].image_ref));
            ok += r.winner.found_block == b && r.winner.score == 0.0;
        }
        report(1, "self-retrieval", ok == 12 && chain.blocks.size() == 13,
               fmt("%d/12 enrolled images return their own block with score 0", ok));
    }

    // 2. Blur suite.
    {
        int correct = 0;
        double worst = 0.0;
        for (const auto& stem : tests)
            for (const TestRecord& r : suite(stem, SuiteKind::Blur).records) {
                correct += r.correct();
                worst = std::max(worst, r.report.winner.score);
            }
        report(2, "blur-suite", correct == 45 && worst < 0.15,
               fmt("%d/45 correct, worst winner score %.4f (bound 0.15)", correct, worst));
    }

    // 3. Flip-Both radial invariance.
    {
        int found = 0;
        int equal = 0;
        double worst = 0.0;
        for (const auto& stem : tests) {
            const TestRecord& r = suite(stem, SuiteKind::Flip).records.at(2);
            const DeviceResult& d = device(r, AlgorithmId::RadialVariance);
            found += d.found_block == r.ground_truth_block && d.score < 0.05;
            worst = std::max(worst, d.score);
            const Image img = load_image(root / "data" / (stem + ".png"));
            equal += radial_variance_hash(img) == radial_variance_hash(flip(img, FlipAxis::Both));
        }
        report(3, "flip-both-radial", found == 5 && equal == 5,
               fmt("%d/5 found below 0.05 (worst %.4f), %d/5 digests bit-identical", found, worst, equal));
    }

    // 4. Crop suite: levels 10-40 % and the rising curve.
    {
        std::array<int, 4> per_level{};
        int rising = 0;
        std::string bad;
        for (const auto& stem : tests) {
            const auto& recs = suite(stem, SuiteKind::Crop).records;
            for (int i = 0; i < 4; ++i) per_level[i] += recs[i].correct();
            bool ok = true;
            for (std::size_t i = 1; i < recs.size() && recs[i].correct() && recs[0].correct(); ++i)
                ok = ok && recs[i].report.winner.score >= recs[i - 1].report.winner.score - 0.02;
            rising += ok;
            if (!ok) bad += " " + stem;
        }
        const bool levels = std::all_of(per_level.begin(), per_level.end(), [](int n) { return n >= 4; });
        report(4, "crop-suite", levels && rising == 5,
               fmt("correct at 10/20/30/40%%: %d %d %d %d of 5; rising until first miss %d/5%s", per_level[0],
                   per_level[1], per_level[2], per_level[3], rising, bad.empty() ? "" : (" (not:" + bad + ")").c_str()));
    }

    // 5. Rotation at 10 degrees; every level logged.
    {
        int first = 0;
        int logged = 0;
        for (const auto& stem : tests) {
            first += suite(stem, SuiteKind::Rotate).records.at(0).correct();
            const std::string log = run.artifacts["results/" + stem + "_rotate.log"];
            logged += static_cast<int>(parse_log(log).size());
        }
        report(5, "rotation-10deg", first >= 4 && logged == 45,
               fmt("%d/5 correct at 10 deg, %d/45 rotation tests logged", first, logged));
    }

    // 6. Tamper evidence on the 13-block chain.
    {
        int attempts = 0;
        int caught = 0;
        int relinks = 0;
        int relinks_caught = 0;
        auto check = [&](const Chain& c) {
            ++attempts;
            caught += !verify_chain(c).valid();
        };
        for (std::size_t i = 1; i < chain.blocks.size(); ++i) {
            Chain t = chain;
            t.blocks[i].content_digest[i % 32] ^= 0xff;
            check(t);
            for (AlgorithmId a : kAllAlgorithms) {
                t = chain;
                std::string& h = t.blocks[i].perceptual_hashes.at(a);
                char& c = h[h.size() - 1 - i % 8];
                c = c == '0' ? '1' : '0';
                check(t);
            }
            t = chain;
            t.blocks[i].nonce ^= 0xff;
            check(t);

            // Relink without re-mining.
            t = chain;
            t.blocks[i].content_digest[0] ^= 0x01;
            for (std::size_t j = i; j < t.blocks.size(); ++j) {
                if (j > i) t.blocks[j].prev_hash = t.blocks[j - 1].hash;
                t.blocks[j].hash = calculate_hash(t.blocks[j]);
            }
            ++relinks;
            relinks_caught += verify_chain(t) == ChainVerdict{ChainFault::Difficulty, i};
        }
        report(6, "tamper-evidence", caught == attempts && relinks_caught == relinks && chain.blocks.size() == 13,
               fmt("%d/%d field tampers detected, %d/%d relinks stopped by the difficulty check", caught, attempts,
                   relinks_caught, relinks));
    }

    // 7. Mining statistics and difficulty-4 build time.
    {
        int meet = 0;
        double attempts = 0.0;
        for (int i = 0; i < 100; ++i) {
            Block b;
            b.index = 1;
            b.content_digest = sha256("acceptance block " + std::to_string(i));
            const Block m = mine_block(b, 2);
            meet += meets_difficulty(m.hash, 2) && m.hash == calculate_hash(m);
            attempts += static_cast<double>(m.nonce + 1);
        }
        const double mean = attempts / 100.0;
        report(7, "mining", meet == 100 && mean >= 128 && mean <= 512 && run.build_seconds < 120,
               fmt("100 blocks at difficulty 2: %d meet the prefix, mean attempts %.1f; difficulty-4 13-block "
                   "build %.1fs",
                   meet, mean, run.build_seconds));
    }

    // 8. Aggregation identity over every CSV row.
    {
        int rows = 0;
        int violations = 0;
        for (const auto& [path, bytes] : run.artifacts) {
            if (!path.ends_with(".csv")) continue;
            for (const CsvRow& row : parse_csv(bytes)) {
                ++rows;
                const auto it = std::min_element(row.scores.begin(), row.scores.end());
                const int first = static_cast<int>(it - row.scores.begin());
                violations += row.winner_score != *it || precedence(row.winner_algo) != first ||
                              row.winner_block != row.blocks[first];
            }
        }
        report(8, "aggregation-identity", rows == 5 * 30 && violations == 0,
               fmt("%d rows, %d violations", rows, violations));
    }

    // 9. The ensemble against single algorithms.
    {
        int aggregate = 0;
        std::array<int, 5> single{};
        for (const auto& stem : tests)
            for (SuiteKind kind : {SuiteKind::Blur, SuiteKind::Crop, SuiteKind::Flip})
                for (const TestRecord& r : suite(stem, kind).records) {
                    aggregate += r.correct();
                    for (const DeviceResult& d : r.report.per_device)
                        single[precedence(d.algo)] += d.found_block == r.ground_truth_block;
                }
        const int best = *std::max_element(single.begin(), single.end());

        // Margins the ensemble reaches: worst blur winner and worst flip-Both winner.
        double agg_blur = 0.0;
        double agg_flip = 0.0;
        for (const auto& stem : tests) {
            for (const TestRecord& r : suite(stem, SuiteKind::Blur).records)
                agg_blur = std::max(agg_blur, r.report.winner.score);
            agg_flip = std::max(agg_flip, suite(stem, SuiteKind::Flip).records.at(2).report.winner.score);
        }
        std::string both;
        std::string margins;
        for (AlgorithmId a : kAllAlgorithms) {
            bool blur_ok = true;
            bool flip_ok = true;
            double worst_blur = 0.0;
            for (const auto& stem : tests) {
                for (const TestRecord& r : suite(stem, SuiteKind::Blur).records) {
                    blur_ok = blur_ok && device(r, a).found_block == r.ground_truth_block;
                    worst_blur = std::max(worst_blur, device(r, a).score);
                }
                const TestRecord& f = suite(stem, SuiteKind::Flip).records.at(2);
                flip_ok = flip_ok && device(f, a).found_block == f.ground_truth_block && device(f, a).score < 0.05 &&
                          device(f, a).score <= agg_flip;
            }
            blur_ok = blur_ok && worst_blur < 0.15 && worst_blur <= agg_blur;
            if (blur_ok && flip_ok) both += " " + std::string(algorithm_name(a));
            margins += fmt(" %.3f", worst_blur);
        }
        report(9, "ensemble-benefit", aggregate >= best - 2 && both.empty(),
               fmt("aggregate %d vs best single %d (A/P/B/M/R %d %d %d %d %d); worst blur score aggregate %.3f, "
                   "per algorithm%s; single algorithm matching the ensemble on blur and flip-both: %s",
                   aggregate, best, single[0], single[1], single[2], single[3], single[4], agg_blur, margins.c_str(),
                   both.empty() ? "none" : both.c_str()));
    }

    // 10. Determinism: the whole pipeline again in the same place.
    {
        const auto first = run.artifacts;
        const Run again = run_pipeline(root, tests);
        std::string diff;
        for (const auto& [path, bytes] : first) {
            const auto it = again.artifacts.find(path);
            if (it == again.artifacts.end() || it->second != bytes) diff += " " + path;
        }
        const bool same = diff.empty() && again.artifacts.size() == first.size();
        std::size_t logs = 0;
        for (const auto& [path, bytes] : first) logs += path.ends_with(".log") || path.ends_with(".csv");
        report(10, "determinism", same,
               same ? fmt("%zu files identical across two runs (chain, truth map, %zu logs and CSVs, images)",
                          first.size(), logs)
                    : "differs:" + diff);
    }

    // 11. Attack-signature classifier.
    {
        std::map<SuiteKind, int> hits;
        std::string labels;
        for (SuiteKind kind : {SuiteKind::Blur, SuiteKind::Flip, SuiteKind::Crop, SuiteKind::Rotate}) {
            labels += std::string(suite_name(kind)) + ":";
            for (const auto& stem : tests) {
                const SignatureLabel l = classify_attack(suite(stem, kind), cfg.classifier).label;
                labels += " " + std::string(signature_name(l));
                switch (kind) {
                case SuiteKind::Blur: hits[kind] += l == SignatureLabel::Blur; break;
                case SuiteKind::Flip: hits[kind] += l == SignatureLabel::Flip; break;
                case SuiteKind::Crop: hits[kind] += l == SignatureLabel::Crop; break;
                case SuiteKind::Rotate:
                    hits[kind] += l == SignatureLabel::Rotation || l == SignatureLabel::Unknown;
                    break;
                }
            }
            labels += "; ";
        }
        report(11, "classifier",
               hits[SuiteKind::Blur] == 5 && hits[SuiteKind::Flip] == 5 && hits[SuiteKind::Crop] >= 4 &&
                   hits[SuiteKind::Rotate] == 5,
               labels);
    }

    // 12. Crop logs follow the reference layout line by line and round-trip.
    {
        const std::string algos = "(AverageHash|PHash|BlockMeanHash|MarrHildrethHash|RadialVarianceHash)";
        const std::string num = "(0|1)\\.[0-9]+";
        const std::regex sep("-----");
        const std::regex name("[A-Za-z0-9_]+_crop_[1-9]\\.png:");
        const std::regex best("Best Score: " + num + " using " + algos);
        const std::regex found("Image Found: .+ \\([0-9]+\\)");
        const std::regex row(algos + ": +\\([0-9]+\\) " + num);
        int entries = 0;
        int bad_lines = 0;
        int round_trips = 0;
        for (const auto& stem : tests) {
            const SuiteResult& s = suite(stem, SuiteKind::Crop);
            const std::string& text = run.artifacts["results/" + stem + "_crop.log"];
            std::istringstream in(text);
            std::vector<std::string> lines;
            for (std::string l; std::getline(in, l);) lines.push_back(l);
            std::size_t i = 0;
            bad_lines += !(i < lines.size() && std::regex_match(lines[i++], sep));
            while (i + 10 <= lines.size()) {
                ++entries;
                bad_lines += !std::regex_match(lines[i++], name);
                bad_lines += !std::regex_match(lines[i++], best);
                bad_lines += !std::regex_match(lines[i++], found);
                bad_lines += !lines[i++].empty();
                for (AlgorithmId a : kAllAlgorithms) {
                    const std::string& l = lines[i++];
                    bad_lines += !std::regex_match(l, row) || !l.starts_with(std::string(algorithm_name(a)) + ":");
                }
                bad_lines += !std::regex_match(lines[i++], sep);
            }
            bad_lines += i != lines.size();

            const auto parsed = parse_log(text);
            bool same = parsed.size() == s.records.size() && text == log_text(s);
            for (std::size_t k = 0; same && k < parsed.size(); ++k) same = parsed[k] == log_entry_of(s.records[k]);
            round_trips += same;
        }
        report(12, "log-fidelity", entries == 45 && bad_lines == 0 && round_trips == 5,
               fmt("%d crop entries, %d malformed lines, %d/5 logs round-trip through the parser", entries, bad_lines,
                   round_trips));
    }

    std::printf("acceptance: %d failed, %.1fs\n", failures, seconds_since(start));
    fs::remove_all(root);
    return failures;
}
