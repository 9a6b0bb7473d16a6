#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imgchain/config.hpp"
#include "imgchain/image.hpp"
#include "imgchain/network.hpp"

namespace imgchain {

enum class SuiteKind { Blur, Rotate, Crop, Flip };

std::string_view suite_name(SuiteKind kind);  // blur, rotate, crop, flip
std::optional<SuiteKind> suite_from_name(std::string_view name);
SuiteKind suite_of(AttackKind kind);

// The canonical attack ladder: 9 blur (5..85 %), 9 rotate (10..90 deg),
// 9 crop (10..90 %) or 3 flips (H, V, Both).
std::vector<AttackSpec> attack_ladder(SuiteKind kind);

struct AttackOptions {
    CropAnchor crop_anchor = CropAnchor::Center;
    bool rotate_expand = false;
};

Image apply_attack(const Image& img, const AttackSpec& spec, const AttackOptions& options = {});

std::vector<std::pair<AttackSpec, Image>> generate_attacks(const Image& img, SuiteKind kind,
                                                           const AttackOptions& options = {});

// "<stem>_<kind>_<step>.png"
std::string attack_file_name(std::string_view stem, SuiteKind kind, int step);

struct TestName {
    std::string stem;
    SuiteKind kind;
    int step;
};
// Parses "<stem>_<kind>_<step>.<ext>"; the stem may itself contain '_'.
std::optional<TestName> parse_test_name(std::string_view filename);

// Writes every attacked image of the suite into `dir`; returns the paths.
std::vector<std::filesystem::path> write_attack_suite(const Image& img, std::string_view stem, SuiteKind kind,
                                                      const std::filesystem::path& dir,
                                                      const AttackOptions& options = {});

// Ground truth: one "stem=blockIndex" line per enrolled image.
using TruthMap = std::map<std::string, std::size_t>;
TruthMap truth_from_chain(const Chain& chain);
std::string serialize_truth(const TruthMap& truth);
TruthMap parse_truth(std::string_view text);

struct TestRecord {
    std::string test_name;
    QueryReport report;
    std::size_t ground_truth_block = 0;
    AttackSpec attack;

    bool correct() const { return report.winner.found_block == ground_truth_block; }
};

struct SuiteResult {
    std::string stem;
    SuiteKind kind = SuiteKind::Blur;
    std::vector<TestRecord> records;  // step order, contiguous from 1
};

// Queries one test image and books it against the ground truth.
TestRecord run_test(const std::vector<Device>& devices, const Image& img, const TestName& name,
                    const std::string& file_name, const TruthMap& truth);

// Every attacked image under `dir` (subdirectories included, hidden entries
// skipped), grouped into suites by (stem, kind) and ordered by stem, kind
// and step.
std::vector<SuiteResult> run_bench(const std::vector<Device>& devices, const std::filesystem::path& dir,
                                   const TruthMap& truth);
// As run_bench, but `dir` must hold exactly one suite.
SuiteResult run_suite(const std::vector<Device>& devices, const std::filesystem::path& dir, const TruthMap& truth);

// Shortest decimal that reads back to the same double, always with a '.'.
std::string format_score(double score);

void write_log(const SuiteResult& suite, std::ostream& out);
std::string log_text(const SuiteResult& suite);

struct LogEntry {
    std::string test_name;
    double best_score = 0.0;
    AlgorithmId best_algo = AlgorithmId::Average;
    std::string image_found;
    std::size_t found_block = 0;
    std::vector<DeviceResult> per_device;

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};
// Throws DataError with the line number on any deviation from the layout.
std::vector<LogEntry> parse_log(std::string_view text);
LogEntry log_entry_of(const TestRecord& record);

struct CsvRow {
    std::string stem;
    SuiteKind kind = SuiteKind::Blur;
    int step = 0;
    double param = 0.0;
    AlgorithmId winner_algo = AlgorithmId::Average;
    std::size_t winner_block = 0;
    double winner_score = 0.0;
    bool correct = false;
    std::array<double, 5> scores{};       // precedence order
    std::array<std::size_t, 5> blocks{};  // precedence order
};

extern const std::string_view kCsvHeader;
void emit_csv(const SuiteResult& suite, std::ostream& out);
std::string csv_text(const SuiteResult& suite);
std::vector<CsvRow> parse_csv(std::string_view text);
CsvRow csv_row_of(const SuiteResult& suite, const TestRecord& record);

enum class SignatureLabel { Blur, Crop, Rotation, Flip, Unknown };
std::string_view signature_name(SignatureLabel label);

struct AttackSignature {
    SignatureLabel label = SignatureLabel::Unknown;
    double range = 0.0;       // max - min of winner scores
    double slope = 0.0;       // least-squares slope over step ordinal
    double error_rate = 0.0;  // fraction of incorrect retrievals
};

struct SuiteSample {
    double winner_score;
    bool correct;
};

// Decision ladder over the winner scores in step order; needs >= 3 samples.
AttackSignature classify_attack(std::span<const SuiteSample> samples, const ClassifierThresholds& th = {});
AttackSignature classify_attack(const SuiteResult& suite, const ClassifierThresholds& th = {});

}  // namespace imgchain
