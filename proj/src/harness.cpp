#include "imgchain/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "imgchain/codec.hpp"
#include "imgchain/error.hpp"
#include "imgchain/transform.hpp"

namespace imgchain {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSeparator = "-----";
// The "(block)" column sits just past the longest common label.
constexpr std::size_t kLabelColumn = 18;

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

std::vector<std::string_view> lines_of(std::string_view text)
{
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

template <typename Num>
std::optional<Num> parse_number(std::string_view s)
{
    Num v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string stem_of(const std::string& image_ref)
{
    return fs::path(image_ref).stem().string();
}

}  // namespace

std::string_view suite_name(SuiteKind kind)
{
    switch (kind) {
    case SuiteKind::Blur: return "blur";
    case SuiteKind::Rotate: return "rotate";
    case SuiteKind::Crop: return "crop";
    case SuiteKind::Flip: return "flip";
    }
    return "?";
}

std::optional<SuiteKind> suite_from_name(std::string_view name)
{
    for (SuiteKind k : {SuiteKind::Blur, SuiteKind::Rotate, SuiteKind::Crop, SuiteKind::Flip})
        if (suite_name(k) == name) return k;
    return std::nullopt;
}

SuiteKind suite_of(AttackKind kind)
{
    switch (kind) {
    case AttackKind::Blur: return SuiteKind::Blur;
    case AttackKind::Rotate: return SuiteKind::Rotate;
    case AttackKind::Crop: return SuiteKind::Crop;
    default: return SuiteKind::Flip;
    }
}

std::vector<AttackSpec> attack_ladder(SuiteKind kind)
{
    std::vector<AttackSpec> ladder;
    switch (kind) {
    case SuiteKind::Blur:
        for (int i = 1; i <= 9; ++i) ladder.push_back({AttackKind::Blur, 5.0 + 10.0 * (i - 1), i});
        break;
    case SuiteKind::Rotate:
        for (int i = 1; i <= 9; ++i) ladder.push_back({AttackKind::Rotate, 10.0 * i, i});
        break;
    case SuiteKind::Crop:
        for (int i = 1; i <= 9; ++i) ladder.push_back({AttackKind::Crop, 10.0 * i, i});
        break;
    case SuiteKind::Flip:
        ladder = {{AttackKind::FlipH, 0.0, 1}, {AttackKind::FlipV, 0.0, 2}, {AttackKind::FlipBoth, 0.0, 3}};
        break;
    }
    return ladder;
}

Image apply_attack(const Image& img, const AttackSpec& spec, const AttackOptions& options)
{
    switch (spec.kind) {
    case AttackKind::Blur: return gaussian_blur(img, spec.parameter);
    case AttackKind::Rotate: return rotate(img, spec.parameter, {options.rotate_expand});
    case AttackKind::Crop: return crop(img, spec.parameter, options.crop_anchor);
    case AttackKind::FlipH: return flip(img, FlipAxis::H);
    case AttackKind::FlipV: return flip(img, FlipAxis::V);
    case AttackKind::FlipBoth: return flip(img, FlipAxis::Both);
    }
    throw DataError("unknown attack kind");
}

std::vector<std::pair<AttackSpec, Image>> generate_attacks(const Image& img, SuiteKind kind,
                                                           const AttackOptions& options)
{
    std::vector<std::pair<AttackSpec, Image>> out;
    for (const AttackSpec& spec : attack_ladder(kind)) out.emplace_back(spec, apply_attack(img, spec, options));
    return out;
}

std::string attack_file_name(std::string_view stem, SuiteKind kind, int step)
{
    return std::string(stem) + "_" + std::string(suite_name(kind)) + "_" + std::to_string(step) + ".png";
}

std::optional<TestName> parse_test_name(std::string_view filename)
{
    const auto dot = filename.rfind('.');
    const std::string_view base = filename.substr(0, dot);
    const auto last = base.rfind('_');
    if (last == std::string_view::npos || last == 0) return std::nullopt;
    const auto prev = base.rfind('_', last - 1);
    if (prev == std::string_view::npos || prev == 0) return std::nullopt;
    const auto kind = suite_from_name(base.substr(prev + 1, last - prev - 1));
    const auto step = parse_number<int>(base.substr(last + 1));
    if (!kind || !step || *step < 1) return std::nullopt;
    return TestName{std::string(base.substr(0, prev)), *kind, *step};
}

std::vector<fs::path> write_attack_suite(const Image& img, std::string_view stem, SuiteKind kind, const fs::path& dir,
                                         const AttackOptions& options)
{
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (const auto& [spec, attacked] : generate_attacks(img, kind, options)) {
        paths.push_back(dir / attack_file_name(stem, kind, spec.step));
        save_image(paths.back(), attacked);
    }
    return paths;
}

TruthMap truth_from_chain(const Chain& chain)
{
    TruthMap truth;
    for (std::size_t i = 1; i < chain.blocks.size(); ++i) {
        const auto [it, inserted] = truth.emplace(stem_of(chain.blocks[i].image_ref), i);
        if (!inserted) throw DataError("two enrolled images share the stem '" + it->first + "'");
    }
    return truth;
}

std::string serialize_truth(const TruthMap& truth)
{
    std::string out;
    for (const auto& [stem, block] : truth) out += stem + "=" + std::to_string(block) + "\n";
    return out;
}

TruthMap parse_truth(std::string_view text)
{
    TruthMap truth;
    std::size_t line_no = 0;
    for (std::string_view line : lines_of(text)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto eq = line.rfind('=');
        const auto block = eq == std::string_view::npos ? std::nullopt : parse_number<std::size_t>(line.substr(eq + 1));
        if (!block || eq == 0) throw DataError("truth map line " + std::to_string(line_no) + ": expected stem=blockIndex");
        truth[std::string(line.substr(0, eq))] = *block;
    }
    return truth;
}

TestRecord run_test(const std::vector<Device>& devices, const Image& img, const TestName& name,
                    const std::string& file_name, const TruthMap& truth)
{
    const auto it = truth.find(name.stem);
    if (it == truth.end()) throw DataError("no ground truth for stem '" + name.stem + "' (" + file_name + ")");
    const auto ladder = attack_ladder(name.kind);
    if (name.step > static_cast<int>(ladder.size()))
        throw DataError(file_name + ": step " + std::to_string(name.step) + " beyond the " +
                        std::string(suite_name(name.kind)) + " ladder");

    TestRecord record;
    record.test_name = file_name;
    record.report = query(devices, img);
    record.ground_truth_block = it->second;
    record.attack = ladder[name.step - 1];
    record.report.correct = record.correct();
    return record;
}

std::vector<SuiteResult> run_bench(const std::vector<Device>& devices, const fs::path& dir, const TruthMap& truth)
{
    if (!fs::is_directory(dir)) throw DataError("suite directory not found: " + dir.string());
    std::vector<std::pair<TestName, fs::path>> tests;
    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
        const auto& entry = *it;
        if (entry.path().filename().string().starts_with(".")) {
            if (entry.is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file()) continue;
        const std::string file = entry.path().filename().string();
        auto name = parse_test_name(file);
        if (!name) throw DataError("cannot resolve test image name '" + file + "' (expected <stem>_<kind>_<step>.png)");
        tests.emplace_back(std::move(*name), entry.path());
    }
    if (tests.empty()) throw DataError("suite directory is empty: " + dir.string());
    std::sort(tests.begin(), tests.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.stem, a.first.kind, a.first.step) < std::tie(b.first.stem, b.first.kind, b.first.step);
    });
    for (std::size_t i = 1; i < tests.size(); ++i)
        if (tests[i].second.filename() == tests[i - 1].second.filename())
            throw DataError("test image " + tests[i].second.filename().string() + " appears twice under " + dir.string());

    std::vector<SuiteResult> suites;
    for (const auto& [name, path] : tests) {
        if (suites.empty() || suites.back().stem != name.stem || suites.back().kind != name.kind)
            suites.push_back({name.stem, name.kind, {}});
        SuiteResult& suite = suites.back();
        const int expected = static_cast<int>(suite.records.size()) + 1;
        if (name.step != expected)
            throw DataError(path.filename().string() + ": expected step " + std::to_string(expected) +
                            " of the " + name.stem + " " + std::string(suite_name(name.kind)) + " suite");
        suite.records.push_back(run_test(devices, load_image(path), name, path.filename().string(), truth));
    }
    return suites;
}

SuiteResult run_suite(const std::vector<Device>& devices, const fs::path& dir, const TruthMap& truth)
{
    auto suites = run_bench(devices, dir, truth);
    if (suites.size() != 1)
        throw DataError(dir.string() + " holds " + std::to_string(suites.size()) + " suites, expected one");
    return std::move(suites.front());
}

std::string format_score(double score)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, score, std::chars_format::fixed);
    std::string s(buf, ec == std::errc() ? end : buf);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

LogEntry log_entry_of(const TestRecord& record)
{
    return {record.test_name,           record.report.winner.score,       record.report.winner.algo,
            record.report.winner_ref,   record.report.winner.found_block, record.report.per_device};
}

void write_log(const SuiteResult& suite, std::ostream& out)
{
    out << kSeparator << '\n';
    for (const TestRecord& record : suite.records) {
        const LogEntry e = log_entry_of(record);
        out << e.test_name << ":\n";
        out << "Best Score: " << format_score(e.best_score) << " using " << algorithm_name(e.best_algo) << '\n';
        out << "Image Found: " << e.image_found << " (" << e.found_block << ")\n\n";
        for (const DeviceResult& r : e.per_device) {
            std::string label = std::string(algorithm_name(r.algo)) + ":";
            label.append(label.size() < kLabelColumn ? kLabelColumn - label.size() : 1, ' ');
            out << label << '(' << r.found_block << ") " << format_score(r.score) << '\n';
        }
        out << kSeparator << '\n';
    }
    if (!out) throw DataError("log write failed");
}

std::string log_text(const SuiteResult& suite)
{
    std::ostringstream out;
    write_log(suite, out);
    return out.str();
}

std::vector<LogEntry> parse_log(std::string_view text)
{
    const auto lines = lines_of(text);
    std::size_t i = 0;
    auto fail = [&](std::string_view why) -> DataError {
        return DataError("log line " + std::to_string(i + 1) + ": " + std::string(why));
    };
    auto next = [&]() -> std::string_view {
        if (i >= lines.size()) throw fail("unexpected end of log");
        return lines[i++];
    };

    if (next() != kSeparator) throw fail("log must open with -----");
    std::vector<LogEntry> entries;
    while (i < lines.size()) {
        LogEntry e;
        std::string_view line = next();
        if (line.size() < 2 || line.back() != ':') throw fail("expected '<test name>:'");
        e.test_name = std::string(line.substr(0, line.size() - 1));

        line = next();
        constexpr std::string_view best = "Best Score: ";
        const auto using_pos = line.rfind(" using ");
        if (!line.starts_with(best) || using_pos == std::string_view::npos || using_pos < best.size())
            throw fail("expected 'Best Score: <score> using <algorithm>'");
        const auto score = parse_number<double>(line.substr(best.size(), using_pos - best.size()));
        const auto algo = algorithm_from_name(line.substr(using_pos + 7));
        if (!score || !algo) throw fail("bad best score line");
        e.best_score = *score;
        e.best_algo = *algo;

        line = next();
        constexpr std::string_view found = "Image Found: ";
        const auto paren = line.rfind(" (");
        if (!line.starts_with(found) || paren == std::string_view::npos || paren < found.size() || line.back() != ')')
            throw fail("expected 'Image Found: <ref> (<block>)'");
        const auto block = parse_number<std::size_t>(line.substr(paren + 2, line.size() - paren - 3));
        if (!block) throw fail("bad block index");
        e.image_found = std::string(line.substr(found.size(), paren - found.size()));
        e.found_block = *block;

        if (!next().empty()) throw fail("expected a blank line");
        for (line = next(); line != kSeparator; line = next()) {
            const auto colon = line.find(':');
            const auto open = line.find('(', colon == std::string_view::npos ? 0 : colon);
            const auto close = line.find(") ", open == std::string_view::npos ? 0 : open);
            if (colon == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos)
                throw fail("expected '<algorithm>: (<block>) <score>'");
            if (line.substr(colon + 1, open - colon - 1).find_first_not_of(' ') != std::string_view::npos)
                throw fail("unexpected text before '('");
            const auto a = algorithm_from_name(line.substr(0, colon));
            const auto b = parse_number<std::size_t>(line.substr(open + 1, close - open - 1));
            const auto s = parse_number<double>(line.substr(close + 2));
            if (!a || !b || !s) throw fail("bad per-algorithm line");
            e.per_device.push_back({*a, *b, *s});
        }
        if (e.per_device.empty()) throw fail("test has no per-algorithm lines");
        entries.push_back(std::move(e));
    }
    return entries;
}

const std::string_view kCsvHeader =
    "stem,attack,step,param,winner_algo,winner_block,winner_score,correct,avg_score,ph_score,bm_score,mh_score,"
    "rv_score,avg_block,ph_block,bm_block,mh_block,rv_block";

CsvRow csv_row_of(const SuiteResult& suite, const TestRecord& record)
{
    CsvRow row;
    row.stem = suite.stem;
    row.kind = suite.kind;
    row.step = record.attack.step;
    row.param = record.attack.parameter;
    row.winner_algo = record.report.winner.algo;
    row.winner_block = record.report.winner.found_block;
    row.winner_score = record.report.winner.score;
    row.correct = record.correct();
    for (const DeviceResult& r : record.report.per_device) {
        row.scores[precedence(r.algo)] = r.score;
        row.blocks[precedence(r.algo)] = r.found_block;
    }
    return row;
}

void emit_csv(const SuiteResult& suite, std::ostream& out)
{
    out << kCsvHeader << '\n';
    for (const TestRecord& record : suite.records) {
        const CsvRow row = csv_row_of(suite, record);
        out << row.stem << ',' << suite_name(row.kind) << ',' << row.step << ',' << format_score(row.param) << ','
            << algorithm_name(row.winner_algo) << ',' << row.winner_block << ',' << format_score(row.winner_score)
            << ',' << (row.correct ? 1 : 0);
        for (double s : row.scores) out << ',' << format_score(s);
        for (std::size_t b : row.blocks) out << ',' << b;
        out << '\n';
    }
    if (!out) throw DataError("CSV write failed");
}

std::string csv_text(const SuiteResult& suite)
{
    std::ostringstream out;
    emit_csv(suite, out);
    return out.str();
}

std::vector<CsvRow> parse_csv(std::string_view text)
{
    const auto lines = lines_of(text);
    if (lines.empty() || lines.front() != kCsvHeader) throw DataError("CSV: missing or unexpected header");
    std::vector<CsvRow> rows;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto f = split(lines[n], ',');
        auto fail = [&] { return DataError("CSV line " + std::to_string(n + 1) + ": malformed row"); };
        if (f.size() != 18) throw fail();
        CsvRow row;
        row.stem = std::string(f[0]);
        const auto kind = suite_from_name(f[1]);
        const auto step = parse_number<int>(f[2]);
        const auto param = parse_number<double>(f[3]);
        const auto algo = algorithm_from_name(f[4]);
        const auto block = parse_number<std::size_t>(f[5]);
        const auto score = parse_number<double>(f[6]);
        if (!kind || !step || !param || !algo || !block || !score || (f[7] != "0" && f[7] != "1")) throw fail();
        row.kind = *kind;
        row.step = *step;
        row.param = *param;
        row.winner_algo = *algo;
        row.winner_block = *block;
        row.winner_score = *score;
        row.correct = f[7] == "1";
        for (int k = 0; k < 5; ++k) {
            const auto s = parse_number<double>(f[8 + k]);
            const auto b = parse_number<std::size_t>(f[13 + k]);
            if (!s || !b) throw fail();
            row.scores[k] = *s;
            row.blocks[k] = *b;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string_view signature_name(SignatureLabel label)
{
    switch (label) {
    case SignatureLabel::Blur: return "Blur";
    case SignatureLabel::Crop: return "Crop";
    case SignatureLabel::Rotation: return "Rotation";
    case SignatureLabel::Flip: return "Flip";
    case SignatureLabel::Unknown: return "Unknown";
    }
    return "Unknown";
}

AttackSignature classify_attack(std::span<const SuiteSample> samples, const ClassifierThresholds& th)
{
    if (samples.size() < 3)
        throw DataError("classification needs at least 3 tests, got " + std::to_string(samples.size()));
    const auto n = static_cast<double>(samples.size());
    double lo = samples[0].winner_score;
    double hi = lo;
    double mean_x = 0.0;
    double mean_y = 0.0;
    int wrong = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        lo = std::min(lo, samples[i].winner_score);
        hi = std::max(hi, samples[i].winner_score);
        mean_x += static_cast<double>(i + 1) / n;
        mean_y += samples[i].winner_score / n;
        wrong += samples[i].correct ? 0 : 1;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double dx = static_cast<double>(i + 1) - mean_x;
        sxy += dx * (samples[i].winner_score - mean_y);
        sxx += dx * dx;
    }

    AttackSignature sig;
    sig.range = hi - lo;
    sig.slope = sxy / sxx;
    sig.error_rate = wrong / n;

    bool rising = true;
    bool falling = true;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        rising = rising && samples[i].winner_score >= samples[i - 1].winner_score - th.crop_tolerance;
        falling = falling && samples[i].winner_score <= samples[i - 1].winner_score + th.crop_tolerance;
    }
    // Past the first miss the score belongs to some other image, so the
    // crop curve is only judged on the correctly retrieved prefix.
    bool prefix_rising = true;
    for (std::size_t i = 1; i < samples.size() && samples[i].correct; ++i)
        prefix_rising = prefix_rising && samples[i].winner_score >= samples[i - 1].winner_score - th.crop_tolerance;
    const bool low_start = samples[0].correct && samples[0].winner_score < th.crop_start;

    if (samples.size() == 3 && lo < th.flip_min && hi > th.flip_spread_factor * lo)
        sig.label = SignatureLabel::Flip;
    else if (hi < th.blur_max && sig.range < th.blur_range)
        sig.label = SignatureLabel::Blur;
    else if (low_start && prefix_rising && sig.range >= th.crop_range)
        sig.label = SignatureLabel::Crop;
    else if (sig.error_rate >= th.rotation_error_rate && !rising && !falling)
        sig.label = SignatureLabel::Rotation;
    return sig;
}

AttackSignature classify_attack(const SuiteResult& suite, const ClassifierThresholds& th)
{
    std::vector<SuiteSample> samples;
    for (const TestRecord& r : suite.records) samples.push_back({r.report.winner.score, r.correct()});
    return classify_attack(samples, th);
}

}  // namespace imgchain
