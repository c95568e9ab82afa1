#include "ragkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

using ordered_json = nlohmann::ordered_json;

namespace ragkit {

// ---------------------------------------------------------------------------
// Lexical judge
// ---------------------------------------------------------------------------

const std::string& LexicalJudge::name() const {
    static const std::string n = "lexical-judge";
    return n;
}

std::vector<std::string> LexicalJudge::decompose(const std::string& answer_text) const {
    std::vector<std::string> claims;
    const auto is_terminator = [](char c) { return c == '.' || c == '!' || c == '?'; };
    const auto trim = [](std::string_view s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return std::string(s.substr(b, e - b));
    };

    std::size_t start = 0;
    const std::size_t n = answer_text.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_terminator(answer_text[i])) continue;
        std::size_t j = i;
        while (j + 1 < n && is_terminator(answer_text[j + 1])) ++j;
        auto claim = trim(std::string_view(answer_text).substr(start, j + 1 - start));
        if (!claim.empty()) claims.push_back(std::move(claim));
        start = j + 1;
        i = j;
    }
    if (start < n) {
        auto tail = trim(std::string_view(answer_text).substr(start));
        if (!tail.empty()) claims.push_back(std::move(tail));
    }
    return claims;
}

bool LexicalJudge::is_supported(const std::string& claim, const std::string& context) const {
    const auto claim_tokens = content_tokens(claim);
    if (claim_tokens.empty()) return false;
    const auto ctx_tokens = content_tokens(context);
    const std::unordered_set<std::string> ctx_set(ctx_tokens.begin(), ctx_tokens.end());
    std::size_t hits = 0;
    for (const auto& t : claim_tokens) {
        if (ctx_set.contains(t)) ++hits;
    }
    return static_cast<double>(hits) >=
           kSupportThreshold * static_cast<double>(claim_tokens.size());
}

bool LexicalJudge::is_relevant(const std::string& question, const std::string& statement) const {
    const auto q_tokens = content_tokens(question);
    const std::unordered_set<std::string> q_set(q_tokens.begin(), q_tokens.end());
    for (const auto& t : content_tokens(statement)) {
        if (q_set.contains(t)) return true;
    }
    return false;
}

std::vector<std::string> decompose_claims(const Judge& judge, const std::string& answer_text) {
    return judge.decompose(answer_text);
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

FaithfulnessResult faithfulness(const Judge& judge, const std::vector<std::string>& claims,
                                const std::vector<std::string>& context_texts) {
    FaithfulnessResult r;
    r.claim_count = claims.size();
    if (claims.empty()) {
        r.zero_denominator = true;
        return r;
    }
    std::string context;
    for (const auto& c : context_texts) {
        context += c;
        context += '\n';
    }
    for (const auto& claim : claims) {
        if (judge.is_supported(claim, context)) ++r.supported_count;
    }
    r.score = static_cast<double>(r.supported_count) / static_cast<double>(r.claim_count);
    return r;
}

RelevanceResult relevance(const Judge& judge, const std::string& question,
                          const std::string& answer_text) {
    RelevanceResult r;
    const auto statements = judge.decompose(answer_text);
    r.statement_count = statements.size();
    if (statements.empty()) {
        r.zero_denominator = true;
        return r;
    }
    for (const auto& s : statements) {
        if (judge.is_relevant(question, s)) ++r.relevant_count;
    }
    r.score = static_cast<double>(r.relevant_count) / static_cast<double>(r.statement_count);
    return r;
}

EvalRecord evaluate_answer(const Judge& judge, const std::string& question,
                           const GeneratedAnswer& answer,
                           const std::vector<std::string>& context_texts) {
    EvalRecord rec;
    rec.question_id = answer.question_id;
    rec.mode = answer.mode;

    const auto claims = judge.decompose(answer.answer_text);
    const auto f = faithfulness(judge, claims, context_texts);
    rec.faithfulness = f.score;
    rec.claim_count = f.claim_count;
    rec.supported_count = f.supported_count;

    const auto rel = relevance(judge, question, answer.answer_text);
    rec.relevance = rel.score;
    rec.relevant_count = rel.relevant_count;
    rec.statement_count = rel.statement_count;

    rec.zero_denominator_warning = f.zero_denominator || rel.zero_denominator;
    return rec;
}

// ---------------------------------------------------------------------------
// Record persistence
// ---------------------------------------------------------------------------

std::string eval_record_to_jsonl(const EvalRecord& r) {
    ordered_json j;
    j["question_id"] = r.question_id;
    j["mode"] = to_string(r.mode);
    j["faithfulness"] = r.faithfulness;
    j["relevance"] = r.relevance;
    j["claim_count"] = r.claim_count;
    j["supported_count"] = r.supported_count;
    j["relevant_count"] = r.relevant_count;
    j["statement_count"] = r.statement_count;
    j["zero_denominator_warning"] = r.zero_denominator_warning;
    return j.dump();
}

EvalRecord eval_record_from_jsonl(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
        throw IngestError(std::string("malformed eval record: ") + e.what());
    }
    try {
        EvalRecord r;
        r.question_id = j.at("question_id").get<std::string>();
        r.mode = mode_from_string(j.at("mode").get<std::string>());
        r.faithfulness = j.at("faithfulness").get<double>();
        r.relevance = j.at("relevance").get<double>();
        r.claim_count = j.at("claim_count").get<std::size_t>();
        r.supported_count = j.at("supported_count").get<std::size_t>();
        r.relevant_count = j.at("relevant_count").get<std::size_t>();
        r.statement_count = j.at("statement_count").get<std::size_t>();
        r.zero_denominator_warning = j.value("zero_denominator_warning", false);
        return r;
    } catch (const ordered_json::exception& e) {
        throw IngestError(std::string("eval record missing field: ") + e.what());
    }
}

void write_eval_records(const std::vector<EvalRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot open records file for writing: " + path);
    for (const auto& r : records) out << eval_record_to_jsonl(r) << '\n';
    if (!out) throw IngestError("failed writing records file: " + path);
}

std::vector<EvalRecord> read_eval_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open records file: " + path);
    std::vector<EvalRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(eval_record_from_jsonl(line));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

std::optional<double> relative_improvement(double baseline_mean, double new_mean) {
    if (baseline_mean <= 0.0) return std::nullopt;
    return 100.0 * (new_mean - baseline_mean) / baseline_mean;
}

int round_percent(double percent) {
    return static_cast<int>(std::lround(percent));
}

namespace {

constexpr double kReportedMeanTolerance = 0.005;
constexpr Mode kCanonicalModes[] = {Mode::vanilla, Mode::basic, Mode::advanced};

std::string format_fixed(double v, int decimals) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

} // namespace

MetricReport aggregate(const std::vector<EvalRecord>& records, const ReportedMeans& reported) {
    if (records.empty()) throw ConfigError("aggregate: no records");

    MetricReport report;
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<int> seen_modes;
    for (const auto& r : records) {
        if (seen_ids.insert(r.question_id).second) report.question_ids.push_back(r.question_id);
        seen_modes.insert(static_cast<int>(r.mode));
    }
    std::sort(report.question_ids.begin(), report.question_ids.end(),
              [](const std::string& a, const std::string& b) { return natural_less(a, b); });
    for (const Mode m : kCanonicalModes) {
        if (seen_modes.contains(static_cast<int>(m))) report.modes.push_back(m);
    }

    for (const auto& r : records) {
        auto& cell = report.cells[r.question_id][r.mode];
        if (cell.faithfulness.has_value()) {
            throw ContractError("duplicate record for question " + r.question_id + " mode " +
                                to_string(r.mode));
        }
        cell.faithfulness = r.faithfulness;
        cell.relevance = r.relevance;
    }

    for (const Mode m : report.modes) {
        double f_sum = 0.0, r_sum = 0.0;
        std::size_t n = 0;
        for (const auto& qid : report.question_ids) {
            const auto& cell = report.cells[qid][m];
            if (!cell.faithfulness.has_value()) {
                report.missing_cells.push_back(qid + "/" + to_string(m));
                continue;
            }
            f_sum += *cell.faithfulness;
            r_sum += *cell.relevance;
            ++n;
        }
        report.faithfulness_mean[m] = n ? f_sum / static_cast<double>(n) : 0.0;
        report.relevance_mean[m] = n ? r_sum / static_cast<double>(n) : 0.0;
    }

    for (const char* metric : {"faithfulness", "relevance"}) {
        const auto& means = std::string(metric) == "faithfulness" ? report.faithfulness_mean
                                                                  : report.relevance_mean;
        for (std::size_t i = 0; i < report.modes.size(); ++i) {
            for (std::size_t j = i + 1; j < report.modes.size(); ++j) {
                Improvement imp;
                imp.metric = metric;
                imp.baseline = report.modes[i];
                imp.improved = report.modes[j];
                imp.percent = relative_improvement(means.at(imp.baseline), means.at(imp.improved));
                report.improvements.push_back(std::move(imp));
            }
        }
    }

    for (const auto& [metric, by_mode] : reported) {
        const auto& means =
            metric == "faithfulness" ? report.faithfulness_mean : report.relevance_mean;
        for (const auto& [mode, claimed_values] : by_mode) {
            if (!means.contains(mode)) continue;
            const double computed = means.at(mode);
            std::vector<double> disagreeing;
            for (const double claimed : claimed_values) {
                if (std::abs(computed - claimed) > kReportedMeanTolerance) {
                    disagreeing.push_back(claimed);
                }
            }
            if (disagreeing.empty()) continue;
            std::string note = std::string(to_string(mode)) + " " + metric + ": computed mean " +
                               format_fixed(computed, 3) + " disagrees with reported";
            for (const double v : disagreeing) note += " " + format_fixed(v, 3);
            report.discrepancy_notes.push_back(std::move(note));
        }
    }

    return report;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string MetricReport::render_text() const {
    std::ostringstream os;
    const int id_width = 10;
    const int col_width = 16;

    os << std::left << std::setw(id_width) << "question";
    for (const char* metric : {"faith", "rel"}) {
        for (const Mode m : modes) {
            os << std::setw(col_width) << (std::string(to_string(m)) + "_" + metric);
        }
    }
    os << '\n';

    for (const auto& qid : question_ids) {
        os << std::left << std::setw(id_width) << qid;
        for (const char* metric : {"faith", "rel"}) {
            for (const Mode m : modes) {
                const auto it_q = cells.find(qid);
                const MetricCell* cell = nullptr;
                if (it_q != cells.end()) {
                    const auto it_m = it_q->second.find(m);
                    if (it_m != it_q->second.end()) cell = &it_m->second;
                }
                const auto value = cell ? (std::string(metric) == "faith" ? cell->faithfulness
                                                                          : cell->relevance)
                                        : std::nullopt;
                os << std::setw(col_width) << (value ? format_fixed(*value, 2) : "-");
            }
        }
        os << '\n';
    }

    os << std::left << std::setw(id_width) << "mean";
    for (const char* metric : {"faith", "rel"}) {
        const auto& means =
            std::string(metric) == "faith" ? faithfulness_mean : relevance_mean;
        for (const Mode m : modes) {
            os << std::setw(col_width) << format_fixed(means.at(m), 3);
        }
    }
    os << '\n';

    if (!improvements.empty()) {
        os << "\nrelative improvements\n";
        for (const auto& imp : improvements) {
            os << "  " << imp.metric << " " << to_string(imp.baseline) << " -> "
               << to_string(imp.improved) << ": ";
            if (imp.percent) {
                os << (round_percent(*imp.percent) >= 0 ? "+" : "") << round_percent(*imp.percent)
                   << "%";
            } else {
                os << "undefined (zero baseline)";
            }
            os << '\n';
        }
    }
    if (!missing_cells.empty()) {
        os << "\nmissing cells\n";
        for (const auto& m : missing_cells) os << "  " << m << '\n';
    }
    if (!discrepancy_notes.empty()) {
        os << "\ndiscrepancy notes\n";
        for (const auto& n : discrepancy_notes) os << "  " << n << '\n';
    }
    return os.str();
}

std::string MetricReport::to_json() const {
    ordered_json j;
    j["questions"] = ordered_json::array();
    for (const auto& qid : question_ids) {
        ordered_json row;
        row["question_id"] = qid;
        for (const Mode m : modes) {
            const auto it_q = cells.find(qid);
            ordered_json cell_json;
            if (it_q != cells.end() && it_q->second.contains(m)) {
                const auto& cell = it_q->second.at(m);
                if (cell.faithfulness) cell_json["faithfulness"] = *cell.faithfulness;
                if (cell.relevance) cell_json["relevance"] = *cell.relevance;
            }
            row[to_string(m)] = cell_json;
        }
        j["questions"].push_back(row);
    }
    j["means"] = ordered_json::object();
    for (const Mode m : modes) {
        j["means"][to_string(m)] = {{"faithfulness", faithfulness_mean.at(m)},
                                    {"relevance", relevance_mean.at(m)}};
    }
    j["improvements"] = ordered_json::array();
    for (const auto& imp : improvements) {
        ordered_json e;
        e["metric"] = imp.metric;
        e["baseline"] = to_string(imp.baseline);
        e["improved"] = to_string(imp.improved);
        if (imp.percent) {
            e["percent"] = round_percent(*imp.percent);
        } else {
            e["percent"] = nullptr;
        }
        j["improvements"].push_back(e);
    }
    j["missing_cells"] = missing_cells;
    j["discrepancy_notes"] = discrepancy_notes;
    return j.dump(2);
}

} // namespace ragkit
