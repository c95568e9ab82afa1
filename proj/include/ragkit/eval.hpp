#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ragkit/pipeline.hpp"

namespace ragkit {

// Decomposes answers into atomic claims and renders per-claim verdicts.
// Implementations must be deterministic for pinned backends or stubs.
class Judge {
public:
    virtual ~Judge() = default;
    virtual const std::string& name() const = 0;

    // Ordered list of atomic claim strings; empty answer yields an empty list.
    virtual std::vector<std::string> decompose(const std::string& answer_text) const = 0;

    virtual bool is_supported(const std::string& claim, const std::string& context) const = 0;
    virtual bool is_relevant(const std::string& question, const std::string& statement) const = 0;
};

// Deterministic judge used by all automated tests. Claims are sentences
// (split at '.', '!', '?' runs); a claim is supported when at least 60% of
// its word tokens occur in the context, and relevant when it shares at least
// one word token with the question.
class LexicalJudge final : public Judge {
public:
    static constexpr double kSupportThreshold = 0.6;

    const std::string& name() const override;
    std::vector<std::string> decompose(const std::string& answer_text) const override;
    bool is_supported(const std::string& claim, const std::string& context) const override;
    bool is_relevant(const std::string& question, const std::string& statement) const override;
};

std::vector<std::string> decompose_claims(const Judge& judge, const std::string& answer_text);

struct FaithfulnessResult {
    double score = 0.0;
    std::size_t supported_count = 0;
    std::size_t claim_count = 0;
    bool zero_denominator = false;
};

struct RelevanceResult {
    double score = 0.0;
    std::size_t relevant_count = 0;
    std::size_t statement_count = 0;
    bool zero_denominator = false;
};

// Fraction of claims the judge marks supported by the concatenated context.
FaithfulnessResult faithfulness(const Judge& judge, const std::vector<std::string>& claims,
                                const std::vector<std::string>& context_texts);

// Fraction of the answer's statements the judge marks pertinent to the
// question. Statements are the judge's decomposition of the answer.
RelevanceResult relevance(const Judge& judge, const std::string& question,
                          const std::string& answer_text);

// Per-question, per-mode metric snapshot. Scores are exact rationals:
// score * denominator == numerator always holds.
struct EvalRecord {
    std::string question_id;
    Mode mode = Mode::vanilla;
    double faithfulness = 0.0;
    double relevance = 0.0;
    std::size_t claim_count = 0;
    std::size_t supported_count = 0;
    std::size_t relevant_count = 0;
    std::size_t statement_count = 0;
    bool zero_denominator_warning = false;
};

EvalRecord evaluate_answer(const Judge& judge, const std::string& question,
                           const GeneratedAnswer& answer,
                           const std::vector<std::string>& context_texts);

std::string eval_record_to_jsonl(const EvalRecord& r);
EvalRecord eval_record_from_jsonl(const std::string& line);
void write_eval_records(const std::vector<EvalRecord>& records, const std::string& path);
std::vector<EvalRecord> read_eval_records(const std::string& path);

// Externally claimed column means, checked against computed means during
// aggregation. Keyed by metric name ("faithfulness"/"relevance") then mode.
using ReportedMeans = std::map<std::string, std::map<Mode, std::vector<double>>>;

struct MetricCell {
    std::optional<double> faithfulness;
    std::optional<double> relevance;
};

struct Improvement {
    std::string metric;
    Mode baseline;
    Mode improved;
    std::optional<double> percent; // nullopt when the baseline mean is zero
};

struct MetricReport {
    std::vector<std::string> question_ids; // natural order
    std::vector<Mode> modes;               // canonical order, present modes only
    std::map<std::string, std::map<Mode, MetricCell>> cells;
    std::map<Mode, double> faithfulness_mean;
    std::map<Mode, double> relevance_mean;
    std::vector<Improvement> improvements;
    std::vector<std::string> missing_cells;
    std::vector<std::string> discrepancy_notes;

    std::string render_text() const;
    std::string to_json() const;
};

// Builds the per-question table, column means, and pairwise relative
// improvements. Records must form a question x mode grid; missing cells are
// flagged, duplicates are contract errors, empty input is a config error.
// When reported means are supplied, any that disagree with the computed
// means beyond 0.005 produce a discrepancy note.
MetricReport aggregate(const std::vector<EvalRecord>& records,
                       const ReportedMeans& reported = {});

// 100 * (new - baseline) / baseline; nullopt when the baseline is not
// positive (the report renders that as undefined).
std::optional<double> relative_improvement(double baseline_mean, double new_mean);

// Nearest-integer percent for presentation.
int round_percent(double percent);

} // namespace ragkit
