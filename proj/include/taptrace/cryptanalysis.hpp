#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "taptrace/keyboard.hpp"

namespace taptrace {

/// Relative symbol frequencies over a layout's alphabet.
struct FrequencyTable {
    std::vector<std::string> symbols;
    std::vector<double> freq;  // >= 0, sums to 1
    std::string source;
};

/// Log-probabilities of symbol bigrams, add-one smoothed.
struct BigramModel {
    std::vector<std::string> symbols;
    std::vector<double> log_prob;  // n x n, row = first symbol
};

/// Lower-cases the text and keeps only characters that appear as
/// single-character labels of the alphabet.
std::string filter_corpus(std::string_view raw,
                          const std::vector<std::string>& alphabet);

FrequencyTable build_frequency_table(std::string_view filtered,
                                     const std::vector<std::string>& alphabet,
                                     std::string source);
BigramModel build_bigram_model(std::string_view filtered,
                               const std::vector<std::string>& alphabet);

/// The attacker's view: geometric slot indices pressed under shuffle epochs.
struct SlotObservation {
    std::size_t slot = 0;
    std::size_t epoch = 0;
};

struct SlotObservationLog {
    std::size_t n_slots = 0;
    std::vector<SlotObservation> entries;  // epoch indices non-decreasing
};

/// Exact occurrence counts of each slot within one epoch. Counts are never
/// pooled across epochs. Throws on an epoch absent from the log.
std::vector<std::size_t> slot_frequencies(const SlotObservationLog& log,
                                          std::size_t epoch);

/// Rank-matching baseline: slots sorted by count (ties by slot order) paired
/// with symbols sorted by table frequency (ties by symbol order).
SubstitutionMap rank_match(const std::vector<std::size_t>& counts,
                           const std::vector<std::string>& base_labels,
                           const FrequencyTable& table);

struct RecoveryParams {
    int max_proposals = 2000;  // per start
    int restarts = 5;          // rank-match start plus restarts-1 random starts
};

struct RecoveryResult {
    SubstitutionMap mapping;
    double log_likelihood = 0.0;
};

/// Bigram log-likelihood of the slot sequence decrypted through `mapping`.
double sequence_log_likelihood(const std::vector<std::size_t>& slot_sequence,
                               const std::vector<std::string>& base_labels,
                               const SubstitutionMap& mapping,
                               const BigramModel& bigrams);

/// Rank matching improved by transposition hill-climbing on the bigram
/// log-likelihood of the decrypted slot sequence. Acceptance is strictly
/// monotone; the best-scoring start wins, earlier start on ties.
RecoveryResult recover_mapping(const std::vector<std::size_t>& slot_sequence,
                               const std::vector<std::string>& base_labels,
                               const FrequencyTable& table,
                               const BigramModel& bigrams,
                               const RecoveryParams& params,
                               std::uint64_t seed);

struct ReshuffleOutcome {
    std::size_t reshuffle_every = 0;
    std::uint64_t seed = 0;
    double mean_recovery = 0.0;        // fraction of assignments recovered
    double mean_log_likelihood = 0.0;  // over epochs
    std::vector<double> per_epoch_recovery;
};

/// Types the corpus through per-popup shuffled layouts (reshuffling every n
/// keystrokes), recovers each epoch's substitution, and reports the mean
/// fraction of correctly recovered assignments. Frequency and bigram tables
/// are built from the same corpus.
ReshuffleOutcome evaluate_reshuffle_tradeoff(std::string_view corpus_raw,
                                             const KeyboardLayout& base,
                                             std::size_t reshuffle_every_n,
                                             std::uint64_t seed,
                                             const RecoveryParams& params = {});

}  // namespace taptrace
