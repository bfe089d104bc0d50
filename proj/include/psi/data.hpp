#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace psi {

inline constexpr int kNumPolarities = 3;

enum class Polarity { positive = 0, neutral = 1, negative = 2 };
enum class Split { train, test };

std::string to_string(Polarity p);
std::string to_string(Split s);
Polarity polarity_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// One (sentence, aspect, polarity) record. Two aspects of the same sentence
// are two distinct instances.
struct AspectInstance {
  std::string sentence_id;
  std::string text;
  std::string aspect;
  Polarity polarity = Polarity::positive;
  Split split = Split::train;
};

struct TokenizedInstance {
  std::vector<int> token_ids;        // exactly max_len entries, pad-filled
  std::size_t attention_length = 0;  // count of non-pad positions
  int label = 0;                     // polarity class index
};

// Token ids with pad/unk/sep reserved at fixed positions. Built over the
// training split only; unseen tokens map to unk at encode time.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kSep = 2;

  Vocabulary();
  static Vocabulary build(const std::vector<AspectInstance>& train_split);

  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }

  int add(const std::string& token);  // returns existing id when present

  const std::vector<std::string>& tokens() const { return tokens_; }
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

 private:
  std::map<std::string, int> ids_;
  std::vector<std::string> tokens_;
};

// Lowercase split on whitespace and punctuation; apostrophes stay inside
// tokens, other punctuation separates.
std::vector<std::string> tokenize(const std::string& text);

enum class DatasetFormat { jsonl, tsv };
DatasetFormat dataset_format_from_string(const std::string& s);

std::vector<AspectInstance> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format);

std::array<std::size_t, kNumPolarities> count_polarities(
    const std::vector<AspectInstance>& records, Split split);

std::vector<AspectInstance> filter_split(
    const std::vector<AspectInstance>& records, Split split);

// tokenize(text) ++ [sep] ++ tokenize(aspect), truncated to max_len and
// pad-filled to exactly max_len.
TokenizedInstance encode(const AspectInstance& instance,
                         const Vocabulary& vocab, std::size_t max_len);

// Tokens at the non-pad positions.
std::vector<std::string> decode(const TokenizedInstance& instance,
                                const Vocabulary& vocab);

}  // namespace psi
