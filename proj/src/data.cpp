#include "psi/data.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "psi/error.hpp"

namespace psi {

std::string to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::neutral: return "neutral";
    case Polarity::negative: return "negative";
  }
  throw ValidationError("unknown polarity value");
}

std::string to_string(Split s) {
  return s == Split::train ? "train" : "test";
}

Polarity polarity_from_string(const std::string& s) {
  if (s == "positive") return Polarity::positive;
  if (s == "neutral") return Polarity::neutral;
  if (s == "negative") return Polarity::negative;
  throw ParseError("unknown polarity \"" + s + "\"");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw ParseError("unknown split \"" + s + "\"");
}

Vocabulary::Vocabulary() {
  tokens_ = {"<pad>", "<unk>", "<sep>"};
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i)
    ids_[tokens_[i]] = i;
}

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_[token] = id;
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw IndexError("vocabulary: id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

Vocabulary Vocabulary::build(const std::vector<AspectInstance>& train_split) {
  Vocabulary vocab;
  for (const AspectInstance& inst : train_split) {
    for (const std::string& tok : tokenize(inst.text)) vocab.add(tok);
    for (const std::string& tok : tokenize(inst.aspect)) vocab.add(tok);
  }
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 3 || tokens[0] != "<pad>" || tokens[1] != "<unk>" ||
      tokens[2] != "<sep>")
    throw ValidationError("vocabulary: reserved tokens missing or misplaced");
  Vocabulary vocab;
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    if (vocab.ids_.count(tokens[i]))
      throw ValidationError("vocabulary: duplicate token \"" + tokens[i] +
                            "\"");
    vocab.add(tokens[i]);
  }
  return vocab;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    const bool keep = std::isalnum(c) || c == '\'' || c >= 0x80;
    if (keep) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

namespace {

AspectInstance record_from_json(const nlohmann::json& j, std::size_t line_no) {
  AspectInstance inst;
  try {
    inst.sentence_id = j.at("sentence_id").get<std::string>();
    inst.text = j.at("text").get<std::string>();
    inst.aspect = j.at("aspect").get<std::string>();
    inst.polarity = polarity_from_string(j.at("polarity").get<std::string>());
    inst.split = split_from_string(j.at("split").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return inst;
}

AspectInstance record_from_tsv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cols;
  std::string col;
  std::istringstream is(line);
  while (std::getline(is, col, '\t')) cols.push_back(col);
  if (cols.size() != 5)
    throw ParseError("line " + std::to_string(line_no) + ": expected 5 columns, got " +
                     std::to_string(cols.size()));
  AspectInstance inst;
  inst.sentence_id = cols[0];
  inst.text = cols[1];
  inst.aspect = cols[2];
  try {
    inst.polarity = polarity_from_string(cols[3]);
    inst.split = split_from_string(cols[4]);
  } catch (const ParseError& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return inst;
}

}  // namespace

DatasetFormat dataset_format_from_string(const std::string& s) {
  if (s == "jsonl") return DatasetFormat::jsonl;
  if (s == "tsv") return DatasetFormat::tsv;
  throw ConfigError("unknown dataset format \"" + s + "\"");
}

std::vector<AspectInstance> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());

  std::vector<AspectInstance> records;
  std::set<std::pair<std::string, std::string>> seen_train, seen_test;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    AspectInstance inst;
    if (format == DatasetFormat::jsonl) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
      inst = record_from_json(j, line_no);
    } else {
      inst = record_from_tsv(line, line_no);
    }
    auto& seen = inst.split == Split::train ? seen_train : seen_test;
    if (!seen.insert({inst.sentence_id, inst.aspect}).second)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate (sentence_id, aspect) = (" +
                            inst.sentence_id + ", " + inst.aspect +
                            ") within split " + to_string(inst.split));
    records.push_back(std::move(inst));
  }
  return records;
}

std::array<std::size_t, kNumPolarities> count_polarities(
    const std::vector<AspectInstance>& records, Split split) {
  std::array<std::size_t, kNumPolarities> counts{};
  for (const AspectInstance& r : records)
    if (r.split == split) ++counts[static_cast<int>(r.polarity)];
  return counts;
}

std::vector<AspectInstance> filter_split(
    const std::vector<AspectInstance>& records, Split split) {
  std::vector<AspectInstance> out;
  for (const AspectInstance& r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

TokenizedInstance encode(const AspectInstance& instance,
                         const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 3)
    throw ConfigError("encode: max_len must be at least 3, got " +
                      std::to_string(max_len));

  std::vector<int> ids;
  for (const std::string& tok : tokenize(instance.text))
    ids.push_back(vocab.id(tok));
  ids.push_back(Vocabulary::kSep);
  for (const std::string& tok : tokenize(instance.aspect))
    ids.push_back(vocab.id(tok));

  if (ids.size() > max_len) ids.resize(max_len);
  TokenizedInstance out;
  out.attention_length = ids.size();
  ids.resize(max_len, Vocabulary::kPad);
  out.token_ids = std::move(ids);
  out.label = static_cast<int>(instance.polarity);
  return out;
}

std::vector<std::string> decode(const TokenizedInstance& instance,
                                const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < instance.attention_length; ++i)
    out.push_back(vocab.token(instance.token_ids[i]));
  return out;
}

}  // namespace psi
