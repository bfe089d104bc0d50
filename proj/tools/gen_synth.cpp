// Generates the synthetic corpora committed under data/ and tests/fixtures/.
// Texts carry a token-level polarity signal plus noise; a slice of sentences
// carries two aspects with independent polarities, which is exactly the case
// the pairing machinery exploits.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psi/data.hpp"
#include "psi/error.hpp"
#include "psi/rng.hpp"

namespace {

using psi::Polarity;
using psi::Rng;

const std::vector<std::string> kFillers = {
    "the",   "was",   "and",  "we",    "a",     "it",    "with",
    "had",   "very",  "place", "came",  "table", "night", "today",
    "again", "visit", "order", "really", "quite", "just"};
const std::vector<std::string> kPositive = {
    "great",     "delicious", "fantastic", "lovely",
    "wonderful", "amazing",   "excellent", "friendly"};
const std::vector<std::string> kNegative = {
    "terrible", "rude", "awful", "bland", "dirty", "overpriced", "slow",
    "cold"};
const std::vector<std::string> kNeutral = {"okay",     "average", "ordinary",
                                           "plain",    "standard", "typical"};
const std::vector<std::string> kAspects = {"food",  "service", "ambience",
                                           "price", "menu",    "location"};

std::string pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[rng.uniform_int(pool.size())];
}

const std::vector<std::string>& cue_pool(Polarity pol) {
  switch (pol) {
    case Polarity::positive: return kPositive;
    case Polarity::negative: return kNegative;
    case Polarity::neutral: return kNeutral;
  }
  throw psi::ValidationError("bad polarity");
}

// One clause about one aspect, cue words mixed into filler.
std::string make_clause(const std::string& aspect, Polarity pol, Rng& rng) {
  std::vector<std::string> tokens;
  const std::size_t n_filler = 4 + rng.uniform_int(5);
  for (std::size_t i = 0; i < n_filler; ++i) tokens.push_back(pick(kFillers, rng));

  std::vector<std::string> cues;
  if (pol == Polarity::neutral) {
    // neutral is mostly mixed signals, rarely an explicit hedge word; the
    // minority class has to be learned from a conjunction, not a keyword
    if (rng.uniform() < 0.7) {
      cues.push_back(pick(kPositive, rng));
      cues.push_back(pick(kNegative, rng));
    } else {
      cues.push_back(pick(kNeutral, rng));
    }
  } else {
    cues.push_back(pick(cue_pool(pol), rng));
    cues.push_back(pick(cue_pool(pol), rng));
    if (rng.uniform() < 0.4) cues.push_back(pick(cue_pool(pol), rng));
    if (rng.uniform() < 0.05)
      cues.push_back(pol == Polarity::positive ? pick(kNegative, rng)
                                               : pick(kPositive, rng));
  }
  cues.push_back(aspect);

  for (const std::string& cue : cues) {
    const std::size_t at = rng.uniform_int(tokens.size() + 1);
    tokens.insert(tokens.begin() + at, cue);
  }
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) text += " ";
    text += tokens[i];
  }
  return text;
}

void emit(std::ostream& out, const std::string& sid, const std::string& text,
          const std::string& aspect, Polarity pol, const std::string& split) {
  nlohmann::json j;
  j["sentence_id"] = sid;
  j["text"] = text;
  j["aspect"] = aspect;
  j["polarity"] = psi::to_string(pol);
  j["split"] = split;
  out << j.dump() << "\n";
}

// Label stream with exact class counts, shuffled.
std::vector<Polarity> label_stream(std::size_t n_neg, std::size_t n_pos,
                                   std::size_t n_neu, Rng& rng) {
  std::vector<Polarity> labels;
  labels.insert(labels.end(), n_neg, Polarity::negative);
  labels.insert(labels.end(), n_pos, Polarity::positive);
  labels.insert(labels.end(), n_neu, Polarity::neutral);
  rng.shuffle(labels);
  return labels;
}

void write_imbalanced_split(std::ostream& out, const std::string& split,
                            const std::string& prefix, std::size_t n_neg,
                            std::size_t n_pos, std::size_t n_neu, Rng& rng) {
  std::vector<Polarity> labels = label_stream(n_neg, n_pos, n_neu, rng);
  std::size_t cursor = 0;
  int sid = 0;
  while (cursor < labels.size()) {
    const std::string sentence_id = prefix + std::to_string(sid++);
    const bool two_aspects =
        labels.size() - cursor >= 2 && rng.uniform() < 0.06;
    if (two_aspects) {
      const std::string a1 = pick(kAspects, rng);
      std::string a2 = pick(kAspects, rng);
      while (a2 == a1) a2 = pick(kAspects, rng);
      const Polarity p1 = labels[cursor++];
      const Polarity p2 = labels[cursor++];
      const std::string text =
          make_clause(a1, p1, rng) + " and " + make_clause(a2, p2, rng);
      emit(out, sentence_id, text, a1, p1, split);
      emit(out, sentence_id, text, a2, p2, split);
    } else {
      const std::string aspect = pick(kAspects, rng);
      const Polarity pol = labels[cursor++];
      emit(out, sentence_id, make_clause(aspect, pol, rng), aspect, pol, split);
    }
  }
}

// Class ratios mirror a skewed review corpus: 62% / 24% / 14%.
void write_imbalanced(std::ostream& out, std::uint64_t seed) {
  Rng rng(seed);
  write_imbalanced_split(out, "train", "tr", 279, 108, 63, rng);
  write_imbalanced_split(out, "test", "te", 93, 36, 21, rng);
}

// Cleanly separable toy set: every sentence carries three unambiguous cues.
void write_separable(std::ostream& out, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::string> aspects = {"food", "service"};
  int sid = 0;
  for (const std::string& split : {std::string("train"), std::string("test")}) {
    const int per_class = split == "train" ? 12 : 4;
    for (int c = 0; c < 3; ++c) {
      const Polarity pol = static_cast<Polarity>(c);
      for (int i = 0; i < per_class; ++i) {
        const std::string aspect = aspects[rng.uniform_int(aspects.size())];
        std::vector<std::string> tokens;
        for (int k = 0; k < 3; ++k) tokens.push_back(pick(cue_pool(pol), rng));
        tokens.push_back(pick(kFillers, rng));
        tokens.push_back(aspect);
        rng.shuffle(tokens);
        std::string text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          if (t) text += " ";
          text += tokens[t];
        }
        emit(out, "s" + std::to_string(sid++), text, aspect, pol, split);
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic aspect-sentiment corpus generator"};
  std::string kind = "imbalanced";
  std::string out_path;
  std::uint64_t seed = 7;
  app.add_option("--kind", kind, "imbalanced | separable")
      ->check(CLI::IsMember({"imbalanced", "separable"}));
  app.add_option("--out", out_path, "output jsonl path")->required();
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  if (kind == "imbalanced")
    write_imbalanced(out, seed);
  else
    write_separable(out, seed);
  return out ? 0 : 1;
}
