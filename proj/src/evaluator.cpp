#include "psi/evaluator.hpp"

#include <cstdio>
#include <fstream>

#include "psi/error.hpp"
#include "psi/tensor.hpp"

namespace psi {

int predict(const TokenizedInstance& instance, const DeskEncoder& encoder,
            const SharedClassifier& clf, std::vector<double>* scores) {
  Tape tape;
  Tensor vec = encoder.extract(tape, instance);
  Tensor probs = clf.probabilities(tape, vec);
  if (scores) *scores = probs.value();
  int best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs.value()[c] > probs.value()[best]) best = static_cast<int>(c);
  return best;
}

Metrics evaluate(const std::vector<TokenizedInstance>& split,
                 const DeskEncoder& encoder, const SharedClassifier& clf) {
  if (split.empty()) throw ValidationError("evaluate: empty split");

  Metrics m;
  for (const TokenizedInstance& inst : split) {
    const int pred = predict(inst, encoder, clf);
    ++m.confusion[inst.label][pred];
  }

  std::size_t total = 0, correct = 0;
  for (int g = 0; g < kNumPolarities; ++g)
    for (int p = 0; p < kNumPolarities; ++p) {
      total += m.confusion[g][p];
      if (g == p) correct += m.confusion[g][p];
    }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(total);

  double f1_sum = 0.0;
  for (int c = 0; c < kNumPolarities; ++c) {
    std::size_t tp = m.confusion[c][c], fp = 0, fn = 0, gold = 0;
    for (int g = 0; g < kNumPolarities; ++g)
      if (g != c) fp += m.confusion[g][c];
    for (int p = 0; p < kNumPolarities; ++p)
      if (p != c) fn += m.confusion[c][p];
    gold = tp + fn;

    const double precision =
        tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double recall =
        gold == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold);
    const double f1 = precision + recall == 0.0
                          ? 0.0
                          : 2.0 * precision * recall / (precision + recall);
    f1_sum += f1;
    m.per_class_accuracy[to_string(static_cast<Polarity>(c))] = recall;
  }
  m.macro_f1 = f1_sum / kNumPolarities;
  return m;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["per_class_accuracy"] = m.per_class_accuracy;
  std::vector<std::vector<std::size_t>> confusion;
  for (const auto& row : m.confusion)
    confusion.emplace_back(row.begin(), row.end());
  j["confusion"] = confusion;
  return j;
}

void export_embeddings(const std::vector<AspectInstance>& instances,
                       const Vocabulary& vocab, std::size_t max_len,
                       const DeskEncoder& encoder,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embeddings to " + path.string());

  const std::size_t dim = encoder.config().output_dim;
  out << "sentence_id\taspect\tpolarity";
  for (std::size_t d = 0; d < dim; ++d) out << "\tdim" << d;
  out << "\n";

  char buf[32];
  for (const AspectInstance& inst : instances) {
    Tape tape;
    Tensor vec = encoder.extract(tape, encode(inst, vocab, max_len));
    out << inst.sentence_id << "\t" << inst.aspect << "\t"
        << to_string(inst.polarity);
    for (std::size_t d = 0; d < dim; ++d) {
      std::snprintf(buf, sizeof(buf), "%.9g", vec.value()[d]);
      out << "\t" << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("failed while writing embeddings to " + path.string());
}

}  // namespace psi
