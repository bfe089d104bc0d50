#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "psi/data.hpp"
#include "psi/encoder.hpp"
#include "psi/interaction.hpp"

namespace psi {

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::map<std::string, double> per_class_accuracy;  // recall per polarity
  std::array<std::array<std::size_t, kNumPolarities>, kNumPolarities>
      confusion{};  // [gold][predicted]
};

// Test-time path: semantic vector straight into the shared classifier. The
// interaction head never participates here. Ties in the argmax break toward
// the lowest class index. When scores is non-null it receives the softmax
// score vector.
int predict(const TokenizedInstance& instance, const DeskEncoder& encoder,
            const SharedClassifier& clf, std::vector<double>* scores = nullptr);

Metrics evaluate(const std::vector<TokenizedInstance>& split,
                 const DeskEncoder& encoder, const SharedClassifier& clf);

nlohmann::json metrics_to_json(const Metrics& m);

// TSV with a header row: sentence_id, aspect, polarity, then one column per
// semantic dimension, 9 significant digits.
void export_embeddings(const std::vector<AspectInstance>& instances,
                       const Vocabulary& vocab, std::size_t max_len,
                       const DeskEncoder& encoder,
                       const std::filesystem::path& path);

}  // namespace psi
