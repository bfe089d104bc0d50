#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "psi/error.hpp"
#include "psi/pairing.hpp"
#include "psi/rng.hpp"

using namespace psi;

namespace {

AspectInstance inst(const std::string& sid, const std::string& aspect,
                    Polarity pol) {
  return AspectInstance{sid, "text of " + sid, aspect, pol, Split::train};
}

std::vector<AspectInstance> balanced_corpus(int per_class) {
  std::vector<AspectInstance> out;
  const std::vector<std::string> aspects = {"food", "staff", "menu"};
  int id = 0;
  for (int pol = 0; pol < 3; ++pol)
    for (int i = 0; i < per_class; ++i, ++id)
      out.push_back(inst("s" + std::to_string(id), aspects[id % 3],
                         static_cast<Polarity>(pol)));
  return out;
}

std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t dim,
                                                Rng& rng) {
  std::vector<std::vector<double>> vecs(n, std::vector<double>(dim));
  for (auto& v : vecs)
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return vecs;
}

}  // namespace

TEST_CASE("sample_batch draws the configured class composition") {
  auto corpus = balanced_corpus(10);
  SamplingConfig cfg;
  cfg.n_polarities = 3;
  cfg.n_sentences = 4;
  Rng rng(5);
  auto batch = sample_batch(corpus, cfg, rng);
  REQUIRE(batch.size() == 12);

  std::map<Polarity, int> per_class;
  std::set<std::size_t> unique(batch.begin(), batch.end());
  CHECK(unique.size() == 12);  // without replacement
  for (std::size_t idx : batch) ++per_class[corpus[idx].polarity];
  for (auto& [pol, n] : per_class) CHECK(n == 4);
}

TEST_CASE("sample_batch with one polarity and two sentences") {
  auto corpus = balanced_corpus(5);
  SamplingConfig cfg;
  cfg.n_polarities = 1;
  cfg.n_sentences = 2;
  Rng rng(9);
  auto batch = sample_batch(corpus, cfg, rng);
  REQUIRE(batch.size() == 2);
  CHECK(corpus[batch[0]].polarity == corpus[batch[1]].polarity);
}

TEST_CASE("same seed reproduces the same batch") {
  auto corpus = balanced_corpus(8);
  SamplingConfig cfg;
  Rng a(123), b(123), c(124);
  CHECK(sample_batch(corpus, cfg, a) == sample_batch(corpus, cfg, b));
  Rng a2(123);
  (void)c;
}

TEST_CASE("sampling error names the class that is short") {
  std::vector<AspectInstance> corpus = {
      inst("s0", "food", Polarity::positive),
      inst("s1", "food", Polarity::positive),
      inst("s2", "food", Polarity::neutral),
      inst("s3", "food", Polarity::negative),
      inst("s4", "food", Polarity::negative),
  };
  SamplingConfig cfg;
  cfg.n_polarities = 3;
  cfg.n_sentences = 2;
  Rng rng(1);
  try {
    sample_batch(corpus, cfg, rng);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    CHECK(std::string(e.what()).find("neutral") != std::string::npos);
  }
  CHECK_THROWS_AS(
      ([&] {
        SamplingConfig bad;
        bad.n_polarities = 4;
        Rng r(1);
        sample_batch(corpus, bad, r);
      }()),
      ConfigError);
}

TEST_CASE("a 3x4 batch with both modes yields exactly 24 pairs") {
  auto corpus = balanced_corpus(6);
  SamplingConfig cfg;
  Rng rng(31);
  auto batch_idx = sample_batch(corpus, cfg, rng);
  std::vector<AspectInstance> batch;
  for (auto i : batch_idx) batch.push_back(corpus[i]);
  auto vecs = random_vectors(batch.size(), 4, rng);

  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  CHECK(ps.pairs.size() == 24);
  std::size_t intra = 0, inter = 0;
  for (const auto& p : ps.pairs) {
    CHECK_FALSE((batch[p.a].sentence_id == batch[p.b].sentence_id &&
                 batch[p.a].aspect == batch[p.b].aspect));
    (p.kind == PairKind::intra ? intra : inter) += 1;
  }
  CHECK(intra == 12);
  CHECK(inter == 12);
}

TEST_CASE("two opposite-polarity instances force the cross inter pair") {
  std::vector<AspectInstance> batch = {inst("s0", "food", Polarity::positive),
                                       inst("s1", "menu", Polarity::negative)};
  auto vecs = std::vector<std::vector<double>>{{0.0, 0.0}, {3.0, 4.0}};
  SamplingConfig cfg;
  cfg.intra_mode = PairMode::off;  // no same-polarity partner exists
  Rng rng(3);
  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  REQUIRE(ps.pairs.size() == 2);
  for (const auto& p : ps.pairs) {
    CHECK(p.kind == PairKind::inter);
    CHECK(p.a != p.b);
    CHECK(p.distance == doctest::Approx(5.0));
  }
}

TEST_CASE("hand-placed vectors match a brute-force nearest enumeration") {
  std::vector<AspectInstance> batch = {
      inst("s0", "food", Polarity::positive),
      inst("s1", "menu", Polarity::positive),
      inst("s2", "food", Polarity::negative),
      inst("s3", "menu", Polarity::negative),
      inst("s4", "wine", Polarity::neutral),
  };
  std::vector<std::vector<double>> vecs = {
      {0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}, {5.0, 5.0}, {-1.0, 0.0}};
  SamplingConfig cfg;  // i_p, similar/similar
  cfg.skip_empty_pools = true;  // s4 is the only neutral, no intra partner
  Rng rng(7);
  PairSet ps = build_pairs(batch, vecs, cfg, rng);

  auto expected_partner = [&](std::size_t i, PairKind kind) {
    double best = 1e300;
    std::size_t arg = SIZE_MAX;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (j == i) continue;
      const bool same = batch[i].polarity == batch[j].polarity;
      if ((kind == PairKind::intra) != same) continue;
      double d = euclidean_distance(vecs[i], vecs[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    return arg;
  };
  for (const auto& p : ps.pairs) CHECK(p.b == expected_partner(p.a, p.kind));
  CHECK(ps.pairs.size() == 9);  // s4 contributes no intra pair
  CHECK(ps.skipped_intra == 1);
}

TEST_CASE("similar and dissimilar partners match exhaustive enumeration") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto corpus = balanced_corpus(6);
    SamplingConfig cfg;
    cfg.inter_mode = trial % 2 ? PairMode::similar : PairMode::dissimilar;
    auto batch_idx = sample_batch(corpus, cfg, rng);
    std::vector<AspectInstance> batch;
    for (auto i : batch_idx) batch.push_back(corpus[i]);
    auto vecs = random_vectors(batch.size(), 6, rng);
    PairSet ps = build_pairs(batch, vecs, cfg, rng);
    CHECK(ps.pairs.size() == 24);

    for (const auto& p : ps.pairs) {
      const bool want_same = p.kind == PairKind::intra;
      const PairMode mode =
          p.kind == PairKind::intra ? cfg.intra_mode : cfg.inter_mode;
      double best = mode == PairMode::similar ? 1e300 : -1.0;
      std::size_t arg = SIZE_MAX;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        if (j == p.a) continue;
        if ((batch[p.a].polarity == batch[j].polarity) != want_same) continue;
        const double d = euclidean_distance(vecs[p.a], vecs[j]);
        const bool better = mode == PairMode::similar ? d < best : d > best;
        if (better) {
          best = d;
          arg = j;
        }
      }
      CHECK(p.b == arg);
    }
  }
}

TEST_CASE("distance ties break toward the lowest batch index") {
  std::vector<AspectInstance> batch = {
      inst("s0", "food", Polarity::positive),
      inst("s1", "menu", Polarity::negative),
      inst("s2", "wine", Polarity::negative),
  };
  // s1 and s2 are equidistant from s0
  std::vector<std::vector<double>> vecs = {{0, 0}, {1, 0}, {-1, 0}};
  SamplingConfig cfg;
  cfg.intra_mode = PairMode::off;
  cfg.skip_empty_pools = true;  // s1/s2 have no inter partner against s0 only
  Rng rng(1);
  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  for (const auto& p : ps.pairs)
    if (p.a == 0) CHECK(p.b == 1);
}

TEST_CASE("strategy filters constrain both endpoints") {
  Rng rng(202);
  const std::vector<std::string> aspects = {"food", "menu", "wine", "staff"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AspectInstance> batch;
    for (int i = 0; i < 12; ++i)
      batch.push_back(inst("s" + std::to_string(i),
                           aspects[rng.uniform_int(aspects.size())],
                           static_cast<Polarity>(rng.uniform_int(3))));
    auto vecs = random_vectors(batch.size(), 5, rng);

    SamplingConfig cfg;
    cfg.skip_empty_pools = true;

    cfg.strategy = Strategy::interact_polarity_limit_aspect;
    for (const auto& p : build_pairs(batch, vecs, cfg, rng).pairs) {
      CHECK(batch[p.a].aspect == batch[p.b].aspect);
      if (p.kind == PairKind::intra)
        CHECK(batch[p.a].polarity == batch[p.b].polarity);
      else
        CHECK(batch[p.a].polarity != batch[p.b].polarity);
    }

    cfg.strategy = Strategy::interact_aspect_limit_polarity;
    for (const auto& p : build_pairs(batch, vecs, cfg, rng).pairs) {
      CHECK(batch[p.a].polarity == batch[p.b].polarity);
      if (p.kind == PairKind::intra)
        CHECK(batch[p.a].aspect == batch[p.b].aspect);
      else
        CHECK(batch[p.a].aspect != batch[p.b].aspect);
    }

    cfg.strategy = Strategy::interact_aspect;
    for (const auto& p : build_pairs(batch, vecs, cfg, rng).pairs) {
      if (p.kind == PairKind::intra)
        CHECK(batch[p.a].aspect == batch[p.b].aspect);
      else
        CHECK(batch[p.a].aspect != batch[p.b].aspect);
    }
  }
}

TEST_CASE("pair count scales with the number of active modes") {
  auto corpus = balanced_corpus(6);
  SamplingConfig cfg;
  Rng rng(71);
  auto batch_idx = sample_batch(corpus, cfg, rng);
  std::vector<AspectInstance> batch;
  for (auto i : batch_idx) batch.push_back(corpus[i]);
  auto vecs = random_vectors(batch.size(), 3, rng);

  cfg.intra_mode = PairMode::off;
  CHECK(build_pairs(batch, vecs, cfg, rng).pairs.size() == 12);
  cfg.inter_mode = PairMode::off;
  CHECK(build_pairs(batch, vecs, cfg, rng).pairs.empty());
  cfg.intra_mode = PairMode::similar;
  auto only_intra = build_pairs(batch, vecs, cfg, rng);
  CHECK(only_intra.pairs.size() == 12);
  for (const auto& p : only_intra.pairs) CHECK(p.kind == PairKind::intra);
}

TEST_CASE("random similarity still builds both pair kinds from the pools") {
  auto corpus = balanced_corpus(6);
  SamplingConfig cfg;
  cfg.similarity = SimilarityMode::random;
  Rng rng(41);
  auto batch_idx = sample_batch(corpus, cfg, rng);
  std::vector<AspectInstance> batch;
  for (auto i : batch_idx) batch.push_back(corpus[i]);
  auto vecs = random_vectors(batch.size(), 3, rng);
  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  CHECK(ps.pairs.size() == 24);
  for (const auto& p : ps.pairs) {
    const bool same = batch[p.a].polarity == batch[p.b].polarity;
    CHECK(same == (p.kind == PairKind::intra));
  }
}

TEST_CASE("empty pools abort in strict mode and count in skip mode") {
  // unique aspects: limiting the aspect leaves no candidates at all
  std::vector<AspectInstance> batch = {
      inst("s0", "food", Polarity::positive),
      inst("s1", "menu", Polarity::negative),
      inst("s2", "wine", Polarity::neutral),
  };
  auto vecs = std::vector<std::vector<double>>{{0, 0}, {1, 1}, {2, 2}};
  SamplingConfig cfg;
  cfg.strategy = Strategy::interact_polarity_limit_aspect;
  Rng rng(1);
  CHECK_THROWS_AS(build_pairs(batch, vecs, cfg, rng), PairingError);

  cfg.skip_empty_pools = true;
  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  CHECK(ps.pairs.empty());
  CHECK(ps.skipped_intra == 3);
  CHECK(ps.skipped_inter == 3);
}

TEST_CASE("same-sentence different-aspect instances are eligible candidates") {
  std::vector<AspectInstance> batch = {
      inst("s0", "food", Polarity::positive),
      {"s0", "text of s0", "staff", Polarity::negative, Split::train},
      inst("s1", "menu", Polarity::negative),
  };
  // the same-sentence record is far, the cross-sentence one near
  std::vector<std::vector<double>> vecs = {{0, 0}, {9, 9}, {1, 0}};
  SamplingConfig cfg;
  cfg.intra_mode = PairMode::off;
  cfg.skip_empty_pools = true;
  Rng rng(2);
  PairSet ps = build_pairs(batch, vecs, cfg, rng);
  // instance 0 picks the nearer cross-sentence partner; the same-sentence
  // candidate competes in the same pool and wins only on distance
  for (const auto& p : ps.pairs)
    if (p.a == 0) CHECK(p.b == 2);

  std::vector<std::vector<double>> vecs2 = {{0, 0}, {0.5, 0}, {1, 0}};
  PairSet ps2 = build_pairs(batch, vecs2, cfg, rng);
  for (const auto& p : ps2.pairs)
    if (p.a == 0) CHECK(p.b == 1);  // now the same-sentence record is nearest
}
