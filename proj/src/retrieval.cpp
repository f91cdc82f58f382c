#include "fgdm/retrieval.hpp"

#include "fgdm/text.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace fgdm::retrieval {

Embedding embed_graph(const FlowGraph& g) {
  const GraphStats stats = compute_graph_stats(g);
  Embedding raw = Embedding::Zero();
  raw(0) = stats.node_count;
  raw(1) = stats.edge_count;
  for (std::size_t r = 0; r < kRelationCount; ++r) raw(2 + static_cast<int>(r)) = stats.counts_per_relation[r];
  for (std::size_t k = 0; k < kNodeKindCount; ++k) raw(6 + static_cast<int>(k)) = stats.counts_per_kind[k];
  raw(12) = stats.max_out_degree;
  raw(13) = stats.isolated_node_count;
  if (!g.nodes().empty()) {
    double total = 0.0;
    for (const CodeNode& n : g.nodes()) total += n.span.length();
    raw(14) = total / static_cast<double>(g.nodes().size());
  }
  raw(15) = containment_depth(g);

  std::vector<std::string> triples;
  triples.reserve(g.edges().size());
  for (const FlowEdge& e : g.edges()) {
    triples.push_back(std::string(to_string(g.find(e.src)->kind)) + "|" +
                      std::string(to_string(e.relation)) + "|" +
                      std::string(to_string(g.find(e.dst)->kind)));
  }
  std::sort(triples.begin(), triples.end());
  for (const std::string& t : triples) raw(16 + static_cast<int>(text::fnv1a(t) % 16)) += 1.0;

  return normalized_or_zero(raw.unaryExpr([](double x) { return std::log1p(x); }).eval());
}

KnowledgeStore::KnowledgeStore(const KnowledgeStore& other) {
  std::shared_lock lock(other.mutex_);
  records_ = other.records_;
  ids_ = other.ids_;
}

KnowledgeStore& KnowledgeStore::operator=(const KnowledgeStore& other) {
  if (this == &other) return *this;
  std::vector<KnowledgeRecord> records;
  std::set<std::string> ids;
  {
    std::shared_lock lock(other.mutex_);
    records = other.records_;
    ids = other.ids_;
  }
  std::unique_lock lock(mutex_);
  records_ = std::move(records);
  ids_ = std::move(ids);
  return *this;
}

void KnowledgeStore::insert(KnowledgeRecord record) {
  if (!record.embedding.allFinite()) {
    throw Error("record " + record.record_id + " has a non-finite embedding");
  }
  const double norm = record.embedding.norm();
  if (norm != 0.0 && std::abs(norm - 1.0) > 1e-9) record.embedding /= norm;
  std::unique_lock lock(mutex_);
  if (!ids_.insert(record.record_id).second) {
    throw DuplicateRecordId("record id already stored: " + record.record_id);
  }
  records_.push_back(std::move(record));
}

QueryResult KnowledgeStore::query(const Embedding& v, int k) const {
  if (k < 1) throw Error("query needs k >= 1");
  QueryResult result;
  if (v.isZero(0.0)) {
    result.warning = "zero query vector: cosine is undefined, no records returned";
    return result;
  }
  const Embedding q = v.normalized();
  std::shared_lock lock(mutex_);
  std::vector<std::pair<double, const KnowledgeRecord*>> scored;
  scored.reserve(records_.size());
  for (const KnowledgeRecord& r : records_) {
    scored.emplace_back(std::clamp(r.embedding.dot(q), -1.0, 1.0), &r);
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second->record_id < b.second->record_id;
                    });
  for (std::size_t i = 0; i < take; ++i) result.hits.push_back({*scored[i].second, scored[i].first});
  return result;
}

std::size_t KnowledgeStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

bool KnowledgeStore::contains(const std::string& record_id) const {
  std::shared_lock lock(mutex_);
  return ids_.count(record_id) > 0;
}

std::vector<KnowledgeRecord> KnowledgeStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

nlohmann::json KnowledgeStore::to_json() const {
  std::shared_lock lock(mutex_);
  nlohmann::json records = nlohmann::json::array();
  for (const KnowledgeRecord& r : records_) {
    records.push_back({{"record_id", r.record_id},
                       {"embedding", std::vector<double>(r.embedding.data(),
                                                         r.embedding.data() + kEmbeddingDim)},
                       {"graph_summary", r.graph_summary},
                       {"bug_description", r.bug_description},
                       {"fix_description", r.fix_description},
                       {"source_file", r.source_file}});
  }
  return {{"version", kFormatVersion}, {"dimension", kEmbeddingDim}, {"records", records}};
}

KnowledgeStore KnowledgeStore::from_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptFile(std::string("knowledge store is not valid JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    throw CorruptFile("knowledge store lacks an integer version field", 0);
  }
  const int version = doc["version"].get<int>();
  if (version != kFormatVersion) {
    throw VersionMismatch("knowledge store version " + std::to_string(version) + ", expected " +
                          std::to_string(kFormatVersion));
  }
  if (doc.value("dimension", -1) != kEmbeddingDim) {
    throw CorruptFile("knowledge store dimension is not " + std::to_string(kEmbeddingDim), 0);
  }
  KnowledgeStore store;
  try {
    for (const auto& r : doc.at("records")) {
      KnowledgeRecord rec;
      rec.record_id = r.at("record_id").get<std::string>();
      const auto values = r.at("embedding").get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(kEmbeddingDim)) {
        throw CorruptFile("record " + rec.record_id + " has an embedding of length " +
                              std::to_string(values.size()),
                          0);
      }
      rec.embedding = Eigen::Map<const Embedding>(values.data());
      rec.graph_summary = r.value("graph_summary", "");
      rec.bug_description = r.value("bug_description", "");
      rec.fix_description = r.value("fix_description", "");
      rec.source_file = r.value("source_file", "");
      // Stored vectors are taken as-is so scores survive a round trip bit for bit.
      if (!rec.embedding.allFinite()) throw CorruptFile("non-finite embedding in " + rec.record_id, 0);
      if (!store.ids_.insert(rec.record_id).second) {
        throw DuplicateRecordId("record id already stored: " + rec.record_id);
      }
      store.records_.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile(std::string("malformed knowledge record: ") + e.what(), 0);
  }
  return store;
}

void KnowledgeStore::save(const std::filesystem::path& path) const {
  text::write_file(path, to_json().dump(1) + "\n");
}

KnowledgeStore KnowledgeStore::load(const std::filesystem::path& path) {
  return from_text(text::read_file(path));
}

}  // namespace fgdm::retrieval
