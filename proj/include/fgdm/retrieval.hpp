#pragma once

#include "fgdm/graph.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace fgdm::retrieval {

inline constexpr int kEmbeddingDim = 32;

template <typename Scalar>
using EmbeddingT = Eigen::Matrix<Scalar, kEmbeddingDim, 1>;
using Embedding = EmbeddingT<double>;

/// v / |v|, or v itself when it is the zero vector.
template <typename Derived>
typename Derived::PlainObject normalized_or_zero(const Eigen::MatrixBase<Derived>& v) {
  const typename Derived::Scalar norm = v.norm();
  if (norm == typename Derived::Scalar(0)) return v;
  return v / norm;
}

/// Cosine of the angle between a and b; 0 if either is the zero vector.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& a,
                                 const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar denom = a.norm() * b.norm();
  if (denom == Scalar(0)) return Scalar(0);
  return std::clamp<Scalar>(a.dot(b) / denom, Scalar(-1), Scalar(1));
}

/// Structural feature vector of a graph, independent of node ids and
/// declaration order. Components, each passed through log1p before the
/// final L2 normalization:
///   [0] node count          [1] edge count
///   [2..5] edges per relation (containment, data_flow, control_flow, call)
///   [6..11] nodes per kind (routine ... module-root)
///   [12] max out-degree     [13] isolated nodes
///   [14] mean span length   [15] containment depth
///   [16..31] 16-bin histogram of FNV-1a hashed (src kind, relation, dst kind)
Embedding embed_graph(const FlowGraph& g);

struct KnowledgeRecord {
  std::string record_id;
  Embedding embedding = Embedding::Zero();
  std::string graph_summary;
  std::string bug_description;
  std::string fix_description;
  std::string source_file;

  friend bool operator==(const KnowledgeRecord&, const KnowledgeRecord&) = default;
};

struct Hit {
  KnowledgeRecord record;
  double score = 0.0;
};

struct QueryResult {
  /// Highest score first; equal scores by ascending record_id.
  std::vector<Hit> hits;
  std::optional<std::string> warning;
};

class DuplicateRecordId : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  CorruptFile(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Flat, exact cosine index over knowledge records. Readers share the store;
/// insert takes an exclusive turn.
class KnowledgeStore {
 public:
  static constexpr int kFormatVersion = 1;

  KnowledgeStore() = default;
  KnowledgeStore(const KnowledgeStore& other);
  KnowledgeStore& operator=(const KnowledgeStore& other);

  /// Embeddings whose norm is not already 1 (within 1e-9) are normalized.
  /// Throws DuplicateRecordId, or fgdm::Error for non-finite entries.
  void insert(KnowledgeRecord record);

  /// min(k, size()) best matches by cosine score. A zero query vector yields
  /// no hits and a warning. k must be at least 1.
  QueryResult query(const Embedding& v, int k) const;

  std::size_t size() const;
  bool contains(const std::string& record_id) const;
  std::vector<KnowledgeRecord> records() const;

  nlohmann::json to_json() const;
  /// Parses the persisted form. Throws VersionMismatch or CorruptFile.
  static KnowledgeStore from_text(std::string_view text);

  void save(const std::filesystem::path& path) const;
  static KnowledgeStore load(const std::filesystem::path& path);

 private:
  mutable std::shared_mutex mutex_;
  std::vector<KnowledgeRecord> records_;
  std::set<std::string> ids_;
};

}  // namespace fgdm::retrieval
