#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alinet/random.hpp"
#include "alinet/sparse.hpp"

namespace alinet {

struct Triple {
  int head = 0;
  int relation = 0;
  int tail = 0;
  friend bool operator==(const Triple&, const Triple&) = default;
};

// Two knowledge graphs in one dense id space: entities of graph 1 occupy
// [0, num_entities1), graph 2 the rest. Relation ids are joint; a relation
// string appearing in both triple files gets a single id flagged on both
// sides.
struct KnowledgeGraphPair {
  int num_entities = 0;
  int num_entities1 = 0;
  int num_relations = 0;
  std::vector<Triple> triples;

  std::vector<std::string> entity_names;    // id -> name
  std::vector<std::string> relation_names;  // id -> name
  std::unordered_map<std::string, int> entity_ids_1;
  std::unordered_map<std::string, int> entity_ids_2;
  std::unordered_map<std::string, int> relation_ids;
  std::vector<std::uint8_t> relation_in_1;  // per relation id
  std::vector<std::uint8_t> relation_in_2;

  // Reserved relation id created by augment_neighborhood; excluded from the
  // relation loss.
  std::optional<int> augment_relation;

  int num_entities2() const { return num_entities - num_entities1; }
  int side_of(int entity) const { return entity < num_entities1 ? 1 : 2; }
  bool valid_entity(int e) const { return e >= 0 && e < num_entities; }
};

// Pre-aligned (side-1, side-2) entity pairs. Within one set each entity
// appears at most once.
struct AlignmentSet {
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Throws ReferentialError if the set violates its invariants against `pair`.
void validate_alignment(const KnowledgeGraphPair& pair, const AlignmentSet& alignment,
                        const std::string& what);

// Per-entity exact-distance neighbor sets (edges undirected) plus the
// mean-pooling adjacency and per-hop attention masks.
struct NeighborStructure {
  int num_entities = 0;
  int max_hop = 2;
  // hops[m-1][i] = sorted entity ids at shortest-path distance exactly m.
  std::vector<std::vector<std::vector<int>>> hops;
  // Row i: uniform weight 1/(|N1(i)|+1) over N1(i) and i itself.
  SparseMatrix adj_norm;
  // hop_masks[m-2]: pattern {(i,j) : j in N_m(i) or j == i}, values 1.
  std::vector<SparseMatrix> hop_masks;

  const std::vector<std::vector<int>>& one_hop() const { return hops[0]; }
  const std::vector<std::vector<int>>& two_hop() const { return hops[1]; }
  const SparseMatrix& two_hop_mask() const { return hop_masks[0]; }
  const SparseMatrix& hop_mask(int m) const { return hop_masks[m - 2]; }

  // Mean-pooling adjacency over the union of hops 1..up_to_hop plus self
  // (the "mix" aggregation).
  SparseMatrix union_adjacency(int up_to_hop) const;
};

struct SyntheticConfig {
  int num_entities_per_side = 120;
  int num_relations = 4;
  double avg_degree = 4.0;
  double rewire_fraction = 0.0;        // p
  double seed_alignment_fraction = 0.3;
  std::uint64_t rng_seed = 42;
};

// Reads two triple TSV files (head<TAB>relation<TAB>tail) and a links TSV
// file (ent1<TAB>ent2). Ids are assigned in first-seen order, file 1 first.
// Duplicate triples are dropped silently.
std::pair<KnowledgeGraphPair, AlignmentSet> load_graph_pair(
    const std::string& triples_path_1, const std::string& triples_path_2,
    const std::string& links_path);

NeighborStructure build_neighbor_structure(const KnowledgeGraphPair& pair,
                                           int max_hop = 2);

// For every pair of seed-aligned entities whose edge exists on one side
// only, adds the counterpart edge with a reserved relation id. Idempotent;
// never removes triples.
KnowledgeGraphPair augment_neighborhood(const KnowledgeGraphPair& pair,
                                        const AlignmentSet& seed);

// Random multi-relational graph plus an entity-renamed copy with a fraction
// of edges rewired. Returns the pair and the (seed, test) split of the
// ground-truth bijection. Deterministic in cfg.rng_seed.
std::tuple<KnowledgeGraphPair, AlignmentSet, AlignmentSet> generate_synthetic_pair(
    const SyntheticConfig& cfg);

// Disjoint (train, test) split; train gets floor(train_fraction * size).
std::pair<AlignmentSet, AlignmentSet> split_alignment(const AlignmentSet& alignment,
                                                      double train_fraction,
                                                      std::uint64_t rng_seed);

// TSV writers matching the load_graph_pair format.
void write_triples_tsv(const KnowledgeGraphPair& pair, int side,
                       const std::string& path);
void write_links_tsv(const KnowledgeGraphPair& pair, const AlignmentSet& links,
                     const std::string& path);

}  // namespace alinet
