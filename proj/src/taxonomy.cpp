#include "taxoforge/taxonomy.hpp"

#include <algorithm>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

void validate_arborescence(const std::vector<TermIndex>& parent, TermIndex root) {
  const std::size_t n = parent.size();
  if (root >= n) throw ValidationError("not an arborescence", "root out of range");
  if (parent[root] != Taxonomy::kNoParent) {
    throw ValidationError("not an arborescence", "root has a parent");
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    if (parent[v] == Taxonomy::kNoParent) {
      throw ValidationError("not an arborescence", "node " + std::to_string(v) + " has no parent");
    }
    if (parent[v] >= n || parent[v] == v) {
      throw ValidationError("not an arborescence", "bad parent for node " + std::to_string(v));
    }
  }
  // Walk up from every node; a path longer than n means a cycle.
  // state: 0 unvisited, 1 on current path, 2 known to reach root
  std::vector<char> state(n, 0);
  state[root] = 2;
  std::vector<TermIndex> path;
  for (std::size_t v = 0; v < n; ++v) {
    path.clear();
    TermIndex u = v;
    while (state[u] == 0) {
      state[u] = 1;
      path.push_back(u);
      u = parent[u];
    }
    if (state[u] == 1) {
      throw ValidationError("not an arborescence", "cycle through node " + std::to_string(u));
    }
    for (TermIndex w : path) state[w] = 2;
  }
}

Taxonomy::Taxonomy(TermSet terms, TermIndex root, std::vector<TermIndex> parent)
    : terms_(std::move(terms)), root_(root), parent_(std::move(parent)) {
  if (parent_.size() != terms_.size()) {
    throw ValidationError("not an arborescence", terms_.id() + ": parent vector size mismatch");
  }
  try {
    validate_arborescence(parent_, root_);
  } catch (const ValidationError& e) {
    throw ValidationError::at(terms_.id(), e);
  }
}

Taxonomy Taxonomy::from_edges(TermSet terms, TermIndex root, const std::vector<Edge>& edges) {
  const std::size_t n = terms.size();
  std::vector<TermIndex> parent(n, kNoParent);
  for (const auto& [p, c] : edges) {
    if (p >= n || c >= n) throw ValidationError("unknown term", terms.id() + ": edge index out of range");
    if (parent[c] != kNoParent) {
      throw ValidationError("multiple parents", terms.id() + ": '" + terms[c] + "'");
    }
    parent[c] = p;
  }
  return Taxonomy(std::move(terms), root, std::move(parent));
}

std::vector<Edge> Taxonomy::edges() const {
  std::vector<Edge> out;
  out.reserve(parent_.size());
  for (TermIndex c = 0; c < parent_.size(); ++c) {
    if (c != root_) out.emplace_back(parent_[c], c);
  }
  return out;
}

std::vector<std::vector<TermIndex>> Taxonomy::children() const {
  std::vector<std::vector<TermIndex>> out(parent_.size());
  for (TermIndex c = 0; c < parent_.size(); ++c) {
    if (c != root_) out[parent_[c]].push_back(c);
  }
  return out;
}

std::vector<std::size_t> Taxonomy::depths() const {
  const std::size_t n = parent_.size();
  std::vector<std::size_t> depth(n, 0);
  std::vector<char> done(n, 0);
  done[root_] = 1;
  std::vector<TermIndex> path;
  for (TermIndex v = 0; v < n; ++v) {
    path.clear();
    TermIndex u = v;
    while (!done[u]) {
      path.push_back(u);
      u = parent_[u];
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      depth[*it] = depth[parent_[*it]] + 1;
      done[*it] = 1;
    }
  }
  return depth;
}

std::size_t Taxonomy::max_depth() const {
  const auto d = depths();
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

bool AncestorSet::contains(TermIndex ancestor, TermIndex descendant) const {
  return std::binary_search(pairs.begin(), pairs.end(), Edge{ancestor, descendant});
}

AncestorSet ancestor_pairs(const Taxonomy& tree) {
  AncestorSet out;
  const auto& parent = tree.parents();
  for (TermIndex v = 0; v < parent.size(); ++v) {
    for (TermIndex u = v; u != tree.root();) {
      u = parent[u];
      out.pairs.emplace_back(u, v);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::string to_json_text(const Taxonomy& tree) {
  ojson edges = ojson::array();
  for (const auto& [p, c] : tree.edges()) {
    edges.push_back({tree.terms()[p], tree.terms()[c]});
  }
  ojson doc = {{"id", tree.id()},
              {"terms", tree.terms().terms()},
              {"root", tree.terms()[tree.root()]},
              {"edges", std::move(edges)}};
  return doc.dump();
}

Taxonomy taxonomy_from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("parse error", e.what());
  }
  auto require = [&](const char* key, bool ok) {
    if (!ok) throw ValidationError("malformed record", std::string("field '") + key + "'");
  };
  require("id", doc.is_object() && doc.contains("id") && doc["id"].is_string());
  const std::string id = doc["id"].get<std::string>();
  require("terms", doc.contains("terms") && doc["terms"].is_array());
  require("root", doc.contains("root") && doc["root"].is_string());
  require("edges", doc.contains("edges") && doc["edges"].is_array());

  std::vector<std::string> terms;
  for (const auto& t : doc["terms"]) {
    require("terms", t.is_string());
    terms.push_back(t.get<std::string>());
  }
  TermSet term_set(id, terms);
  auto lookup = [&](const json& v) {
    require("edges", v.is_string());
    const std::string canon = canonicalize_term(v.get<std::string>());
    const auto idx = term_set.index_of(canon);
    if (!idx) throw ValidationError("unknown term", id + ": '" + canon + "'");
    return *idx;
  };
  const TermIndex root = lookup(doc["root"]);
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    require("edges", e.is_array() && e.size() == 2);
    edges.emplace_back(lookup(e[0]), lookup(e[1]));
  }
  return Taxonomy::from_edges(std::move(term_set), root, edges);
}

}  // namespace taxoforge
