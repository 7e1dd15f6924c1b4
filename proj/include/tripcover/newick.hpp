#pragma once

#include "tripcover/rational.hpp"
#include "tripcover/tree.hpp"

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tripcover {

/// Newick syntax or semantic error; `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class NewickReader {
 public:
  explicit NewickReader(std::string_view text) : text_(text) {}

  PhyloTree read() {
    skip_ws();
    if (peek() != '(') fail("expected '(' opening the tree");
    const std::size_t root_pos = pos_;
    const int root = new_vertex("");
    std::vector<Child> kids = read_children();
    skip_ws();
    if (peek() == ':') {
      ++pos_;
      read_length();  // a root length has no edge to live on
    }
    skip_ws();
    if (peek() != ';') fail("expected ';'");
    ++pos_;
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");

    if (kids.size() == 3) {
      for (const auto& k : kids) edges_.push_back({root, k.vertex, k.length});
    } else if (kids.size() == 2) {
      // Degree-2 root: suppress it by joining its two children.
      labels_[static_cast<std::size_t>(root)] = "";
      edges_.push_back({kids[0].vertex, kids[1].vertex, kids[0].length + kids[1].length});
      dropped_root_ = root;
    } else {
      throw ParseError("root has " + std::to_string(kids.size()) + " children (tree is not binary)", root_pos);
    }
    return finish();
  }

 private:
  struct Child {
    int vertex;
    Rational length;
  };

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  int new_vertex(std::string label) {
    labels_.push_back(std::move(label));
    return static_cast<int>(labels_.size()) - 1;
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  Rational read_length() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    if (start == pos_) throw ParseError("missing branch length", start);
    Rational value;
    try {
      value = parse_rational(text_.substr(start, pos_ - start));
    } catch (const Error& e) {
      throw ParseError(e.what(), start);
    }
    if (value <= 0) throw ParseError("branch length must be strictly positive", start);
    return value;
  }

  // Reads "(" subtree ("," subtree)+ ")".
  std::vector<Child> read_children() {
    ++pos_;  // '('
    std::vector<Child> kids;
    for (;;) {
      kids.push_back(read_subtree());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ')') {
        ++pos_;
        break;
      }
      fail("expected ',' or ')'");
    }
    if (kids.size() < 2) fail("a parenthesised group needs at least two subtrees");
    return kids;
  }

  Child read_subtree() {
    skip_ws();
    const std::size_t start = pos_;
    int vertex = -1;
    if (peek() == '(') {
      vertex = new_vertex("");
      auto kids = read_children();
      if (kids.size() != 2) {
        throw ParseError("interior vertex has " + std::to_string(kids.size() + 1) + " neighbours (tree is not binary)",
                         start);
      }
      for (const auto& k : kids) edges_.push_back({vertex, k.vertex, k.length});
    } else {
      while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
      if (start == pos_) fail("expected a taxon label or '('");
      vertex = new_vertex(std::string(text_.substr(start, pos_ - start)));
    }
    skip_ws();
    if (peek() != ':') fail("missing ':' and branch length");
    ++pos_;
    return {vertex, read_length()};
  }

  PhyloTree finish() {
    if (dropped_root_ >= 0) {
      // Compact away the suppressed root so every remaining vertex is used.
      std::vector<std::string> labels;
      std::vector<int> remap(labels_.size(), -1);
      for (std::size_t v = 0; v < labels_.size(); ++v) {
        if (static_cast<int>(v) == dropped_root_) continue;
        remap[v] = static_cast<int>(labels.size());
        labels.push_back(labels_[v]);
      }
      for (auto& e : edges_) {
        e.u = remap[static_cast<std::size_t>(e.u)];
        e.v = remap[static_cast<std::size_t>(e.v)];
      }
      labels_ = std::move(labels);
    }
    std::vector<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) continue;
      if (!is_valid_label(l)) throw ParseError("invalid taxon label '" + l + "'", 0);
      seen.push_back(l);
    }
    std::sort(seen.begin(), seen.end());
    auto dup = std::adjacent_find(seen.begin(), seen.end());
    if (dup != seen.end()) {
      throw ParseError("duplicate taxon '" + *dup + "'", text_.find(*dup, text_.find(*dup) + 1));
    }
    try {
      return PhyloTree::build(labels_, edges_);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), 0);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::string> labels_;
  std::vector<PhyloTree::Edge> edges_;
  int dropped_root_ = -1;
};

inline void write_subtree(const PhyloTree& tree, VertexId v, VertexId parent, const Rational& length, std::string& out);

/// Least taxon in the subtree hanging from v away from parent.
inline TaxonId least_below(const PhyloTree& tree, VertexId v, VertexId parent) {
  if (tree.is_leaf(v)) return tree.taxon_of(v);
  return tree.side(parent, v).front();
}

inline void write_children(const PhyloTree& tree, VertexId v, VertexId parent, std::string& out) {
  std::vector<std::pair<TaxonId, std::pair<VertexId, int>>> kids;
  for (const auto& [w, e] : tree.neighbours(v)) {
    if (w == parent) continue;
    kids.push_back({least_below(tree, w, v), {w, e}});
  }
  std::sort(kids.begin(), kids.end());
  out += '(';
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i > 0) out += ',';
    const auto& [w, e] = kids[i].second;
    write_subtree(tree, w, v, tree.edges()[static_cast<std::size_t>(e)].length, out);
  }
  out += ')';
}

inline void write_subtree(const PhyloTree& tree, VertexId v, VertexId parent, const Rational& length, std::string& out) {
  if (tree.is_leaf(v)) {
    out += tree.taxa().label(tree.taxon_of(v));
  } else {
    write_children(tree, v, parent, out);
  }
  out += ':';
  out += format_rational(length);
}

}  // namespace detail

/// Parses rooted-syntax Newick with branch lengths into an unrooted binary
/// tree. A degree-2 root is suppressed and its two edges merged.
inline PhyloTree parse_newick(std::string_view text) { return detail::NewickReader(text).read(); }

/// Canonical Newick: rooted at the interior vertex adjacent to the least
/// taxon, children ordered by least descendant taxon, exact lengths.
inline std::string write_newick(const PhyloTree& tree) {
  const VertexId root = tree.neighbours(tree.leaf_of(0)).front().first;
  std::string out;
  detail::write_children(tree, root, -1, out);
  out += ';';
  return out;
}

}  // namespace tripcover
