#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tploc::frontends {

/// Closed token list; a token's index is its embedding row.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Every word the description template can produce.
  static Vocabulary template_vocabulary();

  /// Plain text, one token per line.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool contains(std::string_view token) const;
  /// Throws VocabError for unknown tokens.
  std::size_t index(std::string_view token) const;

  /// Lowercases, splits on whitespace, drops trailing punctuation, maps to indices.
  std::vector<std::size_t> encode(std::string_view sentence) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

}  // namespace tploc::frontends
