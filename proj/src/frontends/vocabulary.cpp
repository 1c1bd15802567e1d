#include "tploc/frontends/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "tploc/errors.hpp"
#include "tploc/scene/relations.hpp"

namespace tploc::frontends {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw VocabError("vocabulary: empty token at line " + std::to_string(i + 1));
    if (!lookup_.emplace(tokens_[i], i).second) throw VocabError("vocabulary: duplicate token '" + tokens_[i] + "'");
  }
}

Vocabulary Vocabulary::template_vocabulary() {
  std::vector<std::string> tokens;
  auto add_words = [&](std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) {
      for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (std::find(tokens.begin(), tokens.end(), w) == tokens.end()) tokens.push_back(w);
    }
  };
  add_words("the pose is a");
  for (auto r : {scene::Relation::kNorth, scene::Relation::kSouth, scene::Relation::kEast,
                 scene::Relation::kWest, scene::Relation::kOnTopOf, scene::Relation::kNear}) {
    add_words(scene::phrase(r));
  }
  for (auto c : scene::kAllColors) add_words(scene::phrase(c));
  for (auto c : scene::kAllClasses) add_words(scene::phrase(c));
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

bool Vocabulary::contains(std::string_view token) const { return lookup_.count(std::string(token)) != 0; }

std::size_t Vocabulary::index(std::string_view token) const {
  auto it = lookup_.find(std::string(token));
  if (it == lookup_.end()) throw VocabError("out-of-vocabulary token '" + std::string(token) + "'");
  return it->second;
}

std::vector<std::size_t> Vocabulary::encode(std::string_view sentence) const {
  std::vector<std::size_t> ids;
  std::istringstream in{std::string(sentence)};
  std::string w;
  while (in >> w) {
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.pop_back();
    if (w.empty()) continue;
    for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    ids.push_back(index(w));
  }
  if (ids.empty()) throw VocabError("sentence has no tokens");
  return ids;
}

}  // namespace tploc::frontends
