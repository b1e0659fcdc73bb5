#include "dicelab/word.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

namespace dicelab {

namespace {

std::string letter_name(int letter) {
  if (letter < 0 || letter >= 26)
    raise(Errc::too_large, "text form supports alphabets up to 26 letters");
  return std::string(1, char('A' + letter));
}

}  // namespace

Word::Word(int letters, std::vector<Run> runs) : letters_(letters) {
  if (letters < 1) raise(Errc::invalid_argument, "alphabet must have at least one letter");
  mult_.assign(std::size_t(letters), BigInt(0));
  runs_.reserve(runs.size());
  for (auto& run : runs) {
    if (run.letter < 0 || run.letter >= letters)
      raise(Errc::invalid_argument, "run letter out of range");
    if (run.count < 0) raise(Errc::invalid_argument, "negative run length");
    if (run.count == 0) continue;
    mult_[std::size_t(run.letter)] += run.count;
    if (!runs_.empty() && runs_.back().letter == run.letter) {
      runs_.back().count += run.count;
    } else {
      runs_.push_back(std::move(run));
    }
  }
}

Word Word::from_dense(std::string_view text, int letters) {
  std::vector<Run> runs;
  int max_letter = -1;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c < 'A' || c > 'Z')
      raise(Errc::invalid_argument, "dense words use uppercase letters A..Z");
    int letter = c - 'A';
    max_letter = std::max(max_letter, letter);
    if (!runs.empty() && runs.back().letter == letter)
      runs.back().count += 1;
    else
      runs.push_back({letter, 1});
  }
  if (max_letter < 0 && letters == 0)
    raise(Errc::invalid_argument, "empty word with unspecified alphabet");
  int alphabet = std::max(letters, max_letter + 1);
  return Word(alphabet, std::move(runs));
}

Word Word::parse(std::string_view text, int letters) {
  if (text.find('^') == std::string_view::npos) return from_dense(text, letters);
  std::vector<Run> runs;
  int max_letter = -1;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    auto caret = token.find('^');
    if (caret != 1 || token.size() < 3 || token[0] < 'A' || token[0] > 'Z')
      raise(Errc::invalid_argument, "RLE token must look like C^5764801: " + token);
    int letter = token[0] - 'A';
    max_letter = std::max(max_letter, letter);
    BigInt count;
    if (!parse_decimal(token.substr(2), count))
      raise(Errc::invalid_argument, "bad run length in token: " + token);
    if (count <= 0) raise(Errc::invalid_argument, "run length must be positive: " + token);
    runs.push_back({letter, std::move(count)});
  }
  if (max_letter < 0) raise(Errc::invalid_argument, "no RLE tokens found");
  int alphabet = std::max(letters, max_letter + 1);
  return Word(alphabet, std::move(runs));
}

BigInt Word::length() const {
  BigInt total = 0;
  for (const auto& m : mult_) total += m;
  return total;
}

bool Word::has_equal_multiplicities(BigInt* common) const {
  for (const auto& m : mult_)
    if (m != mult_.front()) return false;
  if (common) *common = mult_.front();
  return true;
}

std::string Word::to_rle_string() const {
  std::string out;
  for (const auto& run : runs_) {
    if (!out.empty()) out += ' ';
    out += letter_name(run.letter);
    out += '^';
    out += run.count.str();
  }
  return out;
}

bool Word::fits_dense() const { return length() <= kMaxDenseLetters; }

std::string Word::to_dense_string() const {
  if (!fits_dense())
    raise(Errc::too_large, "word has more than " + std::to_string(kMaxDenseLetters) +
                               " letters; use the RLE form");
  std::string out;
  out.reserve(std::size_t(length().convert_to<std::int64_t>()));
  for (const auto& run : runs_) {
    std::string name = letter_name(run.letter);
    for (BigInt i = 0; i < run.count; ++i) out += name;
  }
  return out;
}

DiceCollection::DiceCollection(std::vector<std::vector<std::int64_t>> faces)
    : dice(std::move(faces)) {
  if (dice.empty()) raise(Errc::invalid_argument, "a collection needs at least one die");
  for (auto& die : dice) {
    if (die.empty()) raise(Errc::invalid_argument, "every die needs at least one face");
    std::sort(die.begin(), die.end());
  }
}

std::int64_t DiceCollection::total_faces() const {
  std::int64_t total = 0;
  for (const auto& die : dice) total += std::int64_t(die.size());
  return total;
}

bool DiceCollection::is_canonical() const {
  std::vector<std::int64_t> all;
  all.reserve(std::size_t(total_faces()));
  for (const auto& die : dice) all.insert(all.end(), die.begin(), die.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] != std::int64_t(i) + 1) return false;
  return true;
}

Word word_from_dice(const DiceCollection& collection) {
  const int letters = int(collection.count());
  std::vector<std::pair<std::int64_t, int>> faces;  // (value, die)
  faces.reserve(std::size_t(collection.total_faces()));
  for (int k = 0; k < letters; ++k)
    for (std::int64_t value : collection.dice[std::size_t(k)]) faces.push_back({value, k});
  std::sort(faces.begin(), faces.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 1; i < faces.size(); ++i)
    if (faces[i].first == faces[i - 1].first)
      raise(Errc::duplicate_face,
            "face value " + std::to_string(faces[i].first) + " appears twice");
  std::vector<Run> runs;
  for (const auto& [value, die] : faces) {
    (void)value;
    if (!runs.empty() && runs.back().letter == die)
      runs.back().count += 1;
    else
      runs.push_back({die, 1});
  }
  return Word(letters, std::move(runs));
}

DiceCollection dice_from_word(const Word& word) {
  if (!word.fits_dense())
    raise(Errc::too_large, "word too long to materialize as a dice collection");
  const std::int64_t total = word.length().convert_to<std::int64_t>();
  std::vector<std::vector<std::int64_t>> dice(std::size_t(word.letters()));
  std::int64_t position = 0;  // 0-based; position i holds face value total - i
  for (const auto& run : word.runs()) {
    const std::int64_t len = run.count.convert_to<std::int64_t>();
    for (std::int64_t i = 0; i < len; ++i, ++position)
      dice[std::size_t(run.letter)].push_back(total - position);
  }
  for (auto& die : dice)
    if (die.empty())
      raise(Errc::invalid_argument, "word does not use every letter of its alphabet");
  return DiceCollection(std::move(dice));
}

VictoryMatrix victories(const Word& word) {
  const int letters = word.letters();
  VictoryMatrix m;
  m.letters = letters;
  m.data.assign(std::size_t(letters) * letters, BigInt(0));
  std::vector<BigInt> seen(std::size_t(letters), BigInt(0));  // letters placed so far
  for (const auto& run : word.runs()) {
    const int j = run.letter;
    for (int i = 0; i < letters; ++i) {
      if (i == j || seen[std::size_t(i)] == 0) continue;
      m.at(i, j) += seen[std::size_t(i)] * run.count;
    }
    seen[std::size_t(j)] += run.count;
  }
  return m;
}

std::vector<BigInt> cyclic_victories(const Word& word) {
  const int letters = word.letters();
  std::vector<BigInt> n(std::size_t(letters), BigInt(0));
  std::vector<BigInt> seen(std::size_t(letters), BigInt(0));
  for (const auto& run : word.runs()) {
    const int j = run.letter;
    const int pred = (j + letters - 1) % letters;
    if (pred != j) n[std::size_t(pred)] += seen[std::size_t(pred)] * run.count;
    seen[std::size_t(j)] += run.count;
  }
  return n;  // n[k] = N_{k,k+1}
}

CompareResult compare_dice(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) raise(Errc::invalid_argument, "dice must be nonempty");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  CompareResult r;
  std::size_t lt = 0, le = 0;  // #b-faces < / <= current a-face
  for (double face : sa) {
    while (lt < sb.size() && sb[lt] < face) ++lt;
    if (le < lt) le = lt;
    while (le < sb.size() && sb[le] <= face) ++le;
    r.wins += std::int64_t(lt);
    r.ties += std::int64_t(le - lt);
  }
  r.losses = std::int64_t(sa.size()) * std::int64_t(sb.size()) - r.wins - r.ties;
  // wins > n_a n_b / 2 - ties / 2 is exactly wins > losses.
  if (r.wins > r.losses)
    r.verdict = Verdict::a_better;
  else if (r.losses > r.wins)
    r.verdict = Verdict::b_better;
  else
    r.verdict = Verdict::neither;
  return r;
}

bool is_intransitive(const Word& word) {
  const int letters = word.letters();
  if (letters < 2) raise(Errc::invalid_argument, "intransitivity needs at least two letters");
  const auto n = cyclic_victories(word);
  const auto& mult = word.multiplicities();
  for (int k = 0; k < letters; ++k) {
    const int next = (k + 1) % letters;
    if (2 * n[std::size_t(k)] <= mult[std::size_t(k)] * mult[std::size_t(next)]) return false;
  }
  return true;
}

Word dual_word(const Word& word) {
  std::vector<Run> runs(word.runs().rbegin(), word.runs().rend());
  return Word(word.letters(), std::move(runs));
}

Word concat(const Word& w1, const Word& w2) {
  if (w1.letters() != w2.letters())
    raise(Errc::alphabet_mismatch, "cannot concatenate words over different alphabets");
  std::vector<Run> runs = w1.runs();
  runs.insert(runs.end(), w2.runs().begin(), w2.runs().end());
  return Word(w1.letters(), std::move(runs));
}

bool is_neutral(const Word& word) {
  if (!word.has_equal_multiplicities())
    raise(Errc::unequal_multiplicities, "neutrality is defined for equal multiplicities");
  const auto m = victories(word);
  for (int i = 0; i < m.letters; ++i)
    for (int j = i + 1; j < m.letters; ++j)
      if (m.at(i, j) != m.at(j, i)) return false;
  return true;
}

Word extend_letter(const Word& word) {
  const int old_last = word.letters() - 1;
  const int fresh = word.letters();
  if (word.multiplicities()[std::size_t(old_last)] > kMaxDenseLetters)
    raise(Errc::too_large,
          "extending the last letter would materialize more runs than supported");
  std::vector<Run> runs;
  for (const auto& run : word.runs()) {
    if (run.letter != old_last) {
      runs.push_back(run);
      continue;
    }
    const std::int64_t len = run.count.convert_to<std::int64_t>();
    for (std::int64_t i = 0; i < len; ++i) {
      runs.push_back({old_last, 1});
      runs.push_back({fresh, 1});
    }
  }
  return Word(word.letters() + 1, std::move(runs));
}

Word extend_faces(const Word& word) {
  if (!word.has_equal_multiplicities())
    raise(Errc::unequal_multiplicities, "face extension is defined for equal multiplicities");
  const int letters = word.letters();
  // S S* with S = 1,2,...,l; the middle runs merge into one double run.
  std::vector<Run> runs;
  for (int i = 0; i < letters; ++i) runs.push_back({i, 1});
  for (int i = letters - 1; i >= 0; --i) runs.push_back({i, 1});
  Word neutral_prefix(letters, std::move(runs));
  return concat(neutral_prefix, word);
}

Word special_word(int letters, int index) {
  if (letters < 3) raise(Errc::invalid_argument, "the construction needs at least 3 letters");
  if (index < 1) raise(Errc::invalid_argument, "index must be at least 1");
  const BigInt t = BigInt(8) * index * index * index;
  const BigInt t7 = boost::multiprecision::pow(t, 7);
  const BigInt t12 = boost::multiprecision::pow(t, 12);
  const BigInt half = t12 / 2;
  std::vector<Run> runs;
  runs.push_back({letters - 1, t7});
  runs.push_back({0, half});
  runs.push_back({1, t12 - t7});
  for (int letter = 2; letter <= letters - 2; ++letter) runs.push_back({letter, t12});
  runs.push_back({letters - 1, t12 - t7});
  runs.push_back({0, half});
  runs.push_back({1, t7});
  return Word(letters, std::move(runs));
}

bool q_membership(const Word& word) {
  BigInt n;
  if (!word.has_equal_multiplicities(&n))
    raise(Errc::unequal_multiplicities, "the Q set is defined for equal multiplicities");
  const auto victories_k = cyclic_victories(word);
  const BigInt n2 = n * n;
  const BigInt bound = 2 * n2 * n + n2;  // 2n^3 + n^2
  for (const auto& nk : victories_k) {
    const BigInt twice = 2 * nk;
    if (twice >= n2) continue;
    const BigInt deficit = n2 - twice;
    if (2 * deficit * deficit >= bound) return false;
  }
  return true;
}

}  // namespace dicelab
