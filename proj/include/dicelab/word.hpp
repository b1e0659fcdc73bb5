#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dicelab/bigint.hpp"
#include "dicelab/errors.hpp"

namespace dicelab {

/// Largest word that may be materialized letter by letter (dense form,
/// dice_from_word, extend_letter inflation). Run-length-encoded words have
/// no size limit.
inline constexpr std::int64_t kMaxDenseLetters = 1 << 24;

/// One maximal run of a single letter. Letters are 0-based indices into the
/// alphabet; counts are exact integers so that constructions with ~10^10
/// letters stay representable.
struct Run {
  int letter = 0;
  BigInt count = 0;

  bool operator==(const Run& other) const {
    return letter == other.letter && count == other.count;
  }
};

/// A word over an alphabet of `letters()` labels, stored as maximal runs.
/// Reading a dice collection top face down yields such a word; all victory
/// counting is done directly on the runs.
class Word {
 public:
  /// Normalizes on construction: drops empty runs, merges adjacent runs of
  /// the same letter, validates letter indices.
  Word(int letters, std::vector<Run> runs);

  /// Dense text, e.g. "ABCCABBCA". Alphabet defaults to the largest letter
  /// used; pass `letters` to embed into a bigger alphabet.
  static Word from_dense(std::string_view text, int letters = 0);

  /// Accepts either dense text or whitespace-separated `LETTER^COUNT`
  /// tokens ("C^5764801 A^34359738368 ...").
  static Word parse(std::string_view text, int letters = 0);

  int letters() const { return letters_; }
  const std::vector<Run>& runs() const { return runs_; }

  /// Per-letter totals n_1..n_l.
  const std::vector<BigInt>& multiplicities() const { return mult_; }
  BigInt length() const;

  /// True when all letters occur equally often; the common count is stored
  /// in `common` when given.
  bool has_equal_multiplicities(BigInt* common = nullptr) const;

  std::string to_rle_string() const;
  /// Throws TooLarge beyond kMaxDenseLetters.
  std::string to_dense_string() const;
  bool fits_dense() const;

  bool operator==(const Word& other) const = default;

 private:
  int letters_;
  std::vector<Run> runs_;
  std::vector<BigInt> mult_;
};

/// l dice as face lists, kept sorted ascending. Repeated faces are legal in
/// general (blow-up inputs); the canonical no-tie form is required only by
/// the operations that say so.
struct DiceCollection {
  std::vector<std::vector<std::int64_t>> dice;

  explicit DiceCollection(std::vector<std::vector<std::int64_t>> faces);

  std::size_t count() const { return dice.size(); }
  std::int64_t total_faces() const;

  /// Faces are exactly [1..total] with no repeats, each die strictly
  /// increasing.
  bool is_canonical() const;
};

/// Full matrix of victory counts: entry (i,j) is the number of face pairs
/// where die i shows more than die j, i.e. letter-i occurrences left of
/// letter-j occurrences. Diagonal is zero by convention.
struct VictoryMatrix {
  int letters = 0;
  std::vector<BigInt> data;  // row-major, letters x letters

  const BigInt& at(int i, int j) const { return data[std::size_t(i) * letters + j]; }
  BigInt& at(int i, int j) { return data[std::size_t(i) * letters + j]; }
};

enum class Verdict { a_better, b_better, neither };

struct CompareResult {
  std::int64_t wins = 0;    // pairs with a-face > b-face
  std::int64_t losses = 0;  // pairs with a-face < b-face
  std::int64_t ties = 0;
  Verdict verdict = Verdict::neither;
};

/// Reads the faces of all dice in decreasing order; position i of the word
/// names the die holding the i-th largest face (face value total..1 in
/// canonical collections). Throws DuplicateFace when any two faces, from any
/// dice, coincide.
Word word_from_dice(const DiceCollection& collection);

/// Inverse of word_from_dice onto the canonical collection on [1..total].
/// Dense materialization only; throws TooLarge beyond kMaxDenseLetters.
DiceCollection dice_from_word(const Word& word);

/// All N_{i,j} from the run-length form in O(runs * letters) exact integer
/// operations.
VictoryMatrix victories(const Word& word);

/// Victory counts N_k = N_{k,k+1} along the fixed cyclic order only
/// (index arithmetic mod letters).
std::vector<BigInt> cyclic_victories(const Word& word);

/// Pairwise comparison of two face lists; ties are allowed and split half
/// weight, so the verdict reduces to wins vs losses.
CompareResult compare_dice(const std::vector<double>& a, const std::vector<double>& b);

/// Strict test 2*N_k > n_k*n_{k+1} for every cyclic pair; ties in strength
/// break the cycle.
bool is_intransitive(const Word& word);

/// The word read backwards; swaps N_{i,j} with N_{j,i}.
Word dual_word(const Word& word);

/// Concatenation with boundary-run merge. Requires equal alphabets.
Word concat(const Word& w1, const Word& w2);

/// Every ordered pair of dice beats each other equally often. Requires equal
/// multiplicities (which forces them to be even).
bool is_neutral(const Word& word);

/// Appends a fresh letter after every occurrence of the current last letter,
/// mapping intransitive words over l letters to intransitive words over l+1.
Word extend_letter(const Word& word);

/// Prepends the neutral word S S* with S = letter sequence 1..l, growing all
/// multiplicities by 2 and preserving intransitivity in both directions.
Word extend_faces(const Word& word);

/// The six-plus-run construction with t = 8k^3 and n = t^12 letters per die:
/// intransitive with margin 2N_k - n^2 >= t^19 on every cyclic pair.
Word special_word(int letters, int index);

/// Membership in the almost-intransitive set: N_k above
/// n^2/2 - sqrt(n^3(1+1/2n))/2 for every k, decided by the exact integer
/// comparison 2(n^2-2N_k)^2 < 2n^3 + n^2 (boundary equality fails).
bool q_membership(const Word& word);

}  // namespace dicelab
