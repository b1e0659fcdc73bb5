#include "dicelab/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dicelab/enumeration.hpp"
#include "dicelab/gaussian.hpp"
#include "dicelab/laws.hpp"
#include "dicelab/montecarlo.hpp"
#include "dicelab/word.hpp"

namespace dicelab::cli {

namespace {

using nlohmann::json;

// Help or version requests terminate with a message and exit code 0.
struct ExitWith {
  int code;
  std::string message;
};

json json_int(const BigInt& v) {
  static const BigInt kSafe = BigInt(1) << 53;
  if (v >= -kSafe && v <= kSafe) return v.convert_to<std::int64_t>();
  return v.str();
}

std::string rational_string(const BigRat& v) {
  if (boost::multiprecision::denominator(v) == 1)
    return boost::multiprecision::numerator(v).str();
  return v.str();
}

// Every rational field X lands as X (double) plus X_exact (reduced fraction).
void put_rational(json& object, const std::string& key, const BigRat& v) {
  object[key] = to_double(v);
  object[key + "_exact"] = rational_string(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

bool starts_law_spec(const std::string& s) {
  return s == "uniform" || s.rfind("geometric:", 0) == 0 || s.rfind("finite:", 0) == 0 ||
         s.rfind("blowup:", 0) == 0;
}

// Law specs are comma-separated, but finite laws carry commas themselves;
// a segment that does not start a new spec continues the previous one.
std::vector<std::string> split_law_list(const std::string& text) {
  std::vector<std::string> specs;
  for (auto& segment : split(text, ',')) {
    if (starts_law_spec(segment)) {
      specs.push_back(segment);
    } else if (!specs.empty()) {
      specs.back() += "," + segment;
    } else {
      raise(Errc::invalid_argument, "unknown law: " + segment);
    }
  }
  if (specs.empty()) raise(Errc::invalid_argument, "empty law list");
  return specs;
}

DiceCollection load_dice(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::invalid_argument, "cannot open dice file: " + path);
  json parsed;
  try {
    in >> parsed;
  } catch (const json::exception& e) {
    raise(Errc::invalid_argument, "bad dice file " + path + ": " + e.what());
  }
  if (!parsed.is_array() || parsed.empty())
    raise(Errc::invalid_argument, "dice file must hold an array of face arrays");
  std::vector<std::vector<std::int64_t>> faces;
  for (const auto& die : parsed) {
    if (!die.is_array()) raise(Errc::invalid_argument, "each die must be an array");
    std::vector<std::int64_t> values;
    for (const auto& face : die) {
      if (!face.is_number_integer())
        raise(Errc::invalid_argument, "faces must be integers");
      values.push_back(face.get<std::int64_t>());
    }
    faces.push_back(std::move(values));
  }
  return DiceCollection(std::move(faces));
}

std::vector<Law> resolve_laws(const std::string& text, std::optional<DiceCollection>* dice_out) {
  auto specs = split_law_list(text);
  if (specs.size() == 1 && specs[0].rfind("blowup:", 0) == 0) {
    auto dice = load_dice(specs[0].substr(7));
    auto laws = blow_up_laws(dice);
    if (dice_out) *dice_out = std::move(dice);
    return laws;
  }
  std::vector<Law> laws;
  for (const auto& spec : specs) {
    if (spec.rfind("blowup:", 0) == 0)
      raise(Errc::invalid_argument, "blowup laws cannot be mixed with other laws");
    laws.push_back(Law::parse(spec));
  }
  return laws;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (auto& item : split(text, ',')) {
    try {
      values.push_back(std::stoi(item));
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "bad integer: " + item);
    }
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (auto& item : split(text, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "bad number: " + item);
    }
  }
  return values;
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("DICELAB_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "DICELAB_BUDGET is not a number");
    }
  }
  return kDefaultNodeBudget;
}

json word_payload(const Word& word, bool dense) {
  json out;
  out["letters"] = word.letters();
  out["length"] = json_int(word.length());
  out["word"] = word.to_rle_string();
  json mult = json::array();
  for (const auto& m : word.multiplicities()) mult.push_back(json_int(m));
  out["multiplicities"] = std::move(mult);
  if (dense && word.fits_dense()) out["dense"] = word.to_dense_string();
  if (word.letters() >= 2) out["intransitive"] = is_intransitive(word);
  return out;
}

json coefficient_payload(const CoefficientSet& set) {
  json entries = json::array();
  for (std::size_t k = 0; k < set.pair.size(); ++k) {
    const auto& c = set.pair[k];
    const auto& t = set.triple[k];
    json entry;
    entry["k"] = k + 1;
    put_rational(entry, "p", c.p);
    put_rational(entry, "q", c.q);
    put_rational(entry, "r", c.r);
    put_rational(entry, "s", t.s);
    put_rational(entry, "p_eq", c.p_eq);
    put_rational(entry, "q_eq", c.q_eq);
    put_rational(entry, "r_eq", c.r_eq);
    put_rational(entry, "s_eq", t.s_eq);
    entry["exact"] = c.exact && t.exact;
    entries.push_back(std::move(entry));
  }
  return entries;
}

json moments_payload(const MomentReport& report) {
  json entries = json::array();
  for (std::size_t k = 0; k < report.entries.size(); ++k) {
    const auto& e = report.entries[k];
    json entry;
    entry["k"] = k + 1;
    put_rational(entry, "mean_n", e.mean_n);
    put_rational(entry, "var_n", e.var_n);
    put_rational(entry, "cov_prev_n", e.cov_prev_n);
    put_rational(entry, "mean_e", e.mean_e);
    put_rational(entry, "var_e", e.var_e);
    entry["sigma"] = e.sigma;
    entry["gamma"] = e.gamma;
    entry["exact"] = e.exact;
    entries.push_back(std::move(entry));
  }
  return entries;
}

json simulation_payload(const SimulationReport& r) {
  json out;
  out["trials"] = r.trials;
  out["hits"] = r.hits;
  out["p_hat"] = r.p_hat;
  out["ci95"] = r.ci95;
  out["seed"] = r.seed;
  out["workers"] = r.workers;
  out["elapsed_seconds"] = r.elapsed_seconds;
  out["model"] = r.model;
  out["rng"] = r.rng;
  return out;
}

CovarianceSpec spec_from_flags(const std::string& f_text, const std::string& gamma_text) {
  if (!f_text.empty() && !gamma_text.empty())
    throw UsageError("pass either --f or --gamma, not both");
  if (f_text.empty() && gamma_text.empty())
    throw UsageError("one of --f or --gamma is required");
  if (!f_text.empty()) return structured_gamma(parse_double_list(f_text));
  return covariance_from_gamma(parse_double_list(gamma_text));
}

json execute_check(const CommandRequest& request) {
  Word word = Word::parse(request.positional.at(0));
  json out = word_payload(word, request.flags.count("dense") > 0);
  auto matrix = victories(word);
  json rows = json::array();
  for (int i = 0; i < matrix.letters; ++i) {
    json row = json::array();
    for (int j = 0; j < matrix.letters; ++j) row.push_back(json_int(matrix.at(i, j)));
    rows.push_back(std::move(row));
  }
  out["victories"] = std::move(rows);
  BigInt common;
  const bool equal = word.has_equal_multiplicities(&common);
  out["equal_multiplicities"] = equal;
  out["neutral"] = equal ? json(is_neutral(word)) : json();
  out["q_member"] = equal && word.letters() >= 2 ? json(q_membership(word)) : json();
  return out;
}

json execute_enumerate(int letters, int faces, int workers, std::uint64_t budget) {
  auto report = count_intransitive(letters, faces, workers, budget);
  json out;
  out["letters"] = report.letters;
  out["faces"] = report.faces;
  out["intransitive_count"] = json_int(report.intransitive_count);
  out["total_count"] = json_int(report.total_count);
  out["ratio"] = report.ratio;
  out["delta_l"] = report.delta_l;
  out["elapsed_seconds"] = report.elapsed_seconds;
  out["workers"] = report.workers;
  out["budget"] = budget;
  return out;
}

json execute_construct(const CommandRequest& request) {
  const auto flag = [&](const std::string& name) -> std::string {
    auto it = request.flags.find(name);
    return it == request.flags.end() ? std::string() : it->second;
  };
  const std::string op = flag("op");
  const bool dense = request.flags.count("dense") > 0;
  auto need_word = [&]() {
    if (flag("word").empty()) throw UsageError("--word is required for --op " + op);
    return Word::parse(flag("word"));
  };
  json out;
  out["op"] = op;
  if (op == "dual") {
    out.update(word_payload(dual_word(need_word()), dense));
  } else if (op == "concat") {
    if (flag("word2").empty()) throw UsageError("--word2 is required for --op concat");
    out.update(word_payload(concat(need_word(), Word::parse(flag("word2"))), dense));
  } else if (op == "extend-letter") {
    out.update(word_payload(extend_letter(need_word()), dense));
  } else if (op == "extend-faces") {
    out.update(word_payload(extend_faces(need_word()), dense));
  } else if (op == "special") {
    const std::string letters = flag("letters"), index = flag("index");
    if (letters.empty() || index.empty())
      throw UsageError("--letters and --index are required for --op special");
    out.update(word_payload(special_word(std::stoi(letters), std::stoi(index)), dense));
  } else if (op == "from-dice") {
    if (flag("dice").empty()) throw UsageError("--dice is required for --op from-dice");
    out.update(word_payload(word_from_dice(load_dice(flag("dice"))), dense));
  } else if (op == "to-dice") {
    auto collection = dice_from_word(need_word());
    json dice = json::array();
    for (const auto& die : collection.dice) dice.push_back(die);
    out["dice"] = std::move(dice);
    out["canonical"] = collection.is_canonical();
  } else {
    throw UsageError("unknown --op " + op);
  }
  return out;
}

json execute_coeffs(const CommandRequest& request) {
  const auto flag = [&](const std::string& name) -> std::string {
    auto it = request.flags.find(name);
    return it == request.flags.end() ? std::string() : it->second;
  };
  std::optional<DiceCollection> dice;
  std::vector<Law> laws;
  if (!flag("dice").empty()) {
    dice = load_dice(flag("dice"));
    laws = blow_up_laws(*dice);
  } else if (!flag("laws").empty()) {
    laws = resolve_laws(flag("laws"), &dice);
  } else {
    throw UsageError("one of --laws or --dice is required");
  }

  json out;
  json described = json::array();
  for (const auto& law : laws) described.push_back(law.describe());
  out["laws"] = std::move(described);
  out["coefficients"] = coefficient_payload(coefficient_set(laws));

  if (!flag("faces").empty()) {
    auto config = ModelConfig::from_faces(parse_int_list(flag("faces")), laws);
    out["moments"] = moments_payload(model_moments(config));
  }

  if (dice) {
    json check;
    try {
      auto report = check_blowup_constraint(*dice);
      json indices = json::array();
      json values = json::array();
      for (std::size_t i = 0; i < report.p_half_indices.size(); ++i) {
        indices.push_back(report.p_half_indices[i] + 1);
        json value;
        put_rational(value, "q_plus_r", report.q_plus_r[i]);
        values.push_back(std::move(value));
      }
      check["p_half_indices"] = std::move(indices);
      check["q_plus_r"] = std::move(values);
      check["all_exceed_two_thirds"] = report.all_exceed_two_thirds;
    } catch (const Error& e) {
      check["skipped"] = e.what();
    }
    out["blowup_check"] = std::move(check);
  }
  return out;
}

json execute_sigma(const CommandRequest& request) {
  const auto flag = [&](const std::string& name) -> std::string {
    auto it = request.flags.find(name);
    return it == request.flags.end() ? std::string() : it->second;
  };
  auto spec = spec_from_flags(flag("f"), flag("gamma"));
  auto det = determinant(spec);
  auto kernel = null_vector(spec);
  json out;
  out["gamma"] = spec.gamma;
  out["det_expansion"] = det.value_expansion;
  out["det_lu"] = det.value_lu;
  out["agreement"] = det.agreement;
  out["null_vector"] = kernel.vector;
  out["residual"] = kernel.zero_eigenvalue_residual;
  out["strictly_positive"] = kernel.strictly_positive;
  out["p_sequence"] = kernel.p_sequence;
  return out;
}

json execute_orthant(const CommandRequest& request, double threshold,
                     std::uint64_t samples, std::uint64_t seed) {
  const auto flag = [&](const std::string& name) -> std::string {
    auto it = request.flags.find(name);
    return it == request.flags.end() ? std::string() : it->second;
  };
  auto spec = spec_from_flags(flag("f"), flag("gamma"));
  auto estimate = orthant_probability(spec, threshold, samples, seed);
  json out;
  out["gamma"] = spec.gamma;
  out["threshold"] = estimate.threshold;
  out["samples"] = estimate.samples;
  out["hits"] = estimate.hits;
  out["estimate"] = estimate.estimate;
  out["std_error"] = estimate.std_error;
  out["seed"] = estimate.seed;
  out["workers"] = estimate.workers;
  out["rng"] = estimate.rng;
  return out;
}

}  // namespace

CommandRequest parse(const std::vector<std::string>& args) {
  CommandRequest request;

  CLI::App app{"intransitive dice: exact counting, constructions, covariance "
               "calculus and Monte Carlo"};
  app.name("dicelab");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // inherited by the subcommands, so --format may follow them on the line
  app.fallthrough(true);

  std::string format = "json";
  app.add_option("--format", format, "output format: json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();

  std::string word, word2, op, laws, faces_list, f_list, gamma_list, dice_file;
  int letters = 0, faces = 0, workers = 1, index = 1;
  std::uint64_t budget = default_budget();
  std::uint64_t trials = 0, samples = 1000000, seed = 0;
  double threshold = 0.0;
  bool dense = false, word_ratio = false;

  auto* check = app.add_subcommand("check", "victory matrix and intransitivity of a word");
  check->add_option("word", word, "dense or LETTER^COUNT word")->required();
  check->add_flag("--dense", dense, "include the dense expansion when it fits");

  auto* enumerate =
      app.add_subcommand("enumerate", "exact count of intransitive words");
  enumerate->add_option("--letters", letters, "alphabet size")->required();
  enumerate->add_option("--faces", faces, "faces per die")->required();
  enumerate->add_option("--workers", workers, "parallel workers");
  enumerate->add_option("--budget", budget, "visited-node budget");

  auto* construct = app.add_subcommand("construct", "word constructions");
  construct
      ->add_option("--op", op,
                   "dual | concat | extend-letter | extend-faces | special | "
                   "from-dice | to-dice")
      ->required();
  construct->add_option("--word", word, "input word");
  construct->add_option("--word2", word2, "second input word (concat)");
  construct->add_option("--letters", letters, "alphabet size (special)");
  construct->add_option("--index", index, "construction index (special)");
  construct->add_option("--dice", dice_file, "dice JSON file (from-dice)");
  construct->add_flag("--dense", dense, "include the dense expansion when it fits");

  auto* coeffs = app.add_subcommand("coeffs", "pairwise and triple coefficients");
  coeffs->add_option("--laws", laws, "comma-separated law specs or blowup:file.json");
  coeffs->add_option("--dice", dice_file, "dice JSON file for blow-up laws");
  coeffs->add_option("--faces", faces_list, "die sizes for moment formulas");

  auto* sigma = app.add_subcommand("sigma", "structured covariance analysis");
  sigma->add_option("--f", f_list, "relative die sizes f_1,f_2,...");
  sigma->add_option("--gamma", gamma_list, "coupling coefficients g_1,g_2,...");

  auto* orthant = app.add_subcommand("orthant", "Gaussian orthant probability");
  orthant->add_option("--f", f_list, "relative die sizes f_1,f_2,...");
  orthant->add_option("--gamma", gamma_list, "coupling coefficients g_1,g_2,...");
  orthant->add_option("--threshold", threshold, "orthant threshold")->capture_default_str();
  orthant->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
  orthant->add_option("--seed", seed, "random seed")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "random dice simulation");
  simulate->add_option("--laws", laws, "comma-separated law specs or blowup:file.json");
  simulate->add_option("--faces", faces_list, "die sizes n_1,n_2,...");
  simulate->add_option("--trials", trials, "number of trials")->required();
  simulate->add_option("--seed", seed, "random seed")->capture_default_str();
  simulate->add_option("--workers", workers, "parallel workers");
  simulate->add_flag("--word-ratio", word_ratio, "sample uniform words instead of laws");
  simulate->add_option("--letters", letters, "alphabet size (word-ratio mode)");

  auto* clt = app.add_subcommand("clt", "normalized victory diagnostics");
  clt->add_option("--laws", laws, "comma-separated law specs or blowup:file.json");
  clt->add_option("--faces", faces_list, "die sizes n_1,n_2,...")->required();
  clt->add_option("--trials", trials, "number of trials")->required();
  clt->add_option("--seed", seed, "random seed")->capture_default_str();

  std::vector<std::string> argv_like{"dicelab"};
  argv_like.insert(argv_like.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_like.size());
  for (const auto& arg : argv_like) argv.push_back(arg.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    throw ExitWith{0, app.help()};
  } catch (const CLI::CallForAllHelp& e) {
    throw ExitWith{0, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::CallForVersion&) {
    throw ExitWith{0, std::string(kVersion)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  request.subcommand = app.get_subcommands().front()->get_name();
  request.output_format = format;

  // Echo only what was actually set, in canonical string form.
  auto remember = [&](const char* key, const std::string& value) {
    if (!value.empty()) request.flags[key] = value;
  };
  remember("word", word);
  remember("word2", word2);
  remember("op", op);
  remember("laws", laws);
  remember("faces", faces_list);
  remember("f", f_list);
  remember("gamma", gamma_list);
  remember("dice", dice_file);
  if (request.subcommand == "check") {
    request.positional.push_back(word);
    request.flags.erase("word");
  }
  auto* sub = app.get_subcommands().front();
  auto set = [&](const char* name) {
    const auto* option = sub->get_option_no_throw(std::string("--") + name);
    return option != nullptr && option->count() > 0;
  };
  if (set("letters")) request.flags["letters"] = std::to_string(letters);
  if (request.subcommand == "enumerate" && set("faces"))
    request.flags["faces"] = std::to_string(faces);
  if (set("index")) request.flags["index"] = std::to_string(index);
  if (set("workers") || request.subcommand == "enumerate" ||
      request.subcommand == "simulate")
    request.flags["workers"] = std::to_string(workers);
  if (request.subcommand == "enumerate") request.flags["budget"] = std::to_string(budget);
  if (set("trials") || trials > 0) request.flags["trials"] = std::to_string(trials);
  if (request.subcommand == "orthant") {
    request.flags["samples"] = std::to_string(samples);
    request.flags["threshold"] = std::to_string(threshold);
  }
  if (request.subcommand == "orthant" || request.subcommand == "simulate" ||
      request.subcommand == "clt")
    request.flags["seed"] = std::to_string(seed);
  if (dense) request.flags["dense"] = "true";
  if (word_ratio) request.flags["word-ratio"] = "true";
  return request;
}

CommandReport execute(const CommandRequest& request) {
  const auto started = std::chrono::steady_clock::now();
  const auto flag = [&](const std::string& name) -> std::string {
    auto it = request.flags.find(name);
    return it == request.flags.end() ? std::string() : it->second;
  };
  const auto int_flag = [&](const std::string& name, int fallback) {
    const std::string value = flag(name);
    return value.empty() ? fallback : std::stoi(value);
  };
  const auto u64_flag = [&](const std::string& name, std::uint64_t fallback) {
    const std::string value = flag(name);
    return value.empty() ? fallback : std::stoull(value);
  };
  const auto double_flag = [&](const std::string& name, double fallback) {
    const std::string value = flag(name);
    return value.empty() ? fallback : std::stod(value);
  };

  CommandReport report;
  report.request = request;

  if (request.subcommand == "check") {
    report.payload = execute_check(request);
  } else if (request.subcommand == "enumerate") {
    report.payload = execute_enumerate(int_flag("letters", 0), int_flag("faces", 0),
                                       int_flag("workers", 1),
                                       u64_flag("budget", default_budget()));
  } else if (request.subcommand == "construct") {
    report.payload = execute_construct(request);
  } else if (request.subcommand == "coeffs") {
    report.payload = execute_coeffs(request);
  } else if (request.subcommand == "sigma") {
    report.payload = execute_sigma(request);
  } else if (request.subcommand == "orthant") {
    report.payload = execute_orthant(request, double_flag("threshold", 0.0),
                                     u64_flag("samples", 1000000), u64_flag("seed", 0));
  } else if (request.subcommand == "simulate") {
    if (flag("faces").empty()) throw UsageError("--faces is required");
    if (request.flags.count("word-ratio")) {
      if (flag("letters").empty())
        throw UsageError("--word-ratio needs --letters and a single --faces value");
      auto faces = parse_int_list(flag("faces"));
      if (faces.size() != 1)
        throw UsageError("--word-ratio needs a single --faces value");
      auto sim = estimate_uniform_word_ratio(int_flag("letters", 0), faces[0],
                                             u64_flag("trials", 0), u64_flag("seed", 0));
      report.payload = simulation_payload(sim);
    } else {
      if (flag("laws").empty()) throw UsageError("--laws is required");
      auto laws = resolve_laws(flag("laws"), nullptr);
      auto faces = parse_int_list(flag("faces"));
      auto config = ModelConfig::from_faces(std::move(faces), std::move(laws));
      auto sim = estimate_intransitivity(config, u64_flag("trials", 0),
                                         u64_flag("seed", 0), int_flag("workers", 1));
      report.payload = simulation_payload(sim);
    }
  } else if (request.subcommand == "clt") {
    if (flag("laws").empty()) throw UsageError("--laws is required");
    auto laws = resolve_laws(flag("laws"), nullptr);
    auto config = ModelConfig::from_faces(parse_int_list(flag("faces")), std::move(laws));
    auto diag = clt_diagnostics(config, u64_flag("trials", 0), u64_flag("seed", 0));
    json out;
    out["trials"] = diag.trials;
    out["seed"] = diag.seed;
    out["empirical_mean"] = diag.empirical_mean;
    out["empirical_var"] = diag.empirical_var;
    out["empirical_corr"] = diag.empirical_corr;
    out["theoretical"] = diag.theoretical;
    out["max_abs_deviation"] = diag.max_abs_deviation;
    out["rng"] = diag.rng;
    report.payload = out;
  } else {
    throw UsageError("unknown subcommand: " + request.subcommand);
  }

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

namespace {

std::string scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

void flatten(const json& value, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (value.is_object()) {
    for (const auto& [key, child] : value.items())
      flatten(child, prefix.empty() ? key : prefix + "." + key, out);
  } else if (value.is_array()) {
    std::size_t i = 0;
    for (const auto& child : value) flatten(child, prefix + "[" + std::to_string(i++) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(value));
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string render(const CommandReport& report) {
  if (report.request.output_format == "json") {
    json flags = json::object();
    for (const auto& [key, value] : report.request.flags) flags[key] = value;
    json envelope;
    envelope["request"] = {{"subcommand", report.request.subcommand},
                           {"flags", std::move(flags)},
                           {"positional", report.request.positional},
                           {"format", report.request.output_format}};
    envelope["payload"] = report.payload;
    envelope["version"] = report.version;
    envelope["wall_time_seconds"] = report.wall_time_seconds;
    return envelope.dump(2);
  }
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(report.payload, "", cells);
  if (report.request.output_format == "csv") {
    std::string header, row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) {
        header += ',';
        row += ',';
      }
      header += csv_escape(cells[i].first);
      row += csv_escape(cells[i].second);
    }
    return header + "\n" + row;
  }
  std::string text;
  for (const auto& [key, value] : cells) text += key + ": " + value + "\n";
  text += "(" + report.version + ", " +
          std::to_string(report.wall_time_seconds) + "s)";
  return text;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    auto request = parse(args);
    auto report = execute(request);
    std::cout << render(report) << std::endl;
    return 0;
  } catch (const ExitWith& exit_request) {
    std::cout << exit_request.message << std::endl;
    return exit_request.code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "run `dicelab --help` for the command list" << std::endl;
    return 2;
  } catch (const Error& e) {
    json error = {{"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}};
    std::cout << error.dump(2) << std::endl;
    std::cerr << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    json error = {{"error", {{"code", "InternalError"}, {"message", e.what()}}}};
    std::cout << error.dump(2) << std::endl;
    std::cerr << e.what() << std::endl;
    return 1;
  }
}

}  // namespace dicelab::cli
