#include "tvbound/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tvbound/numeric.hpp"

namespace tvbound {

namespace {

struct LineReader {
  std::istream& in;
  std::string label;
  std::size_t line_number = 0;

  // next content line, skipping blanks and comments; false at end of input
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_number;
      tokens.clear();
      std::istringstream split(line);
      std::string tok;
      while (split >> tok) {
        if (tok.front() == '#') break;
        tokens.push_back(tok);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw std::runtime_error(label + ":" + std::to_string(line_number) + ": " +
                             message);
  }
};

double parse_probability(const std::string& token, LineReader& reader) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    reader.fail("cannot parse probability '" + token + "'");
  }
  return value;
}

std::vector<double> parse_row(const std::vector<std::string>& tokens,
                              std::size_t expected, LineReader& reader,
                              const std::string& what) {
  if (tokens.size() != expected) {
    reader.fail(what + ": expected " + std::to_string(expected) +
                " probabilities, got " + std::to_string(tokens.size()));
  }
  std::vector<double> row;
  row.reserve(expected);
  for (const auto& tok : tokens) row.push_back(parse_probability(tok, reader));
  return row;
}

ProbMeasure parse_measure(const AtomSpace& space,
                          const std::vector<std::string>& tokens,
                          LineReader& reader, const std::string& what) {
  auto row = parse_row(tokens, space.size(), reader, what);
  try {
    return ProbMeasure(space, std::move(row));
  } catch (const std::invalid_argument& e) {
    reader.fail(what + ": " + e.what());
  }
}

}  // namespace

KernelSequence load_kernel_sequence(std::istream& in,
                                    const std::string& label) {
  LineReader reader{in, label};
  std::vector<std::string> tokens;

  if (!reader.next(tokens)) reader.fail("empty file, expected 'states K'");
  if (tokens.size() != 2 || tokens[0] != "states") {
    reader.fail("expected 'states K'");
  }
  std::size_t states = 0;
  try {
    states = std::stoul(tokens[1]);
  } catch (const std::exception&) {
    reader.fail("cannot parse state count '" + tokens[1] + "'");
  }
  if (states == 0) reader.fail("state count must be positive");
  const AtomSpace space = AtomSpace::range(states);

  if (!reader.next(tokens)) reader.fail("expected 'initial' line");
  if (tokens.empty() || tokens[0] != "initial") {
    reader.fail("expected 'initial' line");
  }
  tokens.erase(tokens.begin());
  ProbMeasure initial = parse_measure(space, tokens, reader, "initial measure");

  std::vector<KernelStep> steps;
  std::size_t expected_step = 1;
  std::size_t history_count = states;
  while (reader.next(tokens)) {
    if (tokens.size() != 3 || tokens[0] != "step") {
      reader.fail("expected 'step I markov' or 'step I full'");
    }
    std::size_t index = 0;
    try {
      index = std::stoul(tokens[1]);
    } catch (const std::exception&) {
      reader.fail("cannot parse step index '" + tokens[1] + "'");
    }
    if (index != expected_step) {
      reader.fail("expected step " + std::to_string(expected_step) +
                  ", found step " + std::to_string(index));
    }
    const std::string& kind = tokens[2];
    std::size_t rows = 0;
    StepKind step_kind;
    if (kind == "markov") {
      step_kind = StepKind::markov;
      rows = states;
    } else if (kind == "full") {
      step_kind = StepKind::full_history;
      rows = history_count;
    } else {
      reader.fail("unknown step kind '" + kind + "'");
    }

    AtomSpace source = space;
    if (step_kind == StepKind::full_history) {
      std::vector<AtomSpace> factors(expected_step, space);
      source = product_space(factors);
    }
    std::vector<ProbMeasure> measures;
    measures.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!reader.next(tokens)) {
        reader.fail("step " + std::to_string(index) + ": expected " +
                    std::to_string(rows) + " rows, got " + std::to_string(r));
      }
      measures.push_back(parse_measure(
          space, tokens, reader,
          "step " + std::to_string(index) + " row '" +
              source.label(static_cast<std::uint32_t>(r)) + "'"));
    }
    steps.push_back(
        KernelStep{FiniteKernel(std::move(source), space, std::move(measures)),
                   step_kind});
    history_count *= states;
    ++expected_step;
  }

  return KernelSequence(std::move(initial), std::move(steps));
}

KernelSequence load_kernel_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open kernel table '" + path + "'");
  }
  return load_kernel_sequence(in, path);
}

std::pair<KernelSequence, KernelSequence> load_table_chain(
    const std::string& nominal_path, const std::string& perturbed_path) {
  KernelSequence nominal = load_kernel_sequence(nominal_path);
  KernelSequence perturbed = load_kernel_sequence(perturbed_path);
  if (nominal.step_count() != perturbed.step_count()) {
    throw std::runtime_error(
        "kernel tables disagree on the horizon: '" + nominal_path + "' has " +
        std::to_string(nominal.step_count()) + " steps, '" + perturbed_path +
        "' has " + std::to_string(perturbed.step_count()));
  }
  if (!compatible(nominal, perturbed, nominal.step_count())) {
    throw std::runtime_error("kernel tables disagree on the state space");
  }
  return {std::move(nominal), std::move(perturbed)};
}

void save_kernel_sequence(const KernelSequence& sequence,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write kernel table '" + path + "'");
  }
  const std::size_t states = sequence.component_space(0).size();
  out << "states " << states << "\n";
  out << "initial";
  for (double w : sequence.initial().weights()) {
    out << " " << format_double(w);
  }
  out << "\n";
  for (std::size_t k = 1; k <= sequence.step_count(); ++k) {
    const KernelStep& step = sequence.step(k);
    out << "step " << k
        << (step.kind == StepKind::markov ? " markov" : " full") << "\n";
    for (std::uint32_t r = 0; r < step.kernel.source_size(); ++r) {
      bool first = true;
      for (double w : step.kernel.row(r).weights()) {
        if (!first) out << " ";
        out << format_double(w);
        first = false;
      }
      out << "\n";
    }
  }
}

}  // namespace tvbound
