#include "readsim/perception.hpp"

#include <cmath>
#include <string>

#include "readsim/errors.hpp"

namespace readsim {

void AcuityModel::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("perception.sigma", "must be > 0");
  if (!(p_floor > 0.0 && p_floor <= 1.0)) throw ConfigError("perception.p_floor", "must be in (0,1]");
}

double identification_probability(double eccentricity, const AcuityModel& model) {
  const double falloff = std::exp(-eccentricity * eccentricity / (2.0 * model.sigma * model.sigma));
  return model.p_floor + (1.0 - model.p_floor) * falloff;
}

double observation_likelihood(char observed, char truth, double eccentricity,
                              const AcuityModel& model, std::size_t alphabet_size) {
  const double p = identification_probability(eccentricity, model);
  if (observed == truth) return p;
  return (1.0 - p) / static_cast<double>(alphabet_size - 1);
}

std::vector<std::size_t> visible_letters(std::size_t fixation_offset, const AnnotatedText& text,
                                         const AcuityModel& model) {
  const auto& line = text.letter_line;
  if (fixation_offset >= line.size()) {
    throw InvalidFixation("fixation " + std::to_string(fixation_offset) + " outside letter line of length " +
                          std::to_string(line.size()));
  }
  const std::size_t first = fixation_offset >= model.span_left ? fixation_offset - model.span_left : 0;
  const std::size_t last = std::min(line.size() - 1, fixation_offset + model.span_right);
  std::vector<std::size_t> slots;
  slots.reserve(last - first + 1);
  for (std::size_t slot = first; slot <= last; ++slot) {
    if (line[slot] != ' ') slots.push_back(slot);
  }
  return slots;
}

std::vector<LetterObservation> sample_observation(std::size_t fixation_offset,
                                                  const AnnotatedText& text,
                                                  const AcuityModel& model, Rng& rng,
                                                  std::string_view alphabet) {
  const auto slots = visible_letters(fixation_offset, text, model);
  std::vector<LetterObservation> out;
  out.reserve(slots.size());
  std::uniform_int_distribution<std::size_t> other(0, alphabet.size() - 2);
  for (const auto slot : slots) {
    const char truth = text.letter_line[slot];
    const double e = std::abs(static_cast<double>(slot) - static_cast<double>(fixation_offset));
    LetterObservation obs{slot, truth, e};
    if (uniform01(rng) >= identification_probability(e, model)) {
      const auto truth_index = alphabet.find(truth);
      auto k = other(rng);
      if (truth_index != std::string_view::npos && k >= truth_index) ++k;
      obs.observed_letter = alphabet[k];
    }
    out.push_back(obs);
  }
  return out;
}

}  // namespace readsim
