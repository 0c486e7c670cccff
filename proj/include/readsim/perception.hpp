#pragma once

#include <cstddef>
#include <vector>

#include "readsim/corpus.hpp"
#include "readsim/random.hpp"

namespace readsim {

// Gaussian acuity falloff around the fixated letter with a chance floor.
struct AcuityModel {
  double sigma = 3.0;
  double p_floor = 1.0 / 26.0;
  std::size_t span_left = 3;
  std::size_t span_right = 8;

  void validate() const;
};

struct LetterObservation {
  std::size_t letter_offset = 0;
  char observed_letter = 'a';
  double eccentricity = 0.0;
};

// p_floor + (1 - p_floor) * exp(-e^2 / (2 sigma^2)).
double identification_probability(double eccentricity, const AcuityModel& model);

// Letter slots within the perceptual span, excluding separators. Throws
// InvalidFixation if `fixation_offset` is outside the letter line.
std::vector<std::size_t> visible_letters(std::size_t fixation_offset, const AnnotatedText& text,
                                         const AcuityModel& model);

// One noisy sample of every visible letter: the true letter with probability
// p_id(e), otherwise a uniform draw from the remaining alphabet letters.
std::vector<LetterObservation> sample_observation(std::size_t fixation_offset,
                                                  const AnnotatedText& text,
                                                  const AcuityModel& model, Rng& rng,
                                                  std::string_view alphabet = kDefaultAlphabet);

// Probability of observing `observed` when the true letter is `truth`.
double observation_likelihood(char observed, char truth, double eccentricity,
                              const AcuityModel& model, std::size_t alphabet_size = 26);

}  // namespace readsim
