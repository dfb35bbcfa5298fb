#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "tcdiff/analytic.hpp"
#include "tcdiff/grid.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"

namespace tcdiff {

// Where a set of fields came from; metrics warn when comparing sets whose
// resolutions were reached differently (native vs projected), since the
// Nyquist-free projection changes high-frequency content.
enum class Provenance : std::uint32_t { Native = 0, Projected = 1, Generated = 2, Test = 3 };

struct SampleSet {
  int n = 0;
  Provenance prov = Provenance::Test;
  std::vector<GridField> fields;
};

// Two-component equal-weight mixture with shared covariance Q and means
// Q^(1/2) f_i for the ramps f_1(y) = y_2 and f_2(y) = 1 - y_1 on the unit
// square (single-channel analogue of the velocity/vorticity pairing).
GmmData make_two_ramp_gmm(const PriorSpec& q, int n);

// Component means at a coarser resolution; exact because projection commutes
// with Q^(1/2) on the retained modes.
GmmData condition_gmm(const GmmData& data, int target_n);

SampleSet gmm_sample(const GmmData& data, const PriorSpec& q, int count,
                     RngStream& rng);

// IDX-format MNIST images: validates the 0x00000803 magic, scales to [0,1]
// and zero-pads 28x28 to 32x32 centered. limit < 0 loads everything.
SampleSet load_mnist_idx(const std::string& images_path, int limit = -1);
// Label file (magic 0x00000801), aligned with load_mnist_idx order.
std::vector<std::uint8_t> load_mnist_labels(const std::string& labels_path,
                                            int limit = -1);

// Project (or zero-pad) every field to target_n. Identity when target_n is
// the set's resolution; otherwise the result is tagged Projected.
SampleSet condition_resolution(const SampleSet& set, int target_n);

// Flat little-endian binary cache with a versioned header.
void save_sample_set(const SampleSet& set, const std::string& path);
SampleSet load_sample_set(const std::string& path);

}  // namespace tcdiff
