#pragma once

#include <array>
#include <limits>

namespace onlinetrial {

// Published reference results for the seven-arm prostate-cancer platform
// trial replay: rejection sets and the level that would apply to an eighth
// hypothesis, for target levels 0.025 / 0.05 / 0.1.  A missing level (the
// offline step-up comparator has no online level) is stored as NaN.
struct GoldenRow {
  const char* algorithm;                  // roster label
  std::array<const char*, 3> rejected;    // rendered sets, "--" when empty
  std::array<double, 3> alpha8;
};

struct GoldenTable {
  bool swapped_first_pair;  // first two hypotheses exchanged
  std::array<GoldenRow, 11> rows;
};

namespace detail {
inline double no_level() { return std::numeric_limits<double>::quiet_NaN(); }
}  // namespace detail

inline const GoldenTable& golden_default_order() {
  static const GoldenTable table{
      false,
      {{
          {"uncorrected", {"C, E, G", "C, E, G", "C, E, G"}, {0.0250, 0.0500, 0.1000}},
          {"bonferroni", {"G", "G", "G"}, {0.0013, 0.0025, 0.0050}},
          {"addis_spending", {"G", "G", "G"}, {0.0005, 0.0011, 0.0021}},
          {"bh",
           {"C, G", "C, G", "C, E, G"},
           {detail::no_level(), detail::no_level(), detail::no_level()}},
          {"addis", {"--", "G", "G"}, {0.0003, 0.0016, 0.0031}},
          {"saffron", {"G", "C, G", "C, E, G"}, {0.0041, 0.0165, 0.0412}},
          {"lord", {"--", "--", "--"}, {0.0001, 0.0002, 0.0003}},
          {"lond", {"G", "G", "G"}, {0.0025, 0.0050, 0.0100}},
          {"batch_bh", {"G", "C, G", "C, E, G"}, {0.0019, 0.0057, 0.0151}},
          {"batch_prds", {"G", "C, G", "C, E, G"}, {0.0019, 0.0057, 0.0151}},
          {"batch_stbh", {"C, G", "C, E, G", "C, E, G"}, {0.0381, 0.1015, 0.1238}},
      }}};
  return table;
}

inline const GoldenTable& golden_swapped_order() {
  static const GoldenTable table{
      true,
      {{
          {"uncorrected", {"C, E, G", "C, E, G", "C, E, G"}, {0.0250, 0.0500, 0.1000}},
          {"bonferroni", {"G", "G", "G"}, {0.0013, 0.0025, 0.0050}},
          {"addis_spending", {"G", "C, G", "C, G"}, {0.0005, 0.0011, 0.0021}},
          {"bh",
           {"C, G", "C, G", "C, E, G"},
           {detail::no_level(), detail::no_level(), detail::no_level()}},
          {"addis", {"--", "G", "C, G"}, {0.0003, 0.0016, 0.0062}},
          {"saffron", {"G", "C, G", "C, E, G"}, {0.0041, 0.0165, 0.0412}},
          {"lord", {"--", "--", "--"}, {0.0001, 0.0002, 0.0003}},
          {"lond", {"G", "G", "G"}, {0.0025, 0.0050, 0.0100}},
          {"batch_bh", {"G", "C, G", "C, E, G"}, {0.0019, 0.0057, 0.0151}},
          {"batch_prds", {"G", "C, G", "C, E, G"}, {0.0019, 0.0057, 0.0151}},
          {"batch_stbh", {"C, G", "C, E, G", "C, E, G"}, {0.0381, 0.1015, 0.1238}},
      }}};
  return table;
}

}  // namespace onlinetrial
