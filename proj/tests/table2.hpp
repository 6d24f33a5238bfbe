#pragma once

// Published selection for a 35-patient multiple myeloma expansion cohort:
// relevance, normalized weight and utility, each printed to 3 decimals.

#include <array>

namespace table2 {

struct Row {
  const char* item;
  double relevance;
  double weight;
  double utility;
};

inline constexpr std::array<Row, 16> kRows{{
    {"Chills", 1.000, 0.050, 0.987},
    {"Hair loss", 1.000, 0.011, 0.983},
    {"Decreased appetite", 1.000, 0.028, 0.985},
    {"Cough", 1.000, 0.077, 0.990},
    {"Mouth/throat sores", 0.932, 0.017, 0.935},
    {"Watery eyes", 1.000, 0.022, 0.984},
    {"Blurred vision", 1.000, 0.099, 0.992},
    {"Bruising", 1.000, 0.028, 0.985},
    {"Insomnia", 1.000, 0.017, 0.984},
    {"Diarrhea", 1.000, 0.055, 0.988},
    {"Nosebleed", 1.000, 0.017, 0.984},
    {"Rash", 1.000, 0.022, 0.984},
    {"Dizziness", 1.000, 0.011, 0.983},
    {"Urinary urgency", 1.000, 0.011, 0.983},
    {"Shortness of breath", 1.000, 0.033, 0.985},
    {"Joint pain", 1.000, 0.028, 0.985},
}};

}  // namespace table2
