#pragma once

#include <cstdint>
#include <vector>

#include "msihar/errors.hpp"

namespace msihar {

// Unweighted mean of per-class F1 over the classes present in truth.
// A class with zero precision or recall denominator scores 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

double binary_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                 int positive_class);

// Per class: seeded shuffle, then deal round-robin across folds. Folds
// partition the indices and stay within one sample of perfect class balance.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& y,
                                                       int k,
                                                       std::uint64_t seed);

}  // namespace msihar
